"""Compare the compiled and pure-Python tokenize/count kernels.

    python3 benchmarks/bench_kernels.py [--emails 5000] [--repeat 3]

Reports per-kernel throughput and end-to-end ``assess_email`` latency with
each backend swapped in.
"""
import argparse
import random
import sys
import timeit

from email_profiler import _kernels_py, kernels
from email_profiler.config import default_config
from email_profiler.ingest import EmailDocument
from email_profiler.orchestrator import assess_email
from email_profiler.textprep import load_stopwords

try:
    from email_profiler import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

VOCAB = (
    "the account urgent please review attached report payment meeting team schedule update your "
    "information verify immediately customer service thank regards reward delivery order invoice "
    "project deadline quarterly results limited offer click link security password expires "
    "Café naïve 24/7 e-mail re: fw: $100 50% off!!!"
).split()


def corpus(n, seed=0):
    rng = random.Random(seed)
    senders = ["alice@org.au", "noreply@shop.com", "attacker@evil.net", "info@ato.gov.au"]
    for i in range(n):
        body = " ".join(rng.choice(VOCAB) for _ in range(180))[:1024]
        subject = " ".join(rng.choice(VOCAB) for _ in range(5))
        yield EmailDocument(rng.choice(senders), "bob@org.au", subject, body, f"bench:{i}")


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def run(n, repeat):
    docs = list(corpus(n))
    stop = load_stopwords().words
    cfg = default_config()
    scarcity = cfg.lexicons["scarcity"].entries
    backends = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    if not _kernels_c:
        print("compiled extension not built; only the fallback is measured", file=sys.stderr)

    texts = [d.body for d in docs]
    token_lists = [_kernels_py.tokenize(t, stop) for t in texts]
    results = {}
    print(f"{n} emails, ~1 KB bodies, best of {repeat}")
    print(f"{'backend':<8} {'tokenize us/email':>18} {'count us/email':>15} {'assess ms/email':>16}")
    for name, mod in backends:
        tok = best(lambda: [mod.tokenize(t, stop) for t in texts], repeat)
        cnt = best(lambda: [mod.count_hits(ts, scarcity) for ts in token_lists], repeat)
        saved = kernels.tokenize, kernels.count_hits
        kernels.tokenize, kernels.count_hits = mod.tokenize, mod.count_hits
        try:
            e2e = best(lambda: [assess_email(d, cfg) for d in docs], repeat)
        finally:
            kernels.tokenize, kernels.count_hits = saved
        results[name] = (tok, cnt, e2e)
        print(f"{name:<8} {tok / n * 1e6:>18.2f} {cnt / n * 1e6:>15.3f} {e2e / n * 1e3:>16.4f}")

    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(
            f"speedup  {py[0] / cy[0]:>17.2f}x {py[1] / cy[1]:>14.2f}x {py[2] / cy[2]:>15.2f}x"
        )
    # both backends must agree before their timings mean anything
    if _kernels_c:
        assert all(_kernels_c.tokenize(t, stop) == tl for t, tl in zip(texts, token_lists))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--emails", type=int, default=5000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    run(args.emails, args.repeat)


if __name__ == "__main__":
    main()
