"""Pure-Python tokenizer and hit counter (fallback for the compiled kernel)."""
import re

# [^\W_] is exactly str.isalnum() per character
_WORD = re.compile(r"[^\W_]+")


def tokenize(text, stopwords):
    out = []
    for raw in _WORD.findall(text):
        tok = raw.lower()
        if len(tok) > 2 and tok not in stopwords:
            out.append(tok)
    return out


def count_hits(tokens, entries):
    n = 0
    for tok in tokens:
        if tok in entries:
            n += 1
    return n
