import pytest
from hypothesis import given, strategies as st

from email_profiler.cognitive import (
    LEXICON_NAMES,
    CognitiveScore,
    Lexicon,
    LexiconError,
    assess_cognition,
    count_lexicon_hits,
    load_lexicon,
)
from email_profiler.textprep import normalize_text


def write(tmp_path, *lines):
    p = tmp_path / "lex.txt"
    p.write_text("\n".join(lines) + "\n")
    return p


def test_load_normalizes(tmp_path, stopwords):
    lex = load_lexicon(write(tmp_path, "Immediately", "URGENT"), "scarcity", stopwords)
    assert lex.entries == {"immediately", "urgent"}


def test_load_stopword_only_fails(tmp_path, stopwords):
    with pytest.raises(LexiconError):
        load_lexicon(write(tmp_path, "in"), "scarcity", stopwords)


def test_load_dedups(tmp_path, stopwords):
    assert load_lexicon(write(tmp_path, "reward", "reward"), "monetary", stopwords).entries == {"reward"}


def test_load_drops_entries_that_vanish(tmp_path, stopwords, caplog):
    lex = load_lexicon(write(tmp_path, "reward", "in", "ab"), "monetary", stopwords)
    assert lex.entries == {"reward"}
    assert "normalize away" in caplog.text


def test_unknown_lexicon_name():
    with pytest.raises(LexiconError):
        Lexicon("greed", frozenset({"money"}))


def test_bundled_lexicons_survive_normalization(config, stopwords):
    for name in LEXICON_NAMES:
        lex = config.lexicons[name]
        assert lex.entries
        for entry in lex.entries:
            assert normalize_text(entry, stopwords) == [entry]
            assert count_lexicon_hits(normalize_text(entry, stopwords), lex) >= 1


def test_count_multiplicity():
    lex = Lexicon("scarcity", frozenset({"immediately"}))
    assert count_lexicon_hits(["reply", "immediately", "immediately"], lex) == 2


def test_count_empty():
    assert count_lexicon_hits([], Lexicon("scarcity", frozenset({"urgent"}))) == 0


def test_monetary_examples(config, stopwords):
    tokens = normalize_text("millionaire reward payment", stopwords)
    assert count_lexicon_hits(tokens, config.lexicons["monetary"]) == 3


def test_empty_email_scores_zero(config):
    assert assess_cognition([], [], config.lexicons).total == 0


def test_scarcity_sentence(config, stopwords):
    body = "Your account will be shut down immediately if you do not reply within 24 hours"
    score = assess_cognition([], normalize_text(body, stopwords), config.lexicons)
    # shut, immediately
    assert score == CognitiveScore(scarcity=2)
    assert score.total >= 1


def test_consistency_sentence(config, stopwords):
    body = (
        "You have previously agreed to terms and conditions, please continue to follow them. "
        "Click here to unflag your account"
    )
    score = assess_cognition([], normalize_text(body, stopwords), config.lexicons)
    # previously, agreed, terms, conditions, continue, unflag
    assert score == CognitiveScore(consistency=6)


def test_subject_and_body_both_count():
    lexicons = {
        "scarcity": Lexicon("scarcity", frozenset({"urgent"})),
        "consistency": Lexicon("consistency", frozenset({"agreed"})),
        "monetary": Lexicon("monetary", frozenset({"reward"})),
    }
    assert assess_cognition(["reward"], ["reward"], lexicons).total == 2


def test_total_is_sum():
    s = CognitiveScore(1, 2, 3)
    assert s.total == 6
    assert s.to_dict() == {"scarcity": 1, "consistency": 2, "monetary": 3, "total": 6}


WORDS = st.sampled_from(["urgent", "reward", "agreed", "hello", "account", "cash", "limited", "team"])


@given(st.lists(WORDS, max_size=30), st.lists(WORDS, max_size=30))
def test_additive_over_body_pieces(config, a, b):
    whole = assess_cognition([], a + b, config.lexicons).total
    assert whole == assess_cognition([], a, config.lexicons).total + assess_cognition([], b, config.lexicons).total


@given(st.lists(WORDS, max_size=30), WORDS)
def test_monotone_when_appending(config, body, extra):
    assert assess_cognition([], body + [extra], config.lexicons).total >= assess_cognition([], body, config.lexicons).total


@given(st.lists(WORDS, max_size=30))
def test_zero_iff_no_hits(config, body):
    every = set().union(*(lex.entries for lex in config.lexicons.values()))
    total = assess_cognition([], body, config.lexicons).total
    assert (total == 0) == (not any(t in every for t in body))
