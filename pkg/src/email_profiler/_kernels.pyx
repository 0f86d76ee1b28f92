# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled tokenizer and hit counter.

Behaviour must match ``_kernels_py`` exactly; the test suite checks both
against each other.
"""
from cpython.unicode cimport Py_UNICODE_ISALNUM


def tokenize(str text, stopwords):
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t start
    cdef list out = []
    cdef str tok
    while i < n:
        if not Py_UNICODE_ISALNUM(text[i]):
            i += 1
            continue
        start = i
        while i < n and Py_UNICODE_ISALNUM(text[i]):
            i += 1
        # lowercasing can change length, so measure afterwards
        if i - start < 2:
            continue
        tok = text[start:i].lower()
        if len(tok) > 2 and tok not in stopwords:
            out.append(tok)
    return out


def count_hits(list tokens, entries):
    cdef Py_ssize_t n = 0
    cdef object tok
    for tok in tokens:
        if tok in entries:
            n += 1
    return n
