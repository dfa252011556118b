"""Shared text primitives: token counting, keyword extraction, similarity.

Everything here is deterministic and dependency-free so that every layer
(concept state, topic classification, warm-store lookup, benchmarking)
agrees on the same counts and the same keyword sets.
"""

from __future__ import annotations

import re

# Closed-class words plus conversational filler that carries no topic signal.
STOPWORDS = frozenset(
    """
    a an the and or but if then than so of to in on at by for with about into
    over after before under again further once here there when where why how
    all each both more most other some such any few this that these those
    is are was were be been being am do does did doing have has had having
    will would shall should can could may might must ought
    it its he she they them him his her hers their theirs our ours your yours
    my mine me we us you i who whom which what whose
    not no nor only own same too very just also as from up down out off
    please thanks thank hey hi hello okay yes
    way earlier later now today yesterday tomorrow
    """.split()
)

_WORD_RE = re.compile(r"[a-z0-9]+")


def count_tokens(text: str) -> int:
    """Number of maximal runs of non-whitespace characters."""
    return len(text.split())


def normalize_instruction(text: str) -> str:
    """Lowercase, collapse whitespace, strip terminal punctuation."""
    lowered = " ".join(text.lower().split())
    return lowered.rstrip(".!?…")


def _stem(token: str) -> str:
    # Cheap plural folding so "breeds" and "breed" land on the same keyword.
    if len(token) >= 4 and token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    return token


def keywords(text: str) -> set[str]:
    """Topic keywords: lowercase alphanumeric tokens, plural-folded,
    length >= 3, minus stopwords."""
    out: set[str] = set()
    for raw in _WORD_RE.findall(text.lower()):
        if raw in STOPWORDS:
            continue
        token = _stem(raw)
        if len(token) >= 3 and token not in STOPWORDS:
            out.add(token)
    return out


def keyword_similarity(query: set[str], reference: set[str]) -> float:
    """Fraction of query keywords present in the reference set.

    Query containment rather than symmetric Jaccard: reference sets grow
    with concept age, which would dilute a symmetric score below any
    usable threshold, while the question "is this instruction about that
    topic" only depends on how much of the instruction the topic covers.
    Empty query scores 0.
    """
    if not query:
        return 0.0
    return len(query & reference) / len(query)
