"""Explicit and implicit persona construction and selection strategies.

Personas are built exclusively from an author's claims in train-split
discussions (the leakage rule). Explicit personas are capped claim lists
chosen at random, by BM25 similarity to the parent claim (dynamic), or by
BM25 dissimilarity (negative). Implicit personas summarize each train
discussion the author touched as the thesis text plus pro/con counts of
their claims' propagated stance toward that thesis.
"""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass
from typing import Sequence

from . import bm25
from .corpus import CON, PRO, Claim, Corpus, Discussion, path_to_root
from .errors import IsThesis, UnknownAuthor
from .ingest import TRAIN, SplitAssignment

DEFAULT_CAP = 5
DEFAULT_BUCKET_THRESHOLD = 5

STRATEGY_RANDOM = "random"
STRATEGY_DYNAMIC = "dynamic"
STRATEGY_NEGATIVE = "negative"

SEP = " [SEP] "

NO_PERSONA = "NoPersona"
SMALL_PERSONA = "SmallPersona"
BIG_PERSONA = "BigPersona"


@dataclass(frozen=True)
class ExplicitPersona:
    author_id: str
    selected_claims: tuple[str, ...]  # claim texts, selection order preserved
    selected_ids: tuple[str, ...]
    strategy: str
    cap: int


@dataclass(frozen=True)
class ThesisStanceSummary:
    discussion_id: str
    thesis_text: str
    pro_count: int
    con_count: int


@dataclass(frozen=True)
class ImplicitPersona:
    author_id: str
    entries: tuple[ThesisStanceSummary, ...]


def bucket_of(pool_size: int, threshold: int = DEFAULT_BUCKET_THRESHOLD) -> str:
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    if pool_size == 0:
        return NO_PERSONA
    if pool_size < threshold:
        return SMALL_PERSONA
    return BIG_PERSONA


def explicit_pool(
    corpus: Corpus, split: SplitAssignment, author_id: str
) -> list[Claim]:
    """The author's claims in train-assigned discussions, by claim_id."""
    if author_id not in corpus.author_index:
        raise UnknownAuthor(f"author {author_id!r} not in corpus")
    pool = []
    for claim_id in corpus.author_index[author_id]:
        claim = corpus.claim(claim_id)
        if split.split_of(claim.discussion_id) == TRAIN:
            pool.append(claim)
    return pool


def _author_rng(seed: int, author_id: str) -> random.Random:
    # stable across runs and platforms, unlike hash()
    digest = hashlib.sha256(f"{seed}|{author_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def select_random(
    pool: Sequence[Claim], cap: int = DEFAULT_CAP, seed: int = 0
) -> ExplicitPersona:
    """Uniform sample without replacement of up to cap claims; sampling
    order is preserved in the serialization."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    author = pool[0].author_id if pool else ""
    if len(pool) <= cap:
        chosen = list(pool)
    else:
        chosen = _author_rng(seed, author).sample(list(pool), cap)
    return ExplicitPersona(
        author,
        tuple(c.text for c in chosen),
        tuple(c.claim_id for c in chosen),
        STRATEGY_RANDOM,
        cap,
    )


def _select_by_similarity(
    pool: Sequence[Claim], parent_claim_text: str, cap: int, descending: bool
) -> list[Claim]:
    if len(pool) < 2:
        return list(pool)
    index = bm25.build_index([(c.claim_id, c.text) for c in pool])
    ranked = bm25.rank(index, parent_claim_text, descending=descending)
    by_id = {c.claim_id: c for c in pool}
    return [by_id[doc_id] for doc_id, _ in ranked[:cap]]


def select_dynamic(
    pool: Sequence[Claim], parent_claim_text: str, cap: int = DEFAULT_CAP
) -> ExplicitPersona:
    """The cap most BM25-similar pool claims for query = parent claim,
    ordered by descending score (ties by claim_id)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    chosen = _select_by_similarity(pool, parent_claim_text, cap, descending=True)
    author = pool[0].author_id if pool else ""
    return ExplicitPersona(
        author,
        tuple(c.text for c in chosen),
        tuple(c.claim_id for c in chosen),
        STRATEGY_DYNAMIC,
        cap,
    )


def select_negative(
    pool: Sequence[Claim], parent_claim_text: str, cap: int = DEFAULT_CAP
) -> ExplicitPersona:
    """As select_dynamic but the least similar claims, ascending score."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    chosen = _select_by_similarity(pool, parent_claim_text, cap, descending=False)
    author = pool[0].author_id if pool else ""
    return ExplicitPersona(
        author,
        tuple(c.text for c in chosen),
        tuple(c.claim_id for c in chosen),
        STRATEGY_NEGATIVE,
        cap,
    )


def propagate_stance(discussion: Discussion, claim_id: str) -> str:
    """Pro/con stance toward the thesis by parity of con edges on the
    claim's root path; the claim's own label is the first edge."""
    path = path_to_root(discussion, claim_id)
    if len(path) == 1:
        raise IsThesis(f"claim {claim_id!r} is the thesis")
    con_edges = sum(1 for claim in path[:-1] if claim.stance_label == CON)
    return PRO if con_edges % 2 == 0 else CON


def implicit_persona(
    corpus: Corpus, split: SplitAssignment, author_id: str
) -> ImplicitPersona:
    """One entry per train discussion the author contributed non-thesis
    claims to, with pro/con counts of their propagated stances."""
    if author_id not in corpus.author_index:
        raise UnknownAuthor(f"author {author_id!r} not in corpus")
    counts: dict[str, list[int]] = {}
    for claim_id in corpus.author_index[author_id]:
        claim = corpus.claim(claim_id)
        if split.split_of(claim.discussion_id) != TRAIN or claim.is_thesis:
            continue
        discussion = corpus.discussions[claim.discussion_id]
        stance = propagate_stance(discussion, claim_id)
        pair = counts.setdefault(claim.discussion_id, [0, 0])
        pair[0 if stance == PRO else 1] += 1
    entries = tuple(
        ThesisStanceSummary(
            did,
            corpus.discussions[did].thesis.text,
            counts[did][0],
            counts[did][1],
        )
        for did in sorted(counts)
    )
    return ImplicitPersona(author_id, entries)


def serialize_explicit(persona: ExplicitPersona) -> str:
    return SEP.join(persona.selected_claims)


def serialize_implicit(persona: ImplicitPersona) -> str:
    return SEP.join(
        f"pro: {e.pro_count} - con: {e.con_count} - text: {e.thesis_text}"
        for e in persona.entries
    )


_IMPLICIT_ENTRY_RE = re.compile(r"^pro: (\d+) - con: (\d+) - text: (.*)$", re.DOTALL)


def parse_implicit(serialized: str) -> list[tuple[int, int, str]]:
    """Inverse of serialize_implicit: (pro_count, con_count, thesis_text)
    triples. Thesis texts containing the separator are not recoverable."""
    if not serialized:
        return []
    out = []
    for chunk in serialized.split(SEP):
        match = _IMPLICIT_ENTRY_RE.match(chunk)
        if match is None:
            raise ValueError(f"bad implicit persona entry {chunk!r}")
        out.append((int(match.group(1)), int(match.group(2)), match.group(3)))
    return out
