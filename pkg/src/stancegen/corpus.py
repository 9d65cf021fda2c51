"""Immutable data model for discussion trees, claims, and corpus statistics.

A discussion is a rooted tree: the root carries the thesis, every other
claim is labeled pro or con toward its direct parent. All types here are
frozen after construction, so they can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import (
    CycleDetected,
    DanglingParent,
    DuplicateClaimId,
    EmptyCorpus,
    MultipleTheses,
    NoThesis,
    UnknownClaim,
)

PRO = "pro"
CON = "con"
THESIS = "thesis"
STANCE_LABELS = (PRO, CON, THESIS)


@dataclass(frozen=True)
class Claim:
    """One node of a discussion tree."""

    claim_id: str
    discussion_id: str
    author_id: str
    parent_id: Optional[str]
    text: str
    stance_label: str

    def __post_init__(self):
        if self.stance_label not in STANCE_LABELS:
            raise ValueError(f"bad stance_label {self.stance_label!r}")
        if (self.parent_id is None) != (self.stance_label == THESIS):
            raise ValueError(
                f"claim {self.claim_id}: stance_label {self.stance_label!r} "
                f"inconsistent with parent_id {self.parent_id!r}"
            )
        if not self.text.strip():
            raise ValueError(f"claim {self.claim_id}: empty text")

    @property
    def is_thesis(self) -> bool:
        return self.parent_id is None


@dataclass(frozen=True)
class Discussion:
    """A validated discussion tree; use build_discussion to construct."""

    discussion_id: str
    thesis: Claim
    claims: Mapping[str, Claim]
    _depths: Mapping[str, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.claims)

    def depth_of(self, claim_id: str) -> int:
        if claim_id not in self._depths:
            raise UnknownClaim(f"{claim_id!r} not in discussion {self.discussion_id}")
        return self._depths[claim_id]

    @property
    def max_depth(self) -> int:
        return max(self._depths.values())


def build_discussion(raw_claims: Iterable[Claim]) -> Discussion:
    """Assemble and validate a Discussion from an unordered claim list.

    The result is independent of input order. Raises NoThesis,
    MultipleTheses, DuplicateClaimId, DanglingParent, or CycleDetected
    when the claims do not form a single rooted tree.
    """
    claims = {}
    discussion_id = None
    for claim in raw_claims:
        if discussion_id is None:
            discussion_id = claim.discussion_id
        elif claim.discussion_id != discussion_id:
            raise ValueError(
                f"mixed discussion ids {discussion_id!r} and {claim.discussion_id!r}"
            )
        if claim.claim_id in claims:
            raise DuplicateClaimId(f"duplicate claim_id {claim.claim_id!r}")
        claims[claim.claim_id] = claim
    if discussion_id is None:
        raise NoThesis("empty claim list")

    roots = [c for c in claims.values() if c.is_thesis]
    if not roots:
        raise NoThesis(f"discussion {discussion_id}: no thesis claim")
    if len(roots) > 1:
        ids = sorted(c.claim_id for c in roots)
        raise MultipleTheses(f"discussion {discussion_id}: theses {ids}")
    thesis = roots[0]

    # Depth assignment doubles as the connectivity/acyclicity check: any
    # claim whose parent chain never reaches the thesis is in a cycle.
    depths: dict[str, int] = {thesis.claim_id: 0}
    for claim in claims.values():
        chain = []
        cursor = claim
        while cursor.claim_id not in depths:
            chain.append(cursor)
            parent_id = cursor.parent_id
            if parent_id not in claims:
                raise DanglingParent(
                    f"claim {cursor.claim_id}: parent {parent_id!r} not in discussion"
                )
            cursor = claims[parent_id]
            if len(chain) > len(claims):
                raise CycleDetected(f"discussion {discussion_id}: cycle at {claim.claim_id}")
        base = depths[cursor.claim_id]
        for offset, node in enumerate(reversed(chain), start=1):
            depths[node.claim_id] = base + offset

    return Discussion(discussion_id, thesis, dict(claims), depths)


def path_to_root(discussion: Discussion, claim_id: str) -> list[Claim]:
    """Claims from claim_id up to the thesis, inclusive on both ends."""
    if claim_id not in discussion.claims:
        raise UnknownClaim(f"{claim_id!r} not in discussion {discussion.discussion_id}")
    path = []
    cursor = discussion.claims[claim_id]
    while True:
        path.append(cursor)
        if cursor.is_thesis:
            return path
        cursor = discussion.claims[cursor.parent_id]


@dataclass(frozen=True)
class Corpus:
    discussions: Mapping[str, Discussion]
    author_index: Mapping[str, tuple[str, ...]]

    def claim(self, claim_id: str) -> Claim:
        for d in self.discussions.values():
            if claim_id in d.claims:
                return d.claims[claim_id]
        raise UnknownClaim(f"{claim_id!r} not in corpus")

    def all_claims(self) -> Iterable[Claim]:
        for did in sorted(self.discussions):
            d = self.discussions[did]
            for cid in sorted(d.claims):
                yield d.claims[cid]


def build_corpus(discussions: Iterable[Discussion]) -> Corpus:
    by_id = {}
    seen_claims = {}
    author_index: dict[str, list[str]] = {}
    for d in discussions:
        if d.discussion_id in by_id:
            raise DuplicateClaimId(f"duplicate discussion_id {d.discussion_id!r}")
        by_id[d.discussion_id] = d
        for cid, claim in d.claims.items():
            if cid in seen_claims:
                raise DuplicateClaimId(
                    f"claim_id {cid!r} appears in discussions "
                    f"{seen_claims[cid]!r} and {d.discussion_id!r}"
                )
            seen_claims[cid] = d.discussion_id
            author_index.setdefault(claim.author_id, []).append(cid)
    return Corpus(
        dict(by_id),
        {a: tuple(sorted(cids)) for a, cids in author_index.items()},
    )


@dataclass(frozen=True)
class CorpusStats:
    """Descriptive corpus statistics; std deviations are population (÷N)."""

    discussion_count: int
    unique_claim_count: int
    claims_per_discussion_mean: float
    claims_per_discussion_std: float
    max_depth_per_discussion_mean: float
    max_depth_per_discussion_std: float
    author_count: int
    claims_per_author_min: int
    claims_per_author_max: int

    std_definition = "population (divide by N)"

    def to_dict(self) -> dict:
        return {
            "discussion_count": self.discussion_count,
            "unique_claim_count": self.unique_claim_count,
            "claims_per_discussion_mean": self.claims_per_discussion_mean,
            "claims_per_discussion_std": self.claims_per_discussion_std,
            "max_depth_per_discussion_mean": self.max_depth_per_discussion_mean,
            "max_depth_per_discussion_std": self.max_depth_per_discussion_std,
            "author_count": self.author_count,
            "claims_per_author_min": self.claims_per_author_min,
            "claims_per_author_max": self.claims_per_author_max,
            "std_definition": self.std_definition,
        }


def _mean_std(values: list[float]) -> tuple[float, float]:
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(var)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    if not corpus.discussions:
        raise EmptyCorpus("corpus has no discussions")
    sizes = [float(len(d)) for d in corpus.discussions.values()]
    depths = [float(d.max_depth) for d in corpus.discussions.values()]
    size_mean, size_std = _mean_std(sizes)
    depth_mean, depth_std = _mean_std(depths)
    per_author = [len(cids) for cids in corpus.author_index.values()]
    return CorpusStats(
        discussion_count=len(corpus.discussions),
        unique_claim_count=int(sum(sizes)),
        claims_per_discussion_mean=size_mean,
        claims_per_discussion_std=size_std,
        max_depth_per_discussion_mean=depth_mean,
        max_depth_per_discussion_std=depth_std,
        author_count=len(corpus.author_index),
        claims_per_author_min=min(per_author),
        claims_per_author_max=max(per_author),
    )
