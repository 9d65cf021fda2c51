"""Corpus file parsing and the stratified train/validation/test split.

The interchange format is JSON lines: a versioned header object on the
first line, then one claim record per line with string fields claim_id,
discussion_id, author_id, parent_id (null for the thesis), text, and
stance_label in {"pro", "con", "thesis"}. Records of one discussion must
be contiguous so parsing stays streaming (memory proportional to a single
discussion plus the author index).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Union

from .corpus import Claim, Corpus, build_corpus, build_discussion
from .errors import (
    EmptyCorpus,
    FractionOutOfRange,
    MalformedRecord,
    MissingField,
)

CORPUS_FORMAT = "stancegen-claims"
CORPUS_VERSION = 1

TRAIN = "train"
VALIDATION = "validation"
TEST = "test"
SPLITS = (TRAIN, VALIDATION, TEST)

REQUIRED_FIELDS = ("claim_id", "discussion_id", "author_id", "text", "stance_label")


def corpus_header() -> str:
    return json.dumps({"format": CORPUS_FORMAT, "version": CORPUS_VERSION})


def _iter_lines(stream: Union[IO, Iterable[str], Iterable[bytes]]) -> Iterable[str]:
    for raw in stream:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        yield raw


def parse_corpus(stream, synthesize_missing_authors: bool = False) -> Corpus:
    """Parse the canonical claim-record stream into a validated Corpus.

    Records missing author_id are rejected unless
    synthesize_missing_authors is set, in which case each such claim gets
    a fresh synthetic author derived from its claim_id.
    """
    lines = _iter_lines(stream)
    header = None
    line_no = 0
    for line in lines:
        line_no += 1
        if line.strip():
            header = (line_no, line)
            break
    if header is None:
        raise EmptyCorpus("empty corpus stream")
    try:
        head = json.loads(header[1])
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"bad header: {exc.msg}", header[0]) from None
    if not isinstance(head, dict) or head.get("format") != CORPUS_FORMAT:
        raise MalformedRecord(
            f"first line must be a header with format={CORPUS_FORMAT!r}", header[0]
        )

    discussions = []
    finished_ids = set()
    current_id = None
    pending: list[Claim] = []

    def finish():
        if pending:
            discussions.append(build_discussion(pending))
            finished_ids.add(current_id)
            pending.clear()

    for line in lines:
        line_no += 1
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(exc.msg, line_no) from None
        if not isinstance(record, dict):
            raise MalformedRecord("record is not an object", line_no)
        for fieldname in REQUIRED_FIELDS:
            if record.get(fieldname) in (None, ""):
                if fieldname == "author_id" and synthesize_missing_authors:
                    continue
                raise MissingField(fieldname, line_no)
        if "parent_id" not in record:
            raise MissingField("parent_id", line_no)
        author = record.get("author_id")
        if author in (None, ""):
            author = f"__anon__{record['claim_id']}"
        try:
            claim = Claim(
                claim_id=str(record["claim_id"]),
                discussion_id=str(record["discussion_id"]),
                author_id=str(author),
                parent_id=None if record["parent_id"] is None else str(record["parent_id"]),
                text=str(record["text"]),
                stance_label=str(record["stance_label"]),
            )
        except ValueError as exc:
            raise MalformedRecord(str(exc), line_no) from None
        if claim.discussion_id != current_id:
            if claim.discussion_id in finished_ids:
                raise MalformedRecord(
                    f"discussion {claim.discussion_id!r} records are not contiguous",
                    line_no,
                )
            finish()
            current_id = claim.discussion_id
        pending.append(claim)
    finish()

    if not discussions:
        raise EmptyCorpus("corpus stream has a header but no records")
    return build_corpus(discussions)


def parse_corpus_file(path, **kwargs) -> Corpus:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_corpus(fh, **kwargs)


def write_corpus(corpus: Corpus, fh: IO[str]) -> None:
    fh.write(corpus_header() + "\n")
    for claim in corpus.all_claims():
        fh.write(
            json.dumps(
                {
                    "claim_id": claim.claim_id,
                    "discussion_id": claim.discussion_id,
                    "author_id": claim.author_id,
                    "parent_id": claim.parent_id,
                    "text": claim.text,
                    "stance_label": claim.stance_label,
                },
                ensure_ascii=False,
            )
            + "\n"
        )


@dataclass(frozen=True)
class SplitAssignment:
    """Discussion-level split; all claims of a discussion share one split."""

    assignment: Mapping[str, str]
    seed: int
    val_fraction: float
    test_fraction: float
    strata_spec: str

    def split_of(self, discussion_id: str) -> str:
        return self.assignment[discussion_id]

    def discussions_in(self, split: str) -> list[str]:
        return sorted(d for d, s in self.assignment.items() if s == split)

    def counts(self) -> dict[str, int]:
        out = {s: 0 for s in SPLITS}
        for s in self.assignment.values():
            out[s] += 1
        return out


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5))


def _quartile_boundaries(sizes: list[int]) -> list[int]:
    """Nearest-rank quartiles: q_k = sorted[ceil(k/4 * N) - 1]."""
    ordered = sorted(sizes)
    n = len(ordered)
    return [ordered[max(0, math.ceil(k * n / 4) - 1)] for k in (1, 2, 3)]


def stratified_split(
    corpus: Corpus, val_fraction: float, test_fraction: float, seed: int
) -> SplitAssignment:
    """Split discussions into train/validation/test, stratified by size.

    Strata are the four quartile bins of per-discussion claim count.
    Within each stratum, round(fraction * stratum_size) discussions go to
    validation and test (round half away from zero), sampled without
    replacement by a Mersenne Twister shuffle seeded from `seed`; the rest
    go to train. Deterministic for fixed (corpus, fractions, seed).
    """
    if val_fraction < 0 or test_fraction < 0 or val_fraction + test_fraction >= 1:
        raise FractionOutOfRange(
            f"need 0 <= val + test < 1, got {val_fraction} + {test_fraction}"
        )
    if not corpus.discussions:
        raise EmptyCorpus("cannot split an empty corpus")

    sizes = {did: len(d) for did, d in corpus.discussions.items()}
    q1, q2, q3 = _quartile_boundaries(list(sizes.values()))
    strata: list[list[str]] = [[], [], [], []]
    for did in sorted(sizes):
        n = sizes[did]
        if n <= q1:
            strata[0].append(did)
        elif n <= q2:
            strata[1].append(did)
        elif n <= q3:
            strata[2].append(did)
        else:
            strata[3].append(did)

    rng = random.Random(seed)
    assignment = {}
    for stratum in strata:
        ids = list(stratum)
        rng.shuffle(ids)
        n_val = _round_half_away(val_fraction * len(ids))
        n_test = _round_half_away(test_fraction * len(ids))
        for did in ids[:n_val]:
            assignment[did] = VALIDATION
        for did in ids[n_val : n_val + n_test]:
            assignment[did] = TEST
        for did in ids[n_val + n_test :]:
            assignment[did] = TRAIN

    spec = (
        "quartile bins of per-discussion claim count "
        f"(nearest-rank boundaries {q1}/{q2}/{q3}); "
        "round-half-away-from-zero per stratum; residual to train; "
        "Mersenne Twister shuffle"
    )
    return SplitAssignment(assignment, seed, val_fraction, test_fraction, spec)


def write_split(split: SplitAssignment, fh: IO[str]) -> None:
    fh.write(
        json.dumps(
            {
                "format": "stancegen-split",
                "version": 1,
                "seed": split.seed,
                "val_fraction": split.val_fraction,
                "test_fraction": split.test_fraction,
                "strata_spec": split.strata_spec,
            }
        )
        + "\n"
    )
    fh.write("discussion_id\tsplit\n")
    for did in sorted(split.assignment):
        fh.write(f"{did}\t{split.assignment[did]}\n")


def read_split(fh: Union[IO[str], Iterable[str]]) -> SplitAssignment:
    lines = iter(_iter_lines(fh))
    try:
        meta = json.loads(next(lines))
    except (StopIteration, json.JSONDecodeError):
        raise MalformedRecord("split file missing metadata header", 1) from None
    assignment = {}
    for line_no, line in enumerate(lines, start=2):
        line = line.rstrip("\n")
        if not line or line == "discussion_id\tsplit":
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in SPLITS:
            raise MalformedRecord(f"bad split row {line!r}", line_no)
        assignment[parts[0]] = parts[1]
    return SplitAssignment(
        assignment,
        meta.get("seed", 0),
        meta.get("val_fraction", 0.0),
        meta.get("test_fraction", 0.0),
        meta.get("strata_spec", ""),
    )


def read_split_file(path) -> SplitAssignment:
    with open(path, "r", encoding="utf-8") as fh:
        return read_split(fh)


def bucket_table(corpus: Corpus, split: SplitAssignment, threshold: int = 5) -> dict:
    """Per-split claim counts grouped by the author's train-claim count.

    Columns are persona sizes 0 .. threshold-1 plus ">=threshold"; row
    sums equal the total number of claims in each split.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    train_counts: dict[str, int] = {}
    for did in split.discussions_in(TRAIN):
        for claim in corpus.discussions[did].claims.values():
            train_counts[claim.author_id] = train_counts.get(claim.author_id, 0) + 1

    columns = [str(i) for i in range(threshold)] + [f">={threshold}"]
    table = {s: {c: 0 for c in columns} for s in SPLITS}
    for did, d in corpus.discussions.items():
        row = table[split.split_of(did)]
        for claim in d.claims.values():
            size = train_counts.get(claim.author_id, 0)
            key = str(size) if size < threshold else f">={threshold}"
            row[key] += 1
    for row in table.values():
        row["total"] = sum(row[c] for c in columns)
    return table
