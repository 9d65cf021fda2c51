"""Persona-conditioned text-to-text sample assembly and dataset export.

Exports are JSON lines with a versioned header: one record per
(parent, child) edge in the chosen split, fields source/target plus a
metadata object. The generation-output import format pairs generated
texts back to export records by claim_id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional

from . import persona as persona_mod
from .corpus import CON, PRO, Claim, Corpus
from .errors import ConfigConflict, IsThesis, MalformedRecord, NotAChild, ThesisHasNoStance
from .ingest import SPLITS, TRAIN, SplitAssignment
from .persona import SEP, bucket_of, explicit_pool, implicit_persona, propagate_stance

SAMPLES_FORMAT = "stancegen-samples"
GENERATED_FORMAT = "stancegen-generated"
FORMAT_VERSION = 1

TASK_GENERATION = "generation"
TASK_CLASSIFICATION = "classification"

STRATEGY_NONE = "none"
STRATEGY_IMPLICIT = "implicit"
EXPORT_STRATEGIES = (
    STRATEGY_NONE,
    STRATEGY_IMPLICIT,
    persona_mod.STRATEGY_RANDOM,
    persona_mod.STRATEGY_DYNAMIC,
    persona_mod.STRATEGY_NEGATIVE,
)


@dataclass(frozen=True)
class GenerationSample:
    source: str
    target: str
    metadata: dict


@dataclass(frozen=True)
class ClassificationSample:
    source: str
    target: str  # literal "pro" or "con"
    metadata: dict


def _compose_source(persona_text: str, parent_text: str) -> str:
    return f"{persona_text}{SEP}{parent_text}" if persona_text else parent_text


def make_generation_sample(
    parent: Claim, persona_text: str, child: Claim, metadata: Optional[dict] = None
) -> GenerationSample:
    if child.parent_id != parent.claim_id:
        raise NotAChild(f"{child.claim_id!r} is not a child of {parent.claim_id!r}")
    return GenerationSample(
        _compose_source(persona_text, parent.text), child.text, metadata or {}
    )


def make_classification_sample(
    parent: Claim, persona_text: str, child: Claim, metadata: Optional[dict] = None
) -> ClassificationSample:
    if child.stance_label not in (PRO, CON):
        raise ThesisHasNoStance(f"claim {child.claim_id!r} has no pro/con label")
    if child.parent_id != parent.claim_id:
        raise NotAChild(f"{child.claim_id!r} is not a child of {parent.claim_id!r}")
    return ClassificationSample(
        _compose_source(persona_text, parent.text), child.stance_label, metadata or {}
    )


@dataclass(frozen=True)
class ExportConfig:
    task: str = TASK_GENERATION
    strategy: str = STRATEGY_NONE
    cap: int = persona_mod.DEFAULT_CAP
    seed: int = 0
    split: str = TRAIN
    bucket_threshold: int = persona_mod.DEFAULT_BUCKET_THRESHOLD

    def __post_init__(self):
        if self.task not in (TASK_GENERATION, TASK_CLASSIFICATION):
            raise ConfigConflict(f"unknown task {self.task!r}")
        if self.strategy not in EXPORT_STRATEGIES:
            raise ConfigConflict(
                f"strategy {self.strategy!r} is not exportable "
                f"(hybrid is a pipeline config: train=random, inference=dynamic)"
            )
        if self.split not in SPLITS:
            raise ConfigConflict(f"unknown split {self.split!r}")
        if self.cap < 1:
            raise ConfigConflict("cap must be >= 1")


class _PersonaCache:
    """Per-author pools and persona texts, reused across a split export."""

    def __init__(self, corpus: Corpus, split: SplitAssignment, config: ExportConfig):
        self.corpus = corpus
        self.split = split
        self.config = config
        self._pools: dict[str, list[Claim]] = {}
        self._static: dict[str, str] = {}

    def pool(self, author_id: str) -> list[Claim]:
        if author_id not in self._pools:
            self._pools[author_id] = explicit_pool(self.corpus, self.split, author_id)
        return self._pools[author_id]

    def persona_text(self, author_id: str, parent_text: str) -> str:
        cfg = self.config
        if cfg.strategy == STRATEGY_NONE:
            return ""
        if cfg.strategy == persona_mod.STRATEGY_DYNAMIC:
            p = persona_mod.select_dynamic(self.pool(author_id), parent_text, cfg.cap)
            return persona_mod.serialize_explicit(p)
        if cfg.strategy == persona_mod.STRATEGY_NEGATIVE:
            p = persona_mod.select_negative(self.pool(author_id), parent_text, cfg.cap)
            return persona_mod.serialize_explicit(p)
        if author_id not in self._static:
            if cfg.strategy == STRATEGY_IMPLICIT:
                p = implicit_persona(self.corpus, self.split, author_id)
                self._static[author_id] = persona_mod.serialize_implicit(p)
            else:  # random
                p = persona_mod.select_random(self.pool(author_id), cfg.cap, cfg.seed)
                self._static[author_id] = persona_mod.serialize_explicit(p)
        return self._static[author_id]


def export_dataset(
    corpus: Corpus, split: SplitAssignment, config: ExportConfig
) -> Iterator[dict]:
    """Yield one record per (parent, child) edge in the configured split,
    ordered by discussion_id then claim_id. Deterministic per config."""
    cache = _PersonaCache(corpus, split, config)
    for discussion_id in split.discussions_in(config.split):
        discussion = corpus.discussions[discussion_id]
        for claim_id in sorted(discussion.claims):
            child = discussion.claims[claim_id]
            if child.is_thesis:
                continue
            parent = discussion.claims[child.parent_id]
            persona_text = cache.persona_text(child.author_id, parent.text)
            metadata = {
                "claim_id": child.claim_id,
                "discussion_id": discussion_id,
                "author_id": child.author_id,
                "stance_label": child.stance_label,
                "propagated_stance": propagate_stance(discussion, claim_id),
                "strategy": config.strategy,
                "persona_bucket": bucket_of(
                    len(cache.pool(child.author_id)), config.bucket_threshold
                ),
                "split": config.split,
            }
            if config.task == TASK_GENERATION:
                sample = make_generation_sample(parent, persona_text, child, metadata)
            else:
                sample = make_classification_sample(parent, persona_text, child, metadata)
            yield {
                "source": sample.source,
                "target": sample.target,
                "metadata": sample.metadata,
            }


def samples_header(config: ExportConfig) -> str:
    return json.dumps(
        {
            "format": SAMPLES_FORMAT,
            "version": FORMAT_VERSION,
            "task": config.task,
            "strategy": config.strategy,
            "cap": config.cap,
            "seed": config.seed,
            "split": config.split,
        },
        sort_keys=True,
    )


def write_samples(records: Iterable[dict], fh: IO[str], config: ExportConfig) -> None:
    fh.write(samples_header(config) + "\n")
    for record in records:
        fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_samples(fh: Iterable[str]) -> tuple[dict, list[dict]]:
    """Read an export file back; returns (header, records)."""
    lines = iter(fh)
    try:
        header = json.loads(next(lines))
    except (StopIteration, json.JSONDecodeError):
        raise MalformedRecord("samples file missing header", 1) from None
    if header.get("format") != SAMPLES_FORMAT:
        raise MalformedRecord(f"not a {SAMPLES_FORMAT} file", 1)
    records = []
    for line_no, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise MalformedRecord(exc.msg, line_no) from None
    return header, records


def write_generated(pairs: Iterable[tuple[str, str]], fh: IO[str]) -> None:
    """Write (claim_id, generated text) pairs in the evaluation import
    format."""
    fh.write(json.dumps({"format": GENERATED_FORMAT, "version": FORMAT_VERSION}) + "\n")
    for claim_id, text in pairs:
        fh.write(
            json.dumps({"claim_id": claim_id, "text": text}, ensure_ascii=False) + "\n"
        )


def read_generated(fh: Iterable[str]) -> dict[str, str]:
    lines = iter(fh)
    try:
        header = json.loads(next(lines))
    except (StopIteration, json.JSONDecodeError):
        raise MalformedRecord("generated file missing header", 1) from None
    if header.get("format") != GENERATED_FORMAT:
        raise MalformedRecord(f"not a {GENERATED_FORMAT} file", 1)
    out = {}
    for line_no, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            out[record["claim_id"]] = record["text"]
        except (json.JSONDecodeError, KeyError, TypeError):
            raise MalformedRecord("bad generated record", line_no) from None
    return out
