"""Nucleus (top-p) sampling, a backoff n-gram generator, and a
persona-count stance baseline.

The n-gram generator exists so the export -> generate -> evaluate loop
runs end to end without a neural model; its outputs are not meant to
approach fine-tuned-model quality.
"""

from __future__ import annotations

import hashlib
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import CON, PRO, Claim
from .errors import InvalidP, UntrainedModel
from .metrics import tokenize
from .persona import ImplicitPersona

START = "<s>"
END = "</s>"

PROB_TOLERANCE = 1e-9


@dataclass(frozen=True)
class TokenDistribution:
    items: tuple[tuple[str, float], ...]

    def __post_init__(self):
        total = 0.0
        for token, prob in self.items:
            if prob < 0:
                raise ValueError(f"negative probability for {token!r}")
            total += prob
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def tokens(self) -> list[str]:
        return [t for t, _ in self.items]


@dataclass(frozen=True)
class DecodingConfig:
    top_p: float = 0.95
    max_length: int = 40
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.top_p <= 1:
            raise InvalidP(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")


def nucleus_filter(dist: TokenDistribution, top_p: float) -> TokenDistribution:
    """Smallest descending-probability prefix with cumulative mass >= top_p,
    renormalized. Ties keep input order (stable sort) for determinism."""
    if not 0 < top_p <= 1:
        raise InvalidP(f"top_p must be in (0, 1], got {top_p}")
    ordered = sorted(dist.items, key=lambda pair: -pair[1])
    kept = []
    cumulative = 0.0
    for token, prob in ordered:
        kept.append((token, prob))
        cumulative += prob
        if cumulative >= top_p - PROB_TOLERANCE:
            break
    mass = sum(p for _, p in kept)
    return TokenDistribution(tuple((t, p / mass) for t, p in kept))


def sample_token(dist: TokenDistribution, rng: random.Random) -> str:
    draw = rng.random()
    cumulative = 0.0
    for token, prob in dist.items:
        cumulative += prob
        if draw < cumulative:
            return token
    return dist.items[-1][0]


class NgramModel:
    """Backoff n-gram model over the shared tokenizer's vocabulary.

    Counts are kept for every context length 0..order-1; generation backs
    off to the longest context with observed continuations.
    """

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = order
        self._tables: dict[tuple[str, ...], Counter] = {}
        self._trained = False

    def observe(self, tokens: Sequence[str]) -> None:
        padded = [START] * (self.order - 1) + list(tokens) + [END]
        start = self.order - 1
        for i in range(start, len(padded)):
            token = padded[i]
            for ctx_len in range(self.order):
                context = tuple(padded[i - ctx_len : i])
                self._tables.setdefault(context, Counter())[token] += 1
        self._trained = True

    def next_distribution(self, context: Sequence[str]) -> TokenDistribution:
        if not self._trained:
            raise UntrainedModel("model has no observations")
        tail = list(context)[-(self.order - 1) :] if self.order > 1 else []
        for ctx_len in range(len(tail), -1, -1):
            key = tuple(tail[len(tail) - ctx_len :])
            if key in self._tables:
                counts = self._tables[key]
                total = sum(counts.values())
                return TokenDistribution(
                    tuple((t, c / total) for t, c in sorted(counts.items()))
                )
        raise UntrainedModel("no matching context")  # unreachable once trained


def train_ngram(texts: Iterable[str], n: int) -> NgramModel:
    model = NgramModel(n)
    for text in texts:
        tokens = tokenize(text)
        if tokens:
            model.observe(tokens)
    if not model._trained:
        raise UntrainedModel("empty training set")
    return model


def _generation_rng(seed: int, source: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{source}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def generate(model: NgramModel, source: str, cfg: DecodingConfig) -> str:
    """Sample up to max_length tokens via nucleus filtering; stops at the
    end marker. The source seeds the per-task RNG stream (the n-gram
    stand-in has no encoder to condition on it)."""
    if not model._trained:
        raise UntrainedModel("model has no observations")
    rng = _generation_rng(cfg.seed, source)
    context = [START] * (model.order - 1)
    out: list[str] = []
    while len(out) < cfg.max_length:
        dist = model.next_distribution(context)
        token = sample_token(nucleus_filter(dist, cfg.top_p), rng)
        if token == END:
            break
        out.append(token)
        context = (context + [token])[-(model.order - 1) :] if model.order > 1 else []
    return " ".join(out)


def baseline_stance_classifier(
    parent: Claim, persona: Optional[ImplicitPersona], corpus_prior: str
) -> str:
    """Predict the reply stance from the author's thesis-level counts for
    the parent's discussion, falling back to the corpus majority label."""
    if corpus_prior not in (PRO, CON):
        raise ValueError(f"corpus_prior must be pro/con, got {corpus_prior!r}")
    if persona is not None:
        for entry in persona.entries:
            if entry.discussion_id == parent.discussion_id:
                return PRO if entry.pro_count >= entry.con_count else CON
    return corpus_prior


def macro_f1(truths: Sequence[str], preds: Sequence[str]) -> float:
    """Macro-averaged F1 over the pro and con classes, as a percent."""
    if len(truths) != len(preds) or not truths:
        raise ValueError("need equal-length, non-empty truth/prediction lists")
    scores = []
    for label in (PRO, CON):
        tp = sum(1 for t, p in zip(truths, preds) if t == label and p == label)
        fp = sum(1 for t, p in zip(truths, preds) if t != label and p == label)
        fn = sum(1 for t, p in zip(truths, preds) if t == label and p != label)
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return 100.0 * sum(scores) / len(scores)


@dataclass(frozen=True)
class StanceBaselineResult:
    claim_ids: tuple[str, ...]
    truths: tuple[str, ...]
    persona_preds: tuple[str, ...]
    majority_label: str
    majority_f1: float
    persona_f1: float


def run_stance_baseline(corpus, split, split_name) -> StanceBaselineResult:
    """Run both classifiers over every non-thesis claim of a split and
    report their macro F1 scores.

    Splits are discussion-granular, so persona entries (which only cover
    train discussions) can never match a validation/test discussion; on
    those splits the persona classifier degrades to the prior. Evaluating
    on the train split therefore excludes the evaluated claim's own
    contribution from its entry (leave-one-out) instead of predicting a
    claim from a count that includes it.
    """
    from .ingest import TRAIN
    from .persona import ThesisStanceSummary, implicit_persona, propagate_stance

    leave_one_out = split_name == TRAIN
    label_counts = Counter()
    for did in split.discussions_in(TRAIN):
        for claim in corpus.discussions[did].claims.values():
            if not claim.is_thesis:
                label_counts[claim.stance_label] += 1
    majority = PRO if label_counts[PRO] >= label_counts[CON] else CON

    personas: dict[str, ImplicitPersona] = {}
    claim_ids, truths, preds = [], [], []
    for did in split.discussions_in(split_name):
        discussion = corpus.discussions[did]
        for claim_id in sorted(discussion.claims):
            claim = discussion.claims[claim_id]
            if claim.is_thesis:
                continue
            parent = discussion.claims[claim.parent_id]
            if claim.author_id not in personas:
                personas[claim.author_id] = implicit_persona(
                    corpus, split, claim.author_id
                )
            persona = personas[claim.author_id]
            if leave_one_out:
                own = propagate_stance(discussion, claim_id)
                entries = []
                for entry in persona.entries:
                    if entry.discussion_id == did:
                        pro = entry.pro_count - (1 if own == PRO else 0)
                        con = entry.con_count - (1 if own == CON else 0)
                        if pro + con < 1:
                            continue
                        entry = ThesisStanceSummary(
                            entry.discussion_id, entry.thesis_text, pro, con
                        )
                    entries.append(entry)
                persona = ImplicitPersona(persona.author_id, tuple(entries))
            claim_ids.append(claim_id)
            truths.append(claim.stance_label)
            preds.append(baseline_stance_classifier(parent, persona, majority))
    return StanceBaselineResult(
        tuple(claim_ids),
        tuple(truths),
        tuple(preds),
        majority,
        macro_f1(truths, [majority] * len(truths)),
        macro_f1(truths, preds),
    )
