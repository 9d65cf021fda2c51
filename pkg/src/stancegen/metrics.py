"""Text-generation evaluation suite: LENGTH, REP-3, ABS-3, BLEU, ROUGE-L,
and the Zipf cumulative distribution of generated tokens.

All metrics share one tokenizer (lowercase, whitespace split, punctuation
broken out into standalone tokens) so retrieval and evaluation agree on
token boundaries. Scores are percentages in [0, 100].
"""

from __future__ import annotations

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .errors import EmptyCorpus

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)

#: smoothing added to zero modified-precision counts so BLEU-4 of short
#: outputs is defined
BLEU_EPSILON = 1e-9

REPORT_METADATA = {
    "bleu_smoothing": f"add-epsilon ({BLEU_EPSILON:g}) on zero n-gram precisions",
    "bleu_aggregation": "sentence-level BLEU averaged over samples",
    "rouge_variant": "LCS-based F1 (beta=1)",
    "abs_n": "n-gram level (n=3 for the ABS-3 column)",
}


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    if n < 1:
        raise ValueError("n must be >= 1")
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def bleu(hypothesis: str, reference: str, max_n: int = 4) -> float:
    """Sentence BLEU against a single reference, as a percent.

    Geometric mean of modified n-gram precisions for n = 1..max_n times
    the brevity penalty exp(min(0, 1 - |ref|/|hyp|)). Empty hypotheses
    score 0.
    """
    if not 1 <= max_n <= 4:
        raise ValueError("max_n must be in 1..4")
    hyp = tokenize(hypothesis)
    ref = tokenize(reference)
    if not hyp:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        hyp_counts = Counter(ngrams(hyp, n))
        ref_counts = Counter(ngrams(ref, n))
        total = sum(hyp_counts.values())
        matched = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
        precision = matched / total if total else 0.0
        if precision == 0.0:
            precision = BLEU_EPSILON
        log_sum += math.log(precision)
    geo_mean = math.exp(log_sum / max_n)
    brevity = math.exp(min(0.0, 1.0 - len(ref) / len(hyp)))
    return 100.0 * geo_mean * brevity


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for tok_a in a:
        cur = [0]
        for j, tok_b in enumerate(b, start=1):
            if tok_a == tok_b:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(hypothesis: str, reference: str) -> float:
    """LCS-based ROUGE-L F1, as a percent."""
    hyp = tokenize(hypothesis)
    ref = tokenize(reference)
    lcs = _lcs_length(hyp, ref)
    p = lcs / len(hyp) if hyp else 0.0
    r = lcs / len(ref) if ref else 0.0
    if p + r == 0.0:
        return 0.0
    return 100.0 * 2 * p * r / (p + r)


def rep_n(hypothesis: str, n: int = 3) -> float:
    """Percentage of repeated n-grams within the hypothesis."""
    grams = ngrams(tokenize(hypothesis), n)
    if not grams:
        return 0.0
    return 100.0 * (1.0 - len(set(grams)) / len(grams))


def abs_n(hypothesis: str, source: str, n: int = 3) -> float:
    """Percentage of hypothesis n-grams absent from the source."""
    grams = ngrams(tokenize(hypothesis), n)
    if not grams:
        return 0.0
    source_grams = set(ngrams(tokenize(source), n))
    novel = sum(1 for g in grams if g not in source_grams)
    return 100.0 * novel / len(grams)


@dataclass(frozen=True)
class MetricReport:
    length_mean: float
    rep3: float
    abs3: float
    bleu1: float
    bleu4: float
    rouge_l: float
    sample_count: int

    COLUMNS = ("LENGTH", "REP-3", "ABS-3", "BLEU-1", "BLEU-4", "ROUGE-L")

    def row(self) -> tuple[float, ...]:
        return (self.length_mean, self.rep3, self.abs3, self.bleu1, self.bleu4, self.rouge_l)

    def to_dict(self) -> dict:
        return {
            "length_mean": self.length_mean,
            "rep3": self.rep3,
            "abs3": self.abs3,
            "bleu1": self.bleu1,
            "bleu4": self.bleu4,
            "rouge_l": self.rouge_l,
            "sample_count": self.sample_count,
            "metadata": dict(REPORT_METADATA),
        }


def evaluate_system(pairs: Sequence[tuple[str, str, str]]) -> MetricReport:
    """Corpus-level report over (source, hypothesis, reference) triples.

    Per-sample metrics are averaged; BLEU is sentence-level BLEU averaged
    over samples (see REPORT_METADATA).
    """
    if not pairs:
        raise EmptyCorpus("no evaluation pairs")
    n = len(pairs)
    length = rep3 = abs3 = b1 = b4 = rl = 0.0
    for source, hypothesis, reference in pairs:
        length += len(tokenize(hypothesis))
        rep3 += rep_n(hypothesis, 3)
        abs3 += abs_n(hypothesis, source, 3)
        b1 += bleu(hypothesis, reference, 1)
        b4 += bleu(hypothesis, reference, 4)
        rl += rouge_l(hypothesis, reference)
    return MetricReport(length / n, rep3 / n, abs3 / n, b1 / n, b4 / n, rl / n, n)


def render_report(reports: dict[str, MetricReport]) -> str:
    """Human-readable table with one row per system."""
    name_width = max(12, max((len(n) for n in reports), default=0) + 2)
    header = " " * name_width + "".join(f"{c:>9}" for c in MetricReport.COLUMNS)
    lines = [header]
    for name, report in reports.items():
        cells = "".join(f"{v:9.2f}" for v in report.row())
        lines.append(f"{name:<{name_width}}" + cells)
    return "\n".join(lines)


@dataclass(frozen=True)
class ZipfCurve:
    """Token frequencies ranked descending, with the cumulative share."""

    frequencies: tuple[int, ...]
    cdf: tuple[float, ...]
    total_tokens: int


def zipf_cdf(texts: Iterable[str]) -> ZipfCurve:
    counts = Counter()
    for text in texts:
        counts.update(tokenize(text))
    if not counts:
        raise EmptyCorpus("no tokens to rank")
    freqs = sorted(counts.values(), reverse=True)
    total = sum(freqs)
    cdf = []
    running = 0
    for f in freqs:
        running += f
        cdf.append(running / total)
    return ZipfCurve(tuple(freqs), tuple(cdf), total)


def write_zipf_csv(curve: ZipfCurve, fh: IO[str]) -> None:
    writer = csv.writer(fh)
    writer.writerow(["rank", "frequency", "cdf"])
    for rank, (freq, c) in enumerate(zip(curve.frequencies, curve.cdf), start=1):
        writer.writerow([rank, freq, repr(c)])


def read_zipf_csv(fh: Iterable[str]) -> ZipfCurve:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != ["rank", "frequency", "cdf"]:
        raise ValueError(f"bad zipf csv header {header!r}")
    freqs, cdf = [], []
    for row in reader:
        if not row:
            continue
        freqs.append(int(row[1]))
        cdf.append(float(row[2]))
    return ZipfCurve(tuple(freqs), tuple(cdf), sum(freqs))
