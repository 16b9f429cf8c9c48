"""Span and clause scoring, clause-detection diagnostics and agreement."""
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Dict, List, NamedTuple, Sequence

from .corpus import Span

SpanSets = Sequence[Sequence[Span]]
FlagSets = Sequence[Sequence[bool]]


class MatchMode(str, Enum):
    EXACT = "exact"
    RELAXED = "relaxed"
    LEFT = "left"
    RIGHT = "right"
    CLAUSE = "clause"


SPAN_MODES = (MatchMode.EXACT, MatchMode.RELAXED, MatchMode.LEFT, MatchMode.RIGHT)


@dataclass(frozen=True)
class Prf:
    precision: float
    recall: float
    f1: float
    tp_p: int
    tp_r: int
    n_pred: int
    n_gold: int

    @classmethod
    def from_counts(cls, tp_p: int, tp_r: int, n_pred: int, n_gold: int) -> "Prf":
        precision = tp_p / n_pred if n_pred else 0.0
        recall = tp_r / n_gold if n_gold else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(precision, recall, f1, tp_p, tp_r, n_pred, n_gold)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


class ClauseConfusion(NamedTuple):
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def spans_match(pred: Span, gold: Span, mode: MatchMode) -> bool:
    if mode == MatchMode.EXACT:
        return pred == gold
    if mode == MatchMode.RELAXED:
        return pred.overlaps(gold)
    if mode == MatchMode.LEFT:
        return pred.start == gold.start
    if mode == MatchMode.RIGHT:
        return pred.end == gold.end
    raise ValueError(f"{mode.value!r} is not a span matching mode")


def span_prf(pred: SpanSets, gold: SpanSets, mode: MatchMode) -> Prf:
    """Micro-averaged any-match P/R/F1 over per-instance span lists."""
    mode = MatchMode(mode)
    if mode not in SPAN_MODES:
        raise ValueError(f"{mode.value!r} is not a span matching mode")
    if len(pred) != len(gold):
        raise ValueError(f"{len(pred)} predicted instances vs {len(gold)} gold instances")
    tp_p = tp_r = n_pred = n_gold = 0
    for pred_spans, gold_spans in zip(pred, gold):
        n_pred += len(pred_spans)
        n_gold += len(gold_spans)
        tp_p += sum(1 for p in pred_spans if any(spans_match(p, g, mode) for g in gold_spans))
        tp_r += sum(1 for g in gold_spans if any(spans_match(p, g, mode) for p in pred_spans))
    return Prf.from_counts(tp_p, tp_r, n_pred, n_gold)


def clause_confusion(pred: FlagSets, gold: FlagSets) -> ClauseConfusion:
    if len(pred) != len(gold):
        raise ValueError(f"{len(pred)} predicted instances vs {len(gold)} gold instances")
    tp = fp = fn = tn = 0
    for pred_flags, gold_flags in zip(pred, gold):
        if len(pred_flags) != len(gold_flags):
            raise ValueError(f"{len(pred_flags)} predicted flags vs {len(gold_flags)} gold flags")
        for p, g in zip(pred_flags, gold_flags):
            if p and g:
                tp += 1
            elif p:
                fp += 1
            elif g:
                fn += 1
            else:
                tn += 1
    return ClauseConfusion(tp, fp, fn, tn)


def clause_prf(pred: FlagSets, gold: FlagSets) -> Prf:
    """P/R/F1 of the stimulus class over all clauses."""
    counts = clause_confusion(pred, gold)
    return Prf.from_counts(counts.tp, counts.tp, counts.tp + counts.fp, counts.tp + counts.fn)


def clause_accuracy(pred: FlagSets, gold: FlagSets) -> float:
    counts = clause_confusion(pred, gold)
    return (counts.tp + counts.tn) / counts.total if counts.total else 0.0


def token_accuracy(pred: Sequence[Sequence[str]], gold: Sequence[Sequence[str]]) -> float:
    if len(pred) != len(gold):
        raise ValueError(f"{len(pred)} predicted instances vs {len(gold)} gold instances")
    correct = total = 0
    for pred_labels, gold_labels in zip(pred, gold):
        if len(pred_labels) != len(gold_labels):
            raise ValueError(f"{len(pred_labels)} predicted labels vs {len(gold_labels)} gold labels")
        correct += sum(1 for p, g in zip(pred_labels, gold_labels) if p == g)
        total += len(gold_labels)
    return correct / total if total else 0.0


def clause_alignment(stimuli: SpanSets, clauses: SpanSets) -> Dict[str, float]:
    """Fraction of stimuli with a clause matching exactly, on the left, on the right.

    The denominator is the number of stimulus spans.
    """
    if len(stimuli) != len(clauses):
        raise ValueError(f"{len(stimuli)} stimulus lists vs {len(clauses)} clause lists")
    hits = {"exact": 0, "left": 0, "right": 0}
    total = 0
    for stimulus_spans, clause_spans in zip(stimuli, clauses):
        for stimulus in stimulus_spans:
            total += 1
            hits["exact"] += any(c == stimulus for c in clause_spans)
            hits["left"] += any(c.start == stimulus.start for c in clause_spans)
            hits["right"] += any(c.end == stimulus.end for c in clause_spans)
    return {key: (count / total if total else 0.0) for key, count in hits.items()}


def clause_match_prf(extracted: SpanSets, annotated: SpanSets) -> Prf:
    """Exact-boundary agreement of extracted clauses with annotated ones."""
    return span_prf(extracted, annotated, MatchMode.EXACT)


def cohen_kappa(first: Sequence[int], second: Sequence[int]) -> float:
    if len(first) != len(second):
        raise ValueError(f"annotation lengths differ: {len(first)} vs {len(second)}")
    if not first:
        raise ValueError("cohen_kappa needs at least one decision")
    n = len(first)
    a = [bool(x) for x in first]
    b = [bool(x) for x in second]
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    pa, pb = sum(a) / n, sum(b) / n
    p_e = pa * pb + (1 - pa) * (1 - pb)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


def boundary_decisions(spans: Sequence[Span], n: int) -> List[int]:
    """One 0/1 decision per gap between adjacent tokens: is a clause boundary there?"""
    edges = {s.start for s in spans} | {s.end for s in spans}
    return [1 if k in edges else 0 for k in range(1, n)]


def corpus_kappa(first: SpanSets, second: SpanSets, lengths: Sequence[int]) -> float:
    """Kappa over the pooled boundary decisions of two segmentations of one corpus."""
    if not len(first) == len(second) == len(lengths):
        raise ValueError("segmentations and lengths must cover the same instances")
    a: List[int] = []
    b: List[int] = []
    for spans_a, spans_b, n in zip(first, second, lengths):
        a.extend(boundary_decisions(spans_a, n))
        b.extend(boundary_decisions(spans_b, n))
    return cohen_kappa(a, b)
