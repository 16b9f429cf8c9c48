"""Boundary-error taxonomy for predicted stimulus spans.

Every gold span receives exactly one type from the relation between it and
the predictions overlapping it; a prediction overlapping no gold span is a
false positive. With one overlapping prediction p = [ps, pe) and gold
g = [gs, ge):

    ps == gs, pe == ge   TruePositive
    ps == gs, pe <  ge   EarlyStop
    ps == gs, pe >  ge   LateStop
    ps <  gs, pe <  ge   EarlyStartStop
    ps <  gs, pe == ge   EarlyStart
    ps >  gs, pe == ge   LateStart
    ps >  gs, pe >  ge   LateStartStop
    ps >  gs, pe <  ge   Contained
    ps <  gs, pe >  ge   Surrounded

Two or more overlapping predictions make the gold span Multiple; none make it
a FalseNegative.
"""
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Sequence

from .corpus import Span


class ErrorType(str, Enum):
    EARLY_STOP = "EarlyStop"
    LATE_STOP = "LateStop"
    EARLY_START_STOP = "EarlyStartStop"
    EARLY_START = "EarlyStart"
    LATE_START = "LateStart"
    LATE_START_STOP = "LateStartStop"
    CONTAINED = "Contained"
    MULTIPLE = "Multiple"
    SURROUNDED = "Surrounded"
    FALSE_NEGATIVE = "FalseNegative"
    FALSE_POSITIVE = "FalsePositive"
    TRUE_POSITIVE = "TruePositive"

    @property
    def label(self) -> str:
        return DISPLAY_LABELS[self]


DISPLAY_LABELS = {
    ErrorType.EARLY_STOP: "Early stop",
    ErrorType.LATE_STOP: "Late stop",
    ErrorType.EARLY_START_STOP: "Early start & stop",
    ErrorType.EARLY_START: "Early start",
    ErrorType.LATE_START: "Late start",
    ErrorType.LATE_START_STOP: "Late start & stop",
    ErrorType.CONTAINED: "Contained",
    ErrorType.MULTIPLE: "Multiple",
    ErrorType.SURROUNDED: "Surrounded",
    ErrorType.FALSE_NEGATIVE: "False Negative",
    ErrorType.FALSE_POSITIVE: "False Positive",
    ErrorType.TRUE_POSITIVE: "True Positive",
}

ERROR_TYPES = tuple(t for t in ErrorType if t != ErrorType.TRUE_POSITIVE)


@dataclass
class ErrorCounts:
    counts: Counter = field(default_factory=Counter)

    def __getitem__(self, error_type: ErrorType) -> int:
        return self.counts[error_type]

    def add(self, error_type: ErrorType) -> None:
        self.counts[error_type] += 1

    @property
    def total_errors(self) -> int:
        return sum(self.counts[t] for t in ERROR_TYPES)

    def to_dict(self) -> Dict[str, int]:
        return {t.value: self.counts[t] for t in ErrorType}


def _boundary_type(gold: Span, pred: Span) -> ErrorType:
    gs, ge, ps, pe = gold.start, gold.end, pred.start, pred.end
    if ps == gs:
        if pe == ge:
            return ErrorType.TRUE_POSITIVE
        return ErrorType.EARLY_STOP if pe < ge else ErrorType.LATE_STOP
    if ps < gs:
        if pe == ge:
            return ErrorType.EARLY_START
        return ErrorType.EARLY_START_STOP if pe < ge else ErrorType.SURROUNDED
    if pe == ge:
        return ErrorType.LATE_START
    return ErrorType.LATE_START_STOP if pe > ge else ErrorType.CONTAINED


def classify_gold(gold: Span, overlapping_preds: Sequence[Span]) -> ErrorType:
    for pred in overlapping_preds:
        if not pred.overlaps(gold):
            raise ValueError(f"prediction ({pred.start}, {pred.end}) does not overlap "
                             f"gold ({gold.start}, {gold.end})")
    if not overlapping_preds:
        return ErrorType.FALSE_NEGATIVE
    if len(overlapping_preds) > 1:
        return ErrorType.MULTIPLE
    return _boundary_type(gold, overlapping_preds[0])


def classify_corpus(gold: Sequence[Sequence[Span]], pred: Sequence[Sequence[Span]]) -> ErrorCounts:
    """One type per gold span plus one FalsePositive per prediction overlapping no gold span."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold instances vs {len(pred)} predicted instances")
    result = ErrorCounts()
    for gold_spans, pred_spans in zip(gold, pred):
        for g in gold_spans:
            result.add(classify_gold(g, sorted(p for p in pred_spans if p.overlaps(g))))
        for p in pred_spans:
            if not any(p.overlaps(g) for g in gold_spans):
                result.add(ErrorType.FALSE_POSITIVE)
    return result
