"""Canonical data model and corpus I/O for emotion stimulus detection."""
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from jsonschema import Draft7Validator

logger = logging.getLogger(__name__)

B, I, O = "B", "I", "O"
IOB_LABELS = (B, I, O)

_IOB_ARRAY = {"type": "array", "items": {"enum": list(IOB_LABELS)}}

CORPUS_RECORD_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["id", "dataset", "tokens", "iob"],
    "properties": {
        "id": {"type": "string"},
        "dataset": {"type": "string"},
        "tokens": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "iob": _IOB_ARRAY,
        "clauses": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["start", "end"],
                "properties": {
                    "start": {"type": "integer", "minimum": 0},
                    "end": {"type": "integer", "minimum": 1},
                    "stimulus": {"type": "boolean"},
                },
            },
        },
        "parse": {"type": "string"},
        "emotion": {"type": "string"},
        "pred_iob": _IOB_ARRAY,
        "pred_clauses": {"type": "array", "items": {"type": "boolean"}},
    },
}

_RECORD_VALIDATOR = Draft7Validator(CORPUS_RECORD_SCHEMA)


class CorpusFormatError(ValueError):
    """A corpus line that is not a well-formed record."""

    def __init__(self, line: int, field: str, message: str):
        self.line = line
        self.field = field
        super().__init__(f"line {line}: field '{field}': {message}")


@dataclass(frozen=True, order=True)
class Span:
    """Half-open token range [start, end)."""
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span ({self.start}, {self.end}): need 0 <= start < end")

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, index: int) -> bool:
        return self.start <= index < self.end

    def shift(self, offset: int) -> "Span":
        return Span(self.start + offset, self.end + offset)

    def to_tuple(self) -> Tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class ClauseAnnotation:
    """A clause extent with its stimulus flag (None when not annotated)."""
    span: Span
    is_stimulus: Optional[bool] = None


@dataclass(frozen=True)
class Instance:
    """One text with gold labels and optional clause segmentation."""
    id: str
    dataset: str
    tokens: Tuple[str, ...]
    iob: Tuple[str, ...]
    clauses: Optional[Tuple[ClauseAnnotation, ...]] = None
    parse: Optional[str] = None
    emotion: Optional[str] = None
    pred_iob: Optional[Tuple[str, ...]] = None
    pred_clauses: Optional[Tuple[bool, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "iob", tuple(self.iob))
        if len(self.iob) != len(self.tokens):
            raise ValueError(f"iob has {len(self.iob)} labels for {len(self.tokens)} tokens")
        _check_labels(self.iob)
        if self.clauses is not None:
            clauses = tuple(self.clauses)
            if not clauses:
                raise ValueError("clauses must hold at least one clause when present")
            object.__setattr__(self, "clauses", clauses)
            _check_clause_spans([c.span for c in clauses], len(self.tokens))
        if self.pred_iob is not None:
            object.__setattr__(self, "pred_iob", tuple(self.pred_iob))
            if len(self.pred_iob) != len(self.tokens):
                raise ValueError(f"pred_iob has {len(self.pred_iob)} labels for {len(self.tokens)} tokens")
            _check_labels(self.pred_iob)
        if self.pred_clauses is not None:
            object.__setattr__(self, "pred_clauses", tuple(bool(f) for f in self.pred_clauses))
            if self.clauses is None or len(self.pred_clauses) != len(self.clauses):
                raise ValueError("pred_clauses needs one flag per clause")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def stimulus_spans(self) -> List[Span]:
        return iob_to_spans(self.iob)

    @property
    def predicted_spans(self) -> Optional[List[Span]]:
        return None if self.pred_iob is None else iob_to_spans(self.pred_iob)

    @property
    def clause_spans(self) -> Optional[List[Span]]:
        return None if self.clauses is None else [c.span for c in self.clauses]

    def with_clauses(self, spans: Sequence[Span], flags: Optional[Sequence[Optional[bool]]] = None) -> "Instance":
        if flags is None:
            flags = [None] * len(spans)
        clauses = tuple(ClauseAnnotation(span, flag) for span, flag in zip(spans, flags))
        return replace(self, clauses=clauses, pred_clauses=None)

    def with_predictions(self, iob: Optional[Sequence[str]] = None,
                         clause_flags: Optional[Sequence[bool]] = None) -> "Instance":
        return replace(
            self,
            pred_iob=None if iob is None else tuple(iob),
            pred_clauses=None if clause_flags is None else tuple(clause_flags),
        )

    def to_record(self) -> Dict[str, Any]:
        """Convert to the canonical JSON record."""
        record: Dict[str, Any] = {
            "id": self.id,
            "dataset": self.dataset,
            "tokens": list(self.tokens),
            "iob": list(self.iob),
        }
        if self.clauses is not None:
            record["clauses"] = []
            for clause in self.clauses:
                entry: Dict[str, Any] = {"start": clause.span.start, "end": clause.span.end}
                if clause.is_stimulus is not None:
                    entry["stimulus"] = clause.is_stimulus
                record["clauses"].append(entry)
        if self.parse is not None:
            record["parse"] = self.parse
        if self.emotion is not None:
            record["emotion"] = self.emotion
        if self.pred_iob is not None:
            record["pred_iob"] = list(self.pred_iob)
        if self.pred_clauses is not None:
            record["pred_clauses"] = list(self.pred_clauses)
        return record

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "Instance":
        clauses = None
        if "clauses" in record:
            clauses = tuple(
                ClauseAnnotation(Span(c["start"], c["end"]), c.get("stimulus"))
                for c in record["clauses"]
            )
        return cls(
            id=record["id"],
            dataset=record["dataset"],
            tokens=tuple(record["tokens"]),
            iob=tuple(record["iob"]),
            clauses=clauses,
            parse=record.get("parse"),
            emotion=record.get("emotion"),
            pred_iob=None if "pred_iob" not in record else tuple(record["pred_iob"]),
            pred_clauses=None if "pred_clauses" not in record else tuple(record["pred_clauses"]),
        )


@dataclass
class CorpusStats:
    """Dataset statistics in the column layout of the corpus overview table.

    Clause columns are None when the corpus carries no clause segmentation.
    """
    size: int = 0
    with_stimuli: int = 0
    mu_len: float = 0.0
    sigma_len: float = 0.0
    mu_s_per_i: float = 0.0
    mu_s_per_c: Optional[float] = None
    clauses_total: Optional[int] = None
    clauses_with_s: Optional[int] = None
    mu_clauses_per_i: Optional[float] = None
    mu_all_s_per_i: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "size": self.size,
            "stimuli": self.with_stimuli,
            "mu": self.mu_len,
            "sigma": self.sigma_len,
            "mu_s_per_i": self.mu_s_per_i,
            "mu_s_per_c": self.mu_s_per_c,
            "clauses_total": self.clauses_total,
            "clauses_with_s": self.clauses_with_s,
            "mu_clauses_per_i": self.mu_clauses_per_i,
            "mu_all_s_per_i": self.mu_all_s_per_i,
        }


class CorpusSplit(NamedTuple):
    train: List[Instance]
    dev: List[Instance]
    test: List[Instance]


def _check_labels(labels: Iterable[str]) -> None:
    for label in labels:
        if label not in IOB_LABELS:
            raise ValueError(f"unknown IOB label {label!r}")


def _check_clause_spans(spans: Sequence[Span], n: int) -> None:
    previous_end = 0
    for span in spans:
        if span.end > n:
            raise ValueError(f"clause ({span.start}, {span.end}) exceeds {n} tokens")
        if span.start < previous_end:
            raise ValueError(f"clause ({span.start}, {span.end}) overlaps or is out of order")
        previous_end = span.end


def iob_to_spans(iob: Sequence[str]) -> List[Span]:
    """Collect B I* runs as spans; an orphan I opens a new span."""
    spans = []
    start = None
    for index, label in enumerate(iob):
        if label == B:
            if start is not None:
                spans.append(Span(start, index))
            start = index
        elif label == I:
            if start is None:
                start = index
        elif label == O:
            if start is not None:
                spans.append(Span(start, index))
            start = None
        else:
            raise ValueError(f"unknown IOB label {label!r} at position {index}")
    if start is not None:
        spans.append(Span(start, len(iob)))
    return spans


def spans_to_iob(spans: Iterable[Span], n: int) -> List[str]:
    """Label each span B I..I over an all-O background."""
    labels = [O] * n
    previous_end = 0
    for span in sorted(spans):
        if span.end > n:
            raise ValueError(f"span ({span.start}, {span.end}) exceeds {n} tokens")
        if span.start < previous_end:
            raise ValueError(f"span ({span.start}, {span.end}) overlaps a previous span")
        labels[span.start] = B
        for index in range(span.start + 1, span.end):
            labels[index] = I
        previous_end = span.end
    return labels


def _record_error(line: int, record: Any) -> Optional[CorpusFormatError]:
    errors = sorted(_RECORD_VALIDATOR.iter_errors(record), key=lambda e: list(e.absolute_path))
    if not errors:
        return None
    error = errors[0]
    if error.absolute_path:
        field_name = str(error.absolute_path[0])
    elif error.validator == "required":
        field_name = next(k for k in error.validator_value if k not in record)
    else:
        field_name = "<record>"
    return CorpusFormatError(line, field_name, error.message)


def _invariant_field(message: str) -> str:
    for name in ("pred_clauses", "pred_iob", "clause", "span", "iob"):
        if name in message:
            return "clauses" if name in ("clause", "span") else name
    return "<record>"


def load_corpus(path: Union[str, Path]) -> List[Instance]:
    """Load a JSON-lines corpus, validating every record."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"corpus not found: {path}")

    instances = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(line_no, "<json>", str(e)) from e
            error = _record_error(line_no, record)
            if error is not None:
                raise error
            try:
                instances.append(Instance.from_record(record))
            except ValueError as e:
                raise CorpusFormatError(line_no, _invariant_field(str(e)), str(e)) from e

    logger.info("Loaded %d instances from %s", len(instances), path.name)
    return instances


def save_corpus(instances: Iterable[Instance], path: Union[str, Path]) -> Path:
    """Write instances as one JSON record per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for instance in instances:
            f.write(json.dumps(instance.to_record(), ensure_ascii=False) + "\n")
            count += 1
    logger.info("Saved %d instances to %s", count, path.name)
    return path


def split_corpus(instances: Sequence[Instance], seed: int) -> CorpusSplit:
    """Random 80/10/10 split; dev and test get the floor, train the remainder."""
    n = len(instances)
    if n < 10:
        raise ValueError(f"need at least 10 instances to split, got {n}")
    n_held = n // 10
    order = np.random.default_rng(seed).permutation(n)
    dev_idx = sorted(order[:n_held])
    test_idx = sorted(order[n_held:2 * n_held])
    train_idx = sorted(order[2 * n_held:])
    return CorpusSplit(
        train=[instances[i] for i in train_idx],
        dev=[instances[i] for i in dev_idx],
        test=[instances[i] for i in test_idx],
    )


def compute_stats(instances: Sequence[Instance]) -> CorpusStats:
    """Compute the corpus overview columns.

    mu/sigma are taken over stimulus spans; mu_s_per_i and mu_s_per_c are mean
    fractions of stimulus tokens per instance and per clause.
    """
    stats = CorpusStats(size=len(instances))
    lengths = []
    fractions = []
    for instance in instances:
        spans = instance.stimulus_spans
        if spans:
            stats.with_stimuli += 1
        lengths.extend(span.length for span in spans)
        stimulus_tokens = sum(1 for label in instance.iob if label != O)
        fractions.append(stimulus_tokens / len(instance.tokens) if instance.tokens else 0.0)

    if lengths:
        stats.mu_len = float(np.mean(lengths))
        stats.sigma_len = float(np.std(lengths))
    if fractions:
        stats.mu_s_per_i = float(np.mean(fractions))

    if all(instance.clauses is not None for instance in instances):
        clause_fractions = []
        clauses_with_s = 0
        fully_covered = []
        for instance in instances:
            covered = 0
            for span in instance.clause_spans:
                labels = instance.iob[span.start:span.end]
                n_stimulus = sum(1 for label in labels if label != O)
                clause_fractions.append(n_stimulus / span.length)
                if n_stimulus:
                    clauses_with_s += 1
                if n_stimulus == span.length:
                    covered += 1
            fully_covered.append(covered)
        stats.clauses_total = len(clause_fractions)
        stats.clauses_with_s = clauses_with_s
        stats.mu_s_per_c = float(np.mean(clause_fractions)) if clause_fractions else 0.0
        stats.mu_clauses_per_i = stats.clauses_total / len(instances) if instances else 0.0
        stats.mu_all_s_per_i = float(np.mean(fully_covered)) if fully_covered else 0.0
    return stats


def stats_by_dataset(instances: Sequence[Instance]) -> Dict[str, CorpusStats]:
    """Group a corpus by its dataset field and compute stats per group."""
    groups: Dict[str, List[Instance]] = {}
    for instance in instances:
        groups.setdefault(instance.dataset, []).append(instance)
    return {name: compute_stats(group) for name, group in sorted(groups.items())}


def corpus_vocabulary(instances: Iterable[Instance]) -> List[str]:
    return sorted({token for instance in instances for token in instance.tokens})
