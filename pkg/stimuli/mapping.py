"""Conversions between token labels and clause flags."""
from typing import List, Sequence

from .corpus import B, I, O, Instance, Span


def tokens_to_clauses(iob: Sequence[str], clauses: Sequence[Span]) -> List[bool]:
    """A clause is a stimulus clause if any of its tokens is B or I."""
    return [any(iob[k] != O for k in range(span.start, span.end)) for span in clauses]


def clauses_to_tokens(flags: Sequence[bool], clauses: Sequence[Span], n: int) -> List[str]:
    """Each flagged clause becomes B I..I; every other token is O."""
    if len(flags) != len(clauses):
        raise ValueError(f"{len(flags)} flags for {len(clauses)} clauses")
    labels = [O] * n
    previous_end = 0
    for flag, span in sorted(zip(flags, clauses), key=lambda pair: pair[1]):
        if span.end > n:
            raise ValueError(f"clause ({span.start}, {span.end}) exceeds {n} tokens")
        if span.start < previous_end:
            raise ValueError(f"clause ({span.start}, {span.end}) overlaps a previous clause")
        previous_end = span.end
        if flag:
            labels[span.start] = B
            for k in range(span.start + 1, span.end):
                labels[k] = I
    return labels


def gold_clause_flags(instance: Instance) -> List[bool]:
    """Annotated clause flags, derived from the iob labels where a flag is missing."""
    if instance.clauses is None:
        raise ValueError(f"instance {instance.id} has no clauses")
    derived = tokens_to_clauses(instance.iob, instance.clause_spans)
    return [c.is_stimulus if c.is_stimulus is not None else d
            for c, d in zip(instance.clauses, derived)]
