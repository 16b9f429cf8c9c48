"""Clause segmentation from constituency trees.

Boundaries are taken at the edges of every clause-type node, then short and
punctuation-only fragments are merged into their neighbours until nothing
changes.
"""
import logging
import re
from dataclasses import dataclass
from typing import AbstractSet, Iterable, List, Optional, Sequence, Tuple

from .corpus import Span
from .parsetree import ConstTree, iter_nodes, leaves

logger = logging.getLogger(__name__)

DEFAULT_CLAUSE_LABELS = frozenset({"S", "SBAR", "SBARQ", "SINV", "SQ"})
MAX_SHORT_SEGMENT = 3

_ALNUM = re.compile(r"[A-Za-z0-9]")


@dataclass(frozen=True)
class SegmentList:
    """Segments that tile the token range exactly."""
    segments: Tuple[Span, ...]
    tokens: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "tokens", tuple(self.tokens))
        expected = 0
        for span in self.segments:
            if span.start != expected:
                raise ValueError(f"segments do not tile tokens: gap or overlap at {expected}")
            expected = span.end
        if expected != len(self.tokens):
            raise ValueError(f"segments cover {expected} of {len(self.tokens)} tokens")

    def __len__(self) -> int:
        return len(self.segments)

    def texts(self) -> List[List[str]]:
        return [list(self.tokens[s.start:s.end]) for s in self.segments]


def is_punctuation_only(tokens: Sequence[str]) -> bool:
    return all(_ALNUM.search(token) is None for token in tokens)


def clause_gaps(tree: ConstTree, clause_labels: AbstractSet[str] = DEFAULT_CLAUSE_LABELS) -> List[int]:
    """Sorted boundary indices: 0, n and both edges of every clause-type node."""
    gaps = {0, tree.leaf_span.end}
    for node in iter_nodes(tree):
        if node.is_preterminal:
            continue
        if node.base_label in clause_labels:
            gaps.add(node.leaf_span.start)
            gaps.add(node.leaf_span.end)
    return sorted(gaps)


def segments_from_gaps(gaps: Iterable[int], tokens: Sequence[str]) -> SegmentList:
    ordered = sorted(set(gaps))
    n = len(tokens)
    if not ordered or ordered[0] != 0 or ordered[-1] != n:
        raise ValueError(f"gaps must include 0 and {n}")
    spans = [Span(i, j) for i, j in zip(ordered, ordered[1:])]
    return SegmentList(spans, tokens)


def _merge(segments: List[Span], left: int) -> List[Span]:
    merged = Span(segments[left].start, segments[left + 1].end)
    return segments[:left] + [merged] + segments[left + 2:]


def _merge_once(segments: List[Span], tokens: Sequence[str], max_short: int) -> Optional[List[Span]]:
    last = len(segments) - 1
    for index, span in enumerate(segments):
        text = tokens[span.start:span.end]
        if is_punctuation_only(text):
            return _merge(segments, index - 1 if index > 0 else index)
        if span.length <= max_short:
            return _merge(segments, index if index < last else index - 1)
    return None


def join_segments(segs: SegmentList, max_short: int = MAX_SHORT_SEGMENT) -> SegmentList:
    """Merge punctuation-only and short segments until a full pass changes nothing.

    Punctuation-only segments join their left neighbour (the right one when
    first); segments of at most ``max_short`` tokens join their right neighbour
    (the left one when last). Every merge restarts the pass.
    """
    segments = list(segs.segments)
    while len(segments) > 1:
        merged = _merge_once(segments, segs.tokens, max_short)
        if merged is None:
            break
        segments = merged
    return SegmentList(segments, segs.tokens)


def extract_clauses(tree: ConstTree, clause_labels: AbstractSet[str] = DEFAULT_CLAUSE_LABELS,
                    join: bool = True, max_short: int = MAX_SHORT_SEGMENT) -> SegmentList:
    tokens = leaves(tree)
    segs = segments_from_gaps(clause_gaps(tree, clause_labels), tokens)
    if join:
        segs = join_segments(segs, max_short)
    logger.debug("Extracted %d clauses from %d tokens", len(segs), len(tokens))
    return segs
