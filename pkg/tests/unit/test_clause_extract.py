"""
Unit tests for clause segmentation.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stimuli.clause_extract import (DEFAULT_CLAUSE_LABELS, SegmentList, clause_gaps, extract_clauses,
                                    is_punctuation_only, join_segments, segments_from_gaps)
from stimuli.corpus import Span
from stimuli.parsetree import leaves, parse_bracket

FIG3_TREE = "(S (SBARQ (X a)(X b)) (N (X c)))"
NESTED_TREE = ("(S (NP (PRP he)) (VP (VBD left) (SBAR (IN because) "
               "(S (NP (DT the) (NN game)) (VP (VBD was) (VBN lost))))))")


@st.composite
def segmentations(draw):
    tokens = draw(st.lists(st.sampled_from(["a", "bb", "c1", ",", "!", "--", "'s"]), min_size=1, max_size=25))
    n = len(tokens)
    inner = draw(st.sets(st.integers(min_value=1, max_value=max(1, n - 1)))) if n > 1 else set()
    return segments_from_gaps({0, n} | inner, tokens)


@pytest.mark.unit
class TestGaps:
    """Boundary extraction at clause-type nodes."""

    def test_figure_tree_gaps_and_segments(self):
        tree = parse_bracket(FIG3_TREE)
        gaps = clause_gaps(tree, DEFAULT_CLAUSE_LABELS)
        assert gaps == [0, 2, 3]
        segs = segments_from_gaps(gaps, leaves(tree))
        assert segs.texts() == [["a", "b"], ["c"]]

    def test_figure_tree_without_join(self):
        segs = extract_clauses(parse_bracket(FIG3_TREE), join=False)
        assert list(segs.segments) == [Span(0, 2), Span(2, 3)]

    def test_figure_tree_with_join_collapses(self):
        segs = extract_clauses(parse_bracket(FIG3_TREE))
        assert list(segs.segments) == [Span(0, 3)]

    def test_no_clause_nodes(self):
        tree = parse_bracket("(NP (DT the) (JJ big) (NN dog))")
        assert clause_gaps(tree) == [0, 3]

    def test_ten_tokens_one_clause(self):
        words = " ".join(f"(NN w{k})" for k in range(10))
        segs = extract_clauses(parse_bracket(f"(NP {words})"))
        assert list(segs.segments) == [Span(0, 10)]

    def test_nested_clauses_union(self):
        assert clause_gaps(parse_bracket(NESTED_TREE)) == [0, 2, 3, 7]

    def test_function_tags_match_base_label(self):
        tree = parse_bracket("(S (S-TPC-1 (NP (PRP we)) (VP (VBD won))) (, ,) (NP (PRP he)) (VP (VBD said)))")
        assert clause_gaps(tree) == [0, 2, 5]

    def test_custom_label_set(self):
        tree = parse_bracket(NESTED_TREE)
        assert clause_gaps(tree, frozenset({"SBAR"})) == [0, 2, 7]

    def test_segments_from_gaps_needs_edges(self):
        with pytest.raises(ValueError):
            segments_from_gaps([0, 2], ["a", "b", "c"])
        with pytest.raises(ValueError):
            segments_from_gaps([1, 3], ["a", "b", "c"])

    @settings(max_examples=200, deadline=None)
    @given(segmentations())
    def test_one_segment_per_gap_pair(self, segs):
        gaps = sorted({s.start for s in segs.segments} | {len(segs.tokens)})
        assert len(segs) == len(gaps) - 1


@pytest.mark.unit
class TestJoin:
    """Fragment merging until convergence."""

    def test_punctuation_merges_left(self):
        tokens = ["we", "really", "all", "laughed", "!"]
        segs = join_segments(segments_from_gaps([0, 4, 5], tokens))
        assert segs.texts() == [tokens]

    def test_punctuation_first_merges_right(self):
        tokens = ["--", "we", "really", "all", "laughed", "loudly"]
        segs = join_segments(segments_from_gaps([0, 1, 6], tokens))
        assert list(segs.segments) == [Span(0, 6)]

    def test_short_merges_right(self):
        tokens = ["he", "left", "because", "the", "game", "was", "lost"]
        segs = join_segments(segments_from_gaps([0, 2, 7], tokens))
        assert segs.texts() == [tokens]

    def test_short_last_merges_left(self):
        tokens = ["the", "team", "lost", "the", "game", "so", "sad"]
        segs = join_segments(segments_from_gaps([0, 5, 7], tokens))
        assert list(segs.segments) == [Span(0, 7)]

    def test_long_segments_survive(self):
        tokens = ["the", "team", "lost", "again", "and", "we", "were", "sad"]
        segs = join_segments(segments_from_gaps([0, 4, 8], tokens))
        assert list(segs.segments) == [Span(0, 4), Span(4, 8)]

    def test_single_segment_unchanged(self):
        segs = segments_from_gaps([0, 2], ["oh", "!"])
        assert join_segments(segs) == segs

    def test_threshold_configurable(self):
        tokens = ["the", "team", "lost", "again", "and", "we", "were", "sad"]
        segs = join_segments(segments_from_gaps([0, 4, 8], tokens), max_short=4)
        assert list(segs.segments) == [Span(0, 8)]

    def test_punctuation_only(self):
        assert is_punctuation_only([",", "--", "!"])
        assert not is_punctuation_only([",", "a"])
        assert not is_punctuation_only(["1"])

    @settings(max_examples=500, deadline=None)
    @given(segmentations())
    def test_converges_and_is_idempotent(self, segs):
        joined = join_segments(segs)
        assert joined.tokens == segs.tokens
        assert join_segments(joined) == joined
        assert len(joined) <= len(segs)
        if len(joined) > 1:
            for text in joined.texts():
                assert not is_punctuation_only(text)
                assert len(text) > 3

    @pytest.mark.slow
    def test_ten_thousand_random_segmentations(self):
        rng = np.random.default_rng(0)
        vocabulary = np.array(["a", "bb", "c1", ",", "!", "--", "'s"])
        for _ in range(10_000):
            tokens = rng.choice(vocabulary, size=int(rng.integers(1, 26))).tolist()
            n = len(tokens)
            inner = rng.choice(np.arange(1, n), size=int(rng.integers(0, n)), replace=False) if n > 1 else []
            segs = segments_from_gaps({0, n} | {int(g) for g in inner}, tokens)
            joined = join_segments(segs)
            assert join_segments(joined) == joined
            spans = list(joined.segments)
            assert spans[0].start == 0 and spans[-1].end == n
            assert all(a.end == b.start for a, b in zip(spans, spans[1:]))

    def test_tiling_enforced(self):
        with pytest.raises(ValueError):
            SegmentList((Span(0, 2), Span(3, 4)), ("a", "b", "c", "d"))
        with pytest.raises(ValueError):
            SegmentList((Span(0, 2),), ("a", "b", "c"))


@pytest.mark.unit
class TestExtract:
    """End-to-end extraction."""

    def test_because_sentence(self):
        tree = parse_bracket("(S (NP (PRP She)) (VP (VBZ is) (ADJP (JJ glad)) (SBAR (IN because) "
                             "(S (NP (DT the) (NN team)) (VP (VBD won) (NP (DT the) (NN game)))))) (. .))")
        segs = extract_clauses(tree)
        assert segs.texts() == [["She", "is", "glad", "because"],
                                ["the", "team", "won", "the", "game", "."]]

    def test_synthetic_parses_reproduce_clauses(self, synthetic_corpus):
        for instance in synthetic_corpus:
            segs = extract_clauses(parse_bracket(instance.parse))
            assert segs.tokens == instance.tokens
            assert list(segs.segments) == instance.clause_spans

    def test_extraction_always_tiles(self):
        from stimuli.synthetic import generate_synthetic
        for instance in generate_synthetic(200, seed=11):
            for join in (True, False):
                segs = extract_clauses(parse_bracket(instance.parse), join=join)
                assert segs.segments[0].start == 0
                assert segs.segments[-1].end == len(instance.tokens)
