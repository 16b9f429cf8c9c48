"""
Unit tests for the synthetic corpus generator.
"""

import pytest

from stimuli.corpus import Span, load_corpus, save_corpus
from stimuli.mapping import tokens_to_clauses
from stimuli.parsetree import leaves, parse_bracket
from stimuli.synthetic import DATASET_NAME, SyntheticGrammar, generate_synthetic


@pytest.mark.unit
class TestGenerateSynthetic:
    """Generated instances and their annotations."""

    def test_single_instance(self):
        (instance,) = generate_synthetic(1, seed=0)
        assert instance.id == "synthetic-00000"
        assert instance.dataset == DATASET_NAME
        assert instance.clauses is not None and instance.parse is not None

    def test_needs_positive_n(self):
        with pytest.raises(ValueError):
            generate_synthetic(0, seed=0)

    def test_seeded_files_identical(self, temp_dir):
        first = save_corpus(generate_synthetic(40, seed=1), temp_dir / "a.jsonl")
        second = save_corpus(generate_synthetic(40, seed=1), temp_dir / "b.jsonl")
        other = save_corpus(generate_synthetic(40, seed=2), temp_dir / "c.jsonl")
        assert first.read_bytes() == second.read_bytes()
        assert first.read_bytes() != other.read_bytes()

    def test_saved_corpus_validates(self, temp_dir, synthetic_corpus):
        path = save_corpus(synthetic_corpus, temp_dir / "corpus.jsonl")
        assert load_corpus(path) == synthetic_corpus

    def test_clause_flags_agree_with_iob(self, synthetic_corpus):
        for instance in synthetic_corpus:
            flags = [c.is_stimulus for c in instance.clauses]
            assert tokens_to_clauses(instance.iob, instance.clause_spans) == flags

    def test_parse_leaves_are_tokens(self, synthetic_corpus):
        for instance in synthetic_corpus:
            assert tuple(leaves(parse_bracket(instance.parse))) == instance.tokens

    def test_emotions_come_from_cues(self, synthetic_corpus):
        emotions = set(SyntheticGrammar().cues.values())
        for instance in synthetic_corpus:
            assert instance.emotion in emotions
            cue = next(t for t in instance.tokens if t in SyntheticGrammar().cues)
            assert SyntheticGrammar().cues[cue] == instance.emotion

    def test_all_templates_present(self):
        lengths = {len(instance) for instance in generate_synthetic(200, seed=5)}
        assert lengths == {5, 10, 11}

    def test_because_only(self):
        for instance in generate_synthetic(20, seed=3, grammar=SyntheticGrammar(because_rate=1.0, so_rate=0.0)):
            assert instance.tokens[3] == "because"
            assert instance.stimulus_spans == [Span(4, 10)]

    def test_neutral_only(self):
        for instance in generate_synthetic(20, seed=3, grammar=SyntheticGrammar(because_rate=0.0, so_rate=0.0)):
            assert instance.stimulus_spans == []
            assert instance.clause_spans == [Span(0, 5)]

    @pytest.mark.parametrize("because_rate,so_rate", [(0.8, 0.3), (-0.1, 0.2), (0.2, -0.1)])
    def test_rates_validated(self, because_rate, so_rate):
        with pytest.raises(ValueError):
            SyntheticGrammar(because_rate=because_rate, so_rate=so_rate)
