"""Joint clause classification: word-level clause encoder, clause-level BiLSTMs and a CRF."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import TrainConfig
from ..corpus import Instance, Span
from ..crf import CrfParams, nll_loss, viterbi_decode
from ..mapping import clauses_to_tokens, gold_clause_flags
from ..nn.layers import BiLSTM, Linear, attention
from ..nn.tensor import Tensor, concat, stack
from .base import CLAUSE_LEVEL, Prediction, StimulusModel
from .embeddings import EmbeddingTable

CLAUSE_LAYERS = 2


class JointClauseClassifier(StimulusModel):
    architecture = "jcc"
    level = CLAUSE_LEVEL

    def __init__(self, embeddings: EmbeddingTable, config: TrainConfig, rng: np.random.Generator):
        super().__init__(embeddings, config)
        hidden = config.hidden_dim
        self.word_encoder = BiLSTM(embeddings.dim, hidden, rng)
        self.clause_encoders = [BiLSTM(2 * hidden, hidden, rng) for _ in range(CLAUSE_LAYERS)]
        out_dim = 4 * hidden if config.clause_attention else 2 * hidden
        self.output = Linear(out_dim, 2, rng)
        self.crf = CrfParams.zeros(2, boundary_scores=config.crf_boundary_scores)

    def clause_vector(self, tokens: Sequence[str]) -> Tensor:
        """Final forward state next to the first backward state, (2h,)."""
        states = self.word_encoder(self.embed(tokens))
        hidden = self.config.hidden_dim
        return concat([states[len(tokens) - 1, :hidden], states[0, hidden:]])

    def emissions(self, tokens: Sequence[str], clauses: Sequence[Span],
                  rng: Optional[np.random.Generator] = None) -> Tensor:
        """(m, 2) scores for m clauses."""
        if not clauses:
            raise ValueError("JCC needs at least one clause")
        c = stack([self.clause_vector(tokens[s.start:s.end]) for s in clauses])
        for encoder in self.clause_encoders:
            c = encoder(c)
        if self.config.clause_attention:
            c = attention(c, self.config.attention_include_self)
        return self.output(self.drop(c, rng))

    def training_units(self, instance: Instance) -> List[Tuple[Tuple[str, ...], List[Span], List[int]]]:
        self.require_clauses(instance)
        flags = [int(f) for f in gold_clause_flags(instance)]
        return [(instance.tokens, instance.clause_spans, flags)]

    def unit_loss(self, unit, rng=None) -> Tensor:
        tokens, clauses, gold = unit
        return nll_loss(self.emissions(tokens, clauses, rng), gold, self.crf)

    def predict_flags(self, tokens: Sequence[str], clauses: Sequence[Span]) -> List[bool]:
        labels, _ = viterbi_decode(self.emissions(tokens, clauses), self.crf)
        return [label == 1 for label in labels]

    def predict(self, instance: Instance) -> Prediction:
        self.require_clauses(instance)
        spans = instance.clause_spans
        flags = self.predict_flags(instance.tokens, spans)
        iob = clauses_to_tokens(flags, spans, len(instance.tokens))
        return Prediction(tuple(iob), tuple(flags))
