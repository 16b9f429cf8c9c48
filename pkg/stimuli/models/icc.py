"""Independent clause classification: each clause is encoded on its own."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import TrainConfig
from ..corpus import Instance
from ..mapping import clauses_to_tokens, gold_clause_flags
from ..nn.layers import BiLSTM, Linear, attention
from ..nn.tensor import Tensor
from .base import CLAUSE_LEVEL, Prediction, StimulusModel
from .embeddings import EmbeddingTable


class IndependentClauseClassifier(StimulusModel):
    """softmax(W . ReLU(Dropout(h(s)))) over the mean-pooled clause representation s."""

    architecture = "icc"
    level = CLAUSE_LEVEL

    def __init__(self, embeddings: EmbeddingTable, config: TrainConfig, rng: np.random.Generator):
        super().__init__(embeddings, config)
        hidden = config.hidden_dim
        self.encoder = BiLSTM(embeddings.dim, hidden, rng)
        self.hidden = Linear(4 * hidden, hidden, rng)
        self.output = Linear(hidden, 2, rng)

    def logits(self, tokens: Sequence[str], rng: Optional[np.random.Generator] = None) -> Tensor:
        u = attention(self.encoder(self.embed(tokens)), self.config.attention_include_self)
        s = u.mean(axis=0)
        return self.output(self.drop(self.hidden(s), rng).relu())

    def probabilities(self, tokens: Sequence[str]) -> np.ndarray:
        """[p(no stimulus), p(stimulus)] for one clause."""
        return self.logits(tokens).softmax().data

    def predict_clause(self, tokens: Sequence[str]) -> bool:
        return bool(np.argmax(self.logits(tokens).data) == 1)

    def training_units(self, instance: Instance) -> List[Tuple[Tuple[str, ...], int]]:
        self.require_clauses(instance)
        flags = gold_clause_flags(instance)
        return [(instance.tokens[span.start:span.end], int(flag))
                for span, flag in zip(instance.clause_spans, flags)]

    def unit_loss(self, unit, rng=None) -> Tensor:
        tokens, label = unit
        return -self.logits(tokens, rng).log_softmax()[label]

    def predict(self, instance: Instance) -> Prediction:
        self.require_clauses(instance)
        spans = instance.clause_spans
        flags = [self.predict_clause(instance.tokens[s.start:s.end]) for s in spans]
        iob = clauses_to_tokens(flags, spans, len(instance.tokens))
        return Prediction(tuple(iob), tuple(flags))
