"""Token sequence labelling: BiLSTM, attention, linear emissions and a CRF."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config import TrainConfig
from ..corpus import IOB_LABELS, Instance
from ..crf import CrfParams, iob_transition_mask, nll_loss, viterbi_decode
from ..mapping import tokens_to_clauses
from ..nn.layers import BiLSTM, Linear, attention
from ..nn.tensor import Tensor
from .base import TOKEN_LEVEL, Prediction, StimulusModel
from .embeddings import EmbeddingTable

LABEL_INDEX = {label: k for k, label in enumerate(IOB_LABELS)}


class SequenceLabeler(StimulusModel):
    architecture = "sl"
    level = TOKEN_LEVEL

    def __init__(self, embeddings: EmbeddingTable, config: TrainConfig, rng: np.random.Generator):
        super().__init__(embeddings, config)
        hidden = config.hidden_dim
        self.encoder = BiLSTM(embeddings.dim, hidden, rng)
        self.output = Linear(4 * hidden, len(IOB_LABELS), rng)
        self.crf = CrfParams.zeros(len(IOB_LABELS), boundary_scores=config.crf_boundary_scores)

    def emissions(self, tokens: Sequence[str], rng: Optional[np.random.Generator] = None) -> Tensor:
        """(n, 3) label scores in B, I, O order."""
        x = self.drop(self.embed(tokens), rng)
        u = attention(self.encoder(x), self.config.attention_include_self)
        return self.output(self.drop(u, rng))

    def training_units(self, instance: Instance) -> List[Tuple[Tuple[str, ...], List[int]]]:
        return [(instance.tokens, [LABEL_INDEX[label] for label in instance.iob])]

    def unit_loss(self, unit, rng=None) -> Tensor:
        tokens, gold = unit
        return nll_loss(self.emissions(tokens, rng), gold, self.crf)

    def predict_iob(self, tokens: Sequence[str]) -> List[str]:
        masks = iob_transition_mask() if self.config.iob_constraints else (None, None)
        labels, _ = viterbi_decode(self.emissions(tokens), self.crf, *masks)
        return [IOB_LABELS[k] for k in labels]

    def predict(self, instance: Instance) -> Prediction:
        iob = self.predict_iob(instance.tokens)
        flags = None
        if instance.clauses is not None:
            flags = tuple(tokens_to_clauses(iob, instance.clause_spans))
        return Prediction(tuple(iob), flags)
