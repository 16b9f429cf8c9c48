"""Base classes for stimulus detection models."""
from abc import ABC, abstractmethod
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..config import TrainConfig
from ..corpus import Instance
from ..nn.layers import Module, dropout
from ..nn.tensor import Tensor
from .embeddings import EmbeddingTable

TOKEN_LEVEL = "token"
CLAUSE_LEVEL = "clause"


class Prediction(NamedTuple):
    """Token labels for every model; clause flags whenever the instance has clauses."""
    iob: Tuple[str, ...]
    clause_flags: Optional[Tuple[bool, ...]]


class StimulusModel(Module, ABC):
    """Abstract base class for the three architectures.

    Subclasses split an instance into training units (whole instances or
    single clauses), give a differentiable loss per unit, and predict both
    token labels and clause flags.
    """

    architecture: str = ""
    level: str = TOKEN_LEVEL

    def __init__(self, embeddings: EmbeddingTable, config: TrainConfig):
        self.embeddings = embeddings
        self.config = config

    def embed(self, tokens: Sequence[str]) -> Tensor:
        if not tokens:
            raise ValueError("cannot encode an empty token sequence")
        return self.embeddings.lookup(tokens)

    def drop(self, x: Tensor, rng: Optional[np.random.Generator]) -> Tensor:
        return dropout(x, self.config.dropout_p, self.training, rng)

    @abstractmethod
    def training_units(self, instance: Instance) -> List[Any]:
        """Split an instance into the units one loss term is computed for."""

    @abstractmethod
    def unit_loss(self, unit: Any, rng: Optional[np.random.Generator] = None) -> Tensor:
        """Scalar loss for one training unit."""

    @abstractmethod
    def predict(self, instance: Instance) -> Prediction:
        """Predict labels for one instance (call under ``no_grad`` in eval mode)."""

    def require_clauses(self, instance: Instance) -> None:
        if instance.clauses is None:
            raise ValueError(f"{self.architecture} needs clause spans; instance {instance.id} has none")
