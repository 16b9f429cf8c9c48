"""Factory for creating stimulus detection models."""
from typing import Dict, List, Optional, Type

import numpy as np

from ..config import TrainConfig
from .base import StimulusModel
from .embeddings import EmbeddingTable
from .icc import IndependentClauseClassifier
from .jcc import JointClauseClassifier
from .sl import SequenceLabeler


class ModelFactory:
    """Factory for creating models by architecture tag."""

    MODELS: Dict[str, Type[StimulusModel]] = {
        "sl": SequenceLabeler,
        "icc": IndependentClauseClassifier,
        "jcc": JointClauseClassifier,
    }

    @classmethod
    def create_model(cls, architecture: str, embeddings: EmbeddingTable,
                     config: Optional[TrainConfig] = None,
                     rng: Optional[np.random.Generator] = None) -> StimulusModel:
        """Create a freshly initialised model.

        Args:
            architecture: One of 'sl', 'icc', 'jcc'
            embeddings: Frozen embedding table the model reads from
            config: Training configuration (dimensions and switches)
            rng: Generator for parameter initialisation

        Raises:
            ValueError: If the architecture is not supported
        """
        if architecture not in cls.MODELS:
            raise ValueError(f"Unsupported architecture: {architecture}. "
                             f"Available architectures: {cls.list_architectures()}")
        config = config or TrainConfig()
        if embeddings.dim != config.embedding_dim:
            raise ValueError(f"embedding table has dimension {embeddings.dim}, "
                             f"config expects {config.embedding_dim}")
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        return cls.MODELS[architecture](embeddings, config, rng)

    @classmethod
    def list_architectures(cls) -> List[str]:
        return list(cls.MODELS)
