# Stimulus detection models
from .base import Prediction, StimulusModel
from .embeddings import EmbeddingTable, load_embeddings
from .factory import ModelFactory
from .icc import IndependentClauseClassifier
from .jcc import JointClauseClassifier
from .sl import SequenceLabeler
from .trainer import EpochRecord, TrainedModel, train_model

__all__ = [
    'EmbeddingTable',
    'EpochRecord',
    'IndependentClauseClassifier',
    'JointClauseClassifier',
    'ModelFactory',
    'Prediction',
    'SequenceLabeler',
    'StimulusModel',
    'TrainedModel',
    'load_embeddings',
    'train_model',
]
