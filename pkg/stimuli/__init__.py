"""Emotion stimulus detection: corpora, clause extraction, models and evaluation."""
from .corpus import (ClauseAnnotation, CorpusFormatError, Instance, Span, iob_to_spans, load_corpus,
                     save_corpus, spans_to_iob, split_corpus)

__version__ = "0.1.0"

__all__ = [
    'ClauseAnnotation',
    'CorpusFormatError',
    'Instance',
    'Span',
    'iob_to_spans',
    'load_corpus',
    'save_corpus',
    'spans_to_iob',
    'split_corpus',
]
