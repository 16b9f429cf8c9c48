"""
Pytest configuration and shared fixtures for stimulus detection testing.
"""

import logging
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

from stimuli.config import TrainConfig
from stimuli.corpus import ClauseAnnotation, Instance, Span, corpus_vocabulary, save_corpus
from stimuli.models.embeddings import EmbeddingTable
from stimuli.synthetic import generate_synthetic

FIG1_TOKENS = ("She", "'s", "pleased", "at", "how", "things", "have", "turned", "out", ".")
FIG1_IOB = ("O", "O", "O", "O", "B", "I", "I", "I", "I", "O")


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    temp_dir = tempfile.mkdtemp()
    yield Path(temp_dir)
    shutil.rmtree(temp_dir)


@pytest.fixture
def fig1_instance():
    """The running example sentence with a two-clause segmentation."""
    return Instance(
        id="fig1",
        dataset="example",
        tokens=FIG1_TOKENS,
        iob=FIG1_IOB,
        clauses=(ClauseAnnotation(Span(0, 4), False), ClauseAnnotation(Span(4, 10), True)),
        emotion="joy",
    )


@pytest.fixture
def synthetic_corpus():
    """50 templated instances with parses and clause annotations."""
    return generate_synthetic(50, seed=1)


@pytest.fixture
def corpus_file(temp_dir, synthetic_corpus):
    return save_corpus(synthetic_corpus, temp_dir / "corpus.jsonl")


@pytest.fixture
def tiny_config():
    """Toy dimensions, no dropout: fast and deterministic."""
    return TrainConfig(embedding_dim=4, hidden_dim=4, dropout_p=0.0, max_epochs=3, patience=0, seed=0)


@pytest.fixture
def tiny_embeddings(synthetic_corpus, fig1_instance):
    vocabulary = corpus_vocabulary(list(synthetic_corpus) + [fig1_instance])
    return EmbeddingTable.random(vocabulary, 4, seed=3)


@pytest.fixture
def grad_check():
    """Worst relative error between backprop and central differences."""
    return max_gradient_error


@pytest.fixture
def capture_logs(caplog):
    """Capture logs with appropriate level."""
    caplog.set_level(logging.INFO)
    return caplog


# Markers for test categorization
def pytest_configure(config):
    """Configure pytest markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )


# Numerical helpers
def max_gradient_error(loss_fn, tensors, eps=1e-5, max_entries=None, seed=0):
    """Compare analytic gradients of ``loss_fn()`` with central differences.

    ``tensors`` are leaves that require grad; with ``max_entries`` only that
    many randomly chosen entries per tensor are perturbed.
    """
    for t in tensors:
        t.zero_grad()
    loss_fn().backward()
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in tensors]

    rng = np.random.default_rng(seed)
    worst = 0.0
    for t, grad in zip(tensors, analytic):
        indices = list(np.ndindex(t.data.shape))
        if max_entries is not None and len(indices) > max_entries:
            chosen = rng.choice(len(indices), size=max_entries, replace=False)
            indices = [indices[k] for k in chosen]
        for idx in indices:
            original = t.data[idx]
            t.data[idx] = original + eps
            plus = loss_fn().item()
            t.data[idx] = original - eps
            minus = loss_fn().item()
            t.data[idx] = original
            numeric = (plus - minus) / (2 * eps)
            error = abs(numeric - grad[idx]) / max(abs(numeric) + abs(grad[idx]), 1e-4)
            worst = max(worst, error)
    return worst
