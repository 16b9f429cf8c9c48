"""Frozen word embeddings: text-format loading and lookup."""
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from ..nn.checkpoint import decode_array, encode_array
from ..nn.tensor import Tensor

logger = logging.getLogger(__name__)


class EmbeddingTable:
    """Token -> row lookup over a fixed matrix; unknown tokens get a zero vector."""

    def __init__(self, vocabulary: Dict[str, int], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError(f"embedding matrix must be 2-D, got shape {matrix.shape}")
        for token, row in vocabulary.items():
            if not 0 <= row < matrix.shape[0]:
                raise ValueError(f"row {row} for {token!r} outside a {matrix.shape[0]}-row matrix")
        self.vocabulary = dict(vocabulary)
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.vocabulary)

    def __contains__(self, token: str) -> bool:
        return token in self.vocabulary

    def vector(self, token: str) -> np.ndarray:
        row = self.vocabulary.get(token)
        if row is None:
            return np.zeros(self.dim)
        return self.matrix[row]

    def lookup(self, tokens: Sequence[str]) -> Tensor:
        """(n, dim) constant tensor for a token sequence."""
        if not tokens:
            return Tensor(np.zeros((0, self.dim)))
        return Tensor(np.stack([self.vector(token) for token in tokens]))

    def coverage(self, tokens: Iterable[str]) -> float:
        tokens = list(tokens)
        if not tokens:
            return 0.0
        return sum(1 for t in tokens if t in self.vocabulary) / len(tokens)

    @classmethod
    def random(cls, tokens: Iterable[str], dim: int, seed: int) -> "EmbeddingTable":
        """Seeded N(0, 1) vectors for the given tokens, in sorted token order."""
        vocabulary = {token: row for row, token in enumerate(sorted(set(tokens)))}
        rng = np.random.default_rng(seed)
        return cls(vocabulary, rng.normal(0.0, 1.0, size=(len(vocabulary), dim)))

    def to_payload(self) -> Dict[str, Any]:
        ordered = sorted(self.vocabulary, key=self.vocabulary.get)
        rows = np.array([self.vocabulary[t] for t in ordered], dtype=int)
        return {"vocabulary": ordered, "matrix": encode_array(self.matrix[rows])}

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "EmbeddingTable":
        matrix = decode_array(payload["matrix"])
        vocabulary = {token: row for row, token in enumerate(payload["vocabulary"])}
        return cls(vocabulary, matrix)


def _is_header(parts: List[str]) -> bool:
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def load_embeddings(path: Union[str, Path], vocabulary: Optional[Iterable[str]] = None,
                    dim: Optional[int] = None) -> EmbeddingTable:
    """Read "token v1 v2 ..." lines, optionally restricted to ``vocabulary``.

    A leading word2vec "count dim" header line is skipped. The first occurrence
    of a duplicated token wins.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"embedding file not found: {path}")
    wanted = None if vocabulary is None else set(vocabulary)

    tokens: Dict[str, int] = {}
    rows: List[np.ndarray] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if line_no == 1 and _is_header(parts):
                continue
            token, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
            if len(values) != dim:
                raise ValueError(f"{path.name} line {line_no}: expected {dim} values, got {len(values)}")
            if token in tokens or (wanted is not None and token not in wanted):
                continue
            try:
                rows.append(np.asarray(values, dtype=np.float64))
            except ValueError as e:
                raise ValueError(f"{path.name} line {line_no}: {e}") from e
            tokens[token] = len(rows) - 1

    if dim is None:
        raise ValueError(f"embedding file {path} is empty")
    matrix = np.stack(rows) if rows else np.zeros((0, dim))
    logger.info("Loaded %d vectors of dimension %d from %s", len(rows), dim, path.name)
    return EmbeddingTable(tokens, matrix)
