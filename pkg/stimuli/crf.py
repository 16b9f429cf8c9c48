"""Linear-chain CRF: path scores, forward-algorithm normaliser, NLL and Viterbi."""
import itertools
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .corpus import IOB_LABELS, I, O
from .nn.layers import Module, Parameter
from .nn.tensor import Tensor

Emissions = Union[Tensor, np.ndarray]

BRUTE_FORCE_LIMIT = 10 ** 6


class CrfParams(Module):
    """Transition matrix T[i, j] (label i followed by j) and boundary score vectors.

    With ``boundary_scores=False`` the start/end vectors are fixed at zero and
    not trained.
    """

    def __init__(self, transitions: np.ndarray, start_scores: Optional[np.ndarray] = None,
                 end_scores: Optional[np.ndarray] = None, boundary_scores: bool = True):
        transitions = np.asarray(transitions, dtype=np.float64)
        if transitions.ndim != 2 or transitions.shape[0] != transitions.shape[1] or transitions.shape[0] < 1:
            raise ValueError(f"transitions must be a non-empty square matrix, got {transitions.shape}")
        num_labels = transitions.shape[0]
        start = np.zeros(num_labels) if start_scores is None else np.asarray(start_scores, dtype=np.float64)
        end = np.zeros(num_labels) if end_scores is None else np.asarray(end_scores, dtype=np.float64)
        for name, values in (("transitions", transitions), ("start_scores", start), ("end_scores", end)):
            if not np.all(np.isfinite(values)):
                raise ValueError(f"{name} must be finite")
        if start.shape != (num_labels,) or end.shape != (num_labels,):
            raise ValueError(f"start/end scores must have shape ({num_labels},)")
        self.num_labels = num_labels
        self.boundary_scores = boundary_scores
        self.transitions = Parameter(transitions, "transitions")
        self.start_scores = Parameter(start, "start_scores", trainable=boundary_scores)
        self.end_scores = Parameter(end, "end_scores", trainable=boundary_scores)

    @classmethod
    def zeros(cls, num_labels: int, boundary_scores: bool = True) -> "CrfParams":
        return cls(np.zeros((num_labels, num_labels)), boundary_scores=boundary_scores)


def _as_tensor(u: Emissions) -> Tensor:
    return u if isinstance(u, Tensor) else Tensor(u)


def _as_array(u: Emissions) -> np.ndarray:
    return u.data if isinstance(u, Tensor) else np.asarray(u, dtype=np.float64)


def _check(u: np.ndarray, params: CrfParams, labels: Optional[Sequence[int]] = None) -> None:
    if u.ndim != 2 or u.shape[0] < 1:
        raise ValueError(f"emissions must be an (n >= 1, L) matrix, got {u.shape}")
    if u.shape[1] != params.num_labels:
        raise ValueError(f"emissions have {u.shape[1]} labels, CRF has {params.num_labels}")
    if labels is not None:
        if len(labels) != u.shape[0]:
            raise ValueError(f"{len(labels)} labels for {u.shape[0]} positions")
        for label in labels:
            if not 0 <= label < params.num_labels:
                raise ValueError(f"label {label} out of range for {params.num_labels} labels")


def _path_score(u: np.ndarray, labels: np.ndarray, transitions: np.ndarray,
                start: np.ndarray, end: np.ndarray) -> np.ndarray:
    """Score of one path (labels of shape (n,)) or many (shape (k, n)).

    Accumulates left to right in the same order as the Viterbi recursion so
    that both produce bit-identical totals.
    """
    labels = np.asarray(labels)
    first, last = labels[..., 0], labels[..., -1]
    score = start[first] + u[0, first]
    for i in range(1, u.shape[0]):
        score = (score + transitions[labels[..., i - 1], labels[..., i]]) + u[i, labels[..., i]]
    return score + end[last]


def score_sequence(u: Emissions, labels: Sequence[int], params: CrfParams) -> Tensor:
    """sum_i u[i, y_i] + sum_i T[y_{i-1}, y_i] + start[y_1] + end[y_n]."""
    u = _as_tensor(u)
    _check(u.data, params, labels)
    y = np.asarray(labels, dtype=int)
    score = u[np.arange(len(y)), y].sum() + params.start_scores[y[0]] + params.end_scores[y[-1]]
    if len(y) > 1:
        score = score + params.transitions[y[:-1], y[1:]].sum()
    return score


def log_partition(u: Emissions, params: CrfParams) -> Tensor:
    """log of the summed exp-score over all label sequences (forward algorithm)."""
    u = _as_tensor(u)
    _check(u.data, params)
    L = params.num_labels
    alpha = params.start_scores + u[0]
    for i in range(1, u.shape[0]):
        alpha = (alpha.reshape(L, 1) + params.transitions).logsumexp(axis=0) + u[i]
    return (alpha + params.end_scores).logsumexp()


def nll_loss(u: Emissions, gold: Sequence[int], params: CrfParams) -> Tensor:
    return log_partition(u, params) - score_sequence(u, gold, params)


def viterbi_decode(u: Emissions, params: CrfParams, allowed: Optional[np.ndarray] = None,
                   allowed_start: Optional[np.ndarray] = None) -> Tuple[List[int], float]:
    """Highest-scoring label sequence and its score.

    Ties resolve to the lower label index at every backpointer. ``allowed`` and
    ``allowed_start`` are optional boolean masks over transitions and first labels.
    """
    u = _as_array(u)
    _check(u, params)
    transitions = params.transitions.data
    start = params.start_scores.data
    end = params.end_scores.data
    masked_transitions = transitions if allowed is None else np.where(allowed, transitions, -np.inf)

    delta = start + u[0]
    if allowed_start is not None:
        delta = np.where(allowed_start, delta, -np.inf)
    backpointers = []
    for i in range(1, u.shape[0]):
        candidates = delta[:, None] + masked_transitions
        best_previous = np.argmax(candidates, axis=0)
        backpointers.append(best_previous)
        delta = candidates[best_previous, np.arange(params.num_labels)] + u[i]

    best = int(np.argmax(delta + end))
    path = [best]
    for pointers in reversed(backpointers):
        best = int(pointers[best])
        path.append(best)
    path.reverse()
    score = float(_path_score(u, np.asarray(path), transitions, start, end))
    return path, score


def brute_force_decode(u: Emissions, params: CrfParams) -> Tuple[List[int], float]:
    """Exhaustive argmax; ties go to the lexicographically smallest sequence."""
    u = _as_array(u)
    _check(u, params)
    n, L = u.shape
    if L ** n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"search space {L}^{n} exceeds {BRUTE_FORCE_LIMIT} sequences")
    paths = np.array(list(itertools.product(range(L), repeat=n)), dtype=int)
    scores = _path_score(u, paths, params.transitions.data,
                         params.start_scores.data, params.end_scores.data)
    best = int(np.argmax(scores))
    return paths[best].tolist(), float(scores[best])


def iob_transition_mask() -> Tuple[np.ndarray, np.ndarray]:
    """Masks forbidding O -> I and a sequence-initial I, in IOB_LABELS order."""
    index = {label: k for k, label in enumerate(IOB_LABELS)}
    allowed = np.ones((len(IOB_LABELS), len(IOB_LABELS)), dtype=bool)
    allowed[index[O], index[I]] = False
    allowed_start = np.ones(len(IOB_LABELS), dtype=bool)
    allowed_start[index[I]] = False
    return allowed, allowed_start
