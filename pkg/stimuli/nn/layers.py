"""Layer primitives: parameters, linear maps, LSTMs, attention and dropout."""
from typing import Dict, Iterator, List, Tuple, Union

import numpy as np

from .tensor import Tensor, concat, stack

RandomState = Union[np.random.Generator, int, None]


class Parameter(Tensor):
    """A named leaf tensor owned by a module."""

    def __init__(self, data, name: str = "", trainable: bool = True):
        super().__init__(data, requires_grad=trainable)
        self.name = name
        self.trainable = trainable


def xavier_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


class Module:
    """Base class; parameters are discovered from instance attributes."""

    training: bool = True

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for attr, value in vars(self).items():
            path = f"{prefix}{attr}"
            if isinstance(value, Parameter):
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(path + ".")
            elif isinstance(value, (list, tuple)):
                for k, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{path}.{k}.")

    def parameters(self, trainable_only: bool = True) -> List[Parameter]:
        return [p for _, p in self.named_parameters() if p.trainable or not trainable_only]

    def zero_grad(self) -> None:
        for p in self.parameters(trainable_only=False):
            p.zero_grad()

    def train(self, mode: bool = True) -> "Module":
        for module in self._modules():
            module.training = mode
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def _modules(self) -> Iterator["Module"]:
        yield self
        for value in vars(self).values():
            if isinstance(value, Module):
                yield from value._modules()
            elif isinstance(value, (list, tuple)):
                for item in value:
                    if isinstance(item, Module):
                        yield from item._modules()

    def state_dict(self, trainable_only: bool = True) -> Dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()
                if p.trainable or not trainable_only}

    def load_state_dict(self, state: Dict[str, np.ndarray], strict: bool = True) -> None:
        params = dict(self.named_parameters())
        if strict:
            missing = [name for name, p in params.items() if p.trainable and name not in state]
            if missing:
                raise ValueError(f"state is missing parameters: {', '.join(missing)}")
        for name, values in state.items():
            if name not in params:
                raise ValueError(f"unexpected parameter {name!r}")
            values = np.asarray(values, dtype=np.float64)
            if values.shape != params[name].shape:
                raise ValueError(f"shape mismatch for {name}: {values.shape} vs {params[name].shape}")
            params[name].data = values.copy()


class Linear(Module):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.W = Parameter(xavier_uniform(rng, in_dim, out_dim), "W")
        self.b = Parameter(np.zeros(out_dim), "b")

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.W + self.b


class LSTM(Module):
    """Single-direction LSTM with fused gates in (input, forget, output, cell) order."""

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        self.hidden_dim = hidden_dim
        self.W = Parameter(xavier_uniform(rng, input_dim, 4 * hidden_dim), "W")
        self.U = Parameter(xavier_uniform(rng, hidden_dim, 4 * hidden_dim), "U")
        bias = np.zeros(4 * hidden_dim)
        bias[hidden_dim:2 * hidden_dim] = 1.0
        self.b = Parameter(bias, "b")

    def run(self, x: Tensor, reverse: bool = False) -> Tensor:
        """Hidden state per position for an (n, d) input; returns (n, h)."""
        n = x.shape[0]
        h_dim = self.hidden_dim
        projected = x @ self.W + self.b
        h = Tensor(np.zeros(h_dim))
        c = Tensor(np.zeros(h_dim))
        outputs: List[Tensor] = [None] * n
        steps = range(n - 1, -1, -1) if reverse else range(n)
        for t in steps:
            z = projected[t] + h @ self.U
            gates = z[:3 * h_dim].sigmoid()
            candidate = z[3 * h_dim:].tanh()
            c = gates[h_dim:2 * h_dim] * c + gates[:h_dim] * candidate
            h = gates[2 * h_dim:] * c.tanh()
            outputs[t] = h
        return stack(outputs)


class BiLSTM(Module):
    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        self.hidden_dim = hidden_dim
        self.fwd = LSTM(input_dim, hidden_dim, rng)
        self.bwd = LSTM(input_dim, hidden_dim, rng)

    def __call__(self, x: Tensor) -> Tensor:
        """(n, d) -> (n, 2h): forward state at i next to backward state at i."""
        if x.ndim != 2 or x.shape[0] == 0:
            raise ValueError("BiLSTM needs a non-empty (n, d) sequence")
        return concat([self.fwd.run(x), self.bwd.run(x, reverse=True)], axis=1)


def attention_weights(hidden: Tensor, include_self: bool = True) -> Tensor:
    """Row i is softmax_j(h_i . h_j)."""
    scores = hidden @ hidden.T
    n = hidden.shape[0]
    if not include_self and n > 1:
        scores = scores + np.eye(n) * -1e9
    return scores.softmax(axis=-1)


def attention(hidden: Tensor, include_self: bool = True) -> Tensor:
    """(n, k) -> (n, 2k): each state next to its attention-weighted context."""
    if hidden.shape[0] == 0:
        raise ValueError("attention needs a non-empty sequence")
    context = attention_weights(hidden, include_self) @ hidden
    return concat([hidden, context], axis=1)


def dropout(x: Tensor, p: float, training: bool, rng: RandomState = None) -> Tensor:
    """Inverted dropout; identity at inference or when p is 0."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"dropout probability must be in [0, 1), got {p}")
    if not training or p == 0.0:
        return x
    rng = np.random.default_rng(rng)
    keep = (rng.random(x.shape) >= p) / (1.0 - p)
    return x * keep
