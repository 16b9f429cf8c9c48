"""Reverse-mode automatic differentiation over float64 numpy arrays."""
import threading
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

ArrayLike = Union[np.ndarray, float, int, Sequence]

# grad mode is per thread
_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Build no graph inside the block (inference). Affects the calling thread only."""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """A node in the computation graph.

    Leaves with ``requires_grad`` accumulate ``grad`` across backward calls until
    zeroed; intermediate nodes are reset on every backward.
    """

    # numpy defers to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, data: ArrayLike, requires_grad: bool = False,
                 _parents: Tuple["Tensor", ...] = (), _op: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._op = _op
        self._backward: Callable[[], None] = lambda: None

    # -- graph plumbing --------------------------------------------------

    @staticmethod
    def _lift(value: Union["Tensor", ArrayLike]) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    def _child(self, data: np.ndarray, parents: Tuple["Tensor", ...], op: str) -> "Tensor":
        if is_grad_enabled() and any(p.requires_grad for p in parents):
            return Tensor(data, requires_grad=True, _parents=parents, _op=op)
        return Tensor(data)

    def _accumulate(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad = self.grad + grad

    def backward(self) -> None:
        """Propagate d(self)/d(node) to every reachable node that requires grad."""
        if self.data.size != 1:
            raise ValueError(f"backward needs a scalar loss, got shape {self.data.shape}")

        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))

        for node in order:
            if node._parents:
                node.grad = None
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node.grad is not None:
                node._backward()

    def zero_grad(self) -> None:
        self.grad = None

    # -- accessors -------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def __len__(self) -> int:
        return len(self.data)

    def item(self) -> float:
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self._op or 'leaf'})"

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other) -> "Tensor":
        other = self._lift(other)
        out = self._child(self.data + other.data, (self, other), "add")

        def _backward():
            self._accumulate(_unbroadcast(out.grad, self.shape))
            other._accumulate(_unbroadcast(out.grad, other.shape))
        out._backward = _backward
        return out

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        out = self._child(-self.data, (self,), "neg")

        def _backward():
            self._accumulate(-out.grad)
        out._backward = _backward
        return out

    def __sub__(self, other) -> "Tensor":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Tensor":
        return self._lift(other) + (-self)

    def __mul__(self, other) -> "Tensor":
        other = self._lift(other)
        out = self._child(self.data * other.data, (self, other), "mul")

        def _backward():
            self._accumulate(_unbroadcast(out.grad * other.data, self.shape))
            other._accumulate(_unbroadcast(out.grad * self.data, other.shape))
        out._backward = _backward
        return out

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Tensor":
        other = self._lift(other)
        out = self._child(self.data / other.data, (self, other), "div")

        def _backward():
            self._accumulate(_unbroadcast(out.grad / other.data, self.shape))
            other._accumulate(_unbroadcast(-out.grad * self.data / other.data ** 2, other.shape))
        out._backward = _backward
        return out

    def __rtruediv__(self, other) -> "Tensor":
        return self._lift(other) / self

    def __matmul__(self, other) -> "Tensor":
        other = self._lift(other)
        a = self.data if self.ndim == 2 else self.data[None, :]
        b = other.data if other.ndim == 2 else other.data[:, None]
        out = self._child(self.data @ other.data, (self, other), "matmul")

        def _backward():
            g = out.grad.reshape(a.shape[0], b.shape[1])
            self._accumulate((g @ b.T).reshape(self.shape))
            other._accumulate((a.T @ g).reshape(other.shape))
        out._backward = _backward
        return out

    def __getitem__(self, index) -> "Tensor":
        out = self._child(self.data[index], (self,), "getitem")

        def _backward():
            grad = np.zeros_like(self.data)
            np.add.at(grad, index, out.grad)
            self._accumulate(grad)
        out._backward = _backward
        return out

    # -- reductions and shape ---------------------------------------------

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        out = self._child(self.data.sum(axis=axis, keepdims=keepdims), (self,), "sum")

        def _backward():
            grad = out.grad
            if axis is not None and not keepdims:
                grad = np.expand_dims(grad, axis)
            self._accumulate(np.broadcast_to(grad, self.shape).copy())
        out._backward = _backward
        return out

    def mean(self, axis: Optional[int] = None) -> "Tensor":
        count = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis) / count

    def reshape(self, *shape: int) -> "Tensor":
        out = self._child(self.data.reshape(*shape), (self,), "reshape")

        def _backward():
            self._accumulate(out.grad.reshape(self.shape))
        out._backward = _backward
        return out

    @property
    def T(self) -> "Tensor":
        out = self._child(self.data.T, (self,), "transpose")

        def _backward():
            self._accumulate(out.grad.T)
        out._backward = _backward
        return out

    # -- elementwise -------------------------------------------------------

    def exp(self) -> "Tensor":
        value = np.exp(self.data)
        out = self._child(value, (self,), "exp")

        def _backward():
            self._accumulate(out.grad * value)
        out._backward = _backward
        return out

    def log(self) -> "Tensor":
        out = self._child(np.log(self.data), (self,), "log")

        def _backward():
            self._accumulate(out.grad / self.data)
        out._backward = _backward
        return out

    def tanh(self) -> "Tensor":
        value = np.tanh(self.data)
        out = self._child(value, (self,), "tanh")

        def _backward():
            self._accumulate(out.grad * (1.0 - value ** 2))
        out._backward = _backward
        return out

    def sigmoid(self) -> "Tensor":
        value = 0.5 * (1.0 + np.tanh(0.5 * self.data))
        out = self._child(value, (self,), "sigmoid")

        def _backward():
            self._accumulate(out.grad * value * (1.0 - value))
        out._backward = _backward
        return out

    def relu(self) -> "Tensor":
        mask = self.data > 0
        out = self._child(self.data * mask, (self,), "relu")

        def _backward():
            self._accumulate(out.grad * mask)
        out._backward = _backward
        return out

    # -- normalisers -------------------------------------------------------

    def logsumexp(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        peak = self.data.max(axis=axis, keepdims=True)
        shifted = np.exp(self.data - peak)
        total = shifted.sum(axis=axis, keepdims=True)
        value = peak + np.log(total)
        weights = shifted / total
        if not keepdims:
            value = value.squeeze() if axis is None else value.squeeze(axis=axis)
        out = self._child(value, (self,), "logsumexp")

        def _backward():
            grad = out.grad
            if axis is not None and not keepdims:
                grad = np.expand_dims(grad, axis)
            self._accumulate(grad * weights)
        out._backward = _backward
        return out

    def softmax(self, axis: int = -1) -> "Tensor":
        shifted = np.exp(self.data - self.data.max(axis=axis, keepdims=True))
        value = shifted / shifted.sum(axis=axis, keepdims=True)
        out = self._child(value, (self,), "softmax")

        def _backward():
            inner = (out.grad * value).sum(axis=axis, keepdims=True)
            self._accumulate(value * (out.grad - inner))
        out._backward = _backward
        return out

    def log_softmax(self, axis: int = -1) -> "Tensor":
        peak = self.data.max(axis=axis, keepdims=True)
        log_total = np.log(np.exp(self.data - peak).sum(axis=axis, keepdims=True))
        value = self.data - peak - log_total
        out = self._child(value, (self,), "log_softmax")

        def _backward():
            probs = np.exp(value)
            self._accumulate(out.grad - probs * out.grad.sum(axis=axis, keepdims=True))
        out._backward = _backward
        return out


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [Tensor._lift(t) for t in tensors]
    if not tensors:
        raise ValueError("concat needs at least one tensor")
    value = np.concatenate([t.data for t in tensors], axis=axis)
    out = tensors[0]._child(value, tuple(tensors), "concat")
    edges = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def _backward():
        for tensor, grad in zip(tensors, np.split(out.grad, edges, axis=axis)):
            tensor._accumulate(grad)
    out._backward = _backward
    return out


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [Tensor._lift(t) for t in tensors]
    if not tensors:
        raise ValueError("stack needs at least one tensor")
    value = np.stack([t.data for t in tensors], axis=axis)
    out = tensors[0]._child(value, tuple(tensors), "stack")

    def _backward():
        for k, tensor in enumerate(tensors):
            tensor._accumulate(np.take(out.grad, k, axis=axis))
    out._backward = _backward
    return out
