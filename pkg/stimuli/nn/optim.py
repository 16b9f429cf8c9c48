"""Adam with bias-corrected moments."""
from typing import List, Sequence

import numpy as np

from .layers import Parameter


class Adam:
    def __init__(self, params: Sequence[Parameter], lr: float = 0.003,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params: List[Parameter] = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def step(self) -> None:
        """Apply one update from the accumulated gradients; missing grads count as zero."""
        grads = []
        for p in self.params:
            grad = np.zeros_like(p.data) if p.grad is None else p.grad
            if grad.shape != p.data.shape:
                raise ValueError(f"gradient shape {grad.shape} does not match parameter "
                                 f"{p.name or '?'} of shape {p.data.shape}")
            grads.append(grad)

        self.step_count += 1
        t = self.step_count
        for k, (p, grad) in enumerate(zip(self.params, grads)):
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * grad
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * grad ** 2
            m_hat = self.m[k] / (1 - self.beta1 ** t)
            v_hat = self.v[k] / (1 - self.beta2 ** t)
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()
