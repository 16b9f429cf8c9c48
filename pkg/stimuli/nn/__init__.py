"""Small numpy autograd stack for the stimulus models."""
from .layers import BiLSTM, LSTM, Linear, Module, Parameter, attention, attention_weights, dropout
from .optim import Adam
from .tensor import Tensor, concat, is_grad_enabled, no_grad, stack

__all__ = [
    "Adam",
    "BiLSTM",
    "LSTM",
    "Linear",
    "Module",
    "Parameter",
    "Tensor",
    "attention",
    "attention_weights",
    "concat",
    "dropout",
    "is_grad_enabled",
    "no_grad",
    "stack",
]
