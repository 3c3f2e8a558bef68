"""First-order optimizers over a model's trainable parameters.

Complex parameters are updated through their real view, so each real and
imaginary component gets its own moment estimates.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SGD", "Adam", "make_optimizer"]


def _real(a):
    return a.view(np.float64) if np.iscomplexobj(a) else a


class SGD:
    def __init__(self, model, learning_rate, momentum=0.0):
        if learning_rate is None:
            raise ValueError("learning_rate is required")
        self.model = model
        self.lr = float(learning_rate)
        self.momentum = float(momentum)
        self._velocity = {}

    def step(self):
        for path, p, g in self.model.named_parameters():
            p, g = _real(p), _real(g)
            if self.momentum:
                v = self._velocity.setdefault(path, np.zeros_like(p))
                v *= self.momentum
                v += g
                g = v
            p -= self.lr * g


class Adam:
    def __init__(self, model, learning_rate, beta1=0.9, beta2=0.999, eps=1e-8):
        if learning_rate is None:
            raise ValueError("learning_rate is required")
        self.model = model
        self.lr = float(learning_rate)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self._m = {}
        self._v = {}

    def step(self):
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for path, p, g in self.model.named_parameters():
            p, g = _real(p), _real(g)
            m = self._m.setdefault(path, np.zeros_like(p))
            v = self._v.setdefault(path, np.zeros_like(p))
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def make_optimizer(name, model, learning_rate, **kwargs):
    if name == "adam":
        return Adam(model, learning_rate, **kwargs)
    if name == "sgd":
        return SGD(model, learning_rate, **kwargs)
    raise ValueError(f"unknown optimizer {name!r}; expected 'adam' or 'sgd'")
