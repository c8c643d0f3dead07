"""Second-order forward-mode jets.

A :class:`Jet2` carries a value together with its gradient and Hessian with
respect to ``d`` independent parameters. Values may carry leading batch axes:
``value`` has shape ``S``, ``grad`` has shape ``S + (d,)`` and ``hess`` has
shape ``S + (d, d)``, so one pass over an expression tree evaluates a whole
set of points.

Every rule below keeps the Hessian bit-exactly symmetric: each term is either
a scalar multiple of a symmetric array or a sum ``a_i b_j + b_i a_j``, whose
floating-point value does not depend on the order of ``i`` and ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def _outer(a, b):
    return a[..., :, None] * b[..., None, :]


@dataclass(frozen=True)
class Jet2:
    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    @property
    def d(self) -> int:
        return self.grad.shape[-1]

    @classmethod
    def constant(cls, c, d: int, shape=()) -> "Jet2":
        value = np.full(shape, float(c))
        return cls(value, np.zeros(shape + (d,)), np.zeros(shape + (d, d)))

    @classmethod
    def variable(cls, x, index: int, d: int) -> "Jet2":
        value = np.asarray(x, dtype=float)
        grad = np.zeros(value.shape + (d,))
        grad[..., index] = 1.0
        return cls(value, grad, np.zeros(value.shape + (d, d)))

    # arithmetic -----------------------------------------------------------

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __add__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    def __sub__(self, other: "Jet2") -> "Jet2":
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __mul__(self, other: "Jet2") -> "Jet2":
        a, b = self, other
        av, bv = a.value[..., None], b.value[..., None]
        grad = a.grad * bv + b.grad * av
        hess = (
            a.hess * bv[..., None]
            + b.hess * av[..., None]
            + (_outer(a.grad, b.grad) + _outer(b.grad, a.grad))
        )
        return Jet2(a.value * b.value, grad, hess)

    def __truediv__(self, other: "Jet2") -> "Jet2":
        if np.any(other.value == 0.0):
            raise DomainError("division", 0.0)
        return self * other.reciprocal()

    def reciprocal(self) -> "Jet2":
        v = self.value
        return self._chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def _chain(self, f, df, d2f) -> "Jet2":
        """Compose a scalar function with value/derivatives ``f, df, d2f`` at self."""
        df_ = np.asarray(df, dtype=float)[..., None]
        d2f_ = np.asarray(d2f, dtype=float)[..., None, None]
        grad = df_ * self.grad
        hess = df_[..., None] * self.hess + d2f_ * _outer(self.grad, self.grad)
        return Jet2(np.asarray(f, dtype=float), grad, hess)

    def ipow(self, n: int) -> "Jet2":
        v = self.value
        if n == 0:
            return Jet2.constant(1.0, self.d, v.shape)
        if n < 0 and np.any(v == 0.0):
            raise DomainError(f"^{n}", 0.0)
        f = v**n
        df = n * v ** (n - 1)
        d2f = n * (n - 1) * v ** (n - 2) if n not in (0, 1) else np.zeros_like(v)
        return self._chain(f, df, d2f)

    # elementary functions ----------------------------------------------------

    def sin(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(c, -s, -c)

    def tan(self) -> "Jet2":
        c = np.cos(self.value)
        bad = np.abs(c) < 1e-12
        if np.any(bad):
            raise DomainError("tan", float(np.asarray(self.value)[bad].flat[0]))
        t = np.tan(self.value)
        sec2 = 1.0 + t * t
        return self._chain(t, sec2, 2.0 * t * sec2)

    def exp(self) -> "Jet2":
        e = np.exp(self.value)
        return self._chain(e, e, e)

    def log(self) -> "Jet2":
        v = self.value
        bad = v <= 0.0
        if np.any(bad):
            raise DomainError("log", float(np.asarray(v)[bad].flat[0]))
        return self._chain(np.log(v), 1.0 / v, -1.0 / (v * v))

    def sqrt(self) -> "Jet2":
        v = self.value
        bad = v <= 0.0
        if np.any(bad):
            # value exists at 0 but the derivatives do not
            raise DomainError("sqrt", float(np.asarray(v)[bad].flat[0]))
        r = np.sqrt(v)
        return self._chain(r, 0.5 / r, -0.25 / (r * v))
