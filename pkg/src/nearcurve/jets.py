"""Truncated Taylor arithmetic for forward-mode derivatives of arbitrary order.

A ``Taylor`` value holds the coefficients ``c[k]`` of ``f(x0 + t) = sum c[k] t^k``
truncated at a fixed order.  Running an ordinary Python function on a Taylor
seed therefore yields exact-to-rounding derivatives of every order up to the
truncation, with no finite differencing.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence


class Taylor:
    """Truncated Taylor series with float coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence[float]):
        self.c = [float(v) for v in coeffs]

    @classmethod
    def variable(cls, x0: float, order: int) -> "Taylor":
        c = [0.0] * (order + 1)
        c[0] = float(x0)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value: float, order: int) -> "Taylor":
        c = [0.0] * (order + 1)
        c[0] = float(value)
        return cls(c)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    def _coerce(self, other) -> "Taylor":
        if isinstance(other, Taylor):
            if other.order != self.order:
                raise ValueError("mixed truncation orders")
            return other
        return Taylor.constant(float(other), self.order)

    def __add__(self, other):
        o = self._coerce(other)
        return Taylor([a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Taylor([-a for a in self.c])

    def __sub__(self, other):
        o = self._coerce(other)
        return Taylor([a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        n = self.order
        out = [0.0] * (n + 1)
        for k in range(n + 1):
            out[k] = math.fsum(self.c[j] * o.c[k - j] for j in range(k + 1))
        return Taylor(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.c[0] == 0.0:
            raise ZeroDivisionError("Taylor division by series with zero constant term")
        n = self.order
        out = [0.0] * (n + 1)
        for k in range(n + 1):
            acc = self.c[k] - math.fsum(out[j] * o.c[k - j] for j in range(k))
            out[k] = acc / o.c[0]
        return Taylor(out)

    def __rtruediv__(self, other):
        return Taylor.constant(float(other), self.order).__truediv__(self)

    def __pow__(self, p):
        if isinstance(p, int):
            if p < 0:
                return 1.0 / (self ** (-p))
            out = Taylor.constant(1.0, self.order)
            base = self
            e = p
            while e:
                if e & 1:
                    out = out * base
                base = base * base
                e >>= 1
            return out
        # real exponent needs a positive constant term
        return exp(log(self) * float(p))


def exp(t: Taylor) -> Taylor:
    n = t.order
    out = [0.0] * (n + 1)
    out[0] = math.exp(t.c[0])
    for k in range(1, n + 1):
        out[k] = math.fsum(j * t.c[j] * out[k - j] for j in range(1, k + 1)) / k
    return Taylor(out)


def log(t: Taylor) -> Taylor:
    if t.c[0] <= 0.0:
        raise ValueError("log needs a positive constant term")
    n = t.order
    out = [0.0] * (n + 1)
    out[0] = math.log(t.c[0])
    for k in range(1, n + 1):
        acc = t.c[k] - math.fsum(j * out[j] * t.c[k - j] for j in range(1, k)) / k
        out[k] = acc / t.c[0]
    return Taylor(out)


def sqrt(t: Taylor) -> Taylor:
    if t.c[0] <= 0.0:
        raise ValueError("sqrt needs a positive constant term")
    n = t.order
    out = [0.0] * (n + 1)
    out[0] = math.sqrt(t.c[0])
    for k in range(1, n + 1):
        acc = t.c[k] - math.fsum(out[j] * out[k - j] for j in range(1, k))
        out[k] = acc / (2.0 * out[0])
    return Taylor(out)


def sin(t: Taylor) -> Taylor:
    return _sincos(t)[0]


def cos(t: Taylor) -> Taylor:
    return _sincos(t)[1]


def _sincos(t: Taylor) -> tuple[Taylor, Taylor]:
    n = t.order
    s = [0.0] * (n + 1)
    c = [0.0] * (n + 1)
    s[0] = math.sin(t.c[0])
    c[0] = math.cos(t.c[0])
    for k in range(1, n + 1):
        s[k] = math.fsum(j * t.c[j] * c[k - j] for j in range(1, k + 1)) / k
        c[k] = -math.fsum(j * t.c[j] * s[k - j] for j in range(1, k + 1)) / k
    return Taylor(s), Taylor(c)


def derivatives(fn: Callable[[Taylor], Taylor], x0: float, order: int) -> list[float]:
    """Derivatives of ``fn`` at ``x0`` of orders 0..order.

    ``fn`` must be written in terms of Taylor-aware operations (arithmetic
    operators plus exp/log/sqrt/sin/cos from this module).
    """
    y = fn(Taylor.variable(x0, order))
    if not isinstance(y, Taylor):
        y = Taylor.constant(float(y), order)
    return [y.c[k] * math.factorial(k) for k in range(order + 1)]
