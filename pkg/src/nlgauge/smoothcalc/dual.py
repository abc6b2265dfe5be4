"""Tagged dual numbers for forward-mode differentiation.

Every seeding of a derivative direction gets a fresh integer tag.  A dual
with a higher tag may carry lower-tagged duals in its components, which is
what makes nested differentiation (derivatives of functions that internally
take derivatives) exact and free of perturbation confusion.
"""

from __future__ import annotations

import itertools
import math
from numbers import Real

_tags = itertools.count(1)


def new_tag() -> int:
    return next(_tags)


class Dual:
    """``re + du * eps_tag`` with ``eps_tag**2 == 0``."""

    __slots__ = ("re", "du", "tag")

    def __init__(self, re, du, tag: int):
        self.re = re
        self.du = du
        self.tag = tag

    def __repr__(self) -> str:
        return f"Dual({self.re!r}, {self.du!r}, tag={self.tag})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Dual):
            if other.tag == self.tag:
                return Dual(self.re + other.re, self.du + other.du, self.tag)
            if other.tag > self.tag:
                return other.__radd__(self)
        elif not isinstance(other, Real):
            return NotImplemented
        return Dual(self.re + other, self.du, self.tag)

    def __radd__(self, other):
        if not isinstance(other, (Real, Dual)):
            return NotImplemented
        return Dual(other + self.re, self.du, self.tag)

    def __sub__(self, other):
        if isinstance(other, Dual):
            if other.tag == self.tag:
                return Dual(self.re - other.re, self.du - other.du, self.tag)
            if other.tag > self.tag:
                return other.__rsub__(self)
        elif not isinstance(other, Real):
            return NotImplemented
        return Dual(self.re - other, self.du, self.tag)

    def __rsub__(self, other):
        if not isinstance(other, (Real, Dual)):
            return NotImplemented
        return Dual(other - self.re, -self.du, self.tag)

    def __mul__(self, other):
        if isinstance(other, Dual):
            if other.tag == self.tag:
                return Dual(self.re * other.re,
                            self.re * other.du + self.du * other.re, self.tag)
            if other.tag > self.tag:
                return other.__rmul__(self)
        elif not isinstance(other, Real):
            return NotImplemented
        return Dual(self.re * other, self.du * other, self.tag)

    def __rmul__(self, other):
        if not isinstance(other, (Real, Dual)):
            return NotImplemented
        return Dual(other * self.re, other * self.du, self.tag)

    def __truediv__(self, other):
        if isinstance(other, Dual):
            if other.tag == self.tag:
                q = self.re / other.re
                return Dual(q, (self.du - q * other.du) / other.re, self.tag)
            if other.tag > self.tag:
                return other.__rtruediv__(self)
        elif not isinstance(other, Real):
            return NotImplemented
        return Dual(self.re / other, self.du / other, self.tag)

    def __rtruediv__(self, other):
        if not isinstance(other, (Real, Dual)):
            return NotImplemented
        q = other / self.re
        return Dual(q, -q * self.du / self.re, self.tag)

    def __neg__(self):
        return Dual(-self.re, -self.du, self.tag)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, Dual) or not float(n).is_integer():
            raise TypeError("Dual supports integer exponents only")
        n = int(n)
        if n == 0:
            return Dual(self.re * 0 + 1.0, self.du * 0.0, self.tag)
        return Dual(self.re ** n, n * self.re ** (n - 1) * self.du, self.tag)

    # -- ordering acts on the primal value --------------------------------

    def __lt__(self, other):
        return primal(self) < primal(other)

    def __le__(self, other):
        return primal(self) <= primal(other)

    def __gt__(self, other):
        return primal(self) > primal(other)

    def __ge__(self, other):
        return primal(self) >= primal(other)

    def __abs__(self):
        return -self if primal(self) < 0 else self


def primal(x) -> float:
    """Strip every infinitesimal layer and return the float value."""
    while isinstance(x, Dual):
        x = x.re
    return float(x)


def tangent(y, tag: int):
    """Coefficient of ``eps_tag`` in ``y`` (zero when ``y`` does not depend on it)."""
    if isinstance(y, Dual) and y.tag == tag:
        return y.du
    return 0.0


def value(y, tag: int):
    """``y`` with the ``eps_tag`` layer removed."""
    if isinstance(y, Dual) and y.tag == tag:
        return y.re
    return y


def _lift(f, df):
    def fn(x):
        if isinstance(x, Dual):
            return Dual(fn(x.re), df(x.re) * x.du, x.tag)
        return f(x)
    fn.__name__ = f.__name__
    return fn


sin = _lift(math.sin, lambda x: cos(x))
cos = _lift(math.cos, lambda x: -sin(x))
exp = _lift(math.exp, lambda x: exp(x))
log = _lift(math.log, lambda x: 1.0 / x)
sqrt = _lift(math.sqrt, lambda x: 0.5 / sqrt(x))
tanh = _lift(math.tanh, lambda x: 1.0 - tanh(x) ** 2)
