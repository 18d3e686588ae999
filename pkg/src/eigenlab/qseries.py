"""q-Pochhammer products (q)_r and (q)_inf with certified error bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

DEFAULT_EPS = 1e-12

# slack added per floating operation to absorb rounding
_ULP = 2.0 ** -51


@dataclass(frozen=True)
class ApproxValue:
    """A real number known to lie within ``err`` of ``value``.

    ``value`` is a Fraction when the quantity is known exactly (err == 0);
    arithmetic between exact values stays exact.
    """

    value: Fraction | float
    err: float = 0.0

    def __post_init__(self):
        if not (self.err >= 0 and math.isfinite(self.err)):
            raise ValueError(f"invalid error bound {self.err!r}")

    @classmethod
    def coerce(cls, x) -> ApproxValue:
        if isinstance(x, ApproxValue):
            return x
        if isinstance(x, Rational):
            return cls(Fraction(x))
        return cls(float(x))

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction) and self.err == 0

    @property
    def lo(self) -> float:
        return float(self.value) - self.err

    @property
    def hi(self) -> float:
        return float(self.value) + self.err

    def __float__(self):
        return float(self.value)

    def _wrap(self, value, err):
        v = float(value)
        return ApproxValue(v, err + abs(v) * _ULP)

    def __add__(self, other):
        o = ApproxValue.coerce(other)
        if self.exact and o.exact:
            return ApproxValue(self.value + o.value)
        return self._wrap(float(self.value) + float(o.value), self.err + o.err)

    __radd__ = __add__

    def __neg__(self):
        return ApproxValue(-self.value, self.err)

    def __sub__(self, other):
        return self + (-ApproxValue.coerce(other))

    def __rsub__(self, other):
        return ApproxValue.coerce(other) - self

    def __mul__(self, other):
        o = ApproxValue.coerce(other)
        if self.exact and o.exact:
            return ApproxValue(self.value * o.value)
        a, b = float(self.value), float(o.value)
        err = abs(a) * o.err + abs(b) * self.err + self.err * o.err
        return self._wrap(a * b, err)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = ApproxValue.coerce(other)
        if self.exact and o.exact:
            return ApproxValue(self.value / o.value)
        a, b = float(self.value), float(o.value)
        if abs(b) <= o.err:
            raise ZeroDivisionError("divisor interval contains zero")
        err = (abs(a) * o.err + abs(b) * self.err) / (abs(b) * (abs(b) - o.err))
        return self._wrap(a / b, err)

    def __rtruediv__(self, other):
        return ApproxValue.coerce(other) / self

    def contains(self, x) -> bool:
        return abs(float(x) - float(self.value)) <= self.err

    def to_json(self) -> dict:
        return {"value": float(self.value), "err": float(self.err)}


def poch_finite(q: int, r: int) -> Fraction:
    """(q)_r = prod_{i=1}^r (1 - q^-i), exactly."""
    if r < 0:
        raise ValueError(f"r={r} must be nonnegative")
    if q < 2:
        raise ValueError(f"q={q} must be >= 2")
    return _poch_finite(q, r)


@lru_cache(maxsize=None)
def _poch_finite(q: int, r: int) -> Fraction:
    if r == 0:
        return Fraction(1)
    return _poch_finite(q, r - 1) * (1 - Fraction(1, q ** r))


def truncation_index(q: int, eps: float) -> int:
    """Smallest N with (q)_N * q^-N / (q - 1) <= eps."""
    n = 0
    while True:
        width = _poch_finite(q, n) / (q ** n * (q - 1))
        if width <= Fraction(eps):
            return n
        n += 1


@lru_cache(maxsize=None)
def poch_infinite(q: int, eps: float = DEFAULT_EPS) -> ApproxValue:
    """(q)_inf as the midpoint of a certified bracket.

    The tail prod_{i>N}(1 - q^-i) lies in [1 - q^-N/(q-1), 1], so the true
    value is in [P_N (1 - q^-N/(q-1)), P_N] with P_N the N-th partial product.
    """
    if q < 2:
        raise ValueError(f"q={q} must be >= 2")
    if not eps > 0:
        raise ValueError("eps must be positive")
    n = truncation_index(q, eps)
    upper = _poch_finite(q, n)
    lower = upper * (1 - Fraction(1, q ** n * (q - 1)))
    mid = (upper + lower) / 2
    value = float(mid)
    err = float((upper - lower) / 2) + abs(float(Fraction(value) - mid)) + value * _ULP
    return ApproxValue(value, err)
