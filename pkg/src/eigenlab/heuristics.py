"""Closed-form eigenspace distributions, u-probabilities and identity checks."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from . import pgroups
from .pgroups import (aut_order, enumerate_types, format_type, group_order,
                      parse_type, power_rank, sort_key, weight)
from .qseries import DEFAULT_EPS, ApproxValue, poch_finite, poch_infinite

INF = math.inf


@dataclass
class DistTable:
    """Truncated distribution on group types plus a bound on the missing mass."""

    q: int
    u_level: int
    entries: dict = field(default_factory=dict)
    tail: float = 0.0
    m: int | None = None

    def __post_init__(self):
        self.entries = {g: ApproxValue.coerce(v)
                        for g, v in sorted(self.entries.items(), key=lambda kv: sort_key(kv[0]))}
        if self.tail < 0:
            raise ValueError("tail must be nonnegative")

    def __getitem__(self, g):
        return self.entries[g]

    def get(self, g, default=None):
        return self.entries.get(g, default)

    def mass(self) -> ApproxValue:
        total = ApproxValue(Fraction(0))
        for v in self.entries.values():
            total = total + v
        return total

    def max_err(self) -> float:
        return max((v.err for v in self.entries.values()), default=0.0)

    def to_json(self) -> dict:
        doc = {"q": self.q, "u": self.u_level}
        if self.m is not None:
            doc["m"] = self.m
        doc["entries"] = {format_type(g): v.to_json() for g, v in self.entries.items()}
        doc["tail"] = float(self.tail)
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, doc: dict) -> DistTable:
        entries = {parse_type(k): ApproxValue(float(v["value"]), float(v["err"]))
                   for k, v in doc["entries"].items()}
        return cls(q=int(doc["q"]), u_level=int(doc["u"]), entries=entries,
                   tail=float(doc.get("tail", 0.0)), m=doc.get("m"))

    def to_csv(self) -> str:
        lines = ["group,value,err"]
        lines += [f"\"{format_type(g)}\",{float(v.value)!r},{v.err!r}"
                  for g, v in self.entries.items()]
        return "\n".join(lines) + "\n"


# -- closed forms --------------------------------------------------------------

def _pair_prefactor(q: int, eps: float) -> ApproxValue:
    """(q)_inf / (q^2)_inf."""
    return poch_infinite(q, eps) / poch_infinite(q * q, eps)


def prefactor(m: int, q: int, eps: float = DEFAULT_EPS) -> ApproxValue:
    """The transcendental factor shared by all closed forms at level m."""
    if m == 0:
        return poch_infinite(q, eps)
    if m in (1, 2):
        return _pair_prefactor(q, eps)
    raise ValueError(f"no closed formula for m={m}; use an empirical base distribution")


def closed_rational(m: int, q: int, g) -> Fraction:
    """Rational part of the limit distribution P_m(G), i.e. P_m(G) / prefactor(m, q)."""
    r = power_rank(g, 1) if g else 0
    aut = aut_order(g, q)
    if m == 0:
        return Fraction(1, aut)
    if m == 1:
        return poch_finite(q, r) * q ** comb(r, 2) / aut
    if m == 2:
        s = power_rank(g, 2) if g else 0
        t = (r - s) // 2
        return (poch_finite(q, r - s) * poch_finite(q, s) * q ** (comb(r, 2) + comb(s, 2))
                / (poch_finite(q * q, t) * aut))
    raise ValueError(f"no closed formula for m={m} (closed forms exist only for m <= 2)")


def _scaled(rational: Fraction, m: int, q: int, eps: float) -> ApproxValue:
    inner = eps / 10
    while True:
        value = prefactor(m, q, inner) * rational
        if value.err <= eps:
            return value
        inner /= 10


def p_closed(m: int, q: int, g, eps: float = DEFAULT_EPS) -> ApproxValue:
    """Limit proportion of elements with fixed space of type g, m in {0, 1, 2}."""
    if m not in (0, 1, 2):
        raise ValueError(f"no closed formula for m={m} (closed forms exist only for m <= 2)")
    return _scaled(closed_rational(m, q, g), m, q, eps)


def u_closed_rational(m: int, q: int, u: int, g) -> Fraction:
    if u < 0:
        raise ValueError("u must be >= 0")
    r = len(g)
    size = Fraction(group_order(g, q)) ** u
    aut = aut_order(g, q)
    if m == 0:
        return 1 / (poch_finite(q, u) * size * aut)
    if m == 1:
        return (poch_finite(q * q, u) / poch_finite(q, u)
                * poch_finite(q, r + u) * q ** comb(r, 2)
                / (poch_finite(q, u) * size * aut))
    raise ValueError(f"no closed u-probability formula for m={m}; use u_step")


def u_closed(m: int, q: int, u: int, g, eps: float = DEFAULT_EPS) -> ApproxValue:
    """Closed u-probabilities at levels m = 0 and m = 1."""
    if m not in (0, 1):
        raise ValueError(f"no closed u-probability formula for m={m}; use u_step")
    return _scaled(u_closed_rational(m, q, u, g), m, q, eps)


def weight_w(k, g, q: int) -> Fraction:
    """Truncated Cohen-Lenstra weight w_k(G); k may be math.inf."""
    aut = aut_order(g, q)
    if k == INF:
        return Fraction(1, aut)
    if k < 0:
        raise ValueError("k must be >= 0")
    r = len(g)
    if k < r:
        return Fraction(0)
    return poch_finite(q, k) / (poch_finite(q, k - r) * aut)


# -- tables and the u-step -----------------------------------------------------

def closed_table(m: int, q: int, max_weight: int, u: int = 0,
                 eps: float = DEFAULT_EPS) -> DistTable:
    """Closed-form table over all types of weight <= max_weight."""
    if u == 0 and m in (0, 1, 2):
        entries = {g: p_closed(m, q, g, eps) for g in enumerate_types(max_weight)}
    else:
        entries = {g: u_closed(m, q, u, g, eps) for g in enumerate_types(max_weight)}
    return _seal(DistTable(q=q, u_level=u, entries=entries, m=m))


def _seal(table: DistTable) -> DistTable:
    # missing mass of a distribution summing to 1, bounded from above
    lower = sum(Fraction(v.lo) if not v.exact else v.value for v in table.entries.values())
    table.tail = max(0.0, float(1 - lower) * (1 + 2 ** -50))
    return table


def u_step(table: DistTable, max_weight: int, p: int) -> DistTable:
    """One step of the u-probability recursion, truncated to weight <= max_weight.

    Mass from types heavier than max_weight is moved into the tail.  Every
    retained H only feeds quotients of weight <= weight(H), so the retained
    mass is carried over exactly.
    """
    if table.q != p:
        raise ValueError(f"table is over q={table.q}, recursion needs q == p == {p}")
    out: dict = {}
    tail = table.tail
    for h, ph in table.entries.items():
        if weight(h) > max_weight:
            tail += ph.hi
            continue
        size = group_order(h, p)
        for g, by_order in pgroups.cyclic_quotient_table(h, p).items():
            coef = Fraction(sum(by_order.values()), size)
            term = ph * coef
            out[g] = out[g] + term if g in out else term
    for g in enumerate_types(max_weight):
        out.setdefault(g, ApproxValue(Fraction(0)))
    return DistTable(q=p, u_level=table.u_level + 1, entries=out, tail=tail, m=table.m)


def table_from_report(report, max_weight: int) -> DistTable:
    """Empirical base distribution from a SpectrumReport.

    Types of exponent >= f are cut off by the modulus, so their mass goes to
    the tail together with anything heavier than max_weight.
    """
    f = report.spec.f
    total = report.total
    if total <= 0:
        raise ValueError("empty spectrum report")
    entries, tail = {}, Fraction(0)
    for g, c in report.counts.items():
        freq = Fraction(c, total)
        if (g and g[0] >= f) or weight(g) > max_weight:
            tail += freq
        else:
            entries[g] = freq
    for g in enumerate_types(max_weight):
        entries.setdefault(g, Fraction(0))
    return DistTable(q=report.spec.p, u_level=0, entries=entries, tail=float(tail),
                     m=report.spec.m)


def predict(p: int, m: int, u: int, max_weight: int, base=None,
            eps: float = DEFAULT_EPS) -> DistTable:
    """P_{m,p}^{(u)} over all types of weight <= max_weight.

    m <= 1 uses the closed formulas; m = 2 starts from the closed level-2
    distribution and applies the recursion u times; m >= 3 needs an empirical
    ``base`` SpectrumReport.
    """
    if m < 0 or u < 0:
        raise ValueError("m and u must be nonnegative")
    if m <= 1:
        return closed_table(m, p, max_weight, u=u, eps=eps)
    if m == 2:
        table = closed_table(2, p, max_weight, eps=eps)
    else:
        if base is None:
            raise ValueError(f"m={m} has no closed form; a base spectrum report is required")
        if base.spec.p != p or base.spec.m != m:
            raise ValueError("base report does not match (p, m)")
        table = table_from_report(base, max_weight)
    for _ in range(u):
        table = u_step(table, max_weight, p)
    return table


def rank_probability_m1(p: int, u: int, r: int, eps: float = DEFAULT_EPS) -> ApproxValue:
    """Probability of p-rank r under P_{1,p}^{(u)}."""
    if u < 0 or r < 0:
        raise ValueError("u and r must be nonnegative")
    rational = (poch_finite(p * p, u) / poch_finite(p, u)
                / (p ** (r * (r + 2 * u + 1) // 2) * poch_finite(p, r)))
    return _scaled(rational, 1, p, eps)


# -- identity checks -------------------------------------------------------------

@dataclass(frozen=True)
class Residual:
    lhs: Fraction
    rhs: Fraction
    tail: Fraction = Fraction(0)
    per_order: dict = field(default_factory=dict)

    @property
    def residual(self) -> Fraction:
        return abs(self.lhs - self.rhs)

    @property
    def within_tail(self) -> bool:
        return self.residual <= self.tail


def check_hall(k, z, g, q: int, max_weight: int) -> Residual:
    """Both sides of the weighted subgroup-count identity for (Z, G).

    Only H with |H| = |Z||G| contribute, so the sum is finite and exact as
    long as max_weight >= weight(Z) + weight(G).
    """
    need = weight(z) + weight(g)
    if max_weight < need:
        raise ValueError(f"max_weight must be >= weight(Z) + weight(G) = {need}")
    lhs = Fraction(0)
    for h in pgroups.partitions_of(need):
        wk = weight_w(k, h, q)
        if wk == 0:
            continue
        # w_k(H) already carries the 1/|Aut(H)| factor
        lhs += wk * pgroups.count_subgroups_iso_with_quotient(h, z, g, q)
    return Residual(lhs=lhs, rhs=weight_w(k, z, q) * weight_w(k, g, q))


def check_lemma_m1(g, u: int, q: int, max_exponent: int) -> Residual:
    """Cyclic-quotient sum over rank-r groups H of exponent <= max_exponent.

    Contributions are grouped by n with |<y>| = q^n.  Orders n <= N with
    N = max_exponent - exponent(G) are complete; for n >= 1 they decay by
    exactly q^-u, so the omitted mass is at most S_N q^-u / (1 - q^-u).
    """
    if u < 1:
        raise ValueError("u must be >= 1")
    r = len(g)
    last = max_exponent - pgroups.exponent(g)
    if r > 0 and last < 1:
        raise ValueError("max_exponent must exceed the exponent of G")
    per_order: dict = {}
    hs = [()] if r == 0 else pgroups.types_with_rank(r, max_exponent)
    for h in hs:
        by_order = pgroups.cyclic_quotient_table(h, q).get(tuple(g), {})
        denom = Fraction(group_order(h, q)) ** u * aut_order(h, q)
        for n, c in by_order.items():
            per_order[n] = per_order.get(n, Fraction(0)) + c / denom
    lhs = sum(per_order.values(), Fraction(0))
    rhs = (Fraction(q ** (r + u) - 1, q ** r * (q ** u - 1))
           / (Fraction(group_order(g, q)) ** u * aut_order(g, q)))
    tail = Fraction(0)
    if r > 0:
        ratio = Fraction(1, q ** u)
        tail = per_order.get(last, Fraction(0)) * ratio / (1 - ratio)
    return Residual(lhs=lhs, rhs=rhs, tail=tail,
                    per_order=dict(sorted(per_order.items())))


@dataclass(frozen=True)
class WeightSum:
    partial: Fraction
    target: ApproxValue

    @property
    def residual(self) -> float:
        return abs(float(self.partial) - float(self.target.value)) + self.target.err


def check_weight_sum(p: int, max_weight: int, eps: float = DEFAULT_EPS) -> WeightSum:
    """Partial sum of 1/|Aut G| over weight <= max_weight against 1/(p)_inf."""
    partial = sum((Fraction(1, aut_order(g, p)) for g in enumerate_types(max_weight)),
                  Fraction(0))
    return WeightSum(partial=partial, target=1 / poch_infinite(p, eps))
