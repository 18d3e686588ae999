"""Finite abelian p-groups labelled by partitions.

A group type is a tuple of weakly decreasing positive integers
``(l1, ..., lr)`` standing for Z/p^l1 + ... + Z/p^lr; ``()`` is trivial.
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

from .residue_linalg import integer_snf

GroupType = tuple

DEFAULT_ENUMERATION_BOUND = 10 ** 6


class EnumerationBoundError(ValueError):
    pass


def make_type(parts) -> GroupType:
    """Normalize an iterable of parts into a canonical group type."""
    parts = tuple(int(x) for x in parts)
    if any(x <= 0 for x in parts):
        raise ValueError(f"parts must be positive: {parts}")
    return tuple(sorted(parts, reverse=True))


def format_type(g: GroupType) -> str:
    return "[" + ",".join(str(x) for x in g) + "]"


def parse_type(text: str) -> GroupType:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"bad group type syntax: {text!r}")
    body = s[1:-1].strip()
    if not body:
        return ()
    parts = [int(x) for x in body.split(",")]
    if list(parts) != sorted(parts, reverse=True):
        raise ValueError(f"parts must be weakly decreasing: {text!r}")
    return make_type(parts)


def weight(g: GroupType) -> int:
    return sum(g)


def rank(g: GroupType) -> int:
    return len(g)


def exponent(g: GroupType) -> int:
    """Largest part, i.e. log_p of the group exponent."""
    return g[0] if g else 0


def sort_key(g: GroupType):
    """(weight, reverse-lexicographic) order."""
    return (sum(g), tuple(-x for x in g))


def group_order(g: GroupType, p: int) -> int:
    return p ** sum(g)


def power_rank(g: GroupType, k: int) -> int:
    """Number of parts >= k (k=1: p-rank, k=2: p^2-rank)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(1 for x in g if x >= k)


def conjugate(g: GroupType) -> GroupType:
    return tuple(power_rank(g, k) for k in range(1, exponent(g) + 1))


@lru_cache(maxsize=None)
def aut_order(g: GroupType, p: int) -> int:
    """|Aut(G)| = p^(sum of squared conjugate parts) * prod_j (p)_{m_j}.

    Here m_j are the multiplicities of the distinct parts of g.
    """
    e = sum(c * c for c in conjugate(g))
    value = Fraction(p ** e)
    for mult in Counter(g).values():
        for k in range(1, mult + 1):
            value *= 1 - Fraction(1, p ** k)
    assert value.denominator == 1
    return int(value)


def _partitions(n: int, largest: int):
    # partitions of n with parts <= largest, descending lexicographic order
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def partitions_of(n: int) -> list[GroupType]:
    return list(_partitions(n, n))


def enumerate_types(max_weight: int) -> list[GroupType]:
    """All types of weight <= max_weight in (weight, reverse-lex) order."""
    if max_weight < 0:
        raise ValueError("max_weight must be >= 0")
    return [g for w in range(max_weight + 1) for g in _partitions(w, w)]


def types_with_rank(r: int, max_part: int) -> list[GroupType]:
    """All types with exactly r parts, each part <= max_part."""
    out = [
        tuple(sorted(c, reverse=True))
        for c in itertools.combinations_with_replacement(range(1, max_part + 1), r)
    ]
    return sorted(out, key=sort_key)


def _type_from_invariants(invariants, p: int) -> GroupType:
    parts = []
    for d in invariants:
        if d == 0:
            raise ValueError("infinite quotient")
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if d != 1:
            raise ValueError("invariant is not a power of p")
        if e:
            parts.append(e)
    return make_type(parts)


def quotient_type(h: GroupType, y, p: int) -> GroupType:
    """Type of H / <y> for y given in coordinates of h."""
    y = tuple(int(c) for c in y)
    if len(y) != len(h):
        raise ValueError("y must have one coordinate per part of h")
    for c, lam in zip(y, h):
        if not 0 <= c < p ** lam:
            raise ValueError(f"coordinate {c} out of range for Z/{p}^{lam}")
    if not h:
        return ()
    rows = [[p ** lam if i == j else 0 for j in range(len(h))] + [y[i]]
            for i, lam in enumerate(h)]
    return _type_from_invariants(integer_snf(rows), p)


def cyclic_order_exponent(h: GroupType, y, p: int) -> int:
    """n with |<y>| = p^n."""
    n = 0
    for c, lam in zip(y, h):
        v = lam
        c %= p ** lam
        if c:
            v = 0
            while c % p == 0:
                c //= p
                v += 1
        n = max(n, lam - v)
    return n


def _valuation_count(lam: int, a: int, p: int) -> int:
    # elements of Z/p^lam with valuation exactly a (a == lam means zero)
    if a == lam:
        return 1
    return p ** (lam - a) - p ** (lam - a - 1)


@lru_cache(maxsize=None)
def cyclic_quotient_table(h: GroupType, p: int):
    """{G: {n: #{y in H : |<y>| = p^n, H/<y> = G}}} for all G.

    Elements are grouped by the multiset of coordinate valuations within each
    block of equal parts; H/<y> and |<y>| depend only on that data because
    scaling coordinates by units is an automorphism.
    """
    blocks = sorted(Counter(h).items(), reverse=True)
    per_block = []
    for lam, mult in blocks:
        options = []
        for vals in itertools.combinations_with_replacement(range(lam + 1), mult):
            counts = Counter(vals)
            ways = factorial(mult)
            for c in counts.values():
                ways //= factorial(c)
            ways *= prod(_valuation_count(lam, a, p) ** c for a, c in counts.items())
            options.append((vals, ways))
        per_block.append(options)
    table = defaultdict(Counter)
    for choice in itertools.product(*per_block):
        vals = tuple(v for vs, _ in choice for v in vs)
        ways = prod(w for _, w in choice)
        y = tuple(0 if a == lam else p ** a for a, lam in zip(vals, h))
        g = quotient_type(h, y, p)
        n = max((lam - a for a, lam in zip(vals, h)), default=0)
        table[g][n] += ways
    return {g: dict(sorted(c.items())) for g, c in table.items()}


def _check_bound(h: GroupType, p: int, bound: int):
    if group_order(h, p) > bound:
        raise EnumerationBoundError(
            f"|H| = {p}^{weight(h)} exceeds enumeration bound {bound}")


def count_cyclic_quotients(h: GroupType, g: GroupType, p: int,
                           bound: int = DEFAULT_ENUMERATION_BOUND) -> dict[int, int]:
    """{n: #{y in H : |<y>| = p^n and H/<y> = G}}."""
    _check_bound(h, p, bound)
    return dict(cyclic_quotient_table(h, p).get(g, {}))


def elements(h: GroupType, p: int):
    """Iterate over all elements of H as coordinate tuples."""
    return itertools.product(*(range(p ** lam) for lam in h))


# -- subgroups ---------------------------------------------------------------

def _reduce(vec, rows, start, p_pows):
    # membership of vec (coords >= start) in the span of HNF rows start..
    vec = list(vec)
    for j in range(start, len(vec)):
        if vec[j] % p_pows[j]:
            return False
        c = vec[j] // p_pows[j]
        if c:
            row = rows[j]
            for k in range(j, len(vec)):
                vec[k] -= c * row[k]
    return True


def _hnf_subgroups(h: GroupType, p: int, index_exp: int):
    """Yield HNF row bases of the lattices M with p^h Z^r <= M <= Z^r and
    [Z^r : M] = p^index_exp; M / p^h Z^r runs over subgroups of H of index
    p^index_exp, each exactly once."""
    r = len(h)
    rows = [None] * r
    p_pows = [1] * r

    def rec(i, budget):
        if i < 0:
            if budget == 0:
                yield [list(row) for row in rows]
            return
        for e in range(0, min(h[i], budget) + 1):
            # remaining rows 0..i-1 can absorb at most sum of their parts
            if budget - e > sum(h[:i]):
                continue
            p_pows[i] = p ** e
            ranges = [range(p_pows[j]) for j in range(i + 1, r)]
            scale = p ** (h[i] - e)
            for tail in itertools.product(*ranges):
                vec = [0] * r
                for j, t in zip(range(i + 1, r), tail):
                    vec[j] = scale * t
                if not _reduce(vec, rows, i + 1, p_pows):
                    continue
                rows[i] = [0] * i + [p ** e] + list(tail)
                yield from rec(i - 1, budget - e)
            rows[i] = None

    yield from rec(r - 1, index_exp)


def _solve_upper(rows, target):
    # integer c with c . rows = target, rows upper triangular
    r = len(rows)
    c = [0] * r
    rem = list(target)
    for j in range(r):
        q, m = divmod(rem[j], rows[j][j])
        assert m == 0
        c[j] = q
        for k in range(j, r):
            rem[k] -= q * rows[j][k]
    return c


@lru_cache(maxsize=None)
def subgroup_table(h: GroupType, p: int, index_exp: int) -> dict:
    """Counter {(type of H1, type of H/H1): count} over subgroups of index p^index_exp."""
    table = Counter()
    r = len(h)
    if r == 0:
        if index_exp == 0:
            table[((), ())] = 1
        return dict(table)
    for basis in _hnf_subgroups(h, p, index_exp):
        quotient = _type_from_invariants(integer_snf(basis), p)
        rel = [_solve_upper(basis, [p ** lam if k == i else 0 for k in range(r)])
               for i, lam in enumerate(h)]
        sub = _type_from_invariants(integer_snf(rel), p)
        table[(sub, quotient)] += 1
    return dict(table)


def count_subgroups_iso_with_quotient(h: GroupType, z: GroupType, g: GroupType,
                                      p: int,
                                      bound: int = DEFAULT_ENUMERATION_BOUND) -> int:
    """#{H1 <= H : H1 = Z and H/H1 = G}."""
    _check_bound(h, p, bound)
    if weight(z) + weight(g) != weight(h):
        return 0
    return subgroup_table(h, p, weight(g)).get((z, g), 0)
