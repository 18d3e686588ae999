"""Matrices over Z/p^f and Smith normal forms over Z/p^f and Z."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from . import _kernels

# residues are held in int64; products of two residues must not overflow
MAX_MODULUS = 2 ** 31


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    return all(p % k for k in range(3, isqrt(p) + 1, 2))


@dataclass(frozen=True)
class RingSpec:
    """The residue ring Z/p^f."""

    p: int
    f: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.f < 1:
            raise ValueError(f"f={self.f} must be >= 1")
        if self.p ** self.f >= MAX_MODULUS:
            raise ValueError(f"modulus {self.p}^{self.f} exceeds 2^31")

    @property
    def modulus(self) -> int:
        return self.p ** self.f


@dataclass(frozen=True, eq=False)
class RMatrix:
    """Square matrix of residues mod p^f (immutable)."""

    ring: RingSpec
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.int64) % self.ring.modulus
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def identity(cls, ring: RingSpec, dim: int) -> RMatrix:
        return cls(ring, np.eye(dim, dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def tolist(self) -> list[list[int]]:
        return self.entries.tolist()

    def _check(self, other: RMatrix):
        if self.ring != other.ring or self.dim != other.dim:
            raise ValueError("ring or dimension mismatch")

    def __add__(self, other: RMatrix) -> RMatrix:
        self._check(other)
        return RMatrix(self.ring, self.entries + other.entries)

    def __sub__(self, other: RMatrix) -> RMatrix:
        self._check(other)
        return RMatrix(self.ring, self.entries - other.entries)

    def __matmul__(self, other: RMatrix) -> RMatrix:
        self._check(other)
        # object dtype keeps intermediate sums exact
        prod = self.entries.astype(object) @ other.entries.astype(object)
        return RMatrix(self.ring, (prod % self.ring.modulus).astype(np.int64))

    def transpose(self) -> RMatrix:
        return RMatrix(self.ring, self.entries.T)

    def __eq__(self, other):
        if not isinstance(other, RMatrix):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.ring, self.entries.tobytes()))

    def key(self) -> bytes:
        return self.entries.tobytes()


def local_snf(a: RMatrix) -> tuple[int, ...]:
    """Valuations v1 <= ... <= vd with a ~ diag(p^v1, ..., p^vd); zero reports f."""
    vals = _kernels.snf_valuations(np.ascontiguousarray(a.entries), a.ring.p, a.ring.f)
    return tuple(int(v) for v in vals)


def _valuation(x: int, p: int, f: int) -> int:
    if x == 0:
        return f
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def local_snf_with_transforms(a: RMatrix):
    """Pure-Python local SNF returning (valuations, U, V) with U a V diagonal.

    The diagonal of U a V is p^v_i in the same (ascending) order as the
    returned valuations.  Slower than :func:`local_snf`; meant for checks.
    """
    p, f, q = a.ring.p, a.ring.f, a.ring.modulus
    d = a.dim
    w = [[int(x) for x in row] for row in a.entries]
    u = [[int(i == j) for j in range(d)] for i in range(d)]
    v = [[int(i == j) for j in range(d)] for i in range(d)]
    vals = []
    for k in range(d):
        best, bi, bj = f, None, None
        for i in range(k, d):
            for j in range(k, d):
                val = _valuation(w[i][j], p, f)
                if val < best:
                    best, bi, bj = val, i, j
        if bi is None:
            vals.extend([f] * (d - k))
            break
        w[k], w[bi] = w[bi], w[k]
        u[k], u[bi] = u[bi], u[k]
        for row in w:
            row[k], row[bj] = row[bj], row[k]
        for row in v:
            row[k], row[bj] = row[bj], row[k]
        pb = p ** best
        inv = pow(w[k][k] // pb, -1, q)
        # normalize the unit cofactor of the pivot to 1
        w[k] = [(x * inv) % q for x in w[k]]
        u[k] = [(x * inv) % q for x in u[k]]
        for i in range(d):
            if i != k and w[i][k]:
                c = w[i][k] // pb
                w[i] = [(x - c * y) % q for x, y in zip(w[i], w[k])]
                u[i] = [(x - c * y) % q for x, y in zip(u[i], u[k])]
        for j in range(k + 1, d):
            if w[k][j]:
                c = w[k][j] // pb
                for row in w:
                    row[j] = (row[j] - c * row[k]) % q
                for row in v:
                    row[j] = (row[j] - c * row[k]) % q
        vals.append(best)
    return tuple(vals), RMatrix(a.ring, u), RMatrix(a.ring, v)


def kernel_type(a: RMatrix) -> tuple[int, ...]:
    """Partition of ker(x -> a x) on (Z/p^f)^d, parts descending."""
    return tuple(sorted((v for v in local_snf(a) if v > 0), reverse=True))


def integer_snf(rows) -> tuple[int, ...]:
    """Smith invariants d1 | d2 | ... of an integer matrix (nonnegative)."""
    a = [[int(x) for x in row] for row in rows]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    out = []
    for k in range(min(nr, nc)):
        # pivot: nonzero entry of least absolute value in the trailing block
        while True:
            piv = None
            for i in range(k, nr):
                for j in range(k, nc):
                    if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                out.extend([0] * (min(nr, nc) - k))
                return tuple(out)
            i0, j0 = piv
            a[k], a[i0] = a[i0], a[k]
            for row in a:
                row[k], row[j0] = row[j0], row[k]
            pv = a[k][k]
            clean = True
            for i in range(k + 1, nr):
                c = a[i][k] // pv
                if c:
                    a[i] = [x - c * y for x, y in zip(a[i], a[k])]
                if a[i][k]:
                    clean = False
            for j in range(k + 1, nc):
                c = a[k][j] // pv
                if c:
                    for row in a:
                        row[j] -= c * row[k]
                if a[k][j]:
                    clean = False
            if not clean:
                continue
            # the pivot must divide the whole trailing block
            bad = next(
                (i for i in range(k + 1, nr) for j in range(k + 1, nc) if a[i][j] % pv),
                None,
            )
            if bad is None:
                break
            a[k] = [x + y for x, y in zip(a[k], a[bad])]
        out.append(abs(a[k][k]))
    return tuple(out)



def inverse(a: RMatrix) -> RMatrix:
    """Inverse over Z/p^f by Gauss-Jordan on unit pivots."""
    p, q, d = a.ring.p, a.ring.modulus, a.dim
    w = [[int(x) for x in row] + [int(i == j) for j in range(d)]
         for i, row in enumerate(a.entries)]
    for k in range(d):
        piv = next((i for i in range(k, d) if w[i][k] % p), None)
        if piv is None:
            raise ValueError("matrix is not invertible over Z/p^f")
        w[k], w[piv] = w[piv], w[k]
        inv = pow(w[k][k], -1, q)
        w[k] = [(x * inv) % q for x in w[k]]
        for i in range(d):
            if i != k and w[i][k]:
                c = w[i][k]
                w[i] = [(x - c * y) % q for x, y in zip(w[i], w[k])]
    return RMatrix(a.ring, [row[d:] for row in w])
