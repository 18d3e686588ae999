"""The m-th symplectic groups Sp^(m)_{2n}(Z/p^f).

Sp^(m) consists of the invertible 2n x 2n matrices h over Z/p^f with
h^T J h = J mod p^m, J = [[0, 1], [-1, 0]] in n x n blocks.  m = 0 gives
GL_{2n} and m = f the full symplectic group.

Uniform sampling is done in three stages, each uniform on fibres of
constant size:

1. Sp_{2n}(F_p) by symplectic Gram-Schmidt: a uniform nonzero e
   (p^{2k} - 1 choices in the active 2k-dim block), a uniform partner v with
   <e, v> = 1 (p^{2k-1} choices), recursion on the orthogonal complement.
   For m = 0 this stage is rejection sampling in GL_{2n}(F_p) instead.
2. Lifting Sp(Z/p^k) -> Sp(Z/p^{k+1}) for k < m: a fixed Hensel lift times
   1 + p^k X with X uniform in {X : JX symmetric mod p} (p^{2n^2+n} choices).
3. Adding p^m U with U uniform mod p^{f-m} (p^{4n^2(f-m)} choices).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _kernels
from .residue_linalg import RingSpec, RMatrix

DEFAULT_CANDIDATE_BOUND = 2 ** 24


@dataclass(frozen=True)
class GroupSpec:
    p: int
    f: int
    m: int
    n: int

    def __post_init__(self):
        RingSpec(self.p, self.f)  # validates p and f
        if not 0 <= self.m <= self.f:
            raise ValueError(f"need 0 <= m <= f, got m={self.m}, f={self.f}")
        if self.n < 1:
            raise ValueError(f"need n >= 1, got n={self.n}")

    @property
    def ring(self) -> RingSpec:
        return RingSpec(self.p, self.f)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def to_json(self) -> dict:
        return {"p": self.p, "f": self.f, "m": self.m, "n": self.n}


def standard_form(n: int, ring: RingSpec) -> RMatrix:
    j = np.zeros((2 * n, 2 * n), dtype=np.int64)
    j[:n, n:] = np.eye(n, dtype=np.int64)
    j[n:, :n] = -np.eye(n, dtype=np.int64)
    return RMatrix(ring, j)


def contains(h: RMatrix, spec: GroupSpec) -> bool:
    if h.ring != spec.ring or h.dim != spec.dim:
        raise ValueError(f"matrix over Z/{h.ring.p}^{h.ring.f} of dim {h.dim} "
                         f"does not match {spec}")
    return bool(_kernels.is_member(np.ascontiguousarray(h.entries),
                                   spec.p, spec.f, spec.m, spec.n))


def gl_order_field(d: int, q: int) -> int:
    out = 1
    for i in range(d):
        out *= q ** d - q ** i
    return out


def sp_order_field(n: int, q: int) -> int:
    out = q ** (n * n)
    for i in range(1, n + 1):
        out *= q ** (2 * i) - 1
    return out


def order(spec: GroupSpec) -> int:
    p, f, m, n = spec.p, spec.f, spec.m, spec.n
    if m == 0:
        return p ** (4 * n * n * (f - 1)) * gl_order_field(2 * n, p)
    if m == f:
        return p ** ((2 * n * n + n) * (f - 1)) * sp_order_field(n, p)
    return p ** (4 * n * n * (f - m)) * order(GroupSpec(p, m, m, n))


def enumerate_members(spec: GroupSpec, bound: int = DEFAULT_CANDIDATE_BOUND,
                      chunk: int = 1 << 16):
    """Stream every member of the group, in lexicographic entry order."""
    q = spec.p ** spec.f
    d = spec.dim
    total = q ** (d * d)
    if total > bound:
        raise ValueError(f"{total} candidate matrices exceed the bound {bound}")
    ring = spec.ring
    place = q ** np.arange(d * d - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        batch = ((idx[:, None] // place[None, :]) % q).reshape(-1, d, d)
        mask = _kernels.members_mask(batch, spec.p, spec.f, spec.m, spec.n)
        for mat in batch[mask]:
            yield RMatrix(ring, mat)


def worker_seed(seed: int, worker: int) -> int:
    """64-bit seed for a worker, derived by hashing (seed, worker)."""
    state = np.random.SeedSequence([int(seed), int(worker)]).generate_state(1, np.uint64)
    return int(state[0])


class Sampler:
    """Independent uniform sampler for one group; one per worker."""

    def __init__(self, spec: GroupSpec, seed: int):
        self.spec = spec
        self.rng = np.random.default_rng(seed)

    def draw(self, count: int) -> np.ndarray:
        s = self.spec
        return _kernels.sample_batch(self.rng, s.p, s.f, s.m, s.n, count)

    def fixed_space_valuations(self, count: int) -> np.ndarray:
        """SNF valuations of g - 1 for `count` fresh samples, shape (count, 2n)."""
        s = self.spec
        return _kernels.fixed_space_batch(self.rng, s.p, s.f, s.m, s.n, count)


def sample_uniform(spec: GroupSpec, seed: int) -> RMatrix:
    return RMatrix(spec.ring, Sampler(spec, seed).draw(1)[0])


@dataclass(frozen=True)
class SelfTestReport:
    chi2: float
    dof: int
    critical: float
    passed: bool


def sampler_selftest(spec: GroupSpec, samples: int, significance: float = 0.99,
                     seed: int = 0) -> SelfTestReport:
    """Chi-square goodness of fit of the sampler against exhaustive enumeration."""
    if samples <= 0:
        raise ValueError("insufficient samples")
    index = {h.key(): i for i, h in enumerate(enumerate_members(spec))}
    size = len(index)
    if samples < 5 * size:
        raise ValueError(f"insufficient samples: need >= {5 * size} for {size} cells")
    counts = np.zeros(size, dtype=np.int64)
    for mat in Sampler(spec, seed).draw(samples):
        counts[index[np.ascontiguousarray(mat).tobytes()]] += 1
    expected = samples / size
    chi2 = float(((counts - expected) ** 2).sum() / expected)
    dof = size - 1
    critical = float(stats.chi2.ppf(significance, dof))
    return SelfTestReport(chi2=chi2, dof=dof, critical=critical, passed=chi2 <= critical)
