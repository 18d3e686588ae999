"""Distribution of fixed-space types ker(g - 1) over an m-th symplectic group."""
from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import heuristics
from .pgroups import exponent, format_type, parse_type, sort_key, weight
from .residue_linalg import RMatrix, kernel_type
from .sympm import GroupSpec, Sampler, enumerate_members, order, worker_seed

EXHAUSTIVE = "exhaustive"
MONTECARLO = "montecarlo"

# samples per kernel call; small enough to keep memory flat
_CHUNK = 4096


@dataclass(frozen=True)
class SpectrumReport:
    spec: GroupSpec
    mode: str
    counts: dict = field(default_factory=dict)
    total: int = 0
    seed: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.mode not in (EXHAUSTIVE, MONTECARLO):
            raise ValueError(f"unknown mode {self.mode!r}")
        counts = {tuple(g): int(c) for g, c in self.counts.items() if c}
        if any(c < 0 for c in counts.values()):
            raise ValueError("counts must be nonnegative")
        if sum(counts.values()) != self.total:
            raise ValueError("counts do not sum to total")
        ordered = dict(sorted(counts.items(), key=lambda kv: sort_key(kv[0])))
        object.__setattr__(self, "counts", ordered)

    def frequency(self, g) -> float:
        return self.counts.get(tuple(g), 0) / self.total

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "mode": self.mode,
            "total": self.total,
            "seed": self.seed,
            "workers": self.workers,
            "counts": {format_type(g): c for g, c in self.counts.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> SpectrumReport:
        s = doc["spec"]
        return cls(
            spec=GroupSpec(int(s["p"]), int(s["f"]), int(s["m"]), int(s["n"])),
            mode=doc["mode"],
            counts={parse_type(k): int(v) for k, v in doc["counts"].items()},
            total=int(doc["total"]),
            seed=doc.get("seed"),
            workers=int(doc.get("workers", 1)),
        )


def exhaustive_spectrum(spec: GroupSpec) -> SpectrumReport:
    one = RMatrix.identity(spec.ring, spec.dim)
    counts = Counter(kernel_type(h - one) for h in enumerate_members(spec))
    total = sum(counts.values())
    assert total == order(spec)
    return SpectrumReport(spec, EXHAUSTIVE, counts, total, None, 1)


def _types_of(valuations: np.ndarray, f: int) -> Counter:
    # each row holds the SNF valuations of g - 1; positive ones are the parts
    rows, mult = np.unique(valuations, axis=0, return_counts=True)
    out = Counter()
    for row, c in zip(rows, mult):
        parts = tuple(sorted((int(v) for v in row if v > 0), reverse=True))
        assert not parts or parts[0] <= f
        out[parts] += int(c)
    return out


def _worker_counts(spec: GroupSpec, seed: int, count: int) -> Counter:
    sampler = Sampler(spec, seed)
    counts = Counter()
    done = 0
    while done < count:
        k = min(_CHUNK, count - done)
        counts.update(_types_of(sampler.fixed_space_valuations(k), spec.f))
        done += k
    return counts


def mc_spectrum(spec: GroupSpec, samples: int, seed: int, workers: int = 1) -> SpectrumReport:
    """Monte Carlo estimate from `samples` uniform draws.

    Worker i draws samples // workers (plus one for i < remainder) with its
    own seed derived from (seed, i); the result depends only on
    (spec, samples, seed, workers).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    base, extra = divmod(samples, workers)
    shares = [base + (i < extra) for i in range(workers)]
    seeds = [worker_seed(seed, i) for i in range(workers)]
    if workers == 1:
        parts = [_worker_counts(spec, seeds[0], shares[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda i: _worker_counts(spec, seeds[i], shares[i]),
                                  range(workers)))
    merged = Counter()
    for part in parts:
        merged.update(part)
    return SpectrumReport(spec, MONTECARLO, merged, samples, seed, workers)


def merge_reports(reports) -> SpectrumReport:
    """Pool Monte Carlo reports of the same spec."""
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to merge")
    spec = reports[0].spec
    if any(r.spec != spec for r in reports):
        raise ValueError("cannot merge reports of different specs")
    if any(r.mode != MONTECARLO for r in reports):
        raise ValueError("only Monte Carlo reports can be pooled")
    counts = Counter()
    for r in reports:
        counts.update(r.counts)
    seeds = {r.seed for r in reports}
    return SpectrumReport(spec, MONTECARLO, counts, sum(r.total for r in reports),
                          seeds.pop() if len(seeds) == 1 else None,
                          sum(r.workers for r in reports))


@dataclass(frozen=True)
class Verdict:
    group: tuple
    observed: float
    predicted: float
    se: float
    z: float
    passed: bool

    def to_json(self) -> dict:
        return {"group": format_type(self.group), "observed": self.observed,
                "predicted": self.predicted, "se": self.se,
                "z": self.z, "pass": self.passed}


def default_groups(report: SpectrumReport, max_weight: int = 3) -> list:
    """Observed types plus all light types, restricted to exponent <= f - 1."""
    f = report.spec.f
    from .pgroups import enumerate_types
    gs = set(report.counts) | set(enumerate_types(max_weight))
    return sorted((g for g in gs if exponent(g) <= f - 1), key=sort_key)


def compare_to_theory(report: SpectrumReport, tol_sigma: float = 4.0,
                      tol_abs: float = 0.01, groups=None) -> list[Verdict]:
    """Compare observed frequencies with the n -> infinity limit.

    SE is the binomial standard error sqrt(P(1-P)/N) for Monte Carlo
    reports.  Exhaustive reports carry no sampling error, so SE = 0 there
    and any finite-n bias beyond tol_abs shows up as a failure.
    """
    spec = report.spec
    if spec.m > 2:
        raise ValueError(f"no closed limit distribution for m={spec.m}")
    if groups is None:
        groups = default_groups(report)
    out = []
    for g in groups:
        g = tuple(g)
        if exponent(g) > spec.f - 1:
            raise ValueError(f"{format_type(g)} is not annihilated by p^(f-1)")
        pred = float(heuristics.p_closed(spec.m, spec.p, g))
        obs = report.frequency(g)
        se = 0.0 if report.mode == EXHAUSTIVE else math.sqrt(pred * (1 - pred) / report.total)
        diff = obs - pred
        z = diff / se if se > 0 else (0.0 if diff == 0 else math.copysign(math.inf, diff))
        out.append(Verdict(g, obs, pred, se, z, abs(diff) <= tol_sigma * se + tol_abs))
    return out


def l1_distance(report: SpectrumReport, max_weight: int = 3) -> float:
    """Sum of |observed - predicted| over the default comparison groups."""
    return sum(abs(v.observed - v.predicted)
               for v in compare_to_theory(report, groups=[
                   g for g in default_groups(report, max_weight) if weight(g) <= max_weight]))
