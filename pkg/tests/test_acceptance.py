"""Acceptance criteria, one test each, at the stated tolerances and time budgets.

Every test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary and when the module is run as a script.
"""
import time
from fractions import Fraction

import pytest

from eigenlab import heuristics as H
from eigenlab.pgroups import enumerate_types, format_type, rank
from eigenlab.qseries import ApproxValue
from eigenlab.spectrum import compare_to_theory, mc_spectrum
from eigenlab.sympm import GroupSpec, enumerate_members, order, sampler_selftest

RESULTS = {}


def record(number, title, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    RESULTS[number] = (f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} "
                       f"({detail}; {elapsed:.1f}s of {budget:.0f}s)")
    assert ok, RESULTS[number]


def test_criterion_1_orders():
    t0 = time.perf_counter()
    frozen = {(2, 1, 0): 6, (2, 1, 1): 6, (2, 2, 0): 96, (2, 2, 1): 96, (2, 2, 2): 48,
              (3, 1, 0): 48, (3, 1, 1): 24, (3, 2, 0): 3888, (3, 2, 1): 1944, (3, 2, 2): 648}
    bad = []
    for (p, f, m), want in frozen.items():
        spec = GroupSpec(p, f, m, 1)
        counted = sum(1 for _ in enumerate_members(spec))
        if not (order(spec) == counted == want):
            bad.append((p, f, m, order(spec), counted))
    record(1, "group orders equal exhaustive counts", not bad,
           f"{len(frozen) - len(bad)}/{len(frozen)} specs exact", time.perf_counter() - t0, 10)


def test_criterion_2_sampler_uniformity():
    t0 = time.perf_counter()
    rows = []
    for spec in (GroupSpec(2, 1, 1, 1), GroupSpec(3, 1, 1, 1),
                 GroupSpec(2, 2, 1, 1), GroupSpec(2, 2, 2, 1)):
        rep = sampler_selftest(spec, 1000 * order(spec), 0.99, seed=20240601)
        rows.append((spec, rep))
    ok = all(rep.passed for _, rep in rows)
    detail = ", ".join(f"{s.p}{s.f}{s.m}{s.n}: {r.chi2:.1f}<{r.critical:.1f}" for s, r in rows)
    record(2, "sampler chi-square at 99%", ok, detail, time.perf_counter() - t0, 60)


def test_criterion_3_spectrum_vs_limit():
    t0 = time.perf_counter()
    # limit values at q = 2 checked independently of the Monte Carlo run
    frozen = {(0, ()): 0.28879, (1, ()): 0.41942, (1, (1,)): 0.20971, (2, (1, 1)): 0.06990}
    ok = all(abs(float(H.p_closed(m, 2, g).value) - v) < 1e-5 for (m, g), v in frozen.items())
    # group exponent <= 4 = 2^2, i.e. all parts <= 2, weight <= 3
    groups = [g for g in enumerate_types(3) if not g or g[0] <= 2]
    worst = 0.0
    for m in (0, 1, 2):
        report = mc_spectrum(GroupSpec(2, 3, m, 8), 200_000, seed=42, workers=1)
        for v in compare_to_theory(report, 4.0, 0.01, groups):
            ok &= v.passed
            worst = max(worst, abs(v.observed - v.predicted) / (4 * v.se + 0.01))
    record(3, "spectrum at (2,3,m,8) matches limit within 4 SE + 0.01", ok,
           f"worst |diff|/tolerance {worst:.2f}", time.perf_counter() - t0, 600)


def test_criterion_4_hall_identity():
    t0 = time.perf_counter()
    types = enumerate_types(3)
    ok, n = True, 0
    for q in (2, 3):
        for k in (0, 1, 2, H.INF):
            for z in types:
                for g in types:
                    res = H.check_hall(k, z, g, q, sum(z) + sum(g))
                    ok &= res.residual == 0 if k != H.INF else res.residual < 1e-6
                    n += 1
    record(4, "Hall identity residuals", ok, f"{n} cases, all exact",
           time.perf_counter() - t0, 60)


def test_criterion_5_cyclic_quotient_lemma():
    t0 = time.perf_counter()
    ok, worst_tail = True, 0
    for q in (2, 3):
        for u in (1, 2):
            for g in ((), (1,), (1, 1)):
                res = H.check_lemma_m1(g, u, q, 12)
                ok &= res.within_tail and res.tail < Fraction(1, 1000)
                worst_tail = max(worst_tail, res.tail)
    # spot values of the right-hand side
    ok &= H.check_lemma_m1((1,), 1, 2, 12).rhs == Fraction(3, 4)
    ok &= H.check_lemma_m1((1,), 2, 2, 12).rhs == Fraction(7, 24)
    record(5, "cyclic-quotient lemma within geometric tail", ok,
           f"largest tail {float(worst_tail):.2e}", time.perf_counter() - t0, 60)


def test_criterion_6_level0_level1_recursion():
    t0 = time.perf_counter()
    ok, worst = True, 0.0
    for m in (0, 1):
        for q, w in ((2, 12), (3, 8)):
            table = H.closed_table(m, q, w)
            for u in (1, 2):
                table = H.u_step(table, w, q)
                for g in enumerate_types(5):
                    closed = H.u_closed(m, q, u, g)
                    got = table[g]
                    bound = got.err + closed.err + table.tail
                    diff = abs(float(got.value) - float(closed.value))
                    ok &= diff <= bound <= 1e-3
                    worst = max(worst, diff)
    record(6, "u-step of the limit table reproduces closed u-probabilities", ok,
           f"max diff {worst:.2e}", time.perf_counter() - t0, 300)


def test_criterion_7_level2_examples():
    t0 = time.perf_counter()
    p = 2
    pair = H.prefactor(1, p)
    formula_a = pair * Fraction(p ** 3 + p ** 2 - 1, p ** 7 * (p - 1))
    formula_b = pair * ((1 - Fraction(1, p ** 4)) / (1 - Fraction(1, p)))
    rec_a = H.predict(2, 2, 1, 12)[(1, 1)]
    rec_b = H.predict(2, 2, 2, 12)[()]
    da = abs(float(rec_a.value) - 0.0360442)
    db = abs(float(rec_b.value) - 0.786419)
    ok = da <= 1e-3 and db <= 1e-3
    ok &= abs(float(formula_a.value) - 0.0360442) < 1e-6
    ok &= abs(float(formula_b.value) - 0.786419) < 5e-6
    record(7, "level-2 example values from the recursion", ok,
           f"[1,1]: {float(rec_a.value):.6f}, []: {float(rec_b.value):.6f}",
           time.perf_counter() - t0, 300)


def test_criterion_8_rank_distribution():
    t0 = time.perf_counter()
    ok = True
    sums = []
    for u in (0, 1):
        total = sum((H.rank_probability_m1(2, u, r) for r in range(13)), ApproxValue(Fraction(0)))
        ok &= total.lo <= 1.0 and total.hi >= 0.999
        sums.append(float(total.value))
    table = H.predict(2, 1, 0, 12)
    by_rank = {}
    for g, v in table.entries.items():
        by_rank[rank(g)] = by_rank.get(rank(g), 0.0) + float(v.value)
    worst = max(abs(by_rank.get(r, 0.0) - float(H.rank_probability_m1(2, 0, r).value))
                for r in range(13))
    ok &= worst <= 1e-6 + table.tail
    record(8, "rank distribution sums and grouped table", ok,
           f"sums {sums[0]:.9f}, {sums[1]:.9f}; max diff {worst:.2e}",
           time.perf_counter() - t0, 60)


def test_criterion_9_weight_sum():
    t0 = time.perf_counter()
    res = H.check_weight_sum(2, 12)
    ok = abs(float(res.partial) - 3.462746) < 0.01 and res.residual < 0.01
    record(9, "Cohen-Lenstra weight sum", ok,
           f"partial {float(res.partial):.6f} vs 3.462746", time.perf_counter() - t0, 10)


def summary_lines():
    return [RESULTS[k] for k in sorted(RESULTS)]


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
