"""Self-checks: exact identities at small scale plus statistical checks.

Each suite yields Check records; the CLI prints one line per check.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import heuristics as H
from .pgroups import enumerate_types, format_type, rank
from .qseries import ApproxValue
from .spectrum import compare_to_theory, mc_spectrum
from .sympm import GroupSpec, enumerate_members, order, sampler_selftest

# truncation weights that keep the u-step tail below 1e-3
RECURSION_WEIGHT = {2: 12, 3: 8}


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.suite}: {self.name} ({self.detail})"


def suite_orders():
    for p in (2, 3):
        for f in (1, 2):
            for m in range(f + 1):
                spec = GroupSpec(p, f, m, 1)
                want = order(spec)
                got = sum(1 for _ in enumerate_members(spec))
                yield Check("orders", f"p={p} f={f} m={m} n=1", got == want,
                            f"formula {want}, enumerated {got}")


def suite_sampler(per_element: int = 1000, seed: int = 0):
    for spec in (GroupSpec(2, 1, 1, 1), GroupSpec(3, 1, 1, 1),
                 GroupSpec(2, 2, 1, 1), GroupSpec(2, 2, 2, 1)):
        rep = sampler_selftest(spec, per_element * order(spec), 0.99, seed=seed)
        yield Check("sampler", f"{spec.p},{spec.f},{spec.m},{spec.n}", rep.passed,
                    f"chi2 {rep.chi2:.2f} vs {rep.critical:.2f}, dof {rep.dof}")


def suite_spectrum(samples: int = 200_000, seed: int = 42, workers: int = 1):
    groups = [g for g in enumerate_types(3) if not g or g[0] <= 2]
    for m in (0, 1, 2):
        report = mc_spectrum(GroupSpec(2, 3, m, 8), samples, seed, workers)
        for v in compare_to_theory(report, 4.0, 0.01, groups):
            yield Check("spectrum", f"m={m} G={format_type(v.group)}", v.passed,
                        f"observed {v.observed:.5f}, limit {v.predicted:.5f}, se {v.se:.5f}")


def suite_hall():
    for q in (2, 3):
        types = enumerate_types(3)
        for k in (0, 1, 2, H.INF):
            for z in types:
                for g in types:
                    res = H.check_hall(k, z, g, q, sum(z) + sum(g))
                    ok = res.residual == 0 if k != H.INF else res.residual < 1e-6
                    if not ok:
                        yield Check("hall", f"q={q} k={k} Z={format_type(z)} G={format_type(g)}",
                                    False, f"residual {float(res.residual):.3g}")
            yield Check("hall", f"q={q} k={k}", True,
                        f"{len(types) ** 2} pairs of weight <= 3")


def suite_lemma(max_exponent: int = 12):
    for q in (2, 3):
        for u in (1, 2):
            for g in ((), (1,), (1, 1)):
                res = H.check_lemma_m1(g, u, q, max_exponent)
                ok = res.within_tail and res.tail < 1e-3
                yield Check("lemma", f"q={q} u={u} G={format_type(g)}", ok,
                            f"residual {float(res.residual):.3g}, tail {float(res.tail):.3g}")


def _recursion_vs_closed(m: int, q: int, u: int):
    w = RECURSION_WEIGHT[q]
    table = H.closed_table(m, q, w)
    for _ in range(u):
        table = H.u_step(table, w, q)
    worst, budget = 0.0, 0.0
    ok = True
    for g in enumerate_types(5):
        closed = H.u_closed(m, q, u, g)
        got = table[g]
        bound = got.err + closed.err + table.tail
        diff = abs(float(got.value) - float(closed.value))
        ok &= diff <= bound and bound <= 1e-3
        worst, budget = max(worst, diff), max(budget, bound)
    return ok, worst, budget


def _level(m: int):
    suite = f"level{m}"
    for q in (2, 3):
        for u in (1, 2):
            ok, worst, budget = _recursion_vs_closed(m, q, u)
            yield Check(suite, f"q={q} u={u} weight<=5", ok,
                        f"max diff {worst:.3g}, bound {budget:.3g}")


def suite_level0():
    yield from _level(0)


def suite_level1():
    yield from _level(1)
    yield from suite_rank()


def suite_rank(max_rank: int = 12):
    for u in (0, 1):
        total = sum((H.rank_probability_m1(2, u, r) for r in range(max_rank + 1)),
                    ApproxValue(Fraction(0)))
        # certified interval must meet [0.999, 1]
        yield Check("rank", f"sum over r<=12, u={u}", total.lo <= 1.0 and total.hi >= 0.999,
                    f"{float(total.value):.12f} +- {total.err:.1g}")
    table = H.predict(2, 1, 0, 12)
    by_rank: dict = {}
    for g, v in table.entries.items():
        by_rank[rank(g)] = by_rank.get(rank(g), 0.0) + float(v.value)
    worst = 0.0
    for r in range(max_rank + 1):
        worst = max(worst, abs(by_rank.get(r, 0.0) - float(H.rank_probability_m1(2, 0, r))))
    yield Check("rank", "predict(2,1,0) grouped by rank", worst <= 1e-6 + table.tail,
                f"max diff {worst:.3g}, tail {table.tail:.3g}")


def m2_example_values(p: int = 2):
    """The two level-2 closed expressions quoted for the predictor."""
    pair = H.prefactor(1, p)
    a = pair * Fraction(p ** 3 + p ** 2 - 1, p ** 7 * (p - 1))
    b = pair * ((1 - Fraction(1, p ** 4)) / (1 - Fraction(1, p)))
    return a, b


def suite_m2_examples():
    a, b = m2_example_values(2)
    w = RECURSION_WEIGHT[2]
    for u, g, closed in ((1, (1, 1), a), (2, (), b)):
        table = H.predict(2, 2, u, w)
        got = table[g]
        diff = abs(float(got.value) - float(closed.value))
        yield Check("m2-examples", f"u={u} G={format_type(g)}", diff <= 1e-3,
                    f"recursion {float(got.value):.6f}, formula {float(closed.value):.6f}, "
                    f"tail {table.tail:.3g}")


def suite_weights():
    for p, w, target, tol in ((2, 12, 3.462746, 0.01), (3, 8, 1.785312, 0.01),
                              (5, 4, None, 0.05)):
        res = H.check_weight_sum(p, w)
        ok = res.residual < tol and (target is None or abs(float(res.target) - target) < 1e-6)
        yield Check("weights", f"p={p} weight<={w}", ok,
                    f"partial {float(res.partial):.6f}, limit {float(res.target):.6f}")


SUITES = {
    "orders": suite_orders,
    "hall": suite_hall,
    "lemma": suite_lemma,
    "level0": suite_level0,
    "level1": suite_level1,
    "m2-examples": suite_m2_examples,
    "weights": suite_weights,
    "sampler": suite_sampler,
    "spectrum": suite_spectrum,
}
