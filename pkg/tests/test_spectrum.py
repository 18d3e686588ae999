import json
import math

import numpy as np
import pytest

from eigenlab.residue_linalg import RMatrix
from eigenlab.spectrum import (SpectrumReport, compare_to_theory, exhaustive_spectrum,
                               mc_spectrum, merge_reports)
from eigenlab.sympm import GroupSpec, enumerate_members, order

from oracles import kernel_type_brute


def test_exhaustive_examples():
    gl = exhaustive_spectrum(GroupSpec(2, 1, 0, 1))
    assert gl.counts == {(): 2, (1,): 3, (1, 1): 1} and gl.total == 6
    assert exhaustive_spectrum(GroupSpec(2, 1, 1, 1)).counts == gl.counts
    sl3 = exhaustive_spectrum(GroupSpec(3, 1, 1, 1))
    # identity plus 8 nontrivial unipotents fix a line; the other 15 fix nothing
    assert sl3.total == 24 and sl3.counts == {(): 15, (1,): 8, (1, 1): 1}


@pytest.mark.parametrize("spec", [GroupSpec(2, 2, 1, 1), GroupSpec(3, 2, 2, 1),
                                  GroupSpec(2, 2, 0, 1)], ids=str)
def test_exhaustive_matches_vector_count(spec):
    counts = {}
    for h in enumerate_members(spec):
        a = h.entries - np.eye(2, dtype=np.int64)
        g = kernel_type_brute(a, spec.p, spec.f)
        counts[g] = counts.get(g, 0) + 1
    rep = exhaustive_spectrum(spec)
    assert rep.counts == counts
    assert rep.total == order(spec)


def test_report_invariants():
    with pytest.raises(ValueError):
        SpectrumReport(GroupSpec(2, 1, 1, 1), "montecarlo", {(): 2}, 3)
    with pytest.raises(ValueError):
        SpectrumReport(GroupSpec(2, 1, 1, 1), "guess", {(): 2}, 2)


def test_mc_deterministic_and_normalized():
    spec = GroupSpec(2, 3, 1, 4)
    a = mc_spectrum(spec, 3001, seed=9, workers=3)
    b = mc_spectrum(spec, 3001, seed=9, workers=3)
    assert a == b and a.dumps() == b.dumps()
    assert sum(a.counts.values()) == 3001
    assert math.isclose(sum(a.frequency(g) for g in a.counts), 1.0)
    assert all(not g or g[0] <= spec.f for g in a.counts)


def test_mc_worker_split():
    spec = GroupSpec(3, 2, 2, 2)
    one = mc_spectrum(spec, 1000, seed=1, workers=1)
    four = mc_spectrum(spec, 1000, seed=1, workers=4)
    assert one.total == four.total == 1000
    assert one.workers == 1 and four.workers == 4


def test_json_roundtrip_and_order():
    rep = mc_spectrum(GroupSpec(2, 3, 1, 3), 2000, seed=42, workers=2)
    doc = json.loads(rep.dumps())
    assert list(doc) == ["spec", "mode", "total", "seed", "workers", "counts"]
    assert doc["spec"] == {"p": 2, "f": 3, "m": 1, "n": 3}
    assert SpectrumReport.from_json(doc) == rep
    keys = list(doc["counts"])
    assert keys[0] == "[]"


def test_merge_is_order_independent():
    spec = GroupSpec(2, 2, 1, 2)
    parts = [mc_spectrum(spec, 500, seed=s, workers=1) for s in range(4)]
    a = merge_reports(parts)
    b = merge_reports([merge_reports(parts[2:]), merge_reports(parts[:2])])
    assert a.counts == b.counts and a.total == b.total == 2000
    assert list(a.counts) == list(b.counts)
    with pytest.raises(ValueError):
        merge_reports([parts[0], mc_spectrum(GroupSpec(2, 2, 2, 2), 10, 0)])


def test_mc_matches_exhaustive_tiny():
    spec = GroupSpec(2, 2, 1, 1)
    exact = exhaustive_spectrum(spec)
    mc = mc_spectrum(spec, 100_000, seed=3, workers=2)
    for g, c in exact.counts.items():
        p = c / exact.total
        se = math.sqrt(p * (1 - p) / mc.total)
        assert abs(mc.frequency(g) - p) <= 4 * se


def test_compare_predictions():
    rep = SpectrumReport(GroupSpec(2, 3, 1, 8), "montecarlo", {(): 1}, 1)
    v = {x.group: x for x in compare_to_theory(rep, groups=[()])}
    assert abs(v[()].predicted - 0.419424) < 2e-6
    rep2 = SpectrumReport(GroupSpec(2, 3, 2, 8), "montecarlo", {(): 1}, 1)
    v2 = compare_to_theory(rep2, groups=[(1, 1)])[0]
    assert abs(v2.predicted - 0.069904) < 1e-6


def test_exhaustive_small_n_fails_honestly():
    rep = exhaustive_spectrum(GroupSpec(2, 1, 0, 1))
    v = compare_to_theory(rep, groups=[()])[0]
    assert v.observed == pytest.approx(1 / 3)
    assert v.predicted == pytest.approx(0.288788, abs=1e-6)
    assert not v.passed


def test_compare_rejects():
    rep = SpectrumReport(GroupSpec(2, 3, 3, 2), "montecarlo", {(): 1}, 1)
    with pytest.raises(ValueError):
        compare_to_theory(rep)
    rep = SpectrumReport(GroupSpec(2, 2, 1, 2), "montecarlo", {(): 1}, 1)
    with pytest.raises(ValueError):
        compare_to_theory(rep, groups=[(2,)])


def test_default_groups_respect_hypothesis():
    rep = mc_spectrum(GroupSpec(2, 2, 1, 3), 500, 0)
    assert all(not v.group or v.group[0] <= 1 for v in compare_to_theory(rep))


@pytest.mark.slow
def test_convergence_in_n():
    # distance to the limit shrinks as n grows (up to sampling noise)
    dists = []
    for n in (1, 2, 4, 8):
        rep = mc_spectrum(GroupSpec(2, 2, 1, n), 20_000, seed=n, workers=1)
        dists.append(sum(abs(v.observed - v.predicted) for v in compare_to_theory(rep)))
    noise = 0.03
    assert all(b <= a + noise for a, b in zip(dists, dists[1:]))
    assert dists[-1] < dists[0]
