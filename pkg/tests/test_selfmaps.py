import numpy as np
import pytest

from helpers import random_map

from motx import cells
from motx import grading as g
from motx.errors import MalformedInput, NotIsomorphism, RingMismatch, UnsupportedInput
from motx.grading import Bidegree, GradedModule
from motx.selfmaps import (
    brute_force_power,
    classify_at_height,
    classify_self_map,
    nilpotency_exponent,
    power_relation,
    verify_extended_uniqueness,
)


@pytest.mark.parametrize("l", [3, 5])
def test_cv_fails_isomorphism(l):
    R = g.AK(l, 1)
    v = classify_at_height(cells.map_cv(R), 1, 1, 50)
    assert v.kind == "fails-isomorphism" and not v.is_isomorphism
    assert [x.torsion for x in v.cokernel.normal_form().gens] == [l - 1, l - 1]


@pytest.mark.parametrize("l", [3, 5])
def test_vn_is_unit_multiple(l):
    R = g.AK(l, 1)
    v = classify_at_height(cells.map_vn(R), 1, 1, 50)
    assert v.kind == "unit-multiple" and (v.i, v.j) == (1, 1)


def test_nilpotent_and_zero_maps():
    R = g.AK(3, 1)
    M = cells.moore(R)
    bock = g.homogeneous_map(M, M, (1, 0), [[0, 0], [1, 0]])
    assert nilpotency_exponent(bock, 10) == 2
    assert classify_at_height(bock, 1, 1, 10).exponent == 2
    assert nilpotency_exponent(g.zero_map(M, M), 10) == 1
    Z = GradedModule.zero(R)
    assert classify_at_height(g.identity(Z), 1, 1, 10).kind == "nilpotent"


def test_report_and_definition():
    R1, R2 = g.AK(3, 1), g.AK(3, 2)
    M2 = cells.moore(R2)
    fs = {1: cells.map_vn(R1), 2: g.zero_map(M2, M2, R2.element_degree(0, 0) + Bidegree(4, 2))}
    rep = classify_self_map(fs, 1, heights=[1, 2])
    assert rep.satisfies_definition and rep.degree_ok
    assert rep.to_dict()["heights"]["2"]["verdict"] == "nilpotent"
    partial = classify_self_map({1: cells.map_vn(R1)}, 1)
    assert partial.verdicts[3].kind == "undetermined" and not partial.satisfies_definition
    bad = classify_self_map({1: cells.map_cv(R1)}, 1, heights=[1])
    assert not bad.satisfies_definition


def test_height_mismatch_and_height_zero():
    f = cells.map_vn(g.AK(3, 1))
    with pytest.raises(RingMismatch):
        classify_at_height(f, 2, 2, 10)
    v = classify_at_height(f, 0, 1, 10)
    assert v.approximate and v.kind == "isomorphism"
    S = cells.moore(g.AK(3, 1))
    with pytest.raises(MalformedInput):
        classify_at_height(g.zero_map(S, cells.sphere(g.AK(3, 1))), 1, 1, 10)


def random_automorphism(rng, R, rank_max=3):
    """v_n times an invertible degree-zero matrix plus tau-divisible noise."""
    while True:
        k = int(rng.integers(1, rank_max + 1))
        M = GradedModule.free(R, [(0, int(rng.integers(-2, 3))) for _ in range(k)])
        f = random_map(rng, M, M, R.vn_degree, density=0.8)
        if g.is_isomorphism(f):
            return f


def test_power_relation_matches_brute_force():
    rng = np.random.default_rng(3)
    R = g.AK(3, 1)
    for _ in range(40):
        f = random_automorphism(rng, R)
        rel = power_relation(f)
        assert rel.i is not None
        assert f.power(rel.i) == g.multiplication(f.source, 0, rel.j)
        assert brute_force_power(f, rel.i) == (rel.i, rel.j)


def test_power_relation_errors():
    R = g.AK(3, 1)
    with pytest.raises(NotIsomorphism):
        power_relation(cells.map_cv(R))
    # on a tau-inverted module tau is a unit of degree (0, -1), not a multiple of |v_1|
    T = GradedModule.free(R, [(0, 0)], tau_inverted=True)
    with pytest.raises(UnsupportedInput):
        power_relation(g.homogeneous_map(T, T, (0, -1), [[1]]))
    with pytest.raises(UnsupportedInput):
        power_relation(g.identity(GradedModule.free(g.FlTau(3), [(0, 0)])))


def test_half_period_swap():
    # x0 -> x1 -> v_1 x0 squares to v_1
    R = g.AK(3, 1)
    N = GradedModule.free(R, [(0, 0), (2, 1)])
    f = g.homogeneous_map(N, N, (2, 1), [[0, 1], [1, 0]])
    rel = power_relation(f)
    assert (rel.i, rel.j) == (2, 1) == brute_force_power(f, 10)


def test_extended_uniqueness_identity():
    R = g.AK(3, 1)
    v = cells.map_vn(R)
    h = g.identity(v.source)
    assert verify_extended_uniqueness(h, v, v, 3, 1)
    assert not verify_extended_uniqueness(h, v, v, 2, 1)
