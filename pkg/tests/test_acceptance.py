"""Acceptance criteria 1-12, each at its stated size, tolerance and time budget."""

import time

import numpy as np

from helpers import random_map, random_module

from motx import algebra as alg
from motx import cells
from motx import grading as g
from motx import linalg
from motx import steenrod as A
from motx.cli import main
from motx.ext import Comodule, LambdaModule, Window, cotor, ext_over_lambda_qn
from motx.golden import b_chart
from motx.grading import Bidegree, Generator, GradedModule
from motx.homology import (
    KnModule,
    cone_homology,
    kunneth,
    realization_kernel,
    realize,
    realize_map,
    unrealize,
    unrealize_map,
)
from motx.selfmaps import brute_force_power, power_relation


def dense_rank(M, l):
    """Plain Gaussian elimination over F_l, kept apart from motx.linalg."""
    M = [[int(x) % l for x in row] for row in M]
    rank, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(M)) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], l - 2, l)
        M[rank] = [x * inv % l for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][c]:
                f = M[r][c]
                M[r] = [(x - f * y) % l for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


def test_criterion_01_lambda_ext_formula(criterion):
    t0 = time.perf_counter()
    ok = True
    for l in (3, 5):
        E = ext_over_lambda_qn(LambdaModule(GradedModule.free(g.FlTau(l), [(0, 0)]), 1), Window(5, 40))
        for s in range(6):
            for stem in range(0, 41):
                for u in range(-41, 42):
                    want = int(stem == s * (2 * l - 2) and u <= s * (l - 1) and stem + s <= 40)
                    ok &= E.rank_at_stem(s, stem, u) == want
    dt = time.perf_counter() - t0
    criterion(1, "Ext over Lambda(Q_n) of the point is F_l[tau][v_n]", ok and dt < 5, dt)
    assert ok and dt < 5


def test_criterion_02_cobar_agrees_with_resolution(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    ok, count = True, 0
    for k in range(20):
        l = (3, 5)[k % 2]
        gens = [(int(rng.integers(0, 10)), int(rng.integers(-3, 5))) for _ in range(int(rng.integers(1, 5)))]
        L = LambdaModule(GradedModule.free(g.FlTau(l), gens), 1)
        W = Window(4, 30)
        a = ext_over_lambda_qn(L, W)
        b = cotor(Comodule.from_lambda(L), W)
        for s in range(5):
            for t in range(31):
                for u in range(-34, 35):
                    ok &= a.rank(s, t, u) == b.rank(s, t, u)
                    ok &= a.torsion_profile(s, t, u) == b.torsion_profile(s, t, u)
        count += 1
    dt = time.perf_counter() - t0
    criterion(2, "cotor = Ext over Lambda(Q_n) on %d random modules" % count, ok and dt < 60, dt)
    assert ok and count >= 20 and dt < 60


def test_criterion_03_b_chart(criterion):
    t0 = time.perf_counter()
    E2, einf, cert, ab = b_chart(3, 1)
    starts, free = ab.over_vn(1)
    ok = (
        set(E2.permanent) == set(E2.modules)
        and bool(E2.modules)
        and not ab.ambiguous
        and free
        and starts.is_free
        and starts.rank == 6
    )
    dt = time.perf_counter() - t0
    criterion(3, "B chart: all permanent, abutment free of rank 6", ok, dt)
    assert ok


def test_criterion_04_cv_counterexample(criterion):
    t0 = time.perf_counter()
    ok = True
    for l in (3, 5):
        R = g.AK(l, 1)
        M = cells.moore(R)
        cv = cells.map_cv(R)
        C = cone_homology(cv).module
        quotient = GradedModule(R, tuple(Generator(x.deg, l - 1) for x in M.gens))
        ok &= C is not None and C.isomorphic(quotient)
        ok &= g.invert_tau(C).is_zero
        ok &= realize_map(cv).is_isomorphism()
    dt = time.perf_counter() - t0
    criterion(4, "cone of tau^(l-1) v_1 is AK(1)(S/l)/tau^(l-1)", ok, dt)
    assert ok


def test_criterion_05_eta_cone(criterion):
    t0 = time.perf_counter()
    ok = True
    for l in (3, 5):
        for m in (1, 2, 3):
            R = g.AK(l, m)
            C = cells.cone_eta(R)
            ok &= C.isomorphic(GradedModule.free(R, [(0, 0), (2, 1)]))
            ok &= kunneth(C, GradedModule.zero(R)).module.is_zero
            X = cells.moore(R)
            K = kunneth(C, X).module
            ok &= not K.is_zero and K.isomorphic(g.tensor(C, X))
            ok &= K.rank == 4
    dt = time.perf_counter() - t0
    criterion(5, "C_eta splits; Kunneth with zero and free factors", ok, dt)
    assert ok


def test_criterion_06_tau_kernel(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    rings = [g.AK(3, 1), g.AK(5, 1), g.AK(3, 2), g.FlTau(3)]
    ok, n = True, 0
    for k in range(1000):
        M = random_module(rng, rings[k % 4], 6)
        K = realization_kernel(M)
        ok &= K.isomorphic(M.torsion_part())
        ok &= realize(M).target.dim == M.free_rank
        n += 1
    dt = time.perf_counter() - t0
    criterion(6, "realization kernel = tau-power torsion (%d modules)" % n, ok, dt)
    assert ok and n >= 1000


def test_criterion_07_regrading_roundtrip(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    rings = [g.AK(3, 1), g.AK(5, 1), g.AK(3, 2)]
    ok, n = True, 0
    for k in range(1000):
        R = rings[k % 3]
        M = random_module(rng, R, 5, tau_inverted=True, p_range=3 * R.period, q_range=6)
        back = unrealize(realize(M).target, R)
        ok &= back.isomorphic(M.normal_form())
        K = KnModule(R.l, R.period, tuple(int(x) for x in rng.integers(-20, 20, int(rng.integers(0, 5)))))
        ok &= realize(unrealize(K, R)).target == K
        # v_n^top acts through the weight-zero element tau^(l^n - 1) v_n
        U = unrealize(K, R)
        vtop = g.multiplication(U, R.l**R.n - 1, 1)
        F = realize_map(vtop)
        ok &= F.degree == R.period
        ok &= np.array_equal(F.coeffs, np.eye(U.rank, dtype=np.int64))
        ok &= bool((F.vexp[F.coeffs != 0] == 1).all())
        ok &= unrealize_map(F, R) == vtop
        # and v_n itself realizes to v_n^top
        Free = GradedModule.free(R, [x.deg for x in M.gens])
        Fv = realize_map(g.multiplication(Free, 0, 1))
        ok &= bool((Fv.vexp[Fv.coeffs != 0] == 1).all()) and Fv.is_isomorphism()
        n += 1
    dt = time.perf_counter() - t0
    criterion(7, "realize / unrealize roundtrip and v_n action (%d cases)" % n, ok, dt)
    assert ok and n >= 1000


def random_isomorphism(rng, R):
    """Automorphisms of rank <= 3 free modules: degree |v_n| maps, plus half-period swaps."""
    while True:
        if rng.random() < 0.2:
            N = GradedModule.free(R, [(0, 0), (R.vn_degree.p // 2, R.vn_degree.q // 2)])
            f = g.homogeneous_map(N, N, (R.vn_degree.p // 2, R.vn_degree.q // 2), [[0, int(rng.integers(1, R.l))], [int(rng.integers(1, R.l)), 0]])
        else:
            k = int(rng.integers(1, 4))
            M = GradedModule.free(R, [(0, int(rng.integers(-2, 3))) for _ in range(k)])
            f = random_map(rng, M, M, R.vn_degree, density=0.8)
        if g.is_isomorphism(f):
            return f


def test_criterion_08_power_relation(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    R = g.AK(3, 1)
    cap = R.l**3
    ok, n, within = True, 0, 0
    for _ in range(120):
        f = random_isomorphism(rng, R)
        rel = power_relation(f)
        ok &= rel.i is not None and f.power(rel.i) == g.multiplication(f.source, 0, rel.j)
        brute = brute_force_power(f, cap)
        if rel.i is not None and rel.i <= cap:
            ok &= brute == (rel.i, rel.j)
            within += 1
        else:
            ok &= brute is None
        n += 1
    dt = time.perf_counter() - t0
    criterion(8, "power relation f^i = v_1^j vs brute force (%d maps)" % n, ok and dt < 120, dt)
    assert ok and n >= 100 and within >= 100 and dt < 120


def nilpotent_ad_case(rng, l):
    """A strictly upper triangular element of T_k(F_l) written in a random basis."""
    k = int(rng.integers(2, 4))
    T = alg.upper_triangular(l, k)
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    x = np.array([int(rng.integers(0, l)) if i < j else 0 for i, j in pairs])
    while True:
        P = rng.integers(0, l, size=(T.dim, T.dim))
        if dense_rank(P, l) == T.dim:
            break
    # coordinates in the new basis: P y = x
    y = linalg.matmul(linalg.inverse(P, l), x.reshape(-1, 1), l).ravel()
    return T.change_basis(P), y


def test_criterion_09_ad_formula(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    ok, n, nil = True, 0, 0
    for k in range(120):
        l = (3, 5)[k % 2]
        B = alg.random_algebra(rng, l, 6)
        ok &= B.dim <= 6
        x = rng.integers(0, l, B.dim)
        for i in sorted({2, 3, l, l * l}):
            ok &= alg.ad_power_check(B, x, i)
        n += 1
        for C, y in ((B, x), nilpotent_ad_case(rng, l)):
            idx = alg.ad_nilpotency_index(C, y)
            if idx is None:
                continue
            for N in range(0, 3):
                if idx <= l**N:
                    ok &= not C.ad(C.power(y, l**N)).any()
                    nil += 1
    dt = time.perf_counter() - t0
    criterion(9, "ad(x^i) binomial identity on %d algebras" % n, ok, dt)
    assert ok and n >= 100 and nil >= 100


def test_criterion_10_snf_oracle(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    ok, n = True, 0
    for k in range(1000):
        l = (3, 5, 7)[k % 3]
        R = g.FlTau(l)
        r, c = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        tgt = GradedModule.free(R, [(0, int(q)) for q in rng.integers(0, 4, r)])
        src = GradedModule.free(R, [(0, int(q)) for q in rng.integers(-3, 1, c)])
        f = g.homogeneous_map(src, tgt, (0, 0), rng.integers(0, l, (r, c)) * (rng.random((r, c)) < 0.6))
        ok &= int(f.exponents.max()) <= 6
        s = g.snf(f)
        ok &= s.U @ s.D @ s.V == f
        ok &= s.U @ s.U_inv == g.identity(tgt) and s.V_inv @ s.V == g.identity(src)
        for q in range(-10, 1):
            d = Bidegree(0, q)
            ok &= dense_rank(g.slice_matrix(f, d), l) == dense_rank(g.slice_matrix(s.D, d), l)
        n += 1
    dt = time.perf_counter() - t0
    criterion(10, "graded SNF vs dense elimination (%d matrices)" % n, ok and dt < 30, dt)
    assert ok and n >= 1000 and dt < 30


def test_criterion_11_coassociativity(criterion):
    t0 = time.perf_counter()
    ok = True
    for l in (3, 5):
        ok &= A.coassociativity_defects(l, 30) == []
        ok &= A.counit_defects(l, 30) == []
    dt = time.perf_counter() - t0
    criterion(11, "coassociativity and counit for t <= 30, l = 3, 5", ok, dt)
    assert ok


def test_criterion_12_all_golden_cases(criterion, capsys):
    t0 = time.perf_counter()
    codes, outs = [], []
    for _ in range(2):
        codes.append(main(["paper", "--all"]))
        outs.append(capsys.readouterr().out)
    dt = time.perf_counter() - t0
    ok = codes == [0, 0] and outs[0] == outs[1] and outs[0].rstrip().endswith("8/8 PASS")
    criterion(12, "all 8 golden reference cases pass, deterministic", ok and dt < 300, dt)
    assert ok and dt < 300
