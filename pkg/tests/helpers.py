"""Random modules and maps plus dense slice oracles shared by the tests."""

import numpy as np

from motx import grading as g
from motx import linalg
from motx.grading import Bidegree, Generator, GradedModule, HomogeneousMap


def random_module(rng, R, rank_max=4, torsion=True, p_range=4, q_range=2, tau_inverted=False):
    k = int(rng.integers(0, rank_max + 1))
    gens = []
    for _ in range(k):
        p = int(rng.integers(0, p_range)) if R.kind != g.FL_TAU else int(rng.integers(0, 2))
        q = int(rng.integers(-q_range, q_range + 1))
        t = None
        if torsion and not tau_inverted and rng.random() < 0.4:
            t = int(rng.integers(1, 4))
        gens.append(Generator(Bidegree(p, q), t))
    return GradedModule(R, tuple(gens), tau_inverted)


def random_degree(rng, M, N):
    R = M.ring
    if M.rank and N.rank:
        i = int(rng.integers(N.rank))
        j = int(rng.integers(M.rank))
        a = int(rng.integers(0, 3))
        b = int(rng.integers(-1, 2)) if R.kind == g.FL_TAU_VN else 0
        return N.gens[i].deg - M.gens[j].deg + R.element_degree(a, b)
    return Bidegree(0, 0)


def random_map(rng, M, N, degree=None, density=0.7):
    """A valid homogeneous map M -> N; entries violating torsion are dropped."""
    d = random_degree(rng, M, N) if degree is None else degree
    A = g.exponent_matrix(M, N, d)
    C = rng.integers(0, M.ring.l, size=A.shape) * (rng.random(A.shape) < density)
    C = np.where(A == g.NO_ENTRY, 0, C)
    for j, s in enumerate(M.gens):
        if s.torsion is None:
            continue
        for i, t in enumerate(N.gens):
            if t.torsion is None or A[i, j] + s.torsion < t.torsion:
                C[i, j] = 0
    return HomogeneousMap(M, N, d, C)


def probe_degrees(*modules, spread=8):
    """Bidegrees near every generator, enough to see every nonzero slice."""
    out = set()
    for M in modules:
        for x in M.gens:
            for dq in range(-spread, 2):
                out.add(Bidegree(x.deg.p, x.deg.q + dq))
    return sorted(out, key=lambda d: (d.p, d.q))


def slice_rank(f, d):
    S = g.slice_matrix(f, d)
    return linalg.rank(S, f.ring.l) if S.size else 0
