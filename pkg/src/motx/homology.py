"""Cofiber sequences, Kunneth and Betti realization for AK(n)-homology."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import grading as g
from . import linalg
from .chart import MAX_CANDIDATES, MAX_CANDIDATE_GENERATORS, extension_module
from .errors import HypothesisViolation, MalformedInput, UnsupportedInput
from .grading import Bidegree, GradedModule, HomogeneousMap

SUSPENSION = Bidegree(1, 0)


# ----------------------------------------------------------------------------
# cones


@dataclass(frozen=True, eq=False)
class ConeResult:
    """AK_**(cone f) from 0 -> coker f -> AK(Z) -> ker f[deg f + (1,0)] -> 0."""

    cokernel: GradedModule
    kernel: GradedModule  # already shifted into the cone
    candidates: tuple  # normal forms of every possible middle term
    how: str

    @property
    def ambiguous(self) -> bool:
        return len(self.candidates) != 1

    @property
    def module(self) -> GradedModule | None:
        return self.candidates[0] if len(self.candidates) == 1 else None


def cone_homology(f: HomogeneousMap) -> ConeResult:
    C = g.cokernel(f)[0]
    K = g.kernel(f)[0].shift(f.degree + SUSPENSION).normal_form()
    if K.is_zero:
        return ConeResult(C, K, (C.normal_form(),), "injective")
    if f.is_zero():
        total = f.target.direct_sum(f.source.shift(f.degree + SUSPENSION)).normal_form()
        return ConeResult(C, K, (total,), "zero map")
    split = C.direct_sum(K)
    if K.is_free or C.is_zero:
        # a free quotient splits the sequence
        return ConeResult(C, K, (split.normal_form(),), "split")
    # tau^k x~ = c for each torsion generator x of ker, c in the matching slice of coker
    hidden = []
    for i in range(C.rank, split.rank):
        x = split.gens[i]
        if x.torsion is None:
            continue
        d = Bidegree(x.deg.p, x.deg.q - x.torsion)
        tg = tuple(j for j in C.slice_basis(d))
        if tg:
            hidden.append((i, tg))
    if not hidden:
        return ConeResult(C, K, (split.normal_form(),), "split")
    total = 1
    for _, tg in hidden:
        total *= C.ring.l ** len(tg)
    if len(hidden) > MAX_CANDIDATE_GENERATORS or total > MAX_CANDIDATES:
        return ConeResult(C, K, (), "too many extensions to enumerate")
    seen = []
    choices = [list(itertools.product(range(C.ring.l), repeat=len(tg))) for _, tg in hidden]
    for combo in itertools.product(*choices):
        rel = [(i, dict(zip(tg, c))) for (i, tg), c in zip(hidden, combo)]
        M = extension_module(split, rel)
        if not any(M.gens == N.gens for N in seen):
            seen.append(M)
    return ConeResult(C, K, tuple(seen), "enumerated extensions")


# ----------------------------------------------------------------------------
# Kunneth


@dataclass(frozen=True, eq=False)
class KunnethResult:
    module: GradedModule
    certificate: str


def kunneth(X: GradedModule, Y: GradedModule) -> KunnethResult:
    """AK(X ^ Y) = AK(X) (x) AK(Y), valid when AK(X) is free."""
    if not X.is_free:
        raise HypothesisViolation("Kunneth needs the first factor to be free; it has torsion %s" % X.torsion_part())
    cert = "first factor free of rank %d over %s" % (X.rank, X.ring)
    return KunnethResult(g.tensor(X, Y), cert)


# ----------------------------------------------------------------------------
# realization


@dataclass(frozen=True)
class KnModule:
    """A free graded module over K(n)_* = F_l[v^{+-1}], |v| = period (0: over F_l)."""

    l: int
    period: int
    degrees: tuple[int, ...]

    def __post_init__(self):
        degs = tuple(sorted(d % self.period if self.period else d for d in self.degrees))
        object.__setattr__(self, "degrees", degs)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @property
    def is_zero(self) -> bool:
        return not self.degrees


@dataclass(frozen=True, eq=False)
class RealizedMap:
    """Matrix over K(n)_*: entry (i, j) is coeffs[i, j] * v^vexp[i, j]."""

    source_degrees: tuple[int, ...]
    target_degrees: tuple[int, ...]
    degree: int
    coeffs: np.ndarray
    vexp: np.ndarray
    l: int
    period: int

    def is_isomorphism(self) -> bool:
        n, m = self.coeffs.shape
        return n == m and linalg.rank(self.coeffs, self.l) == n


@dataclass(frozen=True, eq=False)
class RealizationImage:
    source: GradedModule
    target: KnModule
    kernel: tuple[int, ...]  # generators of the source killed by realization
    free_generators: tuple[int, ...]


def _period(ring: g.CoefficientRing) -> int:
    return ring.period if ring.kind == g.FL_TAU_VN else 0


def realize(M: GradedModule) -> RealizationImage:
    """Invert tau and collapse weights: a generator at (p, q) goes to degree p."""
    if not M.ring.has_tau:
        raise UnsupportedInput("realization needs tau in the coefficients")
    free = tuple(i for i, x in enumerate(M.gens) if x.is_free)
    kern = tuple(i for i, x in enumerate(M.gens) if not x.is_free)
    target = KnModule(M.ring.l, _period(M.ring), tuple(M.gens[i].deg.p for i in free))
    return RealizationImage(M, target, kern, free)


def realize_map(f: HomogeneousMap) -> RealizedMap:
    """c tau^a v^b -> c v_top^b, since v_n acts as tau^{l^n - 1} v_top."""
    rows = [i for i, x in enumerate(f.target.gens) if x.is_free]
    cols = [j for j, x in enumerate(f.source.gens) if x.is_free]
    C = f.coeffs[np.ix_(rows, cols)].copy()
    V = np.zeros_like(C)
    ring = f.ring
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            mono = ring.monomial(f.source.gens[j].deg + f.degree - f.target.gens[i].deg, True)
            V[a, b] = mono[1] if mono is not None else 0
    return RealizedMap(
        tuple(f.source.gens[j].deg.p for j in cols),
        tuple(f.target.gens[i].deg.p for i in rows),
        f.degree.p,
        C,
        V,
        ring.l,
        _period(ring),
    )


def unrealize(K: KnModule, ring: g.CoefficientRing) -> GradedModule:
    """Inverse dictionary: a K(n)_* generator in degree p becomes a tau-inverted one at (p, 0)."""
    if ring.l != K.l or _period(ring) != K.period:
        raise MalformedInput("K(n) module does not match %s" % ring)
    return GradedModule.free(ring, [(p, 0) for p in K.degrees], tau_inverted=True).normal_form()


def unrealize_map(F: RealizedMap, ring: g.CoefficientRing, weight_degree: int = 0) -> HomogeneousMap:
    """tau-inverted map with generators at weight 0 and the same coefficients."""
    src = GradedModule.free(ring, [(p, 0) for p in F.source_degrees], tau_inverted=True)
    tgt = GradedModule.free(ring, [(p, 0) for p in F.target_degrees], tau_inverted=True)
    return HomogeneousMap(src, tgt, Bidegree(F.degree, weight_degree), F.coeffs)


def realization_kernel(M: GradedModule) -> GradedModule:
    """The part of M killed by the comparison map, i.e. its tau-power torsion."""
    R = realize(M)
    return GradedModule(M.ring, tuple(M.gens[i] for i in R.kernel)).normal_form()


def topological_cone(F: RealizedMap) -> KnModule:
    """Cone over the graded field K(n)_*, by degree classes of the realized matrix."""
    P = F.period
    cls = (lambda p: p % P) if P else (lambda p: p)
    src_cls = [cls(p) for p in F.source_degrees]
    tgt_cls = [cls(p) for p in F.target_degrees]
    out = []
    for c in sorted(set(src_cls) | {cls(t - F.degree) for t in tgt_cls}):
        cols = [j for j, x in enumerate(src_cls) if x == c]
        rows = [i for i, x in enumerate(tgt_cls) if x == cls(c + F.degree)]
        rk = linalg.rank(F.coeffs[np.ix_(rows, cols)], F.l) if rows and cols else 0
        out += [c + F.degree] * (len(rows) - rk)
        out += [c + F.degree + 1] * (len(cols) - rk)
    return KnModule(F.l, P, tuple(out))


def vanishes_at(M: GradedModule, degrees) -> list[bool]:
    return [g.slice_dimension(M, d) == 0 for d in degrees]
