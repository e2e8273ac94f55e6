"""Bigraded modules over F_l, F_l[tau] and F_l[tau, v_n^{+-1}].

Every nonzero homogeneous element of these rings is a monomial
``c * tau^a * v_n^b``, and each bidegree of the ring holds at most one
monomial. A homogeneous matrix between modules with homogeneous generators
is therefore pinned down by its F_l coefficients: the exponents ``(a, b)``
of each entry are forced by the generator degrees and the map degree.
``HomogeneousMap`` stores exactly that coefficient array and derives the
exponents on demand. Divisibility is governed by the tau-exponent alone
(``v_n`` is a unit), so Smith normal form is Gaussian elimination on the
coefficients with pivots taken in order of increasing tau-exponent.

Torsion modules are handled through free presentations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import (
    MalformedInput,
    NotIdempotent,
    NotIsomorphism,
    RingMismatch,
    TorWarning,
    UnsupportedInput,
)

FL = "Fl"
FL_TAU = "FlTau"
FL_TAU_VN = "FlTauVn"
KINDS = (FL, FL_TAU, FL_TAU_VN)

# marks a matrix position where no ring monomial of the required degree exists
NO_ENTRY = -1


@dataclass(frozen=True, order=True)
class Bidegree:
    """Topological degree ``p`` and motivic weight ``q``."""

    p: int
    q: int

    def __add__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "Bidegree") -> "Bidegree":
        return Bidegree(self.p - other.p, self.q - other.q)

    def __neg__(self) -> "Bidegree":
        return Bidegree(-self.p, -self.q)

    def __mul__(self, k: int) -> "Bidegree":
        return Bidegree(self.p * k, self.q * k)

    __rmul__ = __mul__

    def __iter__(self):
        yield self.p
        yield self.q

    def __repr__(self) -> str:
        return "(%d,%d)" % (self.p, self.q)


ZERO = Bidegree(0, 0)
TAU_DEGREE = Bidegree(0, -1)


def as_bidegree(d) -> Bidegree:
    if isinstance(d, Bidegree):
        return d
    p, q = d
    return Bidegree(int(p), int(q))


def is_odd_prime(l: int) -> bool:
    if l < 3 or l % 2 == 0:
        return False
    return all(l % k for k in range(3, math.isqrt(l) + 1, 2))


@dataclass(frozen=True)
class CoefficientRing:
    l: int
    kind: str = FL_TAU
    n: int | None = None

    def __post_init__(self):
        if not is_odd_prime(self.l):
            raise MalformedInput("l = %r is not an odd prime" % (self.l,))
        if self.kind not in KINDS:
            raise MalformedInput("unknown ring kind %r" % (self.kind,))
        if self.kind == FL_TAU_VN:
            # v_0 would sit in degree (0,0) and make every slice infinite
            if self.n is None or self.n < 1:
                raise MalformedInput("FlTauVn needs a height n >= 1")
        elif self.n is not None:
            raise MalformedInput("height n only applies to FlTauVn")

    @property
    def has_tau(self) -> bool:
        return self.kind != FL

    @property
    def vn_degree(self) -> Bidegree:
        if self.kind != FL_TAU_VN:
            raise UnsupportedInput("ring %s has no v_n" % self.kind)
        return Bidegree(2 * (self.l**self.n - 1), self.l**self.n - 1)

    @property
    def period(self) -> int:
        return self.vn_degree.p if self.kind == FL_TAU_VN else 0

    def monomial(self, d: Bidegree, tau_inverted: bool = False) -> tuple[int, int] | None:
        """Exponents ``(a, b)`` of the monomial tau^a v^b of degree ``d``."""
        if self.kind == FL:
            return (0, 0) if (d.p, d.q) == (0, 0) else None
        if self.kind == FL_TAU:
            if d.p != 0:
                return None
            a, b = -d.q, 0
        else:
            P = self.period
            if d.p % P:
                return None
            b = d.p // P
            a = b * (self.l**self.n - 1) - d.q
        if a < 0 and not tau_inverted:
            return None
        return a, b

    def element_degree(self, a: int, b: int = 0) -> Bidegree:
        d = TAU_DEGREE * a
        if b:
            d = d + self.vn_degree * b
        return d

    def normalize(self, d: Bidegree, tau_inverted: bool = False) -> Bidegree:
        """Representative of the orbit of ``d`` under the ring's units."""
        if self.kind == FL_TAU_VN:
            d = d - self.vn_degree * (d.p // self.period)
        if tau_inverted:
            d = Bidegree(d.p, 0)
        return d

    def to_dict(self) -> dict:
        return {"l": self.l, "kind": self.kind, "n": self.n}

    @classmethod
    def from_dict(cls, d: dict) -> "CoefficientRing":
        return cls(int(d["l"]), d.get("kind", FL_TAU), d.get("n"))

    def __str__(self) -> str:
        if self.kind == FL:
            return "F_%d" % self.l
        if self.kind == FL_TAU:
            return "F_%d[tau]" % self.l
        return "F_%d[tau, v_%d^+-1]" % (self.l, self.n)


def Fl(l: int) -> CoefficientRing:
    return CoefficientRing(l, FL)


def FlTau(l: int) -> CoefficientRing:
    return CoefficientRing(l, FL_TAU)


def AK(l: int, n: int) -> CoefficientRing:
    """Coefficients of algebraic Morava K-theory, F_l[tau, v_n^{+-1}]."""
    return CoefficientRing(l, FL_TAU_VN, n)


class Generator(NamedTuple):
    deg: Bidegree
    torsion: int | None = None  # None: free summand; k: ring/(tau^k)

    @property
    def is_free(self) -> bool:
        return self.torsion is None


def _torsion_key(t: int | None) -> float:
    return math.inf if t is None else t


@dataclass(frozen=True)
class GradedModule:
    ring: CoefficientRing
    gens: tuple[Generator, ...] = ()
    tau_inverted: bool = False

    def __post_init__(self):
        gens = tuple(Generator(as_bidegree(g[0]), g[1] if len(g) > 1 else None) for g in self.gens)
        object.__setattr__(self, "gens", gens)
        for g in gens:
            if g.torsion is None:
                continue
            if not isinstance(g.torsion, (int, np.integer)) or g.torsion < 1:
                raise MalformedInput("torsion order must be a positive integer, got %r" % (g.torsion,))
            if not self.ring.has_tau or self.tau_inverted:
                raise MalformedInput("tau-torsion summand over %s" % self.ring)
        if self.tau_inverted and not self.ring.has_tau:
            raise MalformedInput("cannot invert tau in %s" % self.ring)

    @classmethod
    def free(cls, ring: CoefficientRing, degrees: Iterable, tau_inverted: bool = False) -> "GradedModule":
        return cls(ring, tuple(Generator(as_bidegree(d)) for d in degrees), tau_inverted)

    @classmethod
    def zero(cls, ring: CoefficientRing) -> "GradedModule":
        return cls(ring, ())

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def degrees(self) -> list[Bidegree]:
        return [g.deg for g in self.gens]

    @property
    def is_free(self) -> bool:
        return all(g.is_free for g in self.gens)

    @property
    def is_zero(self) -> bool:
        return not self.gens

    @property
    def free_rank(self) -> int:
        return sum(1 for g in self.gens if g.is_free)

    def free_part(self) -> "GradedModule":
        return GradedModule(self.ring, tuple(g for g in self.gens if g.is_free), self.tau_inverted)

    def torsion_part(self) -> "GradedModule":
        return GradedModule(self.ring, tuple(g for g in self.gens if not g.is_free), self.tau_inverted)

    def shift(self, d) -> "GradedModule":
        d = as_bidegree(d)
        return GradedModule(self.ring, tuple(Generator(g.deg + d, g.torsion) for g in self.gens), self.tau_inverted)

    def direct_sum(self, *others: "GradedModule") -> "GradedModule":
        gens = list(self.gens)
        for o in others:
            _check_same_ring(self, o)
            gens.extend(o.gens)
        return GradedModule(self.ring, tuple(gens), self.tau_inverted)

    def __add__(self, other: "GradedModule") -> "GradedModule":
        return self.direct_sum(other)

    def _sort_key(self, g: Generator):
        d = self.ring.normalize(g.deg, self.tau_inverted)
        return (d.p, d.q, _torsion_key(g.torsion))

    def sort_order(self) -> list[int]:
        return sorted(range(self.rank), key=lambda i: self._sort_key(self.gens[i]))

    def normal_form(self) -> "GradedModule":
        gens = sorted(
            (Generator(self.ring.normalize(g.deg, self.tau_inverted), g.torsion) for g in self.gens),
            key=lambda g: (g.deg.p, g.deg.q, _torsion_key(g.torsion)),
        )
        return GradedModule(self.ring, tuple(gens), self.tau_inverted)

    def isomorphic(self, other: "GradedModule") -> bool:
        return (
            self.ring == other.ring
            and self.tau_inverted == other.tau_inverted
            and self.normal_form().gens == other.normal_form().gens
        )

    def generator_slice(self, i: int, d: Bidegree) -> int | None:
        """tau-exponent of the basis element of generator ``i`` in slice ``d``."""
        g = self.gens[i]
        m = self.ring.monomial(d - g.deg, self.tau_inverted)
        if m is None:
            return None
        if g.torsion is not None and m[0] >= g.torsion:
            return None
        return m[0]

    def slice_basis(self, d) -> list[int]:
        d = as_bidegree(d)
        return [i for i in range(self.rank) if self.generator_slice(i, d) is not None]

    def __str__(self) -> str:
        if not self.gens:
            return "0"
        parts = []
        for g in self.gens:
            s = "R%r" % (g.deg,)
            if g.torsion is not None:
                s += "/tau^%d" % g.torsion
            parts.append(s)
        return " + ".join(parts)


def _check_same_ring(a: GradedModule, b: GradedModule):
    if a.ring != b.ring:
        raise RingMismatch("modules over %s and %s" % (a.ring, b.ring))
    if a.tau_inverted != b.tau_inverted:
        raise RingMismatch("mixing tau-inverted and ordinary modules")


def slice_dimension(M: GradedModule, d) -> int:
    """Exact F_l-dimension of the bidegree-``d`` slice of ``M``."""
    return len(M.slice_basis(as_bidegree(d)))


def exponent_matrix(source: GradedModule, target: GradedModule, degree: Bidegree) -> np.ndarray:
    """tau-exponents forced on each entry; ``NO_ENTRY`` where none exists."""
    ring = source.ring
    inv = source.tau_inverted
    A = np.full((target.rank, source.rank), NO_ENTRY, dtype=np.int64)
    for i, t in enumerate(target.gens):
        for j, s in enumerate(source.gens):
            m = ring.monomial(s.deg + degree - t.deg, inv)
            if m is not None:
                A[i, j] = 0 if inv else m[0]
    return A


@dataclass(frozen=True, eq=False)
class HomogeneousMap:
    """A module map raising bidegrees by ``degree``.

    ``coeffs[i, j]`` is the F_l coefficient of the image of source generator
    ``j`` on target generator ``i``; the accompanying monomial has degree
    ``deg(source_j) + degree - deg(target_i)``.
    """

    source: GradedModule
    target: GradedModule
    degree: Bidegree
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_same_ring(self.source, self.target)
        object.__setattr__(self, "degree", as_bidegree(self.degree))
        l = self.ring.l
        C = np.asarray(self.coeffs, dtype=np.int64).reshape(self.target.rank, self.source.rank) % l
        A = exponent_matrix(self.source, self.target, self.degree)
        bad = (C != 0) & (A == NO_ENTRY)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise MalformedInput(
                "entry (%d,%d) has no homogeneous ring element of degree %r"
                % (i, j, self.source.gens[j].deg + self.degree - self.target.gens[i].deg)
            )
        for i, t in enumerate(self.target.gens):
            if t.torsion is not None:
                C[i, A[i] >= t.torsion] = 0
        for j, s in enumerate(self.source.gens):
            if s.torsion is None:
                continue
            for i, t in enumerate(self.target.gens):
                if C[i, j] and (t.torsion is None or A[i, j] + s.torsion < t.torsion):
                    raise MalformedInput(
                        "entry (%d,%d) does not respect the tau^%d relation on source generator %d"
                        % (i, j, s.torsion, j)
                    )
        C.setflags(write=False)
        object.__setattr__(self, "coeffs", C)
        object.__setattr__(self, "_exponents", A)

    @property
    def ring(self) -> CoefficientRing:
        return self.source.ring

    @property
    def exponents(self) -> np.ndarray:
        return self._exponents

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape

    def entry(self, i: int, j: int) -> tuple[int, int, int] | None:
        """``(c, a, b)`` for entry ``(i, j)``, or None when it is zero."""
        c = int(self.coeffs[i, j])
        if not c:
            return None
        a, b = self.ring.monomial(
            self.source.gens[j].deg + self.degree - self.target.gens[i].deg, self.source.tau_inverted
        )
        return c, a, b

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomogeneousMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and (self.degree == other.degree or (self.is_zero() and other.is_zero()))
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def compose(self, other: "HomogeneousMap") -> "HomogeneousMap":
        """``self o other``."""
        if other.target != self.source:
            raise MalformedInput("composition of maps with mismatched modules")
        C = linalg.matmul(self.coeffs, other.coeffs, self.ring.l)
        return HomogeneousMap(other.source, self.target, self.degree + other.degree, C)

    __matmul__ = compose

    def __add__(self, other: "HomogeneousMap") -> "HomogeneousMap":
        if (self.source, self.target) != (other.source, other.target):
            raise MalformedInput("sum of maps with mismatched modules")
        if self.is_zero():
            return other
        if not other.is_zero() and self.degree != other.degree:
            raise MalformedInput("sum of maps of different degrees")
        return HomogeneousMap(self.source, self.target, self.degree, self.coeffs + other.coeffs)

    def __neg__(self) -> "HomogeneousMap":
        return HomogeneousMap(self.source, self.target, self.degree, -self.coeffs)

    def __sub__(self, other: "HomogeneousMap") -> "HomogeneousMap":
        return self + (-other)

    def scale(self, c: int) -> "HomogeneousMap":
        return HomogeneousMap(self.source, self.target, self.degree, self.coeffs * c)

    def times_monomial(self, a: int, b: int = 0) -> "HomogeneousMap":
        """Postcompose with multiplication by tau^a v^b."""
        return HomogeneousMap(self.source, self.target, self.degree + self.ring.element_degree(a, b), self.coeffs)

    def power(self, k: int) -> "HomogeneousMap":
        if self.source != self.target:
            raise MalformedInput("power of a map that is not an endomorphism")
        result = identity(self.source)
        base = self
        while k:
            if k & 1:
                result = base @ result
            base = base @ base
            k >>= 1
        return result

    def restrict(self, rows: Sequence[int], cols: Sequence[int], source=None, target=None) -> "HomogeneousMap":
        src = source or GradedModule(self.ring, tuple(self.source.gens[j] for j in cols), self.source.tau_inverted)
        tgt = target or GradedModule(self.ring, tuple(self.target.gens[i] for i in rows), self.target.tau_inverted)
        return HomogeneousMap(src, tgt, self.degree, self.coeffs[np.ix_(list(rows), list(cols))])

    def __repr__(self) -> str:
        return "HomogeneousMap(%s -> %s, degree=%r, coeffs=%s)" % (
            self.source,
            self.target,
            self.degree,
            self.coeffs.tolist(),
        )


def homogeneous_map(source, target, degree, coeffs) -> HomogeneousMap:
    return HomogeneousMap(source, target, as_bidegree(degree), np.asarray(coeffs, dtype=np.int64))


def identity(M: GradedModule) -> HomogeneousMap:
    return HomogeneousMap(M, M, ZERO, np.eye(M.rank, dtype=np.int64))


def zero_map(source: GradedModule, target: GradedModule, degree=ZERO) -> HomogeneousMap:
    return HomogeneousMap(source, target, as_bidegree(degree), np.zeros((target.rank, source.rank), dtype=np.int64))


def multiplication(M: GradedModule, a: int, b: int = 0, c: int = 1) -> HomogeneousMap:
    """The endomorphism ``x -> c * tau^a v^b x`` of ``M``."""
    return HomogeneousMap(M, M, M.ring.element_degree(a, b), np.eye(M.rank, dtype=np.int64) * c)


def slice_matrix(f: HomogeneousMap, d) -> np.ndarray:
    """Dense F_l matrix of ``f`` from the ``d`` slice to the ``d + deg f`` slice."""
    d = as_bidegree(d)
    cols = f.source.slice_basis(d)
    rows = f.target.slice_basis(d + f.degree)
    return f.coeffs[np.ix_(rows, cols)].copy()


# ----------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True, eq=False)
class SNF:
    """``map == U o D o V``; ``D`` has at most one nonzero entry per row and
    column, each equal to the monomial forced by the degrees (coefficient 1).
    ``pivots`` lists those positions in order of increasing tau-exponent."""

    D: HomogeneousMap
    U: HomogeneousMap
    V: HomogeneousMap
    U_inv: HomogeneousMap
    V_inv: HomogeneousMap
    pivots: tuple[tuple[int, int], ...]

    def pivot_exponents(self) -> list[int]:
        A = self.D.exponents
        return [int(A[i, j]) for i, j in self.pivots]

    def diagonal(self) -> list[tuple[int, int, int]]:
        return [self.D.entry(i, j) for i, j in self.pivots]


def _snf_arrays(C: np.ndarray, A: np.ndarray, l: int):
    D = C.copy() % l
    m, n = D.shape
    U = np.eye(m, dtype=np.int64)
    Ui = np.eye(m, dtype=np.int64)
    V = np.eye(n, dtype=np.int64)
    Vi = np.eye(n, dtype=np.int64)
    row_free = np.ones(m, dtype=bool)
    col_free = np.ones(n, dtype=bool)
    pivots = []
    big = np.iinfo(np.int64).max
    while True:
        live = (D != 0) & row_free[:, None] & col_free[None, :]
        if not live.any():
            break
        cand = np.where(live, A, big)
        i, j = np.unravel_index(int(np.argmin(cand)), cand.shape)
        c = int(D[i, j])
        ci = linalg.inv_mod(c, l)
        D[i] = (D[i] * ci) % l
        U[:, i] = (U[:, i] * c) % l
        Ui[i] = (Ui[i] * ci) % l
        for k in np.nonzero(D[:, j])[0]:
            if k == i:
                continue
            f = int(D[k, j])
            D[k] = (D[k] - f * D[i]) % l
            U[:, i] = (U[:, i] + f * U[:, k]) % l
            Ui[k] = (Ui[k] - f * Ui[i]) % l
        for k in np.nonzero(D[i])[0]:
            if k == j:
                continue
            f = int(D[i, k])
            D[:, k] = (D[:, k] - f * D[:, j]) % l
            V[j] = (V[j] + f * V[k]) % l
            Vi[:, k] = (Vi[:, k] - f * Vi[:, j]) % l
        row_free[i] = False
        col_free[j] = False
        pivots.append((int(i), int(j)))
    return D, U, Ui, V, Vi, pivots


def snf(f: HomogeneousMap) -> SNF:
    """Graded Smith normal form of a map between free modules."""
    if not (f.source.is_free and f.target.is_free):
        raise UnsupportedInput("snf needs free source and target; use kernel/cokernel for torsion modules")
    D, U, Ui, V, Vi, pivots = _snf_arrays(f.coeffs, f.exponents, f.ring.l)
    S, T = f.source, f.target
    return SNF(
        D=HomogeneousMap(S, T, f.degree, D),
        U=HomogeneousMap(T, T, ZERO, U),
        V=HomogeneousMap(S, S, ZERO, V),
        U_inv=HomogeneousMap(T, T, ZERO, Ui),
        V_inv=HomogeneousMap(S, S, ZERO, Vi),
        pivots=tuple(pivots),
    )


# ----------------------------------------------------------------------------
# presentations, kernels, cokernels


def free_cover(M: GradedModule) -> GradedModule:
    return GradedModule(M.ring, tuple(Generator(g.deg) for g in M.gens), M.tau_inverted)


def relations(M: GradedModule) -> HomogeneousMap:
    """The relation map F1 -> F0 presenting ``M`` (one column per torsion summand)."""
    F0 = free_cover(M)
    tors = [i for i, g in enumerate(M.gens) if g.torsion is not None]
    F1 = GradedModule(
        M.ring, tuple(Generator(M.gens[i].deg + TAU_DEGREE * M.gens[i].torsion) for i in tors), M.tau_inverted
    )
    R = np.zeros((M.rank, len(tors)), dtype=np.int64)
    for k, i in enumerate(tors):
        R[i, k] = 1
    return HomogeneousMap(F1, F0, ZERO, R)


def _cover_map(f: HomogeneousMap) -> HomogeneousMap:
    return HomogeneousMap(free_cover(f.source), free_cover(f.target), f.degree, f.coeffs)


def _with_relations(f: HomogeneousMap) -> HomogeneousMap:
    """[f | R_target] as one map of degree ``deg f`` between free modules."""
    R = relations(f.target)
    src = free_cover(f.source).direct_sum(R.source.shift(-f.degree))
    return HomogeneousMap(src, free_cover(f.target), f.degree, np.hstack([f.coeffs, R.coeffs]))


def _solve_free(G: HomogeneousMap, B: HomogeneousMap) -> HomogeneousMap | None:
    """``Z`` with ``G o Z == B`` for free ``G``, ``B`` with common target, or None."""
    s = snf(G)
    Y = s.U_inv @ B
    l = G.ring.l
    W = np.zeros((G.source.rank, B.source.rank), dtype=np.int64)
    pivot_rows = {i for i, _ in s.pivots}
    for i in range(G.target.rank):
        if i not in pivot_rows and Y.coeffs[i].any():
            return None
    for i, j in s.pivots:
        W[j] = Y.coeffs[i]
    try:
        Wm = HomogeneousMap(B.source, G.source, B.degree - G.degree, W % l)
    except MalformedInput:
        return None
    Z = s.V_inv @ Wm
    if not np.array_equal((G @ Z).coeffs, B.coeffs):
        return None
    return Z


def lift(g: HomogeneousMap, f: HomogeneousMap) -> HomogeneousMap:
    """``h`` with ``g o h == f``; raises if ``f`` does not factor through ``g``."""
    if g.target != f.target:
        raise MalformedInput("lift: maps have different targets")
    G = _with_relations(g)
    Z = _solve_free(G, _cover_map(f))
    if Z is None:
        raise UnsupportedInput("map does not factor through the given map")
    return HomogeneousMap(f.source, g.source, f.degree - g.degree, Z.coeffs[: g.source.rank])


def _sorted_module(ring, gens: list[Generator], tau_inverted: bool) -> tuple[GradedModule, list[int]]:
    M = GradedModule(ring, tuple(gens), tau_inverted)
    order = M.sort_order()
    return GradedModule(ring, tuple(gens[k] for k in order), tau_inverted), order


def _cokernel_data(f: HomogeneousMap):
    G = _with_relations(f)
    s = snf(G)
    A = G.exponents
    pivot_of_row = {i: int(A[i, j]) for i, j in s.pivots}
    gens, rows = [], []
    for i, t in enumerate(f.target.gens):
        if i in pivot_of_row:
            a = 0 if f.target.tau_inverted else pivot_of_row[i]
            if a == 0:
                continue
            gens.append(Generator(t.deg, a))
        else:
            gens.append(Generator(t.deg))
        rows.append(i)
    C, order = _sorted_module(f.ring, gens, f.target.tau_inverted)
    rows = [rows[k] for k in order]
    proj = HomogeneousMap(f.target, C, ZERO, s.U_inv.coeffs[rows])
    # column k: a lift to the free cover of the target of generator k of C
    return C, proj, s.U.coeffs[:, rows]


def cokernel(f: HomogeneousMap) -> tuple[GradedModule, HomogeneousMap]:
    """Normal form of ``coker f`` and the projection ``target -> coker``."""
    C, proj, _ = _cokernel_data(f)
    return C, proj


def _free_kernel(G: HomogeneousMap) -> HomogeneousMap:
    """Inclusion of ``ker G`` (free) into the free source of ``G``."""
    s = snf(G)
    pivot_cols = {j for _, j in s.pivots}
    cols = [j for j in range(G.source.rank) if j not in pivot_cols]
    K = GradedModule(G.ring, tuple(G.source.gens[j] for j in cols), G.source.tau_inverted)
    return HomogeneousMap(K, G.source, ZERO, s.V_inv.coeffs[:, cols])


def _free_image(pi: HomogeneousMap) -> HomogeneousMap:
    """Injective map from a free module onto ``im pi`` (free source and target)."""
    s = snf(pi)
    gens, cols = [], []
    for i, j in s.pivots:
        gens.append(Generator(pi.source.gens[j].deg + pi.degree))
        cols.append(i)
    B = GradedModule(pi.ring, tuple(gens), pi.source.tau_inverted)
    # basis element k is U e_i times the pivot monomial
    return HomogeneousMap(B, pi.target, ZERO, s.U.coeffs[:, cols])


def kernel(f: HomogeneousMap) -> tuple[GradedModule, HomogeneousMap]:
    """Normal form of ``ker f`` and its inclusion into ``f.source``."""
    M = f.source
    if M.is_zero:
        return M, identity(M)
    G = _with_relations(f)
    K = _free_kernel(G)
    pi = HomogeneousMap(K.source, free_cover(M), ZERO, K.coeffs[: M.rank])
    B = _free_image(pi)
    R = relations(M)
    X = _solve_free(B, R)
    if X is None:  # pragma: no cover - guarded by well-definedness of f
        raise MalformedInput("relations of the source do not lie in the kernel")
    Q, _, cols = _cokernel_data(X)
    incl = HomogeneousMap(Q, M, ZERO, linalg.matmul(B.coeffs, cols, f.ring.l))
    return Q, incl


def image(f: HomogeneousMap) -> tuple[GradedModule, HomogeneousMap]:
    """``im f`` with its inclusion into the target."""
    K, incl = kernel(cokernel(f)[1])
    return K, incl


def homology(f: HomogeneousMap, g: HomogeneousMap) -> GradedModule:
    """``ker g / im f`` for composable ``f``, ``g`` with ``g o f = 0``."""
    if not (g @ f).is_zero():
        raise MalformedInput("homology of maps whose composite is nonzero")
    K, incl = kernel(g)
    h = lift(incl, f)
    return cokernel(h)[0]


def is_isomorphism(f: HomogeneousMap) -> bool:
    return kernel(f)[0].is_zero and cokernel(f)[0].is_zero


def inverse(f: HomogeneousMap) -> HomogeneousMap:
    if not is_isomorphism(f):
        raise NotIsomorphism("map is not an isomorphism")
    return lift(f, identity(f.target))


# ----------------------------------------------------------------------------
# tensor, duals, localization, idempotents


def tensor(M: GradedModule, N: GradedModule) -> GradedModule:
    """Degreewise tensor product over the common ring, in normal form.

    When both factors carry torsion the derived tensor has a Tor term that
    is not included; a ``TorWarning`` is emitted in that case.
    """
    _check_same_ring(M, N)
    if not M.is_free and not N.is_free:
        warnings.warn("tensor of two torsion modules: Tor terms are not included", TorWarning, stacklevel=2)
    gens = []
    for g in M.gens:
        for h in N.gens:
            ts = [t for t in (g.torsion, h.torsion) if t is not None]
            gens.append(Generator(g.deg + h.deg, min(ts) if ts else None))
    return _sorted_module(M.ring, gens, M.tau_inverted)[0]


def dualize_free(M: GradedModule) -> GradedModule:
    if not M.is_free:
        raise UnsupportedInput("dual of a module with torsion is not computed by a collapsing spectral sequence")
    return _sorted_module(M.ring, [Generator(-g.deg) for g in M.gens], M.tau_inverted)[0]


def invert_tau(M: GradedModule) -> GradedModule:
    if not M.ring.has_tau:
        raise UnsupportedInput("no tau in %s" % M.ring)
    return GradedModule(M.ring, tuple(g for g in M.gens if g.is_free), True)


def invert_tau_map(f: HomogeneousMap) -> HomogeneousMap:
    rows = [i for i, g in enumerate(f.target.gens) if g.is_free]
    cols = [j for j, g in enumerate(f.source.gens) if g.is_free]
    return HomogeneousMap(invert_tau(f.source), invert_tau(f.target), f.degree, f.coeffs[np.ix_(rows, cols)])


@dataclass(frozen=True, eq=False)
class Splitting:
    module: GradedModule
    section: HomogeneousMap  # module -> M
    retraction: HomogeneousMap  # M -> module


def image_of_idempotent(e: HomogeneousMap) -> Splitting:
    M = e.source
    if e.target != M or e.degree != ZERO and not e.is_zero():
        raise MalformedInput("idempotent must be a degree-(0,0) endomorphism")
    if not (e @ e) == e:
        raise NotIdempotent("e o e != e")
    one_minus = identity(M) - e
    K, incl = kernel(one_minus)
    C, proj = cokernel(one_minus)
    phi = proj @ incl
    retraction = lift(phi, proj)
    return Splitting(K, incl, retraction)


def module_isomorphic_to_sum(M: GradedModule, *parts: GradedModule) -> bool:
    total = GradedModule(M.ring, (), M.tau_inverted)
    for p in parts:
        total = total.direct_sum(p)
    return M.isomorphic(total)
