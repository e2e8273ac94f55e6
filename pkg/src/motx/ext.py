"""Trigraded Ext over Lambda(Q_n) and Cotor over quotients of A_**.

Results are stored per homological degree ``s`` as an F_l[tau]-module whose
generators sit at bidegree ``(t, u)``: ``t`` is the internal topological
degree (standard Adams grading, stem = t - s) and ``u`` the weight.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import grading as g
from .errors import MalformedInput, UnsupportedInput
from .grading import Bidegree, GradedModule, HomogeneousMap
from .steenrod import ONE, Monomial, QuotientHopfAlgebra, lambda_qn_dual, monomial_sort_key


@dataclass(frozen=True)
class Window:
    s_max: int
    t_max: int
    u_max: int | None = None

    @property
    def weight_bound(self) -> int:
        return self.t_max if self.u_max is None else self.u_max

    @property
    def is_empty(self) -> bool:
        return self.s_max < 0 or self.t_max < 0

    def contains(self, s: int, t: int, u: int | None = None) -> bool:
        if not (0 <= s <= self.s_max and 0 <= t <= self.t_max):
            return False
        return u is None or abs(u) <= self.weight_bound

    def on_edge(self, s: int, t: int, u: int | None = None) -> bool:
        edge = s == self.s_max or t == self.t_max
        if u is not None:
            edge = edge or abs(u) == self.weight_bound
        return edge

    @classmethod
    def parse(cls, text: str) -> "Window":
        """``"s4,t20"`` or ``"s4,t20,u10"``."""
        vals = {}
        for part in text.split(","):
            m = re.fullmatch(r"\s*([stu])\s*(-?\d+)\s*", part)
            if not m:
                raise MalformedInput("bad window component %r" % part)
            vals[m.group(1)] = int(m.group(2))
        if "s" not in vals or "t" not in vals:
            raise MalformedInput("window needs s and t bounds")
        return cls(vals["s"], vals["t"], vals.get("u"))

    def to_dict(self) -> dict:
        return {"s_max": self.s_max, "t_max": self.t_max, "u_max": self.weight_bound}

    def __str__(self) -> str:
        return "s%d,t%d,u%d" % (self.s_max, self.t_max, self.weight_bound)


@dataclass(frozen=True)
class VanishingLine:
    """Ext vanishes where s > m(t - s) + b."""

    m: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "m", Fraction(self.m))
        object.__setattr__(self, "b", Fraction(self.b))

    def above(self, s: int, t: int) -> bool:
        return s > self.m * (t - s) + self.b


# ----------------------------------------------------------------------------
# modules and comodules


@dataclass(frozen=True, eq=False)
class LambdaModule:
    """A free F_l[tau]-module with a square-zero Q_n action of degree -|tau_n|."""

    module: GradedModule
    n: int
    action: HomogeneousMap | None = None

    def __post_init__(self):
        M = self.module
        if M.ring.kind != g.FL_TAU:
            raise UnsupportedInput("Lambda(Q_n)-modules live over F_l[tau]")
        if not M.is_free:
            raise UnsupportedInput("Lambda(Q_n)-module must be free over F_l[tau]")
        if self.action is not None:
            Q = self.action
            if Q.source != M or Q.target != M:
                raise MalformedInput("Q_n action must be an endomorphism of the module")
            if not Q.is_zero() and Q.degree != self.action_degree:
                raise MalformedInput("Q_n action has degree %r" % (Q.degree,))
            if not (Q @ Q).is_zero():
                raise MalformedInput("Q_n action does not square to zero")

    @property
    def l(self) -> int:
        return self.module.ring.l

    @property
    def action_degree(self) -> Bidegree:
        return -tau_degree(self.l, self.n)

    @property
    def is_trivial(self) -> bool:
        return self.action is None or self.action.is_zero()

    def q_map(self) -> HomogeneousMap:
        if self.action is None:
            return g.zero_map(self.module, self.module, self.action_degree)
        return self.action


def tau_degree(l: int, n: int) -> Bidegree:
    return Bidegree(2 * l**n - 1, l**n - 1)


def vn_tridegree(l: int, n: int) -> tuple[int, int, int]:
    """(s, t, u) of v_n with internal degree t; its stem is 2l^n - 2."""
    return (1, 2 * l**n - 1, l**n - 1)


@dataclass(frozen=True, eq=False)
class Comodule:
    """Left comodule over a quotient Hopf algebra, free over F_l[tau].

    ``coaction[j]`` lists the reduced terms ``(gamma, i, c)`` of psi(e_j),
    i.e. psi(e_j) = 1 (x) e_j + sum c * tau^a * gamma (x) e_i with ``a``
    forced by degrees.
    """

    algebra: QuotientHopfAlgebra
    module: GradedModule
    coaction: tuple[tuple[tuple[Monomial, int, int], ...], ...] = ()

    def __post_init__(self):
        M = self.module
        if M.ring.kind != g.FL_TAU or not M.is_free:
            raise UnsupportedInput("comodules must be free over F_l[tau]")
        co = tuple(tuple(terms) for terms in self.coaction) or tuple(() for _ in M.gens)
        if len(co) != M.rank:
            raise MalformedInput("coaction needs one entry per generator")
        l = M.ring.l
        for j, terms in enumerate(co):
            for gam, i, c in terms:
                if gam.is_unit:
                    raise MalformedInput("reduced coaction contains a unit term")
                if not self.algebra.keeps(gam):
                    raise MalformedInput("%s is zero in %s" % (gam, self.algebra.name))
                d = M.gens[j].deg - gam.degree(l) - M.gens[i].deg
                if d.p != 0 or d.q > 0:
                    raise MalformedInput("coaction term %s (x) e_%d is not homogeneous" % (gam, i))
        object.__setattr__(self, "coaction", co)

    @property
    def l(self) -> int:
        return self.module.ring.l

    @classmethod
    def trivial(cls, algebra: QuotientHopfAlgebra, M: GradedModule) -> "Comodule":
        return cls(algebra, M, tuple(() for _ in M.gens))

    @classmethod
    def from_lambda(cls, L: LambdaModule) -> "Comodule":
        alg = lambda_qn_dual(L.l, L.n)
        Q = L.q_map()
        tn = Monomial(tuple([0] * L.n + [1]))
        co = []
        for j in range(L.module.rank):
            co.append(tuple((tn, i, int(Q.coeffs[i, j])) for i in range(L.module.rank) if Q.coeffs[i, j]))
        return cls(alg, L.module, tuple(co))

    def psi(self, j: int) -> dict:
        """Full coaction of generator j as {(gamma, i): c}."""
        out = {(ONE, j): 1}
        for gam, i, c in self.coaction[j]:
            out[(gam, i)] = (out.get((gam, i), 0) + c) % self.l
        return {k: v for k, v in out.items() if v}

    def is_coassociative(self) -> bool:
        l = self.l
        for j in range(self.module.rank):
            lhs: dict = {}
            for (gam, i), c in self.psi(j).items():
                for (a, b), c2 in self.algebra.coproduct(gam).items():
                    key = (a, b, i)
                    lhs[key] = lhs.get(key, 0) + c * c2
            rhs: dict = {}
            for (gam, i), c in self.psi(j).items():
                for (gam2, k), c2 in self.psi(i).items():
                    key = (gam, gam2, k)
                    rhs[key] = rhs.get(key, 0) + c * c2
            lhs = {k: v % l for k, v in lhs.items() if v % l}
            rhs = {k: v % l for k, v in rhs.items() if v % l}
            if lhs != rhs:
                return False
        return True


# ----------------------------------------------------------------------------
# results


@dataclass(frozen=True, eq=False)
class ExtResult:
    l: int
    window: Window
    modules: dict  # s -> GradedModule over F_l[tau], generators at (t, u)
    algebra: str = ""
    n: int | None = None
    method: str = ""

    def module(self, s: int) -> GradedModule:
        return self.modules.get(s, GradedModule.zero(g.FlTau(self.l)))

    def rank(self, s: int, t: int, u: int) -> int:
        if not self.window.contains(s, t):
            return 0
        return g.slice_dimension(self.module(s), (t, u))

    def rank_at_stem(self, s: int, stem: int, u: int) -> int:
        return self.rank(s, stem + s, u)

    def torsion_profile(self, s: int, t: int, u: int) -> list:
        M = self.module(s)
        return [M.gens[i].torsion for i in M.slice_basis(Bidegree(t, u))]

    def nonzero(self) -> list[tuple[int, int, int]]:
        """Nonzero tridegrees in the window, weights limited to |u| <= u_max."""
        out = set()
        U = self.window.weight_bound
        for s in range(self.window.s_max + 1):
            M = self.module(s)
            for gen in M.gens:
                t, u0 = gen.deg
                if not self.window.contains(s, t):
                    continue
                stop = -U - 1 if gen.torsion is None else u0 - gen.torsion
                for u in range(min(u0, U), max(stop, -U - 1), -1):
                    out.add((s, t, u))
        return sorted(out)

    def is_tau_free(self) -> bool:
        return all(M.is_free for M in self.modules.values())

    def violations(self, line: VanishingLine) -> list[tuple[int, int, int]]:
        return [x for x in self.nonzero() if line.above(x[0], x[1])]

    def to_tsv(self) -> str:
        lines = ["s\tt\tu\trank\ttorsion\tedge"]
        for s, t, u in self.nonzero():
            prof = ",".join("inf" if k is None else str(k) for k in sorted(self.torsion_profile(s, t, u), key=_tkey))
            edge = int(self.window.on_edge(s, t, u))
            lines.append("%d\t%d\t%d\t%d\t%s\t%d" % (s, t, u, self.rank(s, t, u), prof, edge))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        gens = {}
        for s in range(self.window.s_max + 1):
            M = self.module(s).normal_form()
            gens[str(s)] = [[d.p, d.q, k] for (d, k) in M.gens if self.window.contains(s, d.p)]
        return {
            "prime": self.l,
            "n": self.n,
            "window": self.window.to_dict(),
            "generators": gens,
            "entries": [
                {"s": s, "t": t, "u": u, "rank": self.rank(s, t, u), "edge": self.window.on_edge(s, t, u)}
                for s, t, u in self.nonzero()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, d: dict, algebra: str = "", method: str = "") -> "ExtResult":
        w = d["window"]
        window = Window(w["s_max"], w["t_max"], w["u_max"])
        R = g.FlTau(d["prime"])
        mods = {}
        for s, gens in d["generators"].items():
            mods[int(s)] = GradedModule(R, tuple(g.Generator(Bidegree(t, u), k) for t, u, k in gens))
        return cls(d["prime"], window, mods, algebra, d.get("n"), method)


def _tkey(k):
    return float("inf") if k is None else k


def _truncate(M: GradedModule, t_max: int) -> GradedModule:
    return GradedModule(M.ring, tuple(x for x in M.gens if x.deg.p <= t_max), M.tau_inverted)


# ----------------------------------------------------------------------------
# Lambda(Q_n): periodic resolution


def ext_over_lambda_qn(L: LambdaModule, window: Window) -> ExtResult:
    """Ext over Lambda(Q_n) from the periodic resolution.

    Trivial action: M tensor F_l[tau][v_n], v_n at (1, 2l^n - 1, l^n - 1).
    Otherwise Ext^0 = ker Q_n and Ext^s = H(M; Q_n) shifted by s|tau_n|.
    """
    l, n = L.l, L.n
    step = tau_degree(l, n)
    mods: dict = {}
    if window.is_empty:
        return ExtResult(l, window, mods, "Lambda(Q_%d)" % n, n, "periodic")
    if L.is_trivial:
        base = L.module
        ext0 = base
        higher = base
    else:
        Q = L.q_map()
        ext0 = g.kernel(Q)[0]
        higher = g.homology(Q, Q)
    for s in range(window.s_max + 1):
        M = ext0 if s == 0 else higher.shift(step * s)
        mods[s] = _truncate(M, window.t_max).normal_form()
    return ExtResult(l, window, mods, "Lambda(Q_%d)" % n, n, "periodic")


def lambda_vanishing_line(L: LambdaModule) -> VanishingLine:
    """Slope 1/(2l^n - 2) line through the lowest generator."""
    m = Fraction(1, 2 * L.l**L.n - 2)
    p_min = min((x.deg.p for x in L.module.gens), default=0)
    return VanishingLine(m, -m * p_min)


# ----------------------------------------------------------------------------
# cobar complex


@dataclass(frozen=True, eq=False)
class CobarComplex:
    comodule: Comodule
    window: Window
    bases: list  # s -> list of (gammas tuple, i)
    modules: list  # s -> GradedModule
    differentials: list  # s -> HomogeneousMap C^s -> C^{s+1}


def _cobar_basis(C: Comodule, s: int, t_max: int, aug: list[Monomial]) -> list:
    l = C.l
    out = []
    for gams in itertools.product(aug, repeat=s):
        p = sum(x.degree(l).p for x in gams)
        if p > t_max:
            continue
        for i, gen in enumerate(C.module.gens):
            if p + gen.deg.p <= t_max:
                out.append((gams, i))
    return out


def _element_degree(C: Comodule, elem) -> Bidegree:
    gams, i = elem
    d = C.module.gens[i].deg
    for x in gams:
        d = d + x.degree(C.l)
    return d


def cobar_complex(C: Comodule, window: Window) -> CobarComplex:
    """Reduced cobar complex C^s = (aug ideal)^{(x)s} (x) M for s <= s_max + 1."""
    l = C.l
    R = C.module.ring
    aug = C.algebra.augmentation_basis(max(window.t_max, 0))
    bases, mods, diffs = [], [], []
    top = window.s_max + 1 if not window.is_empty else -1
    for s in range(top + 1):
        basis = _cobar_basis(C, s, window.t_max, aug)
        bases.append(basis)
        mods.append(GradedModule.free(R, [_element_degree(C, e) for e in basis]))
    red = {m: C.algebra.reduced_coproduct(m) for m in aug}
    for s in range(top):
        src, tgt = bases[s], bases[s + 1]
        index = {e: k for k, e in enumerate(tgt)}
        D = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for col, (gams, i) in enumerate(src):
            for k in range(s):
                sign = (-1) ** (k + 1)
                for (a, b), c in red[gams[k]].items():
                    key = (gams[:k] + (a, b) + gams[k + 1 :], i)
                    D[index[key], col] += sign * c
            sign = (-1) ** (s + 1)
            for gam, j, c in C.coaction[i]:
                key = (gams + (gam,), j)
                D[index[key], col] += sign * c
        diffs.append(HomogeneousMap(mods[s], mods[s + 1], g.ZERO, D % l))
    for s in range(len(diffs) - 1):
        if not (diffs[s + 1] @ diffs[s]).is_zero():
            raise AssertionError("cobar differential does not square to zero at s=%d" % s)
    return CobarComplex(C, window, bases, mods, diffs)


def cotor(C: Comodule, window: Window, n: int | None = None) -> ExtResult:
    """Cotor_Gamma(F_l[tau], M) by homology of the reduced cobar complex."""
    K = cobar_complex(C, window)
    mods = {}
    R = C.module.ring
    for s in range(window.s_max + 1 if not window.is_empty else 0):
        d_out = K.differentials[s]
        if s == 0:
            d_in = g.zero_map(GradedModule.zero(R), K.modules[0])
        else:
            d_in = K.differentials[s - 1]
        mods[s] = g.homology(d_in, d_out).normal_form()
    return ExtResult(C.l, window, mods, C.algebra.name, n, "cobar")


def primitives(C: Comodule) -> GradedModule:
    """Kernel of psi - 1 (x) -, computed directly from the coaction."""
    l = C.l
    terms = sorted({(gam, i) for j in range(C.module.rank) for gam, i, _ in C.coaction[j]},
                   key=lambda x: (monomial_sort_key(x[0], l), x[1]))
    index = {x: k for k, x in enumerate(terms)}
    degs = [C.module.gens[i].deg + gam.degree(l) for gam, i in terms]
    T = GradedModule.free(C.module.ring, degs)
    D = np.zeros((len(terms), C.module.rank), dtype=np.int64)
    for j in range(C.module.rank):
        for gam, i, c in C.coaction[j]:
            D[index[(gam, i)], j] += c
    return g.kernel(HomogeneousMap(C.module, T, g.ZERO, D % l))[0]


# ----------------------------------------------------------------------------
# approximation by A_N


@dataclass(frozen=True)
class ApproximationRegion:
    """Ext over A agrees with Ext over A_N where s > m(t - s) + b_prime."""

    m: Fraction
    b_prime: Fraction
    connectivity: int
    N: int

    def certifies(self, s: int, t: int) -> bool:
        return s > self.m * (t - s) + self.b_prime

    def certifies_window(self, window: Window) -> bool:
        corners = [(s, t) for s in (0, window.s_max) for t in (0, window.t_max)]
        return all(self.certifies(s, t) for s, t in corners)

    def line(self) -> VanishingLine:
        return VanishingLine(self.m, self.b_prime)


def approximation_window(l: int, m, b, N: int) -> ApproximationRegion:
    """Certified region for restricting Ext from A to A_N.

    With A//A_N (k-1)-connected, k = connectivity_of_quotient(l, N), the
    kernel module C has a line of the same slope m and intercept b - m*k.
    The restriction is an isomorphism where Ext_A(C) vanishes in
    homological degrees s - 1 and s, i.e. above b' = b - m*k + m + 1.
    """
    from .steenrod import connectivity_of_quotient

    if N < 1:
        raise MalformedInput("N must be >= 1")
    m = Fraction(m)
    b = Fraction(b)
    k = connectivity_of_quotient(l, N)
    return ApproximationRegion(m, b - m * k + m + 1, k, N)
