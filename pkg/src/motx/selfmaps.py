"""Self-map analysis: per-height verdicts and the power relation f^i = v_n^j."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import grading as g
from . import linalg
from .errors import MalformedInput, NotIsomorphism, RingMismatch, UnsupportedInput
from .grading import Generator, GradedModule, HomogeneousMap


def default_cap(l: int) -> int:
    return 2 * l**3


@dataclass(frozen=True, eq=False)
class Verdict:
    kind: str  # nilpotent | isomorphism | unit-multiple | fails-isomorphism | undetermined
    exponent: int | None = None
    i: int | None = None
    j: int | None = None
    cokernel: GradedModule | None = None
    kernel: GradedModule | None = None
    approximate: bool = False
    note: str = ""

    @property
    def is_isomorphism(self) -> bool:
        return self.kind in ("isomorphism", "unit-multiple")

    def to_dict(self) -> dict:
        d = {"verdict": self.kind}
        if self.exponent is not None:
            d["exponent"] = self.exponent
        if self.i is not None:
            d["i"], d["j"] = self.i, self.j
        if self.cokernel is not None:
            d["cokernel"] = str(self.cokernel)
        if self.kernel is not None:
            d["kernel"] = str(self.kernel)
        if self.approximate:
            d["approximate"] = True
        if self.note:
            d["note"] = self.note
        return d


@dataclass(frozen=True, eq=False)
class SelfMapReport:
    n: int
    degree: g.Bidegree | None
    verdicts: dict  # height -> Verdict
    degree_ok: bool = True

    @property
    def satisfies_definition(self) -> bool:
        """Isomorphism at height n, nilpotent at every other supplied height."""
        for m, v in self.verdicts.items():
            if v.kind == "undetermined":
                return False
            if m == self.n and not v.is_isomorphism:
                return False
            if m != self.n and v.kind != "nilpotent":
                return False
        return self.degree_ok

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "degree": None if self.degree is None else list(self.degree),
            "degree_multiple_of_vn": self.degree_ok,
            "heights": {str(m): v.to_dict() for m, v in sorted(self.verdicts.items())},
            "satisfies_definition": self.satisfies_definition,
        }


def nilpotency_exponent(f: HomogeneousMap, cap: int) -> int | None:
    p = f
    for k in range(1, cap + 1):
        if p.is_zero():
            return k
        p = p @ f
    return None


def _height_zero(f: HomogeneousMap, cap: int) -> Verdict:
    # tau set to 1 on the free part; a finite stand-in for the rational check
    rows = [i for i, x in enumerate(f.target.gens) if x.is_free]
    cols = [j for j, x in enumerate(f.source.gens) if x.is_free]
    C = f.coeffs[np.ix_(rows, cols)]
    l = f.ring.l
    if C.shape[0] == C.shape[1] and linalg.rank(C, l) == C.shape[0] and C.shape[0] > 0:
        return Verdict("isomorphism", approximate=True, note="rational check stand-in")
    P = np.eye(C.shape[0], dtype=np.int64) if C.shape[0] == C.shape[1] else None
    if P is not None:
        for k in range(1, cap + 1):
            P = linalg.matmul(P, C, l)
            if not P.any():
                return Verdict("nilpotent", exponent=k, approximate=True, note="rational check stand-in")
    return Verdict("undetermined", approximate=True, note="rational check stand-in")


def classify_at_height(f: HomogeneousMap, m: int, n: int, cap: int) -> Verdict:
    if f.source != f.target:
        raise MalformedInput("a self map must be an endomorphism")
    if m == 0:
        return _height_zero(f, cap)
    if f.ring.kind != g.FL_TAU_VN or f.ring.n != m:
        raise RingMismatch("height %d map given over %s" % (m, f.ring))
    if f.source.is_zero:
        return Verdict("nilpotent", exponent=1, note="zero module")
    if g.is_isomorphism(f):
        if m == n:
            rel = power_relation(f, cap=cap)
            if rel.i is not None:
                return Verdict("unit-multiple", i=rel.i, j=rel.j)
        return Verdict("isomorphism")
    e = nilpotency_exponent(f, cap)
    if e is not None:
        return Verdict("nilpotent", exponent=e)
    return Verdict("fails-isomorphism", cokernel=g.cokernel(f)[0], kernel=g.kernel(f)[0])


def classify_self_map(fs: dict, n: int, heights=None, cap: int | None = None) -> SelfMapReport:
    """Verdicts for the maps ``fs[m]`` induced in AK(m)-homology."""
    heights = list(range(0, n + 3)) if heights is None else list(heights)
    verdicts = {}
    degree = None
    for m in heights:
        f = fs.get(m)
        if f is None:
            verdicts[m] = Verdict("undetermined", note="no map supplied")
            continue
        verdicts[m] = classify_at_height(f, m, n, cap or default_cap(f.ring.l))
        if m == n:
            degree = f.degree
    ok = True
    if degree is not None:
        ok = _vn_ratio(fs[n].ring, degree) is not None
    return SelfMapReport(n, degree, verdicts, ok)


# ----------------------------------------------------------------------------
# power relation


@dataclass(frozen=True, eq=False)
class PowerRelation:
    i: int | None
    j: int | None
    steps: tuple = ()
    residual: HomogeneousMap | None = None


def _vn_ratio(ring: g.CoefficientRing, d: g.Bidegree) -> Fraction | None:
    """c with d = c |v_n|, or None."""
    v = ring.vn_degree
    c = Fraction(d.p, v.p)
    return c if c * v.q == d.q else None


def _reduce_mod_tau(f: HomogeneousMap) -> HomogeneousMap:
    M = f.source
    Mb = GradedModule(M.ring, tuple(Generator(x.deg, 1) for x in M.gens))
    C = np.where(f.exponents == 0, f.coeffs, 0)
    return HomogeneousMap(Mb, Mb, f.degree, C)


def _is_vn_power(h: HomogeneousMap, j: int) -> bool:
    return h == g.multiplication(h.source, 0, j)


def _order(f: HomogeneousMap, c: Fraction, bound: int) -> int | None:
    """Smallest i with f^i = v_n^{ic}."""
    p = g.identity(f.source)
    for i in range(1, bound + 1):
        p = p @ f
        if (i * c).denominator == 1 and _is_vn_power(p, int(i * c)):
            return i
    return None


def _l_power_kill(y: HomogeneousMap, l: int, kmax: int) -> int | None:
    p = y
    for k in range(0, kmax + 1):
        if p.is_zero():
            return k
        p = p.power(l)
    return None


def power_relation(f: HomogeneousMap, cap: int | None = None) -> PowerRelation:
    """Find (i, j) with f^i = v_n^j for an automorphism of an AK(n)-module.

    Reduce mod tau and find the order of f-bar in the finite unit group;
    the residual f^i - v_n^j is then tau-divisible. If it is nilpotent, the
    identity (v^j + y)^{l^k} = v^{j l^k} + y^{l^k} finishes; otherwise the
    realized matrix's order is used first. The exponent is then reduced to
    the smallest valid one (valid exponents form a subgroup of Z).
    """
    ring = f.ring
    if ring.kind != g.FL_TAU_VN:
        raise UnsupportedInput("power relation needs AK(n) coefficients")
    if f.source != f.target:
        raise MalformedInput("power relation needs an endomorphism")
    if not g.is_isomorphism(f):
        raise NotIsomorphism("power relation needs an isomorphism")
    c = _vn_ratio(ring, f.degree)
    if c is None:
        raise UnsupportedInput("degree %r is not a rational multiple of |v_n|" % (f.degree,))
    l = ring.l
    r = f.source.rank
    group_bound = l ** (r * r) if r else 1
    steps = []
    fb = _reduce_mod_tau(f)
    i = _order(fb, c, group_bound)
    if i is None:  # pragma: no cover - finite group
        raise UnsupportedInput("order search did not terminate")
    steps.append(("mod-tau order", i))
    max_tors = max([x.torsion or 0 for x in f.source.gens] + [1])
    kmax = max_tors.bit_length() + 2
    y = f.power(i) - g.multiplication(f.source, 0, int(i * c))
    k = _l_power_kill(y, l, kmax)
    if k is None:
        from .homology import realize_map

        F = realize_map(f.power(i))
        ci = c * i
        i2 = _realized_order(F, ci, l, group_bound)
        if i2 is None:
            return PowerRelation(None, None, tuple(steps), y)
        i *= i2
        steps.append(("realized order", i2))
        y = f.power(i) - g.multiplication(f.source, 0, int(i * c))
        k = _l_power_kill(y, l, kmax)
        if k is None:
            return PowerRelation(None, None, tuple(steps), y)
    i *= l**k
    steps.append(("l-power", k))
    for d in sorted(x for x in range(1, i + 1) if i % x == 0):
        if (d * c).denominator == 1 and _is_vn_power(f.power(d), int(d * c)):
            i = d
            break
    steps.append(("minimal", i))
    return PowerRelation(i, int(i * c), tuple(steps))


def _realized_order(F, c: Fraction, l: int, bound: int) -> int | None:
    """Smallest i with the realized matrix satisfying F^i = v^{ic} (identity coefficients)."""
    n = F.coeffs.shape[0]
    I = np.eye(n, dtype=np.int64)
    P = I.copy()
    for i in range(1, bound + 1):
        P = linalg.matmul(P, F.coeffs, l)
        if (i * c).denominator == 1 and np.array_equal(P, I):
            return i
    return None


def brute_force_power(f: HomogeneousMap, cap: int) -> tuple[int, int] | None:
    """Smallest i <= cap with f^i = v_n^j, by direct powers."""
    c = _vn_ratio(f.ring, f.degree)
    if c is None:
        return None
    p = g.identity(f.source)
    for i in range(1, cap + 1):
        p = p @ f
        if (i * c).denominator == 1 and _is_vn_power(p, int(i * c)):
            return i, int(i * c)
    return None


def verify_extended_uniqueness(h: HomogeneousMap, f: HomogeneousMap, gmap: HomogeneousMap, i: int, m: int) -> bool:
    """Exact check of h o f^i == g^{l^m} o h for supplied exponents."""
    l = f.ring.l
    return (h @ f.power(i)) == (gmap.power(l**m) @ h)
