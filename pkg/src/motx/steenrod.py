"""The dual motivic Steenrod algebra at an odd prime over C.

A_** = F_l[tau][tau_0, tau_1, ..., xi_1, xi_2, ...] / (tau_i^2), with
|tau_i| = (2l^i - 1, l^i - 1), |xi_i| = (2l^i - 2, l^i - 1) and

    Delta(xi_k)  = sum_{i=0}^{k} xi_{k-i}^{l^i} (x) xi_i          (xi_0 = 1)
    Delta(tau_k) = tau_k (x) 1 + sum_{i=0}^{k} xi_{k-i}^{l^i} (x) tau_i

The base ring F_l[tau] is primitive and never appears in a coproduct, so
everything below works with F_l-coefficients on the monomial basis; the
tau-module structure is reattached by the Ext engine.

The tau_i have odd topological degree and anticommute. Products of
monomials carry the resulting sign, and tensor products multiply with the
Koszul rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .errors import MalformedInput
from .grading import Bidegree


@dataclass(frozen=True, order=True)
class Monomial:
    """prod tau_i^{eps_i} * prod xi_i^{r_i}; ``xi[0]`` is the exponent of xi_1."""

    eps: tuple[int, ...] = ()
    xi: tuple[int, ...] = ()

    def __post_init__(self):
        eps = tuple(self.eps)
        xi = tuple(self.xi)
        while eps and eps[-1] == 0:
            eps = eps[:-1]
        while xi and xi[-1] == 0:
            xi = xi[:-1]
        if any(e not in (0, 1) for e in eps) or any(r < 0 for r in xi):
            raise MalformedInput("bad monomial exponents %r %r" % (eps, xi))
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "xi", xi)

    @property
    def is_unit(self) -> bool:
        return not self.eps and not self.xi

    def degree(self, l: int) -> Bidegree:
        p = q = 0
        for i, e in enumerate(self.eps):
            if e:
                p += 2 * l**i - 1
                q += l**i - 1
        for i, r in enumerate(self.xi, start=1):
            p += r * (2 * l**i - 2)
            q += r * (l**i - 1)
        return Bidegree(p, q)

    def parity(self) -> int:
        return sum(self.eps) % 2

    def __str__(self) -> str:
        parts = ["tau_%d" % i for i, e in enumerate(self.eps) if e]
        for i, r in enumerate(self.xi, start=1):
            if r == 1:
                parts.append("xi_%d" % i)
            elif r:
                parts.append("xi_%d^%d" % (i, r))
        return " ".join(parts) if parts else "1"


ONE = Monomial()


def tau_gen(i: int) -> Monomial:
    return Monomial(tuple([0] * i + [1]), ())


def xi_gen(i: int, power: int = 1) -> Monomial:
    if i == 0:
        return ONE
    return Monomial((), tuple([0] * (i - 1) + [power]))


def multiply(a: Monomial, b: Monomial) -> tuple[int, Monomial] | None:
    """Signed product ``a * b``; None when an exterior generator repeats."""
    n = max(len(a.eps), len(b.eps))
    ea = a.eps + (0,) * (n - len(a.eps))
    eb = b.eps + (0,) * (n - len(b.eps))
    if any(x and y for x, y in zip(ea, eb)):
        return None
    # moving each tau_j of b past the larger-index tau_i of a
    swaps = sum(1 for i in range(n) if ea[i] for j in range(i) if eb[j])
    m = max(len(a.xi), len(b.xi))
    xi = tuple(
        (a.xi[k] if k < len(a.xi) else 0) + (b.xi[k] if k < len(b.xi) else 0) for k in range(m)
    )
    eps = tuple(x + y for x, y in zip(ea, eb))
    return (-1) ** swaps, Monomial(eps, xi)


Element = dict  # Monomial -> coefficient mod l
Tensor = dict  # (Monomial, Monomial) -> coefficient mod l


def _clean(d: dict, l: int) -> dict:
    return {k: v % l for k, v in d.items() if v % l}


def mul_elements(x: Element, y: Element, l: int) -> Element:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            pr = multiply(a, b)
            if pr is None:
                continue
            s, m = pr
            out[m] = out.get(m, 0) + s * ca * cb
    return _clean(out, l)


def mul_tensors(x: Tensor, y: Tensor, l: int) -> Tensor:
    """(a (x) b)(c (x) d) = (-1)^{|b||c|} ac (x) bd."""
    out: dict = {}
    for (a, b), c1 in x.items():
        for (c, d), c2 in y.items():
            p1 = multiply(a, c)
            p2 = multiply(b, d)
            if p1 is None or p2 is None:
                continue
            sign = p1[0] * p2[0] * (-1) ** (b.parity() * c.parity())
            key = (p1[1], p2[1])
            out[key] = out.get(key, 0) + sign * c1 * c2
    return _clean(out, l)


@lru_cache(maxsize=None)
def _gen_coproduct(l: int, kind: str, k: int) -> tuple:
    terms: dict = {}
    if kind == "xi":
        for i in range(k + 1):
            key = (xi_gen(k - i, l**i), xi_gen(i))
            terms[key] = terms.get(key, 0) + 1
    else:
        terms[(tau_gen(k), ONE)] = 1
        for i in range(k + 1):
            key = (xi_gen(k - i, l**i), tau_gen(i))
            terms[key] = terms.get(key, 0) + 1
    return tuple(sorted(_clean(terms, l).items()))


def _factors(m: Monomial) -> list[tuple[str, int]]:
    out = [("tau", i) for i, e in enumerate(m.eps) if e]
    for i, r in enumerate(m.xi, start=1):
        out.extend([("xi", i)] * r)
    return out


@lru_cache(maxsize=None)
def _coproduct(l: int, m: Monomial) -> tuple:
    result: Tensor = {(ONE, ONE): 1}
    for kind, k in _factors(m):
        result = mul_tensors(result, dict(_gen_coproduct(l, kind, k)), l)
    return tuple(sorted(result.items()))


def coproduct(m: Monomial, l: int) -> Tensor:
    """Delta(m) as a dict over pairs of monomials (multiplicative extension)."""
    return dict(_coproduct(l, m))


def counit(m: Monomial) -> int:
    return 1 if m.is_unit else 0


def reduced_coproduct(m: Monomial, l: int) -> Tensor:
    d = coproduct(m, l)
    if not m.is_unit:
        d.pop((m, ONE), None)
        d.pop((ONE, m), None)
    return {k: v for k, v in d.items() if v}


# ----------------------------------------------------------------------------
# bases


def _generator_list(l: int, t_max: int) -> tuple[list[int], list[int]]:
    taus = [i for i in range(t_max + 1) if 2 * l**i - 1 <= t_max]
    xis = [i for i in range(1, t_max + 1) if 2 * l**i - 2 <= t_max]
    return taus, xis


def monomials_up_to(l: int, t_max: int) -> list[Monomial]:
    """All monomials with topological degree <= t_max, canonically sorted."""
    taus, xis = _generator_list(l, t_max)
    found = []
    for eps in itertools.product((0, 1), repeat=len(taus)):
        p0 = sum(2 * l**i - 1 for i, e in zip(taus, eps) if e)
        if p0 > t_max:
            continue

        def rec(k, p, acc):
            if k == len(xis):
                found.append(Monomial(eps, tuple(acc)))
                return
            step = 2 * l ** xis[k] - 2
            r = 0
            while p + r * step <= t_max:
                rec(k + 1, p + r * step, acc + [r])
                r += 1

        rec(0, p0, [])
    return sorted(found, key=lambda m: monomial_sort_key(m, l))


def monomial_sort_key(m: Monomial, l: int):
    d = m.degree(l)
    return (d.p, d.q, m.eps, m.xi)


@dataclass(frozen=True)
class MonomialBasis:
    l: int
    t_max: int
    u_min: int | None
    u_max: int | None
    elements: tuple[tuple[int, Monomial], ...]  # (tau exponent, monomial)

    def degree(self, k: int) -> Bidegree:
        a, m = self.elements[k]
        d = m.degree(self.l)
        return Bidegree(d.p, d.q - a)

    def __len__(self) -> int:
        return len(self.elements)

    def to_tsv(self) -> str:
        lines = []
        for k, (a, m) in enumerate(self.elements):
            d = self.degree(k)
            name = str(m)
            if a:
                name = ("tau^%d" % a) + ("" if m.is_unit else " " + name)
            lines.append("%s\t%d\t%d" % (name, d.p, d.q))
        return "\n".join(lines) + ("\n" if lines else "")


def basis_in_window(l: int, t_max: int, u_min: int | None = None, u_max: int | None = None) -> MonomialBasis:
    """Monomial basis of A_** with p <= t_max.

    Without a weight range this is the F_l[tau]-module basis (no tau powers).
    With ``u_min <= q <= u_max`` it is the F_l basis of that window, tau
    powers included.
    """
    if t_max < 0:
        return MonomialBasis(l, t_max, u_min, u_max, ())
    mons = monomials_up_to(l, t_max)
    if u_min is None and u_max is None:
        return MonomialBasis(l, t_max, None, None, tuple((0, m) for m in mons))
    if u_min is None or u_max is None:
        raise MalformedInput("weight window needs both bounds")
    elems = []
    for m in mons:
        q = m.degree(l).q
        for a in range(max(0, q - u_max), q - u_min + 1):
            elems.append((a, m))
    elems.sort(key=lambda am: (am[1].degree(l).p, am[1].degree(l).q - am[0], am[1].eps, am[1].xi, am[0]))
    return MonomialBasis(l, t_max, u_min, u_max, tuple(elems))


# ----------------------------------------------------------------------------
# quotient Hopf algebras


@dataclass(frozen=True)
class QuotientHopfAlgebra:
    """A_** modulo tau_i (i not in ``taus``) and xi_i^{bound} (xi_i killed when absent).

    ``xi_bounds[i] = None`` keeps xi_i polynomial. The constructors below
    only produce Hopf-ideal quotients; ``check_hopf_ideal`` verifies it.
    """

    l: int
    name: str
    taus: frozenset
    xi_bounds: tuple[tuple[int, int | None], ...] = ()

    def keeps(self, m: Monomial) -> bool:
        if any(e and i not in self.taus for i, e in enumerate(m.eps)):
            return False
        bounds = dict(self.xi_bounds)
        for i, r in enumerate(m.xi, start=1):
            if not r:
                continue
            if i not in bounds:
                return False
            b = bounds[i]
            if b is not None and r >= b:
                return False
        return True

    def project(self, x: Element) -> Element:
        return {m: c for m, c in x.items() if self.keeps(m)}

    def project_tensor(self, x: Tensor) -> Tensor:
        return {k: c for k, c in x.items() if self.keeps(k[0]) and self.keeps(k[1])}

    def coproduct(self, m: Monomial) -> Tensor:
        return self.project_tensor(coproduct(m, self.l))

    def reduced_coproduct(self, m: Monomial) -> Tensor:
        return self.project_tensor(reduced_coproduct(m, self.l))

    def basis_up_to(self, t_max: int) -> list[Monomial]:
        return [m for m in monomials_up_to(self.l, t_max) if self.keeps(m)]

    def augmentation_basis(self, t_max: int) -> list[Monomial]:
        return [m for m in self.basis_up_to(t_max) if not m.is_unit]

    def check_hopf_ideal(self, t_max: int) -> bool:
        """Killed monomials have coproducts in I (x) A + A (x) I (within t_max)."""
        for m in monomials_up_to(self.l, t_max):
            if self.keeps(m):
                continue
            if self.project_tensor(coproduct(m, self.l)):
                return False
        return True


def lambda_qn_dual(l: int, n: int) -> QuotientHopfAlgebra:
    """Dual of the exterior algebra on Q_n: F_l[tau][tau_n]/(tau_n^2)."""
    return QuotientHopfAlgebra(l, "Lambda(Q_%d)" % n, frozenset([n]))


def exterior_dual(l: int, indices: Iterable[int]) -> QuotientHopfAlgebra:
    idx = frozenset(indices)
    return QuotientHopfAlgebra(l, "E(%s)" % ",".join("Q_%d" % i for i in sorted(idx)), idx)


def full_dual(l: int, t_max: int) -> QuotientHopfAlgebra:
    """A_** itself, with every generator of degree <= t_max kept."""
    taus, xis = _generator_list(l, t_max)
    return QuotientHopfAlgebra(l, "A", frozenset(taus), tuple((i, None) for i in xis))


def a_n_dual(l: int, N: int) -> QuotientHopfAlgebra:
    """Dual of A_N = <beta, P^1, ..., P^{l^(N-1)}>: xi_i^{l^(N+1-i)}, tau_0..tau_N."""
    return QuotientHopfAlgebra(
        l, "A_%d" % N, frozenset(range(N + 1)), tuple((i, l ** (N + 1 - i)) for i in range(1, N + 1))
    )


def quotient_of_a_by_a_n_basis(l: int, N: int, t_max: int) -> list[Monomial]:
    """Monomial basis of the dual of A//A_N, the sub-Hopf algebra
    F_l[xi_1^{l^N}, ..., xi_N^l, xi_{N+1}, ...] (x) E(tau_{N+1}, ...)."""
    out = []
    for m in monomials_up_to(l, t_max):
        if any(m.eps[: N + 1]):
            continue
        if any(r % l ** (N + 1 - i) for i, r in enumerate(m.xi[:N], start=1)):
            continue
        out.append(m)
    return out


def connectivity_of_quotient(l: int, N: int) -> int:
    """Lowest topological degree of the augmentation ideal of A//A_N."""
    if N < 1:
        raise MalformedInput("N must be >= 1")
    t = 2 * l
    while True:
        cand = [m for m in quotient_of_a_by_a_n_basis(l, N, t) if not m.is_unit]
        if cand:
            return min(m.degree(l).p for m in cand)
        t *= 2


# ----------------------------------------------------------------------------
# Hopf algebra axioms, checked exactly on a finite range


def _apply_left(x: Tensor, l: int) -> dict:
    out: dict = {}
    for (a, b), c in x.items():
        for (a1, a2), c2 in coproduct(a, l).items():
            key = (a1, a2, b)
            out[key] = out.get(key, 0) + c * c2
    return _clean(out, l)


def _apply_right(x: Tensor, l: int) -> dict:
    out: dict = {}
    for (a, b), c in x.items():
        for (b1, b2), c2 in coproduct(b, l).items():
            key = (a, b1, b2)
            out[key] = out.get(key, 0) + c * c2
    return _clean(out, l)


def coassociativity_defects(l: int, t_max: int) -> list[Monomial]:
    """Monomials with p <= t_max where (D (x) 1) D != (1 (x) D) D."""
    bad = []
    for m in monomials_up_to(l, t_max):
        d = coproduct(m, l)
        if _apply_left(d, l) != _apply_right(d, l):
            bad.append(m)
    return bad


def counit_defects(l: int, t_max: int) -> list[Monomial]:
    """Monomials where (eps (x) 1) D or (1 (x) eps) D differs from the identity."""
    bad = []
    for m in monomials_up_to(l, t_max):
        d = coproduct(m, l)
        left = {b: c for (a, b), c in d.items() if a.is_unit}
        right = {a: c for (a, b), c in d.items() if b.is_unit}
        if left != {m: 1} or right != {m: 1}:
            bad.append(m)
    return bad
