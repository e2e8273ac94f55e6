"""Pages of the trigraded Adams spectral sequence.

A page stores, for each (s, t) in the window, the E_r term as an
F_l[tau]-module with generators at (t, u). The differential
d_r: (s, t, u) -> (s + r, t + r - 1, u) is tau-linear, so it is a
HomogeneousMap of degree (r - 1, 0) between the (s, t) modules. Nonzero
differentials are only ever supplied by the caller; the engine proves
vanishing from degrees and vanishing lines.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import grading as g
from .errors import Contradiction, IncompleteInformation, MalformedInput
from .ext import ExtResult, VanishingLine, Window
from .grading import Bidegree, Generator, GradedModule, HomogeneousMap

Ambient = Callable[[int, int], GradedModule]
MAX_CANDIDATE_GENERATORS = 4
MAX_CANDIDATES = 4096


@dataclass(frozen=True, eq=False)
class ChartPage:
    l: int
    r: int
    window: Window
    modules: dict  # (s, t) -> GradedModule over F_l[tau]
    differentials: dict = field(default_factory=dict)  # (r, s, t) -> HomogeneousMap
    pruned: frozenset = frozenset()  # (r, s, t) with d_r known to vanish
    permanent: frozenset = frozenset()  # (s, t) with all d_r in and out pruned
    line: VanishingLine | None = None
    ambient: Ambient | None = None
    n: int | None = None
    provenance: tuple = ()

    def __post_init__(self):
        if self.r < 2:
            raise MalformedInput("page number must be >= 2")
        mods = {k: M for k, M in self.modules.items() if not M.is_zero}
        object.__setattr__(self, "modules", mods)

    # --- slices -----------------------------------------------------------
    def module(self, s: int, t: int) -> GradedModule:
        if self.window.contains(s, t):
            return self.modules.get((s, t), GradedModule.zero(g.FlTau(self.l)))
        if s < 0 or t < 0:
            return GradedModule.zero(g.FlTau(self.l))
        if self.line is not None and self.line.above(s, t):
            return GradedModule.zero(g.FlTau(self.l))
        if self.ambient is not None:
            return self.ambient(s, t)
        return None  # unknown

    def rank(self, s: int, t: int, u: int) -> int:
        M = self.modules.get((s, t))
        return 0 if M is None else g.slice_dimension(M, (t, u))

    def entries(self) -> list[tuple[int, int, int, int]]:
        """(s, t, u, rank) for every nonzero slice with |u| <= u_max."""
        U = self.window.weight_bound
        out = []
        for (s, t), M in sorted(self.modules.items()):
            for u in range(U, -U - 1, -1):
                k = g.slice_dimension(M, (t, u))
                if k:
                    out.append((s, t, u, k))
        return out

    def target_is_zero(self, r: int, s: int, t: int) -> bool:
        """d_r out of (s, t) has a zero target in every weight the source occupies."""
        src = self.modules.get((s, t))
        if src is None:
            return True
        tgt = self.module(s + r, t + r - 1)
        if tgt is None:
            return False
        weights = {x.deg.q for x in src.gens}
        # tau-linearity: d_r vanishes iff it vanishes on generators
        return all(g.slice_dimension(tgt, (t + r - 1, u)) == 0 for u in weights)

    def source_is_zero(self, r: int, s: int, t: int) -> bool:
        """Nothing can hit (s, t) by a d_r."""
        if s - r < 0:
            return True
        src = self.module(s - r, t - r + 1)
        if src is None:
            return False
        tgt = self.modules.get((s, t))
        if tgt is None or src.is_zero:
            return True
        return not any(g.slice_dimension(tgt, (t, x.deg.q)) for x in src.gens)

    def last_relevant_page(self, s: int, t: int) -> int | None:
        """Smallest R with every d_r (r >= R) out of (s, t) landing above the line."""
        if self.line is None:
            return None
        r = self.r
        while not self.line.above(s + r, t + r - 1):
            r += 1
        return r


def page_from_ext(ext: ExtResult, r: int = 2, line: VanishingLine | None = None, ambient: Ambient | None = None) -> ChartPage:
    mods = {}
    for s, M in ext.modules.items():
        by_t: dict = {}
        for x in M.gens:
            if ext.window.contains(s, x.deg.p):
                by_t.setdefault(x.deg.p, []).append(x)
        for t, gens in by_t.items():
            mods[(s, t)] = GradedModule(M.ring, tuple(gens)).normal_form()
    return ChartPage(ext.l, r, ext.window, mods, line=line, ambient=ambient, n=ext.n)


def ambient_from_module(ext_module_of_s: Callable[[int], GradedModule]) -> Ambient:
    """Ambient E_2 lookup from a per-s module function (e.g. a closed form)."""

    def look(s: int, t: int) -> GradedModule:
        M = ext_module_of_s(s)
        return GradedModule(M.ring, tuple(x for x in M.gens if x.deg.p == t))

    return look


# ----------------------------------------------------------------------------
# pruning


def _outgoing_range(page: ChartPage, s: int, t: int) -> range | None:
    R = page.last_relevant_page(s, t)
    return None if R is None else range(page.r, R)


def degree_reason_prune(page: ChartPage) -> ChartPage:
    """Mark every d_r with an identically zero target; mark permanent cycles."""
    pruned = set(page.pruned)
    for (s, t) in page.modules:
        rr = _outgoing_range(page, s, t)
        upto = rr.stop if rr is not None else max(page.window.s_max - s + 1, page.r)
        for r in range(page.r, upto):
            if page.target_is_zero(r, s, t):
                pruned.add((r, s, t))
        for r in range(page.r, s + 1):
            if page.source_is_zero(r, s, t):
                pruned.add((r, s - r, t - r + 1))
    permanent = set(page.permanent)
    for (s, t) in page.modules:
        rr = _outgoing_range(page, s, t)
        if rr is None:
            continue
        out_ok = all((r, s, t) in pruned for r in rr)
        in_ok = all((r, s - r, t - r + 1) in pruned or page.source_is_zero(r, s, t) for r in range(page.r, s + 1))
        if out_ok and in_ok:
            permanent.add((s, t))
    return replace(page, pruned=frozenset(pruned), permanent=frozenset(permanent))


def apply_vanishing_line(page: ChartPage, line: VanishingLine, source: str = "caller") -> ChartPage:
    bad = [(s, t) for (s, t) in page.modules if line.above(s, t)]
    if bad:
        raise Contradiction("vanishing line deletes nonzero entries at %s" % sorted(bad))
    pruned = set(page.pruned)
    for (s, t) in page.modules:
        for r in range(page.r, page.window.s_max + 2):
            if line.above(s + r, t + r - 1):
                pruned.add((r, s, t))
    prov = page.provenance + ("vanishing line m=%s b=%s from %s" % (line.m, line.b, source),)
    return replace(page, line=line, pruned=frozenset(pruned), provenance=prov)


# ----------------------------------------------------------------------------
# running the spectral sequence


@dataclass
class Certificate:
    stabilized: dict  # (s, t) -> page from which the entry no longer changes
    edge_uncertain: list
    pages: list  # ChartPage history, E_2 first

    def to_dict(self) -> dict:
        return {
            "stabilized": [[s, t, r] for (s, t), r in sorted(self.stabilized.items())],
            "edge_uncertain": [list(x) for x in sorted(self.edge_uncertain)],
        }


def _differential(page: ChartPage, r: int, s: int, t: int, supplied: dict):
    src = page.modules.get((s, t))
    tgt_key = (s + r, t + r - 1)
    if src is None:
        return None
    if (r, s, t) in page.pruned or page.target_is_zero(r, s, t):
        return None
    if not page.window.contains(*tgt_key):
        return "edge"
    f = supplied.get((r, s, t))
    if f is None:
        return "missing"
    tgt = page.modules.get(tgt_key)
    if f.source != src or f.target != tgt or (not f.is_zero() and f.degree != Bidegree(r - 1, 0)):
        raise MalformedInput("d_%d at (%d,%d) does not match the E_%d terms" % (r, s, t, r))
    return f


def run_to_e_infinity(page: ChartPage, differentials: dict | None = None) -> tuple[ChartPage, Certificate]:
    """Run pages until no differential can stay inside the window.

    ``differentials`` maps (r, s, t) to a HomogeneousMap between the E_r
    terms (normal-form generators). Unpruned in-window differentials that
    were not supplied raise IncompleteInformation.
    """
    supplied = dict(page.differentials)
    supplied.update(differentials or {})
    page = degree_reason_prune(page)
    history = [page]
    stabilized = {k: page.r for k in page.modules}
    edge = set()
    R = g.FlTau(page.l)
    r = page.r
    last = page.window.s_max + 1
    while r <= last:
        maps, missing = {}, []
        for (s, t) in sorted(page.modules):
            d = _differential(page, r, s, t, supplied)
            if d == "missing":
                missing.append((r, s, t))
            elif d == "edge":
                edge.add((s, t))
            elif d is not None:
                maps[(s, t)] = d
        if missing:
            U = page.window.weight_bound
            detail = []
            for (rr, s, t) in missing:
                for x in page.modules[(s, t)].gens:
                    if abs(x.deg.q) <= U:
                        detail.append((rr, s, t, x.deg.q))
            raise IncompleteInformation("undetermined differentials at (r,s,t,u) = %s" % detail, detail)
        for (s, t), f in maps.items():
            nxt = maps.get((s + r, t + r - 1))
            if nxt is not None and not (nxt @ f).is_zero():
                raise MalformedInput("d_%d o d_%d != 0 at (%d,%d)" % (r, r, s, t))
        new = {}
        for (s, t), M in page.modules.items():
            out = maps.get((s, t))
            inc = maps.get((s - r, t - r + 1))
            if out is None and inc is None:
                new[(s, t)] = M
                continue
            if out is None:
                out = g.zero_map(M, GradedModule.zero(R), Bidegree(r - 1, 0))
            if inc is None:
                inc = g.zero_map(GradedModule.zero(R), M, Bidegree(r - 1, 0))
            H = g.homology(inc, out).normal_form()
            new[(s, t)] = H
            if H != M:
                stabilized[(s, t)] = r + 1
        keep = {k: v for k, v in supplied.items() if k[0] > r}
        page = degree_reason_prune(replace(page, r=r + 1, modules=new, differentials=keep))
        history.append(page)
        r += 1
    # anything whose later differentials could leave the window uncertified
    for (s, t) in page.modules:
        rr = _outgoing_range(page, s, t)
        if rr is None:
            edge.add((s, t))
            continue
        for r2 in rr:
            if not page.target_is_zero(r2, s, t):
                edge.add((s, t))
                break
    edge = {k for k in edge if k in page.modules}
    return page, Certificate({k: v for k, v in stabilized.items() if k in page.modules}, sorted(edge), history)


# ----------------------------------------------------------------------------
# abutment


@dataclass(frozen=True, eq=False)
class AbutmentModule:
    """Abutment as an F_l[tau]-module in (stem, weight) with Adams filtrations."""

    l: int
    window: Window
    module: GradedModule  # split candidate, generators ordered as ``filtration``
    filtration: tuple[int, ...]
    ambiguous: bool = False
    candidates: tuple = ()  # normal forms of all possible extensions
    hidden: tuple = ()  # (generator index, target generator indices)

    def slice_rank(self, stem: int, u: int) -> int:
        return g.slice_dimension(self.module, (stem, u))

    def over_vn(self, n: int):
        """Group generators into v_n-orbits (v_n at (s, stem, u) = (1, 2l^n - 2, l^n - 1)).

        Returns the F_l[tau]-module spanned by orbit starts, and whether every
        orbit runs to the top of the window (no v_n-torsion visible).
        """
        step = Bidegree(2 * self.l**n - 2, self.l**n - 1)
        keyed = {}
        for i, x in enumerate(self.module.gens):
            keyed.setdefault((self.filtration[i], x.deg, x.torsion), []).append(i)
        starts, free = [], True
        for i, x in enumerate(self.module.gens):
            s = self.filtration[i]
            if (s - 1, x.deg - step, x.torsion) in keyed:
                continue
            starts.append(x)
            k = s
            while k < self.window.s_max:
                nxt = (k + 1, x.deg + step * (k + 1 - s), x.torsion)
                if nxt not in keyed or self.window.t_max < nxt[1].p + nxt[0]:
                    break
                k += 1
            top_t = x.deg.p + (k + 1 - s) * step.p + k + 1
            if k < self.window.s_max and top_t <= self.window.t_max:
                free = False
        return GradedModule(self.module.ring, tuple(starts)).normal_form(), free


def assemble_abutment(einf: ChartPage) -> AbutmentModule:
    R = g.FlTau(einf.l)
    gens, filt = [], []
    for (s, t), M in sorted(einf.modules.items()):
        for x in M.gens:
            gens.append(Generator(Bidegree(t - s, x.deg.q), x.torsion))
            filt.append(s)
    split = GradedModule(R, tuple(gens))
    hidden = []
    for i, x in enumerate(gens):
        if x.torsion is None:
            continue
        d = Bidegree(x.deg.p, x.deg.q - x.torsion)
        targets = [j for j in split.slice_basis(d) if filt[j] > filt[i]]
        if targets:
            hidden.append((i, tuple(targets)))
    if not hidden:
        return AbutmentModule(einf.l, einf.window, split, tuple(filt))
    cands = _enumerate_extensions(split, hidden)
    return AbutmentModule(einf.l, einf.window, split, tuple(filt), True, cands, tuple(hidden))


def _enumerate_extensions(split: GradedModule, hidden: list) -> tuple:
    if len(hidden) > MAX_CANDIDATE_GENERATORS:
        return ()
    l = split.ring.l
    choices = [list(itertools.product(range(l), repeat=len(tg))) for _, tg in hidden]
    total = 1
    for c in choices:
        total *= len(c)
    if total > MAX_CANDIDATES:
        return ()
    found = []
    for combo in itertools.product(*choices):
        found.append(extension_module(split, [(i, dict(zip(tg, c))) for (i, tg), c in zip(hidden, combo)]))
    uniq = []
    for M in found:
        if not any(M.gens == N.gens for N in uniq):
            uniq.append(M)
    return tuple(uniq)


def extension_module(base: GradedModule, relations: list) -> GradedModule:
    """Module presented by the generators of ``base`` and the relations
    tau^k x_i = sum c_j tau^{a_j} x_j for the listed torsion generators
    ``(i, {j: c_j})``; other torsion generators keep tau^k x = 0."""
    F0 = g.free_cover(base)
    changed = {i: rel for i, rel in relations}
    cols, degs = [], []
    for i, x in enumerate(base.gens):
        if x.torsion is None:
            continue
        v = np.zeros(base.rank, dtype=np.int64)
        v[i] = 1
        for j, c in changed.get(i, {}).items():
            v[j] = (v[j] - c) % base.ring.l
        cols.append(v)
        degs.append(Bidegree(x.deg.p, x.deg.q - x.torsion))
    if not cols:
        return base.normal_form()
    F1 = GradedModule.free(base.ring, degs, base.tau_inverted)
    R = HomogeneousMap(F1, F0, g.ZERO, np.array(cols).T)
    return g.cokernel(R)[0].normal_form()


# ----------------------------------------------------------------------------
# export


def chart_to_dict(pages: list[ChartPage], n: int | None = None) -> dict:
    first = pages[0]
    out = {"prime": first.l, "n": n if n is not None else first.n, "window": first.window.to_dict(), "pages": []}
    for p in pages:
        out["pages"].append(
            {
                "r": p.r,
                "entries": [{"s": s, "t": t, "u": u, "rank": k} for s, t, u, k in p.entries()],
                "differentials": [
                    {"r": r, "s": s, "t": t, "matrix": f.coeffs.tolist()} for (r, s, t), f in sorted(p.differentials.items())
                ],
                "pruned": [list(x) for x in sorted(p.pruned)],
                "permanent": [list(x) for x in sorted(p.permanent)],
            }
        )
    if first.provenance:
        out["provenance"] = list(first.provenance)
    return out


def chart_to_json(pages: list[ChartPage], n: int | None = None) -> str:
    return json.dumps(chart_to_dict(pages, n), sort_keys=True, indent=1)


def chart_to_svg(page: ChartPage, cell: int = 28) -> str:
    """Static chart at (t - s, s); dot area grows with rank, weight in the title."""
    W = page.window
    width = (W.t_max + 2) * cell
    height = (W.s_max + 2) * cell
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">' % (width, height, width, height),
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for x in range(W.t_max + 1):
        X = (x + 1) * cell
        parts.append('<text x="%d" y="%d" font-size="9" text-anchor="middle">%d</text>' % (X, height - 4, x))
    for y in range(W.s_max + 1):
        Y = height - (y + 1) * cell
        parts.append('<text x="4" y="%d" font-size="9">%d</text>' % (Y + 3, y))
    by_cell: dict = {}
    for (s, t), M in sorted(page.modules.items()):
        for x in M.gens:
            by_cell.setdefault((t - s, s), []).append(x)
    for (stem, s), gs in sorted(by_cell.items()):
        X = (stem + 1) * cell
        Y = height - (s + 1) * cell
        rad = 3 + 2 * (len(gs) - 1) ** 0.5 if len(gs) > 1 else 3
        title = "; ".join("u=%d%s" % (x.deg.q, "" if x.torsion is None else " tau^%d-torsion" % x.torsion) for x in gs)
        parts.append(
            '<circle cx="%d" cy="%d" r="%.1f" fill="black"><title>(s=%d, t-s=%d) %s</title></circle>' % (X, Y, rad, s, stem, title)
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
