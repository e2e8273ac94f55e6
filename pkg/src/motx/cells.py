"""Cell descriptions: build programs for AK(n)-homology of finite complexes."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import grading as g
from . import io
from .errors import MalformedInput, UnsupportedInput
from .grading import CoefficientRing, GradedModule, HomogeneousMap
from .homology import cone_homology, kunneth


def sphere(R: CoefficientRing) -> GradedModule:
    return GradedModule.free(R, [(0, 0)])


def moore(R: CoefficientRing) -> GradedModule:
    """S/l: the degree-l map induces zero, so the cone splits."""
    return cone_homology(map_l(R)).module


def cone_eta(R: CoefficientRing) -> GradedModule:
    return cone_homology(map_eta(R)).module


def map_l(R: CoefficientRing) -> HomogeneousMap:
    S = sphere(R)
    return g.zero_map(S, S)


def map_eta(R: CoefficientRing) -> HomogeneousMap:
    S = sphere(R)
    return g.zero_map(S, S, (1, 1))


def map_cv(R: CoefficientRing) -> HomogeneousMap:
    """Multiplication by tau^{l-1} v_1 on AK(1)(S/l)."""
    if R.kind != g.FL_TAU_VN or R.n != 1:
        raise UnsupportedInput("cv is a height-1 map")
    return g.multiplication(moore(R), R.l - 1, 1)


def map_vn(R: CoefficientRing) -> HomogeneousMap:
    return g.multiplication(moore(R), 0, 1)


def cone_cv(R: CoefficientRing) -> GradedModule:
    return cone_homology(map_cv(R)).module


def b_module(R: CoefficientRing, l: int | None = None, n: int | None = None) -> GradedModule:
    """H(a, b)/(a^2, b^{l^n}) with |a| = (1,1), |b| = (2,1): basis a^e b^j."""
    l = l or R.l
    n = n or R.n or 1
    degs = [(e + 2 * j, e + j) for e in (0, 1) for j in range(l**n)]
    return GradedModule.free(R, sorted(degs))


def swap_idempotent(V: GradedModule) -> tuple[GradedModule, HomogeneousMap]:
    """(1 + T)/2 on V (x) V, T the signed swap; V must be free."""
    if not V.is_free:
        raise UnsupportedInput("symmetrizer needs a free module")
    l = V.ring.l
    r = V.rank
    pairs = [(i, j) for i in range(r) for j in range(r)]
    W = GradedModule.free(V.ring, [V.gens[i].deg + V.gens[j].deg for i, j in pairs], V.tau_inverted)
    half = pow(2, l - 2, l)
    E = np.zeros((len(pairs), len(pairs)), dtype=np.int64)
    for k, (i, j) in enumerate(pairs):
        sign = (-1) ** (V.gens[i].deg.p * V.gens[j].deg.p)
        E[k, k] += half
        E[pairs.index((j, i)), k] += sign * half
    return W, HomogeneousMap(W, W, g.ZERO, E % l)


def x_model(R: CoefficientRing) -> GradedModule:
    """Module-level stand-in for a Smith-type summand: the symmetric part of B (x) B."""
    from .grading import image_of_idempotent

    _, e = swap_idempotent(b_module(R))
    return image_of_idempotent(e).module


BUILTIN_MODULES = {
    "sphere": sphere,
    "point": sphere,
    "moore": moore,
    "cone-eta": cone_eta,
    "cone-cv": cone_cv,
    "B": b_module,
    "x-model": x_model,
}

BUILTIN_MAPS = {"l": map_l, "eta": map_eta, "cv": map_cv, "vn": map_vn}


def _parse_builtin(name: str) -> tuple[str, list[int]]:
    name = name.removeprefix("builtin:")
    m = re.fullmatch(r"([A-Za-z\-]+)(?:\(([\d, ]*)\))?", name.strip())
    if not m:
        raise MalformedInput("bad builtin name %r" % name)
    args = [int(a) for a in (m.group(2) or "").split(",") if a.strip()]
    return m.group(1), args


def builtin_ring(R: CoefficientRing, args: list[int]) -> CoefficientRing:
    """Arguments (l) or (l, n) override the prime and height."""
    if not args:
        return R
    l = args[0]
    n = args[1] if len(args) > 1 else R.n
    if R.kind == g.FL_TAU_VN:
        return g.AK(l, n)
    return CoefficientRing(l, R.kind)


def builtin_module(name: str, R: CoefficientRing) -> GradedModule:
    key, args = _parse_builtin(name)
    if key not in BUILTIN_MODULES:
        raise MalformedInput("unknown builtin spectrum %r (have %s)" % (key, ", ".join(sorted(BUILTIN_MODULES))))
    return BUILTIN_MODULES[key](builtin_ring(R, args))


def builtin_map(name: str, R: CoefficientRing) -> HomogeneousMap:
    key, args = _parse_builtin(name)
    if key not in BUILTIN_MAPS:
        raise MalformedInput("unknown builtin map %r (have %s)" % (key, ", ".join(sorted(BUILTIN_MAPS))))
    return BUILTIN_MAPS[key](builtin_ring(R, args))


# ----------------------------------------------------------------------------
# programs


@dataclass
class CellResult:
    module: GradedModule | None
    log: list = field(default_factory=list)
    ambiguous: bool = False
    candidates: tuple = ()


def _module_arg(ref, R: CoefficientRing) -> GradedModule:
    if isinstance(ref, str):
        return builtin_module(ref, R)
    return io.module_from_dict(ref, R)


def evaluate(program: dict) -> CellResult:
    """Run {ring, start, steps:[{op: cone|smash|split|localize, ...}]}."""
    if "ring" not in program:
        raise MalformedInput("cell description needs a ring")
    R = io.ring_from_dict(program["ring"])
    start = program.get("start", [[0, 0]])
    if isinstance(start, str):
        M = builtin_module(start, R)
    else:
        M = GradedModule.free(R, [tuple(d) for d in start])
    res = CellResult(M, ["start %s" % M])
    for k, step in enumerate(program.get("steps", [])):
        op = step.get("op")
        if op == "cone":
            src = _module_arg(step["source"], R) if "source" in step else M
            ref = step.get("map")
            if isinstance(ref, str):
                f = builtin_map(ref, R)
                if f.target != M:
                    raise MalformedInput("step %d: builtin map %s does not land in the current module" % (k, ref))
            else:
                f = io.map_from_dict(ref, src, M)
            cr = cone_homology(f)
            if cr.ambiguous:
                res.log.append("cone: ambiguous, %d candidates" % len(cr.candidates))
                return CellResult(None, res.log, True, cr.candidates)
            M = cr.module
            res.log.append("cone (%s) -> %s" % (cr.how, M))
        elif op == "smash":
            other = _module_arg(step["module"], R)
            M = kunneth(other, M).module
            res.log.append("smash -> %s" % M)
        elif op == "split":
            from .grading import image_of_idempotent

            e = io.map_from_dict(step["idempotent"], M, M)
            M = image_of_idempotent(e).module
            res.log.append("split -> %s" % M)
        elif op == "localize":
            res.log.append("localize (no change on modules)")
        else:
            raise MalformedInput("step %d: unknown op %r" % (k, op))
    res.module = M
    return res
