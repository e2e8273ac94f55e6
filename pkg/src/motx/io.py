"""JSON serialization of rings, modules and maps.

Module: {"ring": {"l", "kind", "n"}, "generators": [{"p", "q", "torsion"}],
"tau_inverted": bool}. Map: {"deg": [p, q], "entries": [[i, j, c, a, b], ...]}
where c * tau^a * v^b is the (i, j) entry; a and b are checked against the
degrees.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from . import grading as g
from .errors import MalformedInput
from .grading import CoefficientRing, Generator, GradedModule, HomogeneousMap


def ring_from_dict(d: dict) -> CoefficientRing:
    try:
        return CoefficientRing(int(d["l"]), d.get("kind", g.FL_TAU), d.get("n"))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, MalformedInput):
            raise
        raise MalformedInput("bad ring description %r" % (d,)) from None


def module_to_dict(M: GradedModule) -> dict:
    return {
        "ring": M.ring.to_dict(),
        "tau_inverted": M.tau_inverted,
        "generators": [{"p": x.deg.p, "q": x.deg.q, "torsion": x.torsion} for x in M.gens],
    }


def module_from_dict(d: dict, ring: CoefficientRing | None = None) -> GradedModule:
    if not isinstance(d, dict) or "generators" not in d:
        raise MalformedInput("module needs a generators list")
    R = ring_from_dict(d["ring"]) if "ring" in d else ring
    if R is None:
        raise MalformedInput("module has no ring")
    gens = []
    for x in d["generators"]:
        try:
            if isinstance(x, dict):
                gens.append(Generator(g.Bidegree(int(x["p"]), int(x["q"])), x.get("torsion")))
            else:
                gens.append(Generator(g.Bidegree(int(x[0]), int(x[1])), x[2] if len(x) > 2 else None))
        except (KeyError, IndexError, TypeError, ValueError):
            raise MalformedInput("bad generator %r" % (x,)) from None
    return GradedModule(R, tuple(gens), bool(d.get("tau_inverted", False)))


def map_to_dict(f: HomogeneousMap) -> dict:
    entries = []
    for i, j in zip(*np.nonzero(f.coeffs)):
        c, a, b = f.entry(int(i), int(j))
        entries.append([int(i), int(j), int(c), int(a), int(b)])
    return {"deg": [f.degree.p, f.degree.q], "entries": entries}


def map_from_dict(d: dict, source: GradedModule, target: GradedModule) -> HomogeneousMap:
    try:
        deg = g.Bidegree(int(d["deg"][0]), int(d["deg"][1]))
        entries = d.get("entries", [])
    except (KeyError, IndexError, TypeError, ValueError):
        raise MalformedInput("map needs deg [p, q]") from None
    C = np.zeros((target.rank, source.rank), dtype=np.int64)
    for e in entries:
        if len(e) != 5:
            raise MalformedInput("map entry %r is not [i, j, c, a, b]" % (e,))
        i, j, c, a, b = (int(x) for x in e)
        if not (0 <= i < target.rank and 0 <= j < source.rank):
            raise MalformedInput("map entry %r out of range" % (e,))
        need = source.gens[j].deg + deg - target.gens[i].deg
        have = source.ring.element_degree(a, b)
        if source.tau_inverted:
            ok = source.ring.monomial(need, True) is not None and (have.p == need.p)
        else:
            ok = have == need
        if not ok:
            raise MalformedInput("entry %r: tau^%d v^%d has degree %r, need %r" % (e, a, b, have, need))
        C[i, j] = c
    return HomogeneousMap(source, target, deg, C)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()
