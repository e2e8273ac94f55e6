"""Command line front end.

Settings resolve as: command-line flag, then environment variable
``MOTX_<NAME>``, then a ``key = value`` config file (``--config`` or
``MOTX_CONFIG``), then the built-in default.

Exit status: 0 success, 2 hypothesis violation or bad input, 3 when the
only outcome is an ambiguity report, 1 internal error. Every failure prints
one JSON line on stderr.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import cells, golden
from . import grading as g
from . import io
from .cache import ResultCache
from .chart import chart_to_json, chart_to_svg, page_from_ext
from .errors import MalformedInput, MotxError
from .ext import Comodule, ExtResult, LambdaModule, Window, cotor, ext_over_lambda_qn
from .homology import cone_homology, kunneth, realize
from .selfmaps import classify_self_map, power_relation

DEFAULTS = {"l": "3", "n": "1", "window": "s4,t20", "out": ".", "algebra": "lambdaQn", "cache_dir": ""}


class AmbiguityOnly(Exception):
    """Raised after printing an ambiguity report."""


def read_config(path: str | None) -> dict:
    if not path:
        return {}
    cfg = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise MalformedInput("%s:%d: expected key = value" % (path, lineno))
            k, v = line.split("=", 1)
            cfg[k.strip().replace("-", "_").lower()] = v.strip().strip('"')
    return cfg


def resolve(ctx: click.Context, name: str, flag):
    if flag is not None:
        return flag
    env = os.environ.get("MOTX_" + name.upper())
    if env is not None:
        return env
    cfg = ctx.obj["config"]
    if name in cfg:
        return cfg[name]
    return DEFAULTS.get(name)


def _ints(ctx, l, n):
    try:
        return int(resolve(ctx, "l", l)), int(resolve(ctx, "n", n))
    except ValueError:
        raise MalformedInput("l and n must be integers") from None


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise MalformedInput("%s: %s" % (path, e)) from None


def _emit(obj):
    click.echo(json.dumps(obj, sort_keys=True))


@click.group()
@click.option("--config", "config_path", default=None, help="key = value settings file")
@click.pass_context
def cli(ctx, config_path):
    """Motivic Morava K-theory and Adams chart computations."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = read_config(config_path or os.environ.get("MOTX_CONFIG"))


# ----------------------------------------------------------------------------
# ext


def _lambda_module(ref: str, l: int, n: int) -> LambdaModule:
    R = g.FlTau(l)
    if ref.startswith("builtin:"):
        return LambdaModule(cells.builtin_module(ref, R), n)
    d = _load_json(ref)
    M = io.module_from_dict(d, R)
    if M.ring != R:
        raise MalformedInput("module file must be over F_l[tau] with l=%d" % l)
    Q = io.map_from_dict(d["q_action"], M, M) if "q_action" in d else None
    return LambdaModule(M, n, Q)


@cli.command("ext")
@click.option("--algebra", type=click.Choice(["lambdaQn", "cobar"]), default=None)
@click.option("--module", "module_ref", required=True, help="JSON file or builtin:NAME")
@click.option("--l", "l", default=None)
@click.option("--n", "n", default=None)
@click.option("--window", default=None, help="e.g. s4,t20 or s4,t20,u10")
@click.option("--out", default=None, help="output directory")
@click.option("--cache-dir", default=None)
@click.pass_context
def ext_cmd(ctx, algebra, module_ref, l, n, window, out, cache_dir):
    """Ext over Lambda(Q_n): periodic resolution or reduced cobar complex."""
    l, n = _ints(ctx, l, n)
    algebra = resolve(ctx, "algebra", algebra)
    W = Window.parse(resolve(ctx, "window", window))
    outdir = Path(resolve(ctx, "out", out))
    L = _lambda_module(module_ref, l, n)
    if algebra == "lambdaQn":
        E = ext_over_lambda_qn(L, W)
    else:
        cache = ResultCache(resolve(ctx, "cache_dir", cache_dir) or None)
        key = cache.key(l=l, algebra="cobar-Lambda(Q_%d)" % n, window=str(W), module=io.content_hash(_module_key(L)))
        hit = cache.get(key)
        if hit is not None:
            E = ExtResult.from_dict(hit, "Lambda(Q_%d)" % n, "cobar")
        else:
            E = cotor(Comodule.from_lambda(L), W, n)
            cache.put(key, E.to_dict())
    outdir.mkdir(parents=True, exist_ok=True)
    files = {"ext.tsv": "", "ext.json": "", "chart.json": "", "chart.svg": ""}
    if not W.is_empty:
        page = page_from_ext(E)
        files = {
            "ext.tsv": E.to_tsv(),
            "ext.json": _with_meta(E.to_dict(), module_ref, L, W, algebra),
            "chart.json": chart_to_json([page], n) + "\n",
            "chart.svg": chart_to_svg(page),
        }
    for name, text in files.items():
        (outdir / name).write_text(text)
    _emit({"files": sorted(str(outdir / k) for k in files), "nonzero": len(E.nonzero())})


def _module_key(L: LambdaModule) -> dict:
    d = io.module_to_dict(L.module)
    d["q_action"] = io.map_to_dict(L.q_map())
    return d


def _with_meta(d: dict, ref: str, L: LambdaModule, W: Window, algebra: str) -> str:
    d = dict(d)
    d["metadata"] = {"input_hash": io.content_hash({"module": _module_key(L), "window": str(W), "algebra": algebra})}
    return json.dumps(d, sort_keys=True, indent=1) + "\n"


# ----------------------------------------------------------------------------
# motivic homology commands


def _ring(l: int, n: int) -> g.CoefficientRing:
    return g.AK(l, n)


def _map_arg(ref: str, R: g.CoefficientRing) -> g.HomogeneousMap:
    """builtin:NAME or a JSON file {source, target, map} (target defaults to source)."""
    if ref.startswith("builtin:"):
        return cells.builtin_map(ref, R)
    d = _load_json(ref)
    src = io.module_from_dict(d["source"], R)
    tgt = io.module_from_dict(d["target"], R) if "target" in d else src
    return io.map_from_dict(d["map"], src, tgt)


def _module_arg(ref: str, R: g.CoefficientRing) -> g.GradedModule:
    if ref.startswith("builtin:"):
        return cells.builtin_module(ref, R)
    return io.module_from_dict(_load_json(ref), R)


def _gens(M):
    return [[x.deg.p, x.deg.q, x.torsion] for x in M.normal_form().gens]


@cli.command("cone")
@click.option("--map", "map_ref", required=True)
@click.option("--l", "l", default=None)
@click.option("--n", "n", default=None)
@click.pass_context
def cone_cmd(ctx, map_ref, l, n):
    """AK(n)-homology of the cone of a map."""
    l, n = _ints(ctx, l, n)
    f = _map_arg(map_ref, _ring(l, n))
    cr = cone_homology(f)
    if cr.ambiguous:
        click.echo("ambiguous extension; candidates:")
        for M in cr.candidates:
            click.echo("  " + str(M))
        raise AmbiguityOnly()
    M = cr.module
    click.echo("cone: %s" % M)
    click.echo("nonzero after tau-inversion: %s" % str(not g.invert_tau(M).is_zero).lower())


@cli.command("kunneth")
@click.option("--left", required=True, help="free factor")
@click.option("--right", required=True)
@click.option("--l", "l", default=None)
@click.option("--n", "n", default=None)
@click.pass_context
def kunneth_cmd(ctx, left, right, l, n):
    """Kunneth product of two AK(n)-homologies, the first free."""
    l, n = _ints(ctx, l, n)
    R = _ring(l, n)
    res = kunneth(_module_arg(left, R), _module_arg(right, R))
    _emit({"module": _gens(res.module), "certificate": res.certificate})


@cli.command("realize")
@click.option("--module", "module_ref", required=True)
@click.option("--l", "l", default=None)
@click.option("--n", "n", default=None)
@click.pass_context
def realize_cmd(ctx, module_ref, l, n):
    """Betti realization: rank over K(n)_* and the tau-torsion kernel."""
    l, n = _ints(ctx, l, n)
    M = _module_arg(module_ref, _ring(l, n))
    img = realize(M)
    _emit(
        {
            "rank": img.target.dim,
            "degrees_mod_period": list(img.target.degrees),
            "period": img.target.period,
            "kernel_generators": [list(M.gens[i].deg) + [M.gens[i].torsion] for i in img.kernel],
        }
    )


@cli.command("classify")
@click.option("--spectrum", required=True)
@click.option("--map", "map_ref", required=True)
@click.option("--l", "l", default=None)
@click.option("--n", "n", default=None)
@click.option("--heights", default=None, help="comma separated; default 0..n+2")
@click.option("--cap", type=int, default=None, help="nilpotency search bound")
@click.pass_context
def classify_cmd(ctx, spectrum, map_ref, l, n, heights, cap):
    """Per-height verdicts for a self map (supplied at height n)."""
    l, n = _ints(ctx, l, n)
    R = _ring(l, n)
    f = _map_arg(map_ref, R)
    X = _module_arg(spectrum, R)
    if f.source != X:
        raise MalformedInput("map is not a self map of %s" % spectrum)
    hs = [int(h) for h in heights.split(",")] if heights else None
    rep = classify_self_map({n: f}, n, heights=hs, cap=cap)
    _emit(rep.to_dict())


@cli.command("power")
@click.option("--map", "map_ref", required=True)
@click.option("--l", "l", default=None)
@click.option("--n", "n", default=None)
@click.pass_context
def power_cmd(ctx, map_ref, l, n):
    """Find i, j with f^i = v_n^j."""
    l, n = _ints(ctx, l, n)
    f = _map_arg(map_ref, _ring(l, n))
    rel = power_relation(f)
    out = {"i": rel.i, "j": rel.j, "steps": [list(s) for s in rel.steps]}
    if rel.residual is not None:
        out["residual"] = io.map_to_dict(rel.residual)
    _emit(out)
    if rel.i is None:
        raise AmbiguityOnly()


@cli.command("paper")
@click.option("--all", "run_all", is_flag=True)
@click.option("--case", "case", type=click.Choice(sorted(golden.CASES)), default=None)
def paper_cmd(run_all, case):
    """Recompute the reference cases and compare with stored output."""
    if not run_all and case is None:
        raise MalformedInput("give --all or --case NAME")
    names = list(golden.CASES) if run_all else [case]
    passed = 0
    for name in names:
        ok, msg, data = golden.run_case(name)
        passed += ok
        click.echo("%s %s: %s" % ("PASS" if ok else "FAIL", name, msg))
        if ok and name == "cv-cone":
            click.echo("  quotient normal form: %s" % json.dumps(data["modules"], sort_keys=True))
    click.echo("%d/%d PASS" % (passed, len(names)))
    if passed != len(names):
        sys.exit(1)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="motx", standalone_mode=False)
    except AmbiguityOnly:
        return 3
    except MotxError as e:
        click.echo(json.dumps({"error": e.kind, "message": str(e)}), err=True)
        return e.code
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        click.echo(json.dumps({"error": "usage", "message": e.format_message()}), err=True)
        return 2
    except click.exceptions.Abort:
        click.echo(json.dumps({"error": "aborted", "message": "aborted"}), err=True)
        return 1
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    except Exception as e:  # noqa: BLE001 - last-resort diagnostic
        click.echo(json.dumps({"error": "internal", "message": "%s: %s" % (type(e).__name__, e)}), err=True)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
