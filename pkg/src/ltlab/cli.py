"""Command-line front end: ``ltlab <subcommand> [flags]``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors.  Settings may come from an INI file (``--config``) with one section
per subcommand; flags override file values.  LT_LAB_BUDGET overrides the
enumeration caps.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

SCHEMA_VERSION = 1
CURVES = {"p1": "P1", "dl": "DL", "hermitian": "Hermitian", "bigas": "BigAS", "hyper": "Hyper"}
ACTIONS = ("p1", "dl", "bigas", "hyper")
COMMANDS = ("count", "zeta", "strata", "character", "split-check", "graph", "modular-graph", "jl-check")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    q: int | None = None
    budget: int | None = None
    out: Path | None = None
    params: dict = field(default_factory=dict)


@dataclass
class Result:
    command: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    ok: bool = True
    extra: dict = field(default_factory=dict)
    artifacts: dict[str, bytes] = field(default_factory=dict)


def _parser() -> argparse.ArgumentParser:
    # the common flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                        help="INI file with one section per subcommand")
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS, help="directory for JSON/CSV/DOT artifacts")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the JSON report instead of the table")
    p = argparse.ArgumentParser(prog="ltlab", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    s = sub.add_parser("count", help="point counts over F_{q^k}")
    s.add_argument("--curve", choices=sorted(CURVES))
    s.add_argument("--q", type=int)
    s.add_argument("--k", type=int, nargs="+")

    s = sub.add_parser("zeta", help="zeta function and genus")
    s.add_argument("--curve", choices=sorted(CURVES))
    s.add_argument("--q", type=int)

    s = sub.add_parser("strata", help="simple strata up to equivalence")
    s.add_argument("--q", type=int)
    s.add_argument("--kind", choices=("unramified", "ramified-pi", "ramified-epspi", "all"))
    s.add_argument("--n", type=int)

    s = sub.add_parser("character", help="character of the symmetry group on H^1")
    s.add_argument("--curve", choices=ACTIONS)
    s.add_argument("--q", type=int)
    s.add_argument("--method", choices=("tame-lefschetz", "twisted"))
    s.add_argument("--match", type=int, metavar="K", help="compare with the stratum hypothesis up to k = K")

    s = sub.add_parser("split-check", help="splitting defects on U^1 generators")
    s.add_argument("--q", type=int)
    s.add_argument("--kind", choices=("unramified", "ramified-pi", "ramified-epspi", "all"))

    s = sub.add_parser("graph", help="depth-zero ball, optionally quotiented")
    s.add_argument("--q", type=int)
    s.add_argument("--radius", type=int)
    s.add_argument("--quotient", type=int, metavar="N", help="congruence level")
    s.add_argument("--format", choices=("dot", "json"))

    s = sub.add_parser("modular-graph", help="dual graph of the modular curve")
    s.add_argument("--p", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--s", type=int, help="supersingular count")
    s.add_argument("--igusa-genus", type=int, dest="igusa_genus")
    s.add_argument("--format", choices=("dot", "json"))

    s = sub.add_parser("jl-check", help="finite-level Jacquet-Langlands constituents")
    s.add_argument("--q", type=int)
    return p


DEFAULTS = {
    "count": {"curve": "hermitian", "k": [1]},
    "zeta": {"curve": "hermitian"},
    "strata": {"kind": "all", "n": 1},
    "character": {"curve": "dl", "method": "tame-lefschetz", "match": None},
    "split-check": {"kind": "all", "q": 3},
    "graph": {"radius": 2, "quotient": None, "format": "dot"},
    "modular-graph": {"n": 1, "s": None, "igusa_genus": None, "format": "dot"},
    "jl-check": {},
}


def _from_file(path: Path, command: str) -> dict:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path}")
    if not cp.has_section(command):
        return dict(cp.defaults())
    return dict(cp.items(command))


def _coerce(key: str, value):
    if value is None or key in ("curve", "kind", "method", "format"):
        return value
    if key == "k":
        return [int(x) for x in str(value).replace(",", " ").split()] if isinstance(value, str) else value
    try:
        return int(value)
    except (TypeError, ValueError):
        raise UsageError(f"{key} must be an integer, got {value!r}")


def build_config(argv: Sequence[str]) -> tuple[RunConfig, bool]:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        raise UsageError("bad arguments") from exc
    config, out, as_json = (getattr(ns, k, None) for k in ("config", "out", "json"))
    params = dict(DEFAULTS[ns.command])
    if config:
        params.update({k.replace("-", "_"): v for k, v in _from_file(config, ns.command).items()})
    for k, v in vars(ns).items():
        if k not in ("command", "config", "out", "json") and v is not None:
            params[k] = v
    params = {k: _coerce(k, v) for k, v in params.items()}
    q = params.pop("q", None) if ns.command != "modular-graph" else params.get("p")
    if q is None:
        raise UsageError("--q (or --p) is required")
    from .ffpoly import is_prime

    if q % 2 == 0 or not is_prime(q):
        raise UsageError(f"q = {q} must be an odd prime")
    budget = os.environ.get("LT_LAB_BUDGET")
    if budget is not None:
        try:
            budget = int(budget)
        except ValueError:
            raise UsageError("LT_LAB_BUDGET must be an integer")
        if budget <= 0:
            raise UsageError("LT_LAB_BUDGET must be positive")
    out = out or (Path(params.pop("out")) if "out" in params else None)
    return RunConfig(ns.command, q, budget, out, params), bool(as_json)


# -------------------------------------------------------------- commands


def _budget(cfg: RunConfig, default: int) -> int:
    return cfg.budget if cfg.budget is not None else default


def cmd_count(cfg: RunConfig) -> Result:
    from .curves import DEFAULT_BUDGET, count_points, make_curve

    C = make_curve(CURVES[cfg.params["curve"]], cfg.q)
    rows = [{"curve": C.label, "k": k, "points": count_points(C, k, _budget(cfg, DEFAULT_BUDGET))}
            for k in cfg.params["k"]]
    res = Result("count", ["curve", "k", "points"], rows)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=res.columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    res.artifacts["counts.csv"] = buf.getvalue().encode()
    return res


def cmd_zeta(cfg: RunConfig) -> Result:
    from .curves import DEFAULT_BUDGET, curve_zeta, make_curve

    C = make_curve(CURVES[cfg.params["curve"]], cfg.q)
    z = curve_zeta(C, budget=_budget(cfg, DEFAULT_BUDGET))
    row = {"curve": C.label, "genus": z.genus, "components": z.components, "L": " ".join(map(str, z.L))}
    return Result("zeta", ["curve", "genus", "components", "L"], [row], extra={"zeta": z.to_json()})


def cmd_strata(cfg: RunConfig) -> Result:
    from .strata import KINDS, enumerate_simple

    kinds = KINDS if cfg.params["kind"] == "all" else (cfg.params["kind"],)
    rows = []
    for kind in kinds:
        for S in enumerate_simple(cfg.q, kind, cfg.params["n"]):
            rows.append({"kind": kind, "n": S.n, "residue": S.residue, "label": S.label()})
    return Result("strata", ["kind", "n", "residue", "label"], rows)


def _action(name: str, q: int):
    from .curves import bigas_action, dl_action, hyper_action, p1_action

    return {"p1": p1_action, "dl": dl_action, "bigas": bigas_action, "hyper": hyper_action}[name](q)


def cmd_character(cfg: RunConfig) -> Result:
    from .reptheory import TWIST_BUDGET, h1_character, module_match, stratum_hypothesis, twisted_table

    name = cfg.params["curve"]
    budget = _budget(cfg, TWIST_BUDGET)
    spec = _action(name, cfg.q)
    H = h1_character(spec.curve, spec, cfg.params["method"], budget)
    G = spec.group
    rows = [{"class": j, "size": G.class_sizes[j], "order": G.element_order(g), "trace": str(H.values[j])}
            for j, g in enumerate(G.class_reps)]
    res = Result("character", ["class", "size", "order", "trace"], rows, extra={"dim": H.dim(), "group": G.name})
    K = cfg.params.get("match")
    if K:
        if name not in ("hyper", "bigas"):
            raise UsageError("--match is available for hyper and bigas")
        spec, hyp = stratum_hypothesis(cfg.q, "ramified" if name == "hyper" else "unramified")
        rep = module_match(twisted_table(spec, K, budget), hyp)
        res.ok = rep.ok
        res.extra["match"] = {"ok": rep.ok, "K": rep.K, "checked": rep.checked, "determined": rep.determined,
                              "diagnostic": rep.diagnostic}
    return res


def cmd_split_check(cfg: RunConfig) -> Result:
    from .ffpoly import PiMatrix, make_field
    from .formal_module import level_ring, required_level, splitting_defect
    from .strata import KINDS, enumerate_simple

    F = make_field(cfg.q)
    one = PiMatrix.identity(F)
    kinds = KINDS if cfg.params["kind"] == "all" else (cfg.params["kind"],)
    rows = []
    for kind in kinds:
        for S in enumerate_simple(cfg.q, kind, 1):
            L = level_ring(required_level(S), cfg.q)
            gens = [g for g in (one + x for x in S.order.layer(S.n)) if g != one]
            bad = sum(not splitting_defect(g, S, L).is_zero() for g in gens)
            rows.append({"stratum": S.label(), "generators": len(gens), "nonzero": bad})
    ok = all(r["nonzero"] == 0 for r in rows)
    return Result("split-check", ["stratum", "generators", "nonzero"], rows, ok)


def _graph_result(command: str, G, fmt: str, extra: dict) -> Result:
    from .tower_graph import export, genus_total

    counts = {}
    for v in G.vertices.values():
        counts[(v.kind, v.curve, v.genus)] = counts.get((v.kind, v.curve, v.genus), 0) + 1
    rows = [{"kind": k, "curve": c, "genus": g, "count": n} for (k, c, g), n in sorted(counts.items())]
    extra = dict(extra, vertices=len(G.vertices), edges=len(G.edges), b1=G.betti1(), genus_total=genus_total(G))
    res = Result(command, ["kind", "curve", "genus", "count"], rows, extra=extra)
    res.artifacts[f"graph.{fmt}"] = export(G, fmt)
    return res


def cmd_graph(cfg: RunConfig) -> Result:
    from .tower_graph import check_depth_zero, depth_zero_ball, quotient

    G = depth_zero_ball(cfg.q, cfg.params["radius"])
    checks = check_depth_zero(G)
    n = cfg.params.get("quotient")
    if n is not None:
        G = quotient(G, n)
    res = _graph_result("graph", G, cfg.params["format"], {"checks": checks})
    res.ok = all(checks.values())
    return res


def cmd_modular_graph(cfg: RunConfig) -> Result:
    from .tower_graph import modular_graph

    s, g = cfg.params.get("s"), cfg.params.get("igusa_genus")
    if s is None or g is None:
        raise UsageError("--s and --igusa-genus are required (no defaults are assumed)")
    G = modular_graph(cfg.q, cfg.params["n"], {"s": s, "igusa_genus": g})
    res = _graph_result("modular-graph", G, cfg.params["format"], {"meta": G.meta})
    res.ok = not G.ends()
    return res


def cmd_jl_check(cfg: RunConfig) -> Result:
    from .reptheory import jl_finite_check

    rep = jl_finite_check(cfg.q)
    rows = []
    for part in ("depth_zero", "unramified", "ramified"):
        for c in rep[part].get("constituents", []):
            rows.append({"part": part, "name": c["name"], "dim": c["dim"], "multiplicity": c["multiplicity"],
                         "frobenius_scalar": c.get("frobenius_scalar")})
    skipped = {p: rep[p]["skipped"] for p in ("unramified", "ramified") if "skipped" in rep[p]}
    return Result("jl-check", ["part", "name", "dim", "multiplicity", "frobenius_scalar"], rows, bool(rep["ok"]),
                  extra={"skipped": skipped} if skipped else {})


HANDLERS = {"count": cmd_count, "zeta": cmd_zeta, "strata": cmd_strata, "character": cmd_character,
            "split-check": cmd_split_check, "graph": cmd_graph, "modular-graph": cmd_modular_graph,
            "jl-check": cmd_jl_check}


# --------------------------------------------------------------- reports


def _cell(x) -> str:
    return "" if x is None else str(x)


def render_report(result: Result) -> tuple[str, str]:
    """A fixed-width table and a versioned JSON document, both deterministic."""
    cols = result.columns
    cells = [[_cell(r.get(c)) for c in cols] for r in result.rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip(),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells]
    table = "\n".join(lines) + "\n"
    doc = {"schema": SCHEMA_VERSION, "command": result.command, "ok": result.ok, "columns": cols,
           "rows": [{c: r.get(c) for c in cols} for r in result.rows], **result.extra}
    return table, json.dumps(doc, sort_keys=True, indent=1, default=str) + "\n"


def run(cfg: RunConfig) -> tuple[Result, str, str]:
    result = HANDLERS[cfg.command](cfg)
    table, doc = render_report(result)
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        stem = cfg.command.replace("-", "_")
        (cfg.out / f"{stem}.json").write_text(doc)
        for name, data in result.artifacts.items():
            (cfg.out / f"{stem}_{name}").write_bytes(data)
    return result, table, doc


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg, as_json = build_config(argv)
        result, table, doc = run(cfg)
    except UsageError as err:
        print(f"ltlab: {err}", file=sys.stderr)
        if str(err) != "bad arguments":
            _parser().print_usage(sys.stderr)
        return 2
    except ValueError as err:
        # precondition failures inside the library (bad q, budgets, ...)
        print(f"ltlab: {err}", file=sys.stderr)
        return 2
    if cfg.command == "count" and len(result.rows) == 1 and not as_json:
        print(result.rows[0]["points"])
    else:
        sys.stdout.write(doc if as_json else table)
    if not result.ok:
        print("ltlab: verification failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
