"""Batch front-end: parse a problem file, dispatch one operation, emit a CSV
report plus a machine-readable summary.

Every command writes ``<stem>.<command>.csv`` and ``<stem>.<command>.summary``
(JSON, sorted keys) into ``--out``; all numbers are serialized with
shortest-roundtrip repr so identical inputs produce byte-identical reports.
No arithmetic happens in this layer: each value is a pass-through from the
in-process call.

Exit codes: 0 success, 2 schema violation, 3 infeasible model, 4 internal
tolerance breach (including selftest invariant failures).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import selftest as selftest_mod
from .convex import INF, PolyConvexFn, conjugate, fn_equal, recession, support_function
from .errors import InfeasibleError, SchemaError, ToleranceError
from .functionals import check_proper, check_sd, duality_gap, sigma_CS
from .problemfile import Problem, load
from .regularity import analyze_map, check_closure_condition, check_ic_condition


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _fn_str(fn: PolyConvexFn) -> str:
    pieces = ";".join(f"{repr(a)}x+{repr(b)}" for a, b in fn.pieces)
    return f"{pieces}|dom=[{_fmt(fn.dom.lo)},{_fmt(fn.dom.hi)}]"


def _write_report(out_dir: str, stem: str, command: str, header, rows, summary) -> str:
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"{stem}.{command}")
    with open(base + ".csv", "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    with open(base + ".summary", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True, default=_fmt)
        fh.write("\n")
    return base


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _pick_named(kind: str, table: dict, name: str | None):
    if name is not None:
        if name not in table:
            raise SchemaError(f"unknown {kind} {name!r}; have {sorted(table)}")
        return name, table[name]
    if len(table) == 1:
        return next(iter(table.items()))
    raise SchemaError(f"--{kind} required (choices: {sorted(table)})")


def _need_integrand(problem: Problem):
    if problem.integrand is None:
        raise SchemaError("this command needs an 'integrand' section")
    return problem.integrand


def _grid_list(text: str) -> tuple[int, ...]:
    try:
        grids = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise SchemaError("--grid expects a comma-separated list of integers") from None
    if not grids or any(g < 1 for g in grids):
        raise SchemaError("--grid entries must be positive")
    return grids


def cmd_conjugate(args) -> int:
    problem = load(args.problem)
    h = _need_integrand(problem)
    rows = []
    for i, ci in enumerate(h.cells):
        rows.append(("cell", i, "pole" if ci.pole is not None else "unit",
                     _fn_str(ci.fn), _fn_str(conjugate(ci.fn))))
    for j, fn in enumerate(h.nodes):
        rows.append(("node", j, "", _fn_str(fn), _fn_str(conjugate(fn))))
    summary = {"cells": h.complex.n_cells, "nodes": h.complex.n_nodes}
    base = _write_report(args.out, _stem(args.problem), "conjugate",
                         ("kind", "index", "weight", "function", "conjugate"), rows, summary)
    print(f"wrote {base}.csv")
    return 0


def cmd_recession(args) -> int:
    problem = load(args.problem)
    h = _need_integrand(problem)
    rows = []
    consistent = True
    for kind, seq in (("cell", [ci.fn for ci in h.cells]), ("node", list(h.nodes))):
        for i, fn in enumerate(seq):
            rec = recession(fn)
            match = fn_equal(rec, support_function(conjugate(fn).dom), 1e-12)
            consistent = consistent and match
            rows.append((kind, i, _fn_str(fn), _fn_str(rec), match))
    summary = {"support_identity": consistent}
    base = _write_report(args.out, _stem(args.problem), "recession",
                         ("kind", "index", "function", "recession", "support_identity"),
                         rows, summary)
    print(f"wrote {base}.csv")
    if not consistent:
        raise ToleranceError("recession/support identity failed")
    return 0


def cmd_check_map(args) -> int:
    problem = load(args.problem)
    names = [args.map] if args.map else sorted(problem.maps)
    if not names:
        raise SchemaError("problem file has no maps")
    rows = []
    summary = {}
    for name in names:
        if name not in problem.maps:
            raise SchemaError(f"unknown map {name!r}")
        rep = analyze_map(problem.maps[name], problem.base)
        for i, t in enumerate(rep.node_coords):
            rows.append((
                name, i, t, rep.isc[i], rep.osc[i], rep.outer_mu_regular[i],
                None if rep.mu_continuous is None else rep.mu_continuous[i],
                rep.tau_full[i],
                None if rep.full_lsc is None else rep.full_lsc[i],
            ))
        summary[name] = {
            "isc": all(rep.isc),
            "osc": all(rep.osc),
            "outer_mu_regular": all(rep.outer_mu_regular),
            "mu_continuous": None if rep.mu_continuous is None else all(rep.mu_continuous),
            "tau_full": all(rep.tau_full),
            "full_lsc": None if rep.full_lsc is None else all(rep.full_lsc),
        }
    base = _write_report(args.out, _stem(args.problem), "check-map",
                         ("map", "node", "t", "isc", "osc", "outer_mu_regular",
                          "mu_continuous", "tau_full", "full_lsc"), rows, summary)
    print(f"wrote {base}.csv")
    for name in names:
        flags = ",".join(f"{k}={_fmt(v)}" for k, v in summary[name].items() if v is not None)
        print(f"{name}: {flags}")
    return 0


def cmd_support(args) -> int:
    problem = load(args.problem)
    mname, smap = _pick_named("map", problem.maps, args.map)
    tname, theta = _pick_named("measure", problem.measures, args.measure)
    rows = []
    final = None
    for r in _grid_list(args.grid):
        lp, formula = sigma_CS(smap, theta, r)
        gap = formula - lp if formula != INF or lp != INF else 0.0
        rows.append((mname, tname, r, lp, formula, gap))
        final = gap
    summary = {"map": mname, "measure": tname, "final_gap": final,
               "lp": rows[-1][3], "formula": rows[-1][4]}
    base = _write_report(args.out, _stem(args.problem), "support",
                         ("map", "measure", "refinement", "lp", "formula", "gap"),
                         rows, summary)
    print(f"wrote {base}.csv")
    print(f"lp={_fmt(rows[-1][3])} formula={_fmt(rows[-1][4])} gap={_fmt(final)}")
    return 0


def cmd_duality(args) -> int:
    problem = load(args.problem)
    h = _need_integrand(problem)
    tname, theta = _pick_named("measure", problem.measures, args.measure)
    rep = duality_gap(h, theta, _grid_list(args.grid))
    rows = [
        (tname, r, p, rep.j_value, g)
        for r, p, g in zip(rep.refinements, rep.primal, rep.gaps)
    ]
    summary = {
        "measure": tname,
        "j_value": rep.j_value,
        "final_gap": rep.gaps[-1],
        "monotone": rep.monotone,
        "isc": rep.isc,
        "isc_violations": list(rep.isc_violations),
        "closure_ok": rep.closure_ok,
        "closure_witness": rep.closure_witness,
        "proper": rep.proper,
    }
    base = _write_report(args.out, _stem(args.problem), "duality",
                         ("measure", "refinement", "primal", "j_value", "gap"), rows, summary)
    print(f"wrote {base}.csv")
    print(f"J={_fmt(rep.j_value)} final_gap={_fmt(rep.gaps[-1])} isc={_fmt(rep.isc)} "
          f"closure={_fmt(rep.closure_ok)}")
    if not rep.monotone:
        raise ToleranceError("primal values were not monotone under refinement")
    return 0


def cmd_subdiff(args) -> int:
    problem = load(args.problem)
    h = _need_integrand(problem)
    fname, y = _pick_named("function", problem.functions, args.function)
    tname, theta = _pick_named("measure", problem.measures, args.measure)
    rep = check_sd(h, y, theta, tol=args.tol)
    rows = [("cell", i, ok, rep.max_pointwise_gap if not ok else 0.0)
            for i, ok in enumerate(rep.cell_ok)]
    rows += [("atom", j, ok, None) for (j, _), ok in zip(theta.atoms, rep.atom_ok)]
    summary = {
        "function": fname,
        "measure": tname,
        "ok": rep.ok,
        "in_domain": rep.in_domain,
        "max_pointwise_gap": rep.max_pointwise_gap,
        "fenchel_gap": rep.fenchel_gap,
    }
    base = _write_report(args.out, _stem(args.problem), "subdiff",
                         ("kind", "index", "ok", "gap"), rows, summary)
    print(f"wrote {base}.csv")
    print(f"ok={_fmt(rep.ok)} fenchel_gap={_fmt(rep.fenchel_gap)}")
    return 0


def cmd_proper(args) -> int:
    problem = load(args.problem)
    h = _need_integrand(problem)
    rep = check_proper(h, problem.base)
    rows = []
    if rep.proper:
        for i, t in enumerate(h.complex.nodes):
            rows.append(("ybar", i, t, rep.ybar.values[i]))
        for i, x in enumerate(rep.xbar):
            rows.append(("xbar", i, None, x))
    summary = {"proper": rep.proper, "alpha": rep.alpha, "reason": rep.reason}
    base = _write_report(args.out, _stem(args.problem), "proper",
                         ("kind", "index", "t", "value"), rows, summary)
    print(f"wrote {base}.csv")
    print(f"proper={_fmt(rep.proper)}" + ("" if rep.proper else f" reason={rep.reason}"))
    return 0


def cmd_ic_check(args) -> int:
    problem = load(args.problem)
    h = _need_integrand(problem)
    rep = check_ic_condition(h, problem.base)
    rows = [("witness", t, v) for t, v in rep.witnesses]
    summary = {"ok": rep.ok, "witnesses": [[t, v] for t, v in rep.witnesses]}
    base = _write_report(args.out, _stem(args.problem), "ic-check",
                         ("kind", "t", "value"), rows, summary)
    print(f"wrote {base}.csv")
    print(f"ok={_fmt(rep.ok)}")
    return 0


def cmd_closure_check(args) -> int:
    problem = load(args.problem)
    h = _need_integrand(problem)
    rep = check_closure_condition(h, problem.base, refinement=int(args.grid))
    summary = {"ok": rep.ok, "witness": rep.witness, "dom_subset_ok": rep.dom_subset_ok}
    rows = [("closure", rep.ok, rep.witness), ("dom_subset", rep.dom_subset_ok, None)]
    base = _write_report(args.out, _stem(args.problem), "closure-check",
                         ("kind", "ok", "witness"), rows, summary)
    print(f"wrote {base}.csv")
    print(f"ok={_fmt(rep.ok)} dom_subset={_fmt(rep.dom_subset_ok)}")
    return 0


def cmd_selftest(args) -> int:
    return selftest_mod.run(args.seed, sys.stdout)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="convdual",
        description="convex-duality experiments on interval cell complexes",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_problem=True):
        p = sub.add_parser(name)
        if needs_problem:
            p.add_argument("problem", help="problem file (JSON)")
            p.add_argument("--out", default=".", help="report output directory")
        p.set_defaults(handler=fn)
        return p

    add("conjugate", cmd_conjugate)
    add("recession", cmd_recession)
    p = add("check-map", cmd_check_map)
    p.add_argument("--map", default=None)
    p = add("support", cmd_support)
    p.add_argument("--map", default=None)
    p.add_argument("--measure", default=None)
    p.add_argument("--grid", default="64,512,4096")
    p = add("duality", cmd_duality)
    p.add_argument("--measure", default=None)
    p.add_argument("--grid", default="8,64,512,4096")
    p = add("subdiff", cmd_subdiff)
    p.add_argument("--function", default=None)
    p.add_argument("--measure", default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    add("proper", cmd_proper)
    add("ic-check", cmd_ic_check)
    p = add("closure-check", cmd_closure_check)
    p.add_argument("--grid", default="1")
    p = add("selftest", cmd_selftest, needs_problem=False)
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 2
    except InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 3
    except ToleranceError as e:
        print(f"tolerance breach: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
