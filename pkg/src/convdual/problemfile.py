"""Problem files: a single JSON object describing a complex, a base measure,
an integrand field, and named maps / measures / functions over the complex.

Numbers round-trip exactly (shortest-repr serialization); ``null`` encodes
the missing endpoint conventions spelled out next to each field.  Schema
violations raise :class:`SchemaError` with a path-like message.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .convex import INF, Interval, PolyConvexFn
from .errors import SchemaError
from .functionals import CellIntegrand, IntegrandField
from .measures import BaseMeasure, SignedMeasure
from .plfun import PLFunction
from .setmap import CellBand, CellComplex, IntervalMap, UnionMap


@dataclass(frozen=True)
class Problem:
    name: str
    complex: CellComplex
    base: BaseMeasure
    integrand: IntegrandField | None
    maps: dict[str, UnionMap] = field(default_factory=dict)
    measures: dict[str, SignedMeasure] = field(default_factory=dict)
    functions: dict[str, PLFunction] = field(default_factory=dict)


def _endpoint(v, sign: float, where: str) -> float:
    if v is None:
        return sign * INF
    if isinstance(v, (int, float)) and math.isfinite(v):
        return float(v)
    raise SchemaError(f"{where}: endpoint must be a finite number or null")


def _interval(obj, where: str) -> Interval:
    if obj is None:
        return Interval.empty()
    if not (isinstance(obj, list) and len(obj) == 2):
        raise SchemaError(f"{where}: interval must be [lo, hi] or null")
    lo = _endpoint(obj[0], -1.0, where)
    hi = _endpoint(obj[1], 1.0, where)
    if lo > hi:
        raise SchemaError(f"{where}: interval endpoints out of order")
    return Interval(lo, hi)


def _fn(obj, where: str) -> PolyConvexFn:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object with 'pieces' and 'dom'")
    pieces = obj.get("pieces")
    if not (isinstance(pieces, list) and pieces):
        raise SchemaError(f"{where}.pieces: need a nonempty list of [slope, intercept]")
    ps = []
    for k, p in enumerate(pieces):
        if not (isinstance(p, list) and len(p) == 2):
            raise SchemaError(f"{where}.pieces[{k}]: expected [slope, intercept]")
        ps.append((float(p[0]), float(p[1])))
    dom = _interval(obj.get("dom", [None, None]), f"{where}.dom")
    if dom.is_empty:
        raise SchemaError(f"{where}.dom: must be nonempty")
    try:
        return PolyConvexFn(tuple(ps), dom)
    except SchemaError as e:
        raise SchemaError(f"{where}: {e}") from None


def _band(obj, where: str) -> CellBand | None:
    if obj is None:
        return None
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object with 'l' and 'u' or null")

    def side(key: str, sign: float) -> tuple[float, float]:
        v = obj.get(key)
        if v is None:
            return (sign * INF, sign * INF)
        if not (isinstance(v, list) and len(v) == 2):
            raise SchemaError(f"{where}.{key}: expected [left, right] or null")
        return (float(v[0]), float(v[1]))

    ll, lr = side("l", -1.0)
    ul, ur = side("u", 1.0)
    try:
        return CellBand(ll, lr, ul, ur)
    except SchemaError as e:
        raise SchemaError(f"{where}: {e}") from None


def load(path: str) -> Problem:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}: invalid JSON ({e})") from None
    return parse(data, name=path)


def parse(data, name: str = "<memory>") -> Problem:
    if not isinstance(data, dict):
        raise SchemaError("problem file must be a JSON object")
    nodes = data.get("nodes")
    if not (isinstance(nodes, list) and len(nodes) >= 2):
        raise SchemaError("nodes: need at least two node coordinates")
    try:
        cpx = CellComplex(tuple(float(t) for t in nodes))
    except (TypeError, ValueError, SchemaError) as e:
        raise SchemaError(f"nodes: {e}") from None

    bm = data.get("base_measure")
    if bm is None:
        base = BaseMeasure.lebesgue(cpx)
    else:
        dens = bm.get("densities") if isinstance(bm, dict) else None
        if not (isinstance(dens, list) and len(dens) == cpx.n_cells):
            raise SchemaError("base_measure.densities: need one density per cell")
        base = BaseMeasure(cpx, tuple(float(d) for d in dens))

    integrand = None
    ig = data.get("integrand")
    if ig is not None:
        cells_obj = ig.get("cells")
        nodes_obj = ig.get("nodes")
        if not (isinstance(cells_obj, list) and len(cells_obj) == cpx.n_cells):
            raise SchemaError("integrand.cells: need one integrand per cell")
        if not (isinstance(nodes_obj, list) and len(nodes_obj) == cpx.n_nodes):
            raise SchemaError("integrand.nodes: need one integrand per node")
        cells = []
        for i, cobj in enumerate(cells_obj):
            fn = _fn(cobj, f"integrand.cells[{i}]")
            pole = cobj.get("pole")
            if pole is not None:
                pole = float(pole)
                c, d = cpx.cell(i)
                if pole not in (c, d):
                    raise SchemaError(
                        f"integrand.cells[{i}].pole: must equal a cell endpoint"
                    )
            cells.append(CellIntegrand(fn, pole))
        node_fns = tuple(_fn(o, f"integrand.nodes[{j}]") for j, o in enumerate(nodes_obj))
        try:
            integrand = IntegrandField(cpx, tuple(cells), node_fns)
        except SchemaError as e:
            raise SchemaError(f"integrand: {e}") from None

    maps: dict[str, UnionMap] = {}
    for mname, mobj in (data.get("maps") or {}).items():
        branches_obj = mobj.get("branches") if isinstance(mobj, dict) else None
        if not (isinstance(branches_obj, list) and branches_obj):
            raise SchemaError(f"maps.{mname}.branches: need at least one branch")
        branches = []
        for bi, bobj in enumerate(branches_obj):
            cells_obj = bobj.get("cells")
            nodes_obj = bobj.get("nodes")
            where = f"maps.{mname}.branches[{bi}]"
            if not (isinstance(cells_obj, list) and len(cells_obj) == cpx.n_cells):
                raise SchemaError(f"{where}.cells: need one band per cell")
            if not (isinstance(nodes_obj, list) and len(nodes_obj) == cpx.n_nodes):
                raise SchemaError(f"{where}.nodes: need one interval per node")
            bands = tuple(_band(o, f"{where}.cells[{i}]") for i, o in enumerate(cells_obj))
            ivs = tuple(_interval(o, f"{where}.nodes[{j}]") for j, o in enumerate(nodes_obj))
            branches.append(IntervalMap(cpx, bands, ivs))
        maps[mname] = UnionMap(tuple(branches))

    measures: dict[str, SignedMeasure] = {}
    for tname, tobj in (data.get("measures") or {}).items():
        dens = tobj.get("densities") if isinstance(tobj, dict) else None
        if not (isinstance(dens, list) and len(dens) == cpx.n_cells):
            raise SchemaError(f"measures.{tname}.densities: need one density per cell")
        atoms_obj = tobj.get("atoms", [])
        atoms = []
        for k, a in enumerate(atoms_obj):
            if not (isinstance(a, list) and len(a) == 2):
                raise SchemaError(f"measures.{tname}.atoms[{k}]: expected [node, weight]")
            atoms.append((int(a[0]), float(a[1])))
        try:
            measures[tname] = SignedMeasure(
                base, tuple(float(d) for d in dens), tuple(atoms)
            )
        except SchemaError as e:
            raise SchemaError(f"measures.{tname}: {e}") from None

    functions: dict[str, PLFunction] = {}
    for fname, fobj in (data.get("functions") or {}).items():
        vals = fobj.get("values") if isinstance(fobj, dict) else None
        if not (isinstance(vals, list) and len(vals) == cpx.n_nodes):
            raise SchemaError(f"functions.{fname}.values: need one value per node")
        functions[fname] = PLFunction(cpx, tuple(float(v) for v in vals))

    return Problem(name, cpx, base, integrand, maps, measures, functions)


def _iv_json(iv: Interval):
    if iv.is_empty:
        return None
    return [None if iv.lo == -INF else iv.lo, None if iv.hi == INF else iv.hi]


def _fn_json(fn: PolyConvexFn):
    return {"pieces": [[a, b] for a, b in fn.pieces], "dom": _iv_json(fn.dom)}


def dump(problem: Problem) -> dict:
    """Serializable dict; floats round-trip exactly via json."""
    out: dict = {"nodes": list(problem.complex.nodes)}
    out["base_measure"] = {"densities": list(problem.base.densities)}
    if problem.integrand is not None:
        cells = []
        for ci in problem.integrand.cells:
            obj = _fn_json(ci.fn)
            if ci.pole is not None:
                obj["pole"] = ci.pole
            cells.append(obj)
        out["integrand"] = {
            "cells": cells,
            "nodes": [_fn_json(fn) for fn in problem.integrand.nodes],
        }
    if problem.maps:
        maps = {}
        for name, u in problem.maps.items():
            branches = []
            for b in u.branches:
                cells = []
                for band in b.cells:
                    if band is None:
                        cells.append(None)
                        continue
                    obj = {}
                    obj["l"] = None if math.isinf(band.l_left) else [band.l_left, band.l_right]
                    obj["u"] = None if math.isinf(band.u_left) else [band.u_left, band.u_right]
                    cells.append(obj)
                branches.append(
                    {"cells": cells, "nodes": [_iv_json(v) for v in b.node_values]}
                )
            maps[name] = {"branches": branches}
        out["maps"] = maps
    if problem.measures:
        out["measures"] = {
            name: {
                "densities": list(m.densities),
                "atoms": [[j, w] for j, w in m.atoms],
            }
            for name, m in problem.measures.items()
        }
    if problem.functions:
        out["functions"] = {
            name: {"values": list(f.values)} for name, f in problem.functions.items()
        }
    return out


def save(problem: Problem, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dump(problem), fh, indent=1, sort_keys=True)
        fh.write("\n")
