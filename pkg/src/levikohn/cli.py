"""Command line front end: problem files in, deterministic reports out.

Exit codes: 0 success, 1 input error, 2 budget exceeded, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from dataclasses import dataclass, field, is_dataclass, fields
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import BudgetError, DegenerateFrameError, InputError, NotRealError, ParseError
from .expr import parse_constant, parse_expression
from .gaussian import GaussianRational
from .kohn import BUDGET_EXHAUSTED, CERTIFIED, STUCK, run_chain, verify_certificate
from .levi import (
    DefiningFunction,
    HermitianMetric,
    classify_point,
    complex_hessian,
    frame_trace_det,
    gradient_form,
    graph_frame,
    levi_matrix_on_frame,
    sample_boundary,
)
from .poly import HermitianPolynomial
from .variety import (
    HoloMap,
    PolyVectorField,
    VarietyIdeal,
    bracket_flag,
    complex_tangential_check,
    holomorphic_dimension,
    involutivity_check,
    tangency_order,
)

log = logging.getLogger("levikohn")

COMMANDS = ("levi", "classify", "kohn", "holdim", "brackets", "tangency", "ctangent")


# --- problem files -----------------------------------------------------------

@dataclass
class ProblemFile:
    n: int
    r: HermitianPolynomial
    defining_text: str
    q: int | None = None
    metrics: dict = field(default_factory=dict)
    varieties: dict = field(default_factory=dict)
    vector_fields: dict = field(default_factory=dict)
    holo_maps: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    sampling: dict = field(default_factory=dict)
    budgets: dict = field(default_factory=dict)

    @property
    def defining_function(self) -> DefiningFunction:
        return DefiningFunction(self.r)


def _expr(text, n, where, letter="z"):
    if not isinstance(text, str):
        text = str(text)
    try:
        return parse_expression(text, n, letter)
    except ParseError as exc:
        raise ParseError(f"{where}: {exc.message}", exc.line, exc.column) from None


def _coordinate(value, where):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    try:
        return complex(parse_constant(str(value)))
    except ParseError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_problem(text: str) -> ProblemFile:
    """Parse a JSON problem file.

    The defining function is given either as "r = <expr>" or as a bare
    expression; all expressions are exact (no float literals).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise InputError("problem file must be a JSON object")
    try:
        n = int(data["dimension"])
        dtext = str(data["defining_function"])
    except KeyError as exc:
        raise InputError(f"missing required field {exc.args[0]!r}") from None
    return parse_problem_data(data, n, dtext)


def parse_defining_function(text: str, n: int) -> HermitianPolynomial:
    body = text.strip()
    if body.startswith("r") and "=" in body and body.split("=", 1)[0].strip() == "r":
        body = body.split("=", 1)[1]
    r = _expr(body, n, "defining_function")
    if not r.is_real():
        raise NotRealError("defining function not real")
    return r


def parse_problem_data(data: dict, n: int, dtext: str) -> ProblemFile:
    r = parse_defining_function(dtext, n)
    metrics = {}
    named = dict(data.get("metrics") or {})
    if data.get("metric") is not None:
        named.setdefault("default", data["metric"])
    for name, rows in named.items():
        if rows == "graph":
            metrics[name] = HermitianMetric.graph()
            continue
        H = tuple(tuple(parse_constant(str(c)) for c in row) for row in rows)
        if len(H) != n:
            raise InputError(f"metric {name!r} must be {n}x{n}")
        metrics[name] = HermitianMetric(H)
    varieties = {}
    for name, gens in (data.get("varieties") or {}).items():
        polys = [_expr(g, n, f"varieties.{name}") for g in gens]
        bad = [str(p) for p in polys if not p.is_real()]
        if bad:
            raise InputError(f"variety {name!r} has non-real generators; split into real parts")
        varieties[name] = VarietyIdeal(tuple(polys))
    vfields = {}
    for name, specs in (data.get("vector_fields") or {}).items():
        if isinstance(specs, dict):
            specs = [specs]
        out = []
        for k, spec in enumerate(specs):
            kind = spec.get("kind", "real")
            coeffs = tuple(_expr(c, n, f"vector_fields.{name}[{k}]") for c in spec["coefficients"])
            out.append(PolyVectorField(coeffs, kind))
        vfields[name] = out
    maps = {}
    for name, spec in (data.get("holo_maps") or {}).items():
        d = int(spec.get("parameters", 1))
        comps = tuple(_expr(c, d, f"holo_maps.{name}", letter="w") for c in spec["components"])
        maps[name] = HoloMap(comps)
    points = {}
    for name, coords in (data.get("points") or {}).items():
        if len(coords) != n:
            raise InputError(f"point {name!r} needs {n} coordinates")
        points[name] = tuple(_coordinate(c, f"points.{name}") for c in coords)
    q = data.get("q")
    return ProblemFile(
        n=n, r=r, defining_text=dtext, q=None if q is None else int(q), metrics=metrics,
        varieties=varieties, vector_fields=vfields, holo_maps=maps, points=points,
        sampling=dict(data.get("sampling") or {}), budgets=dict(data.get("budgets") or {}),
    )


# --- reports -----------------------------------------------------------------

@dataclass
class Report:
    command: str
    options: dict
    results: dict
    verdicts: dict = field(default_factory=dict)
    heuristics: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def to_jsonable(obj: Any):
    if isinstance(obj, HermitianPolynomial):
        return str(obj)
    if isinstance(obj, GaussianRational):
        return {"re": _frac(obj.re), "im": _frac(obj.im)}
    if isinstance(obj, Fraction):
        return _frac(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def emit_report(report: Report, fmt: str = "json", include_timings: bool = False) -> bytes:
    """JSON (sorted keys, exact rationals as strings) or readable text."""
    if fmt == "json":
        payload = {
            "command": report.command,
            "options": report.options,
            "results": report.results,
            "verdicts": report.verdicts,
            "heuristics": report.heuristics,
            "warnings": report.warnings,
        }
        if include_timings:
            payload["timings"] = report.timings
        return (json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n").encode()
    if fmt != "text":
        raise InputError(f"unknown format {fmt!r}")
    lines = [f"command: {report.command}"]
    for k in sorted(report.options):
        lines.append(f"  option {k} = {to_jsonable(report.options[k])}")
    lines.append("verdicts:")
    for k in sorted(report.verdicts):
        lines.append(f"  {k}: {to_jsonable(report.verdicts[k])}")
    lines.append("results:")
    _text_lines(to_jsonable(report.results), lines, "  ")
    if report.heuristics:
        lines.append("heuristic steps:")
        for h in report.heuristics:
            lines.append(f"  {json.dumps(to_jsonable(h), sort_keys=True)}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    for k in sorted(report.timings):
        lines.append(f"time {k}: {report.timings[k]:.3f}s")
    return ("\n".join(lines) + "\n").encode()


def _text_lines(obj, lines, indent):
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{indent}{k}:")
                _text_lines(v, lines, indent + "  ")
            else:
                lines.append(f"{indent}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{indent}-")
                _text_lines(v, lines, indent + "  ")
            else:
                lines.append(f"{indent}- {v}")
    else:
        lines.append(f"{indent}{obj}")


# --- commands ----------------------------------------------------------------

def _pick(mapping: dict, name: str | None, what: str):
    if not mapping:
        raise InputError(f"problem file has no {what}")
    if name is None:
        if len(mapping) == 1:
            return next(iter(mapping.items()))
        raise InputError(f"several {what} defined; choose one by name")
    if name not in mapping:
        raise InputError(f"unknown {what[:-1] if what.endswith('s') else what} {name!r}")
    return name, mapping[name]


def _base_point(p: ProblemFile, name: str | None):
    if name is not None:
        return _pick(p.points, name, "points")[1]
    if "base" in p.points:
        return p.points["base"]
    return tuple(0j for _ in range(p.n))


def _metric(p: ProblemFile, name: str | None):
    if name is None:
        return p.metrics.get("default")
    if name == "identity":
        return None
    if name == "graph":
        return HermitianMetric.graph()
    return _pick(p.metrics, name, "metrics")[1]


def _sampling_box(p: ProblemFile):
    box = p.sampling.get("box")
    if box is None:
        return [(-1.0, 1.0)] * (2 * p.n)
    if len(box) == 2 and not isinstance(box[0], (list, tuple)):
        return [tuple(box)] * (2 * p.n)
    return [tuple(b) for b in box]


def _polys(gens):
    return [str(g) for g in gens]


def cmd_levi(p: ProblemFile, args) -> Report:
    d = p.defining_function
    frame = graph_frame(d)
    m = levi_matrix_on_frame(d, frame)
    trace, det_ = frame_trace_det(m)
    results = {
        "defining_function": str(p.r),
        "gradient_form": _polys(gradient_form(d)),
        "complex_hessian": [_polys(row) for row in complex_hessian(d)],
        "graph_frame": [_polys(v) for v in frame.vectors],
        "graph_frame_scale": None if frame.scale is None else str(frame.scale),
        "levi_matrix": [_polys(row) for row in m.entries],
        "trace": str(trace),
        "det": str(det_),
    }
    return Report("levi", {}, results)


def cmd_classify(p: ProblemFile, args) -> Report:
    d = p.defining_function
    q = args.q if args.q is not None else p.q
    if q is None:
        raise InputError("classify needs --q or a q entry in the problem file")
    metric = _metric(p, args.metric)
    tol = args.tol if args.tol is not None else 1e-9
    count = args.samples if args.samples is not None else int(p.sampling.get("count", 0))
    seed = args.seed if args.seed is not None else int(p.sampling.get("seed", 0))
    warns = []

    def classify(pt):
        try:
            return _classification(classify_point(d, pt, q, metric, tol))
        except DegenerateFrameError:
            if metric is None or metric.kind != "graph":
                raise
            warns.append(f"graph frame degenerate at {pt}; used the identity metric there")
            out = _classification(classify_point(d, pt, q, None, tol))
            out["metric"] = "identity"
            return out

    named = []
    for name in sorted(p.points):
        named.append({"name": name, **classify(p.points[name])})
    sampled = []
    if count:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            pts = sample_boundary(d, _sampling_box(p), count, seed)
        warns.extend(str(w.message) for w in caught)
        for pt in pts:
            try:
                sampled.append(classify(pt))
            except InputError as exc:
                warns.append(f"skipped sample: {exc}")
    every = named + sampled
    verdicts = {
        "min_q_margin": min((e["q_margin"] for e in every), default=None),
        "q_margin_nonnegative_everywhere": all(e["q_margin"] >= -tol for e in every),
        "q_convex_everywhere": all(e["q_convex"] for e in every),
        "pseudoconvex_everywhere": all(e["pseudoconvex"] for e in every),
        "not_pseudoconvex_somewhere": any(not e["pseudoconvex"] for e in every),
        "z_q_at_named_points": {e["name"]: e["z_q"] for e in named},
        "points_examined": len(every),
    }
    opts = {"q": q, "metric": args.metric or ("default" if "default" in p.metrics else "identity"), "samples": count, "seed": seed, "tol": tol}
    return Report("classify", opts, {"named_points": named, "samples": sampled}, verdicts, warnings=warns)


def _classification(rep):
    return {
        "point": rep.point,
        "eigenvalues": list(rep.eigenvalues),
        "signature": list(rep.signature),
        "q_margin": rep.q_margin,
        "pseudoconvex": rep.pseudoconvex,
        "q_convex": rep.q_convex,
        "z_q": rep.z_q,
    }


def serialize_certificate(cert: dict) -> dict:
    w = cert["unit_witness"]
    return {
        "q": cert["q"],
        "h": cert["h"],
        "minor_size": cert["minor_size"],
        "rows": [{"provenance": a, "source": b} for a, b in cert["rows"]],
        "generators": _polys(cert["generators"]),
        "records": list(cert["records"]),
        "sos_certificates": [
            {
                "source": str(c.source),
                "weights": [_frac(Fraction(x)) for x in c.weights],
                "parts": _polys(c.parts),
                "source_generator": c.source_generator,
                "scalar": c.scalar,
                "source_witness": None if c.source_witness is None
                else _polys(c.source_witness.cofactors),
            }
            for c in cert["sos_certificates"]
        ],
        "unit_witness": {"power": w.power, "cofactors": _polys(w.cofactors)},
    }


def cmd_kohn(p: ProblemFile, args) -> Report:
    d = p.defining_function
    q = args.q if args.q is not None else p.q
    if q is None:
        raise InputError("kohn needs --q or a q entry in the problem file")
    max_h = args.max_steps if args.max_steps is not None else int(p.budgets.get("max_h", 10))
    limit = int(p.budgets.get("groebner_limit", 100_000))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = run_chain(d, q, max_h=max_h, limit=limit)
    state = rep.state
    results = {
        "status": state.status,
        "h": state.h,
        "generators": _polys(state.ideal.generators),
        "records": list(state.ideal.records),
        "history": list(state.history),
        "module_rows": [{"provenance": r.provenance, "source": r.source} for r in state.module.rows],
    }
    verdicts = {"status": state.status, "h": state.h}
    heur = [
        {"rule": "hermitian-sum-of-squares", "source": str(c.source), "parts": _polys(c.parts)}
        for c in state.ideal.sos_certificates
    ]
    if state.status == CERTIFIED:
        results["certificate"] = serialize_certificate(rep.certificate)
        verdicts["certificate_verified"] = verify_certificate(rep.certificate, d)
        verdicts["subelliptic_estimate_certified_in_degree"] = q
    elif state.status == STUCK:
        verdicts["stuck_modulo_implemented_radical"] = True
        results["variety"] = _polys(rep.variety.generators)
        z0 = _base_point(p, args.point)
        try:
            hd = holomorphic_dimension(
                d, rep.variety, z0, samples=args.samples or 12,
                seed=args.seed if args.seed is not None else 0,
                tol=args.tol if args.tol is not None else 1e-7,
            )
            results["holomorphic_dimension"] = {"value": hd.value, "table": list(hd.table),
                                                "rank_jumps": hd.rank_jumps, "base_point": z0}
            verdicts["holomorphic_dimension"] = hd.value
            verdicts["holomorphic_dimension_at_least_q"] = hd.value >= q
        except InputError as exc:
            results["holomorphic_dimension"] = {"error": str(exc), "base_point": z0}
    verdicts["heuristic_fired"] = state.heuristic_fired
    opts = {"q": q, "max_steps": max_h, "groebner_limit": limit}
    return Report("kohn", opts, results, verdicts, heur, [str(w.message) for w in caught])


def cmd_holdim(p: ProblemFile, args) -> Report:
    d = p.defining_function
    name, V = _pick(p.varieties, args.variety, "varieties")
    z0 = _base_point(p, args.point)
    radius = float(p.sampling.get("radius", 0.5))
    hd = holomorphic_dimension(
        d, V, z0, radius=radius, samples=args.samples or 12,
        seed=args.seed if args.seed is not None else 0,
        tol=args.tol if args.tol is not None else 1e-7,
    )
    results = {"variety": name, "base_point": z0, "value": hd.value, "table": list(hd.table),
               "rank_jumps": hd.rank_jumps}
    return Report("holdim", {"variety": name, "radius": radius}, results,
                  {"holomorphic_dimension": hd.value})


def cmd_brackets(p: ProblemFile, args) -> Report:
    fname, fs = _pick(p.vector_fields, args.fields, "vector_fields")
    vname, M = _pick(p.varieties, args.variety, "varieties")
    z0 = _base_point(p, args.point)
    max_depth = int(p.budgets.get("max_depth", 4))
    flag = bracket_flag(fs, M, z0, max_depth=max_depth, n=p.n)
    inv = involutivity_check(fs, M, samples=args.samples or 8,
                             seed=args.seed if args.seed is not None else 0,
                             center=z0, radius=float(p.sampling.get("radius", 1.0)))
    results = {"flag": flag, "involutive": inv.ok, "involutivity_residual": inv.max_violation}
    verdicts = {"finite_type": flag.finite_type, "dims": list(flag.dims), "involutive": inv.ok}
    return Report("brackets", {"fields": fname, "variety": vname}, results, verdicts)


def cmd_tangency(p: ProblemFile, args) -> Report:
    d = p.defining_function
    name, phi = _pick(p.holo_maps, args.map, "holo_maps")
    max_order = args.max_order if args.max_order is not None else int(p.budgets.get("max_order", 24))
    res = tangency_order(d, phi, max_order)
    if res.identically_zero:
        verdict = "identically-zero"
    elif res.inconclusive:
        verdict = f"order > {max_order}"
    else:
        verdict = res.order
    results = {"map": name, "order": verdict, "composition": res.composition.to_string("w")}
    return Report("tangency", {"map": name, "max_order": max_order}, results, {"order": verdict})


def cmd_ctangent(p: ProblemFile, args) -> Report:
    d = p.defining_function
    name, M = _pick(p.varieties, args.variety, "varieties")
    z0 = _base_point(p, args.point)
    res = complex_tangential_check(
        d, M, samples=args.samples or 12, seed=args.seed if args.seed is not None else 0,
        tol=args.tol if args.tol is not None else 1e-7, center=z0,
        radius=float(p.sampling.get("radius", 1.0)),
    )
    return Report("ctangent", {"variety": name}, {"max_violation": res.max_violation,
                                                   "samples": res.samples},
                  {"complex_tangential": res.ok})


_DISPATCH = {
    "levi": cmd_levi,
    "classify": cmd_classify,
    "kohn": cmd_kohn,
    "holdim": cmd_holdim,
    "brackets": cmd_brackets,
    "tangency": cmd_tangency,
    "ctangent": cmd_ctangent,
}


def run_command(cmd: str, problem: ProblemFile, args) -> Report:
    if cmd not in _DISPATCH:
        raise InputError(f"unknown command {cmd!r}")
    t0 = time.perf_counter()
    report = _DISPATCH[cmd](problem, args)
    report.timings["total"] = time.perf_counter() - t0
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levikohn", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", required=True, help="problem file (JSON)")
    ap.add_argument("--q", type=int)
    ap.add_argument("--max-steps", type=int, dest="max_steps")
    ap.add_argument("--samples", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--metric")
    ap.add_argument("--max-order", type=int, dest="max_order")
    ap.add_argument("--variety")
    ap.add_argument("--fields")
    ap.add_argument("--map")
    ap.add_argument("--point")
    ap.add_argument("--timings", action="store_true", help="include timings in JSON output")
    ap.add_argument("--output", help="write the report here instead of stdout")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        with open(args.input, encoding="utf-8") as fh:
            problem = parse_problem(fh.read())
        report = run_command(args.command, problem, args)
        out = emit_report(report, args.format, include_timings=args.timings)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(out)
    else:
        sys.stdout.buffer.write(out)
    if report.verdicts.get("status") == BUDGET_EXHAUSTED:
        print("budget exceeded: chain did not stabilize within --max-steps", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
