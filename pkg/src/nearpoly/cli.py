"""Command-line front end: ``nearpoly construct | analyze | verify | catalog``.

Exit codes: 0 all checks pass, 1 a mathematical inconsistency or failed
audit, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import polar
from .catalog import get_entry, load_catalog
from .graph import (
    DistanceGraph,
    GraphError,
    IntersectionArray,
    NotDistanceRegular,
    check_near_polygon,
    extract_intersection_array,
    phij_table,
    verify_local_distribution,
)
from .spectra import RepeatedEigenvalue, audit_idempotents, spectral_data
from .theorems import (
    cauchy_schwarz_audit,
    check_span_witness,
    classify,
    hypotheses,
)

EXIT_OK, EXIT_INCONSISTENT, EXIT_USAGE = 0, 1, 2
IDEMPOTENT_VERTEX_LIMIT = 2_000


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    source: str  # "construct" | "graph" | "array" | "catalog"
    value: object
    checks: list[str] = field(default_factory=lambda: ["all"])
    fmt: str = "text"
    vertex_cap: int | None = None
    seed: int = 0x5EED
    with_graph: bool = False
    catalog_file: str | None = None

    def __post_init__(self):
        if self.source not in ("construct", "graph", "array", "catalog"):
            raise UsageError(f"unknown input source {self.source!r}")
        if self.value in (None, ""):
            raise UsageError("an input source must be given")


def _subscripts(i: int) -> str:
    return str(i).translate(str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉"))


# -- construct ------------------------------------------------------------------------

def construct_graph(kind: str, d: int, n: int | None = None, family: str | None = None,
                    p: int | None = None, m: int = 1):
    """Build a graph and its closed-form intersection array."""
    if kind == "hamming":
        if n is None:
            raise UsageError("hamming needs --n")
        g = polar.build_hamming_graph(d, n)
        return g, polar.hamming_array(d, n)
    if family is None or p is None:
        raise UsageError("dual-polar needs --family and --p")
    space = polar.make_polar_space(family, d, p, m)
    g = polar.build_dual_polar_graph(space)
    predicted = polar.dual_polar_array(space.q, d, space.epsilon) if d >= 1 else None
    return g, predicted


def cmd_construct(args) -> int:
    g, predicted = construct_graph(args.kind, args.d, getattr(args, "n", None),
                                   getattr(args, "family", None), getattr(args, "p", None),
                                   getattr(args, "m", 1))
    out = args.out or f"{g.name.replace('(', '_').replace(')', '').replace(',', '_')}.json"
    g.save(out)
    info = {"name": g.name, "num_vertices": g.n, "num_edges": g.num_edges,
            "predicted_array": str(predicted), "output": str(out)}
    if args.format == "json":
        print(json.dumps(info, indent=2))
    else:
        print(f"{g.name}: {g.n} vertices, {g.num_edges} edges")
        print(f"predicted intersection array {predicted}")
        print(f"wrote {out}")
    return EXIT_OK


# -- analyze ----------------------------------------------------------------------------

def _load_input(cfg: RunConfig):
    """Return (array, graph-or-None, label)."""
    if cfg.source == "array":
        return IntersectionArray.parse(str(cfg.value)), None, str(cfg.value)
    if cfg.source == "catalog":
        try:
            entry = get_entry(str(cfg.value), cfg.catalog_file)
        except KeyError:
            raise UsageError(f"no catalog entry named {cfg.value!r}") from None
        g = entry.build_graph() if cfg.with_graph and entry.construct else None
        return entry.array, g, entry.name
    if cfg.source == "graph":
        g = DistanceGraph.load(cfg.value)
        return None, g, g.name or str(cfg.value)
    kind, params = cfg.value
    g, _ = construct_graph(kind, **params)
    return None, g, g.name


def analyze(cfg: RunConfig) -> tuple[dict, int]:
    """Full report and exit code for one input."""
    arr, g, label = _load_input(cfg)
    if g is not None and cfg.vertex_cap is not None:
        g.distances(cap=cfg.vertex_cap)
    report: dict = {"input": label}
    near = None
    if g is not None:
        report["graph"] = {"name": g.name, "num_vertices": g.n, "num_edges": g.num_edges}
        try:
            extracted = extract_intersection_array(g)
        except NotDistanceRegular as exc:
            report["distance_regular"] = False
            report["witness"] = {k: str(v) for k, v in exc.witness.items()}
            return report, EXIT_INCONSISTENT
        report["distance_regular"] = True
        if arr is not None and arr != extracted:
            report["array_mismatch"] = {"given": str(arr), "extracted": str(extracted)}
            return report, EXIT_INCONSISTENT
        arr = extracted
        near = check_near_polygon(g, arr)
        report["near_polygon"] = {
            "is_near_polygon": near.is_near_polygon, "via_cliques": near.via_cliques,
            "via_forbidden_subgraph": near.via_forbidden_subgraph,
            "is_near_2d_gon": near.is_near_2d_gon,
            "witness": None if near.witness is None else {k: str(v) for k, v in near.witness.items()},
        }
    a, b, c = arr.a, arr.b_full, arr.c_full
    report["intersection_array"] = {"string": str(arr), "d": arr.d, "k": arr.k,
                                    "c": c, "a": a, "b": b,
                                    "k_i": [str(x) for x in arr.sphere_sizes()],
                                    "num_vertices": str(arr.num_vertices)}
    if near is None:
        report["near_polygon"] = {"is_near_polygon": arr.is_near_polygon_array(),
                                  "is_near_2d_gon": arr.is_near_polygon_array()
                                  and arr.is_near_2d_gon_array(), "source": "array"}
    try:
        sd = spectral_data(arr)
    except (RepeatedEigenvalue, ValueError) as exc:
        report["spectrum_error"] = str(exc)
        return report, EXIT_INCONSISTENT
    report["spectrum"] = sd.to_json()
    report["spectrum"]["multiplicities_integral"] = sd.multiplicities_integral()
    res = classify(arr, sd, g=g if (g is not None and g.n <= IDEMPOTENT_VERTEX_LIMIT) else None,
                   near=near, seed=cfg.seed)
    report["classification"] = res.to_json()
    report["classification"]["family_detail"] = res.family_detail
    report["classification"]["inconsistencies"] = res.inconsistencies
    ok = res.theorem_main_consistent
    if near is not None and near.via_cliques != near.via_forbidden_subgraph:
        report.setdefault("problems", []).append("near-polygon characterisations disagree")
        ok = False
    return report, EXIT_OK if ok else EXIT_INCONSISTENT


def render_analysis(report: dict) -> str:
    lines = [f"input: {report['input']}"]
    if "graph" in report:
        gr = report["graph"]
        lines.append(f"graph: {gr['name']} with {gr['num_vertices']} vertices, {gr['num_edges']} edges")
        if not report.get("distance_regular", True):
            lines.append("NOT distance-regular; witness:")
            lines += [f"  {k}: {v}" for k, v in report["witness"].items()]
            return "\n".join(lines)
    ia = report["intersection_array"]
    lines.append(f"intersection array {ia['string']}  d={ia['d']}  k={ia['k']}  |X|={ia['num_vertices']}")
    lines.append("   i   c_i   a_i   b_i   k_i")
    for i in range(ia["d"] + 1):
        lines.append(f"{i:4d}{ia['c'][i]:6d}{ia['a'][i]:6d}{ia['b'][i]:6d}   {ia['k_i'][i]}")
    npr = report["near_polygon"]
    yn = lambda x: "yes" if x else "no"
    extra = ""
    if "via_cliques" in npr:
        extra = (f" (clique definition: {yn(npr['via_cliques'])}, "
                 f"K_1,2,1-free with a_i = a₁c_i: {yn(npr['via_forbidden_subgraph'])})")
    lines.append(f"near polygon: {yn(npr['is_near_polygon'])}{extra}; near 2d-gon: {yn(npr['is_near_2d_gon'])}")
    if "spectrum_error" in report:
        lines.append(f"spectrum: {report['spectrum_error']}")
        return "\n".join(lines)
    sp = report["spectrum"]
    lines.append("spectrum:")
    for i, (t, m) in enumerate(zip(sp["eigenvalues"], sp["multiplicities"])):
        sig = ", ".join(sp["cosines"][i])
        lines.append(f"  θ{_subscripts(i)} = {t}   m = {m}   σ = ({sig})")
    if not sp["multiplicities_integral"]:
        lines.append("  warning: non-integral multiplicity, array is infeasible")
    cl = report["classification"]
    h = cl["hypotheses"]
    lines.append("hypotheses: d≥3 {} | a₁>0 {} | c₂>1 {} | near polygon {} ({})".format(
        yn(h["diameter_ge_3"]), yn(h["a1_positive"]), yn(h["c2_gt_1"]), yn(h["near_polygon"]),
        h["near_polygon_source"]))
    bd = cl["bound"]
    lines.append(f"bound: θ₁ = {bd['theta1']}, (k−a₁−c₂)/(c₂−1) = {bd['bound']} → {bd['relation']}")
    ho = cl["hoffman"]
    lines.append(f"Hoffman: θ_d = {ho['theta_d']}, −k/(a₁+1) = {ho['bound']} → "
                 f"{'equality' if ho['equality'] else 'strict'}; near 2d-gon {yn(ho['near_2d_gon'])}")
    if cl["balanced"] is not None:
        lines.append(f"σ_(i−1) − qσ_i constant (q = c₂−1): {yn(cl['balanced'])}")
    cp = cl["classical"]
    lines.append("classical parameters: " + ("none" if cp is None else
                 f"(d,q,α,β) = ({cp['d']}, {cp['q']}, {cp['alpha']}, {cp['beta']})"))
    lines.append(f"Q-polynomial w.r.t. θ₁: {yn(cl['q_polynomial'])}")
    lines.append(f"family: {cl['family']}")
    for det in cl.get("family_detail", []):
        lines.append("  " + ", ".join(f"{k}={v}" for k, v in det.items()))
    verdict = "PASS" if cl["theorem_main_consistent"] and not report.get("problems") else "FAIL"
    lines.append(f"consistency: {verdict}")
    for p in cl.get("inconsistencies", []) + report.get("problems", []):
        lines.append(f"  ! {p}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    if args.catalog:
        cfg = RunConfig("catalog", args.catalog)
    elif args.array:
        cfg = RunConfig("array", args.array)
    else:
        cfg = RunConfig("graph", args.graph)
    cfg.fmt, cfg.seed, cfg.with_graph = args.format, args.seed, args.with_graph
    cfg.vertex_cap, cfg.catalog_file = args.vertex_cap, args.catalog_file
    report, code = analyze(cfg)
    print(json.dumps(report, indent=2, default=str) if cfg.fmt == "json" else render_analysis(report))
    return code


# -- verify -----------------------------------------------------------------------------

def verify_graph(g: DistanceGraph, seed: int = 0x5EED) -> tuple[list[dict], int]:
    rows: list[dict] = []

    def add(name, status, detail=""):
        rows.append({"audit": name, "status": status, "detail": detail})

    try:
        arr = extract_intersection_array(g)
        add("distance-regular", "pass", str(arr))
    except NotDistanceRegular as exc:
        add("distance-regular", "fail", str(exc))
        return rows, EXIT_INCONSISTENT
    try:
        phij_table(g)
        add("p^h_ij constant", "pass", f"{(arr.d + 1) ** 3} triples")
    except NotDistanceRegular as exc:
        add("p^h_ij constant", "fail", str(exc))
    near = check_near_polygon(g, arr)
    agree = near.via_cliques == near.via_forbidden_subgraph
    add("near-polygon tests agree", "pass" if agree else "fail",
        f"near polygon: {near.is_near_polygon}")
    try:
        sd = spectral_data(arr)
    except (RepeatedEigenvalue, ValueError) as exc:
        add("spectrum", "fail", str(exc))
        return rows, EXIT_INCONSISTENT
    hyp = hypotheses(arr, near)
    audit_ok = arr.d >= 2 and hyp.a1_positive and hyp.c2_gt_1 and hyp.near_polygon
    if audit_ok:
        ld = verify_local_distribution(g, arr, seed=seed)
        add("local distribution", "pass" if ld.ok else "fail",
            f"{ld.pairs_checked} pairs" + ("" if ld.ok else f"; {ld.witness}"))
    else:
        add("local distribution", "skipped", "needs near polygon, a₁>0, c₂>1")
    small = g.n <= IDEMPOTENT_VERTEX_LIMIT
    if audit_ok and small:
        cs = cauchy_schwarz_audit(g, arr, sd, seed=seed)
        worst = max(cs.max_closed_form_error.values())
        add("Cauchy-Schwarz closed forms", "pass" if cs.ok else "fail",
            f"{cs.pairs} pairs, max error {worst:.1e}")
        sw = check_span_witness(g, arr, sd, seed=seed)
        good = sw.uniform and sw.agrees_with_bound
        add("span witness", "pass" if good else "fail",
            f"u ∈ Span(v): {sw.holds} on {sw.in_span_count}/{sw.pairs} pairs")
    else:
        reason = "needs near polygon, a₁>0, c₂>1" if not audit_ok else "graph too large"
        add("Cauchy-Schwarz closed forms", "skipped", reason)
        add("span witness", "skipped", reason)
    if small:
        au = audit_idempotents(g, arr, sd)
        add("idempotent identities", "pass" if au.ok else "fail",
            f"max error {max(au.max_errors.values()):.1e}")
    else:
        add("idempotent identities", "skipped", "graph too large")
    code = EXIT_OK if all(r["status"] != "fail" for r in rows) else EXIT_INCONSISTENT
    return rows, code


def cmd_verify(args) -> int:
    g = DistanceGraph.load(args.graph)
    if args.vertex_cap is not None:
        g.distances(cap=args.vertex_cap)
    rows, code = verify_graph(g, seed=args.seed)
    if args.format == "json":
        print(json.dumps({"graph": g.name, "audits": rows, "exit_code": code}, indent=2))
    else:
        print(f"graph: {g.name or args.graph} ({g.n} vertices)")
        width = max(len(r["audit"]) for r in rows)
        for r in rows:
            print(f"  {r['audit']:<{width}}  {r['status'].upper():<7}  {r['detail']}")
    return code


def cmd_catalog(args) -> int:
    entries = load_catalog(args.catalog_file)
    if args.format == "json":
        print(json.dumps([e.to_json() for e in entries], indent=2))
    else:
        for e in entries:
            flag = " [graph]" if e.construct else ""
            print(f"{e.name:<28} {str(e.array):<22} {e.provenance}{flag}")
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nearpoly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--vertex-cap", type=int, default=None,
                       help="override the all-pairs distance cap (default NPL_VERTEX_CAP or 10000)")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=0x5EED)

    con = sub.add_parser("construct", help="build a Hamming or dual polar graph")
    csub = con.add_subparsers(dest="kind", required=True)
    ham = csub.add_parser("hamming")
    ham.add_argument("--d", type=int, required=True)
    ham.add_argument("--n", type=int, required=True)
    dp = csub.add_parser("dual-polar")
    dp.add_argument("--family", required=True,
                    choices=("B", "C", "D", "2D", "2A-odd", "2A-even"))
    dp.add_argument("--d", type=int, required=True)
    dp.add_argument("--p", type=int, required=True)
    dp.add_argument("--m", type=int, default=1)
    for p in (ham, dp):
        p.add_argument("--out", default=None, help="graph file (.json, or edge list otherwise)")
        common(p)
    con.set_defaults(func=cmd_construct)

    an = sub.add_parser("analyze", help="spectrum, bound checks and classification")
    src = an.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog")
    src.add_argument("--array")
    src.add_argument("--graph")
    an.add_argument("--with-graph", action="store_true",
                    help="for catalog entries with a construction, build and audit the graph")
    an.add_argument("--catalog-file", default=None)
    common(an)
    an.set_defaults(func=cmd_analyze)

    ve = sub.add_parser("verify", help="graph-level audits")
    ve.add_argument("graph")
    common(ve)
    ve.set_defaults(func=cmd_verify)

    ca = sub.add_parser("catalog", help="list the bundled catalog")
    ca.add_argument("--catalog-file", default=None)
    ca.add_argument("--format", choices=("text", "json"), default="text")
    ca.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "vertex_cap", None) is not None:
        os.environ["NPL_VERTEX_CAP"] = str(args.vertex_cap)
    try:
        return args.func(args)
    except (UsageError, GraphError, polar.GuardExceeded, ValueError, KeyError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
