"""Acceptance criteria 1-9, one PASS/FAIL line each (echoed in the summary)."""

import time
from fractions import Fraction

import numpy as np
import pytest

from nearpoly import polar
from nearpoly.catalog import load_catalog
from nearpoly.cli import verify_graph
from nearpoly.graph import IntersectionArray, check_near_polygon, extract_intersection_array
from nearpoly.spectra import audit_idempotents, spectral_data
from nearpoly.theorems import cauchy_schwarz_audit, check_hoffman, classify

from test_polar import _quadratic_b, _symplectic, as_spans, brute_force_maximal

TOL = 1e-8


def _full_pipeline(g):
    arr = extract_intersection_array(g)
    sd = spectral_data(arr)
    res = classify(arr, sd, g=g, near=check_near_polygon(g, arr))
    return arr, sd, res


def test_criterion_1_hamming_equality(acceptance_line):
    t0 = time.perf_counter()
    g = polar.build_hamming_graph(3, 3)
    arr, sd, res = _full_pipeline(g)
    dt = time.perf_counter() - t0
    ok = (arr == IntersectionArray.parse("6,4,2;1,2,3")
          and [t.exact for t in sd.eigenvalues] == [(3 - i) * 2 - i for i in range(4)] == [6, 3, 0, -3]
          and sd.eigenvalues[1].exact == Fraction(6 - 1 - 2, 2 - 1)
          and res.bound.relation == "equal" and res.q_polynomial
          and res.family_verdict == "hamming"
          and res.classical_fit.as_tuple() == (3, 1, 0, 2)
          and dt < 1.0)
    acceptance_line("1", ok, f"H(3,3) equality, hamming (3,1,0,2), {dt:.2f}s < 1s")
    assert ok


def test_criterion_2_dual_polar_equality(acceptance_line):
    t0 = time.perf_counter()
    g = polar.build_dual_polar_graph(polar.make_polar_space("C", 3, 2))
    arr, sd, res = _full_pipeline(g)
    dt = time.perf_counter() - t0
    q, eps = 2, 1
    formula = [(q ** (3 + eps - i) - q**eps - q**i + 1) // (q - 1) for i in range(4)]
    ok = (g.n == 135 and arr == IntersectionArray.parse("14,12,8;1,3,7")
          and sd.eigenvalues[1].exact == Fraction(14 - 1 - 3, 2) == 5
          and [t.exact for t in sd.eigenvalues] == formula == [14, 5, -1, -7]
          and res.bound.relation == "equal" and res.family_verdict == "dual_polar"
          and res.classical_fit.as_tuple() == (3, 2, 0, 2)
          and dt < 30.0)
    acceptance_line("2", ok, f"C_3(2) 135 vertices, equality, dual_polar (3,2,0,2), {dt:.2f}s < 30s")
    assert ok


def test_criterion_3_quadratic_family(acceptance_line):
    t0 = time.perf_counter()
    g = polar.build_dual_polar_graph(polar.make_polar_space("B", 3, 2))
    arr = extract_intersection_array(g)
    rows, code = verify_graph(g)
    dt = time.perf_counter() - t0
    statuses = {r["audit"]: r["status"] for r in rows}
    ok = (g.n == 135 and arr == IntersectionArray.parse("14,12,8;1,3,7")
          and code == 0 and set(statuses.values()) == {"pass"} and dt < 60.0)
    acceptance_line("3", ok, f"B_3(2) 135 vertices, {len(rows)} audits pass, {dt:.2f}s < 60s")
    assert ok, statuses


def test_criterion_4_strict_inequality(acceptance_line):
    t0 = time.perf_counter()
    arr = IntersectionArray.parse("30,28,24;1,3,15")
    res = classify(arr)
    dt = time.perf_counter() - t0
    theta1 = spectral_data(arr).eigenvalues[1]
    ok = (arr.is_near_polygon_array() and theta1.compare(13) < 0
          and res.bound.relation == "strict" and not res.q_polynomial
          and res.theorem_main_consistent and dt < 1.0)
    acceptance_line("4", ok, f"M24 near hexagon theta_1 = {theta1} < 13, not Q-polynomial, {dt:.2f}s < 1s")
    assert ok


def test_criterion_5_hoffman(acceptance_line):
    t0 = time.perf_counter()
    checked, bad = 0, []
    for e in load_catalog():
        if not e.array.is_near_polygon_array():
            continue
        rep = check_hoffman(e.array)
        checked += 1
        if rep.equality != e.array.is_near_2d_gon_array():
            bad.append(e.name)
    dt = time.perf_counter() - t0
    ok = not bad and checked >= 10 and dt < 5.0
    acceptance_line("5", ok, f"Hoffman equality iff near 2d-gon on {checked} near polygons, {dt:.2f}s < 5s")
    assert ok, bad


def test_criterion_6_cauchy_schwarz(acceptance_line, h33, c32):
    t0 = time.perf_counter()
    details, ok = [], True
    for g in (h33, c32):
        arr = extract_intersection_array(g)
        rep = cauchy_schwarz_audit(g, arr, tol=TOL)
        total = int(np.triu(g.distances() == 2).sum())
        err = max(rep.max_closed_form_error.values())
        ok &= (rep.ok and rep.pairs == total and err <= TOL
               and rep.max_lambda_residual is not None and rep.max_lambda_residual <= TOL
               and rep.lambda_value == Fraction(arr.a[2], arr.c_full[2]))
        details.append(f"{g.name}: {rep.pairs} pairs, err {err:.1e}, lambda res {rep.max_lambda_residual:.1e}")
    dt = time.perf_counter() - t0
    ok &= dt < 60.0
    acceptance_line("6", ok, "; ".join(details) + f", {dt:.2f}s < 60s")
    assert ok


SMALL_GRAPHS = [("hamming", 3, 3), ("hamming", 4, 3), ("hamming", 3, 2), ("hamming", 3, 4),
                ("C", 3, 2), ("B", 3, 2), ("D", 3, 2), ("2D", 3, 2), ("2A_even", 3, 2),
                ("2A_odd", 2, 2), ("C", 2, 3)]


def test_criterion_7_bose_mesner(acceptance_line):
    worst, names, ok = 0.0, [], True
    for fam, d, p in SMALL_GRAPHS:
        if fam == "hamming":
            g = polar.build_hamming_graph(d, p)
        else:
            g = polar.build_dual_polar_graph(polar.make_polar_space(fam, d, p))
        assert g.n <= 1000
        arr = extract_intersection_array(g)
        au = audit_idempotents(g, arr, spectral_data(arr), tol=TOL)
        ok &= au.ok
        worst = max(worst, max(au.max_errors.values()))
        names.append(g.name)
    acceptance_line("7", ok, f"idempotent identities on {len(names)} graphs, max error {worst:.1e} <= 1e-8")
    assert ok


@pytest.mark.slow
def test_criterion_8_oracle_equivalence(acceptance_line):
    t0 = time.perf_counter()
    c = polar.enumerate_maximal_isotropic(polar.make_polar_space("C", 3, 2))
    c_oracle = brute_force_maximal(6, 3, lambda u, v: _symplectic(u, v, 6))
    b = polar.enumerate_maximal_isotropic(polar.make_polar_space("B", 3, 2))
    b_oracle = brute_force_maximal(
        7, 3, lambda u, v: (_quadratic_b(u ^ v, 7) + _quadratic_b(u, 7) + _quadratic_b(v, 7)) % 2,
        singular=lambda v: _quadratic_b(v, 7))
    dt = time.perf_counter() - t0
    ok = as_spans(c, 6) == c_oracle and as_spans(b, 7) == b_oracle and dt < 600
    acceptance_line("8", ok, f"C_3(2) {len(c_oracle)} and B_3(2) {len(b_oracle)} subspaces equal "
                    f"brute force as sets, {dt:.1f}s < 600s")
    assert ok


def test_criterion_9_equivalence_sweep(acceptance_line):
    arrays = [(e.name, e.array) for e in load_catalog()]
    arrays += [(f"H({d},{n})", polar.hamming_array(d, n)) for d in (3, 4) for n in (3, 4, 5)]
    discrepancies, in_scope = [], 0
    for name, arr in arrays:
        res = classify(arr)
        if not res.hypotheses.all_met:
            continue
        in_scope += 1
        triple = (res.bound.relation == "equal", res.q_polynomial,
                  res.family_verdict in ("hamming", "dual_polar"))
        if len(set(triple)) != 1 or not res.theorem_main_consistent:
            discrepancies.append((name, triple))
    ok = not discrepancies
    acceptance_line("9", ok, f"{in_scope} arrays in scope of {len(arrays)}, "
                    f"{len(discrepancies)} discrepancies")
    assert ok, discrepancies
