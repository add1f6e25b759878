"""The second-eigenvalue bound for near polygons and the classification at
equality, as executable checks on intersection arrays and explicit graphs.

All theorem verdicts (bound relation, Hoffman equality, cosine balance,
classical fit) are decided in exact arithmetic; vector-level audits use the
absolute tolerance ``MATRIX_TOL``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .gf import prime_power
from .graph import (
    DistanceGraph,
    IntersectionArray,
    NearPolygonReport,
    distance2_pairs,
)
from .spectra import (
    MATRIX_TOL,
    RECURRENCE_TOL,
    SpectralData,
    idempotent_matrix,
    is_q_polynomial_wrt_theta1,
    krein_parameters,
    spectral_data,
)


def gaussian_bracket(j: int, q) -> Fraction:
    """[j] = 1 + q + ... + q^(j-1)."""
    return sum((Fraction(q) ** e for e in range(j)), Fraction(0))


@dataclass
class Hypotheses:
    diameter_ge_3: bool
    a1_positive: bool
    c2_gt_1: bool
    near_polygon: bool
    near_polygon_source: str = "array"

    @property
    def all_met(self) -> bool:
        return self.diameter_ge_3 and self.a1_positive and self.c2_gt_1 and self.near_polygon


def hypotheses(arr: IntersectionArray, near: NearPolygonReport | None = None) -> Hypotheses:
    a, c = arr.a, arr.c_full
    if near is not None:
        np_ok, src = near.is_near_polygon, "graph"
    else:
        np_ok, src = arr.is_near_polygon_array(), "array"
    return Hypotheses(
        diameter_ge_3=arr.d >= 3,
        a1_positive=a[1] > 0,
        c2_gt_1=arr.d >= 2 and c[2] > 1,
        near_polygon=np_ok,
        near_polygon_source=src,
    )


@dataclass
class BoundReport:
    theta1: str
    bound_value: Fraction | None
    relation: str  # "equal" | "strict" | "violated" | "undefined"
    hypotheses_met: Hypotheses


def second_eigenvalue_bound(arr: IntersectionArray) -> Fraction | None:
    """(k - a_1 - c_2) / (c_2 - 1), or None when c_2 = 1."""
    if arr.d < 2:
        return None
    c2 = arr.c_full[2]
    if c2 == 1:
        return None
    return Fraction(arr.k - arr.a[1] - c2, c2 - 1)


def check_bound(arr: IntersectionArray, spectral: SpectralData | None = None,
                near: NearPolygonReport | None = None) -> BoundReport:
    spectral = spectral or spectral_data(arr)
    theta1 = spectral.eigenvalues[1]
    bound = second_eigenvalue_bound(arr)
    if bound is None:
        rel = "undefined"
    else:
        rel = {0: "equal", -1: "strict", 1: "violated"}[theta1.compare(bound)]
    return BoundReport(str(theta1), bound, rel, hypotheses(arr, near))


@dataclass
class HoffmanReport:
    theta_d: str
    bound_value: Fraction
    equality: bool
    near_2d_gon: bool
    consistent: bool


def check_hoffman(arr: IntersectionArray, spectral: SpectralData | None = None) -> HoffmanReport:
    """theta_d >= -k/(a_1+1), with equality exactly for near 2d-gons."""
    spectral = spectral or spectral_data(arr)
    theta_d = spectral.eigenvalues[-1]
    hb = Fraction(-arr.k, arr.a[1] + 1)
    rel = theta_d.compare(hb)
    near_2d = arr.is_near_2d_gon_array()
    equality = rel == 0
    consistent = rel >= 0 and equality == near_2d if arr.is_near_polygon_array() else True
    return HoffmanReport(str(theta_d), hb, equality, near_2d, consistent)


# -- vector audits on explicit graphs -----------------------------------------------

@dataclass
class CauchySchwarzReport:
    pairs: int
    max_closed_form_error: dict
    inequality_holds: bool
    factored_form_holds: bool
    factored_identity_exact: bool
    v_nonzero: bool
    lambda_value: Fraction | None
    max_lambda_residual: float | None
    ok: bool


def _uv(E: np.ndarray, adj: list[set[int]], D: np.ndarray, x: int, y: int):
    A_xy = [z for z in adj[x] if D[z, y] == 2]
    A_yx = [w for w in adj[y] if D[w, x] == 2]
    u = E[:, A_xy].sum(axis=1) - E[:, A_yx].sum(axis=1)
    v = E[:, x] - E[:, y]
    return u, v


def _audit_hypotheses(arr: IntersectionArray):
    h = hypotheses(arr)
    if not (arr.d >= 2 and h.a1_positive and h.c2_gt_1 and h.near_polygon):
        raise ValueError(f"{arr}: audit needs a near polygon with a_1 > 0 and c_2 > 1")


def cauchy_schwarz_audit(g: DistanceGraph, arr: IntersectionArray,
                         spectral: SpectralData | None = None,
                         seed: int = 0x5EED, tol: float = MATRIX_TOL) -> CauchySchwarzReport:
    """Compare ||v||^2, <u,v>, ||u||^2 with their closed forms in the cosines
    of theta_1 on every distance-2 pair (or a seeded sample), and check the
    inequality chain leading to the bound."""
    _audit_hypotheses(arr)
    spectral = spectral or spectral_data(arr)
    n = g.n
    E = idempotent_matrix(g, arr, spectral, 1)
    D = g.distances()
    adj = [set(a) for a in g.adjacency]
    s0, s1, s2 = spectral.cosines[1].sigma[:3]
    m = spectral.multiplicities[1]
    a1, c2, a2, k = arr.a[1], arr.c_full[2], arr.a[2], arr.k
    b1 = arr.b[1]
    scale = 2 * m / n
    vv = scale * (s0 - s2)
    uv = scale * a2 * (s1 - s2)
    uu = scale * a2 * (s0 + (a1 - c2) * s1 + (c2 - a1 - 1) * s2)

    cs_lhs = (s0 + (a1 - c2) * s1 + (c2 - a1 - 1) * s2) * (s0 - s2)
    cs_rhs = a2 * (s1 - s2) ** 2
    t = spectral.eigenvalues[1].approx
    factored = (t - k) ** 2 * (t * (a1 + 1) + k) * (k - t * (c2 - 1) - a1 - c2)
    # The Cauchy-Schwarz slack equals the factored product divided by k^2 b_1^2.
    identity_gap = (cs_lhs - cs_rhs) - factored / (k**2 * b1**2)
    identity_ok = identity_gap == 0 if spectral.exact else abs(float(identity_gap)) <= RECURRENCE_TOL

    qq = c2 - 1
    lam = Fraction(a2, qq + 1)
    equality = spectral.eigenvalues[1].compare(second_eigenvalue_bound(arr)) == 0

    errs = {"|v|^2": 0.0, "<u,v>": 0.0, "|u|^2": 0.0}
    lam_res = 0.0
    pairs = distance2_pairs(g, seed=seed)
    for x, y in pairs:
        u, v = _uv(E, adj, D, int(x), int(y))
        errs["|v|^2"] = max(errs["|v|^2"], abs(float(v @ v) - float(vv)))
        errs["<u,v>"] = max(errs["<u,v>"], abs(float(u @ v) - float(uv)))
        errs["|u|^2"] = max(errs["|u|^2"], abs(float(u @ u) - float(uu)))
        if equality:
            lam_res = max(lam_res, float(np.linalg.norm(u - float(lam) * v)))
    cs_ok = cs_lhs >= cs_rhs if spectral.exact else float(cs_lhs - cs_rhs) >= -RECURRENCE_TOL
    fact_ok = factored >= 0 if spectral.exact else float(factored) >= -RECURRENCE_TOL
    v_nonzero = vv > 0
    ok = (all(e <= tol for e in errs.values()) and cs_ok and fact_ok and identity_ok
          and v_nonzero and (not equality or lam_res <= tol))
    return CauchySchwarzReport(
        pairs=len(pairs), max_closed_form_error=errs, inequality_holds=bool(cs_ok),
        factored_form_holds=bool(fact_ok), factored_identity_exact=bool(identity_ok),
        v_nonzero=bool(v_nonzero), lambda_value=lam if equality else None,
        max_lambda_residual=lam_res if equality else None, ok=bool(ok),
    )


@dataclass
class SpanWitnessReport:
    holds: bool
    uniform: bool
    pairs: int
    in_span_count: int
    agrees_with_bound: bool


def check_span_witness(g: DistanceGraph, arr: IntersectionArray,
                       spectral: SpectralData | None = None,
                       seed: int = 0x5EED, tol: float = MATRIX_TOL) -> SpanWitnessReport:
    """Whether u lies in Span(v) for the distance-2 pairs tested.

    The verdict has to be the same for every pair; the report records that
    and whether it matches equality in the bound.
    """
    _audit_hypotheses(arr)
    spectral = spectral or spectral_data(arr)
    E = idempotent_matrix(g, arr, spectral, 1)
    D = g.distances()
    adj = [set(a) for a in g.adjacency]
    pairs = distance2_pairs(g, seed=seed)
    verdicts = []
    for x, y in pairs:
        u, v = _uv(E, adj, D, int(x), int(y))
        proj = (u @ v) / (v @ v) * v
        verdicts.append(bool(np.linalg.norm(u - proj) <= tol))
    holds = all(verdicts)
    uniform = len(set(verdicts)) <= 1
    equality = check_bound(arr, spectral).relation == "equal"
    return SpanWitnessReport(holds, uniform, len(pairs), sum(verdicts), holds == equality)


# -- cosine balance, classical parameters ---------------------------------------------

@dataclass
class BalanceReport:
    holds: bool
    q: Fraction
    differences: list[str]
    intersection_form_holds: bool
    balanced_eigenvalue_index: int | None
    agree: bool


def _constant(vals, exact: bool) -> bool:
    if exact:
        return len(set(vals)) <= 1
    return max(float(v) for v in vals) - min(float(v) for v in vals) <= RECURRENCE_TOL


def check_balanced_cosines(arr: IntersectionArray, spectral: SpectralData | None = None,
                           q=None) -> BalanceReport:
    """Is sigma_{i-1} - q sigma_i independent of i for the theta_1 cosines?

    Also evaluates the intersection-number form q c_i - b_i - q(q c_{i-1} - b_{i-1})
    and checks it agrees with the existence of *some* nontrivial balanced
    cosine sequence, which is the equivalence that holds in general.
    """
    spectral = spectral or spectral_data(arr)
    q = Fraction(arr.c_full[2] - 1 if q is None else q)
    d = arr.d

    def diffs(cs):
        s = cs.sigma
        return [s[i - 1] - q * s[i] for i in range(1, d + 1)]

    first = diffs(spectral.cosines[1])
    holds = _constant(first, spectral.cosines[1].exact)
    balanced_idx = next(
        (j for j in range(1, d + 1)
         if _constant(diffs(spectral.cosines[j]), spectral.cosines[j].exact)), None)
    b, c = arr.b_full, arr.c_full
    form = [q * c[i] - b[i] - q * (q * c[i - 1] - b[i - 1]) for i in range(1, d + 1)]
    form_holds = len(set(form)) <= 1
    shown = [str(x) if spectral.cosines[1].exact else f"{float(x):.12g}" for x in first]
    return BalanceReport(holds, q, shown, form_holds, balanced_idx,
                         agree=(balanced_idx is not None) == form_holds)


@dataclass
class ClassicalParameters:
    d: int
    q: Fraction
    alpha: Fraction
    beta: Fraction
    in_theorem_scope: bool = True
    gates: dict = field(default_factory=dict)

    def as_tuple(self):
        return (self.d, self.q, self.alpha, self.beta)

    def to_json(self) -> dict:
        return {"d": self.d, "q": str(self.q), "alpha": str(self.alpha), "beta": str(self.beta)}


def _integer_roots(coeffs: list[int]) -> list[int]:
    """Integer roots of an integer polynomial (ascending coefficients)."""
    if coeffs and coeffs[0] == 0:
        return sorted(set([0] + _integer_roots(coeffs[1:])))
    if not coeffs:
        return []
    c0 = abs(coeffs[0])
    divs = {t for f in range(1, int(c0**0.5) + 1) if c0 % f == 0 for t in (f, c0 // f)}
    out = []
    for r in sorted(divs):
        for cand in (r, -r):
            if sum(cf * cand**i for i, cf in enumerate(coeffs)) == 0:
                out.append(cand)
    return sorted(set(out))


def classical_candidates(arr: IntersectionArray) -> list[ClassicalParameters]:
    """Every (d, q, alpha, beta) with rational q reproducing the whole array."""
    if arr.d < 3:
        raise ValueError(f"{arr}: classical parameters need diameter >= 3")
    c, b = arr.c_full, arr.b_full
    c2, c3 = c[2], c[3]
    # Eliminating alpha between c_2 and c_3 leaves (1+q+q^2)(c_2-q) = c_3,
    # i.e. q^3 - (c_2-1) q^2 - (c_2-1) q + (c_3 - c_2) = 0.
    cubic = [c3 - c2, -(c2 - 1), -(c2 - 1), 1]
    out = []
    for q in _integer_roots(cubic):
        if q == -1:
            continue
        q = Fraction(q)
        alpha = Fraction(c2) / (1 + q) - 1
        beta = Fraction(arr.k) / gaussian_bracket(arr.d, q)
        D = gaussian_bracket(arr.d, q)
        ok = all(
            gaussian_bracket(i, q) * (1 + alpha * gaussian_bracket(i - 1, q)) == c[i]
            for i in range(arr.d + 1)
        ) and all(
            (D - gaussian_bracket(i, q)) * (beta - alpha * gaussian_bracket(i, q)) == b[i]
            for i in range(arr.d + 1)
        )
        if not ok:
            continue
        form = [q * c[i] - b[i] - q * (q * c[i - 1] - b[i - 1]) for i in range(1, arr.d + 1)]
        gates = {
            "c3>=(c2-q)(1+q+q^2)": c3 >= (c2 - q) * (1 + q + q * q),
            "intersection_form_constant": len(set(form)) == 1,
        }
        out.append(ClassicalParameters(arr.d, q, alpha, beta, q >= 1, gates))
    return out


def fit_classical_parameters(arr: IntersectionArray) -> ClassicalParameters | None:
    """Classical parameters of the array, preferring q >= 1; None if there are none."""
    cands = classical_candidates(arr)
    cands.sort(key=lambda p: (not p.in_theorem_scope, -p.q))
    return cands[0] if cands else None


# -- family identification ---------------------------------------------------------

DUAL_POLAR_EPSILONS = {
    Fraction(0): ["D"],
    Fraction(1, 2): ["2A_even"],
    Fraction(1): ["B", "C"],
    Fraction(3, 2): ["2A_odd"],
    Fraction(2): ["2D"],
}


def match_hamming(arr: IntersectionArray) -> int | None:
    """n with arr == array of H(d, n), else None."""
    from .polar import hamming_array

    d = arr.d
    if arr.k % d:
        return None
    n = arr.k // d + 1
    if n < 2:
        return None
    return n if hamming_array(d, n) == arr else None


def match_dual_polar(arr: IntersectionArray) -> list[dict]:
    """Dual polar families (with field data) whose closed-form array equals ``arr``."""
    from .polar import dual_polar_array

    if arr.d < 2:
        return []
    q = arr.c_full[2] - 1
    pp = prime_power(q) if q >= 2 else None
    if pp is None:
        return []
    p, e = pp
    hits = []
    for eps, fams in DUAL_POLAR_EPSILONS.items():
        if eps.denominator == 2 and e % 2:
            continue
        try:
            cand = dual_polar_array(q, arr.d, eps)
        except ValueError:
            continue
        if cand == arr:
            m = e // 2 if eps.denominator == 2 else e
            for fam in fams:
                hits.append({"family": fam, "q": q, "epsilon": str(eps), "p": p, "m": m})
    return hits


# -- the pipeline -------------------------------------------------------------------

@dataclass
class ClassificationResult:
    array: IntersectionArray
    hypotheses: Hypotheses
    bound: BoundReport
    hoffman: HoffmanReport
    balanced: BalanceReport | None
    classical_fit: ClassicalParameters | None
    q_polynomial: bool
    q_polynomial_ordering: list[int]
    family_verdict: str
    family_detail: list[dict]
    equality_holds: bool
    evidence: dict
    theorem_main_consistent: bool
    inconsistencies: list[str]

    @property
    def q_poly_holds(self) -> bool:
        return self.q_polynomial

    def to_json(self) -> dict:
        h = asdict(self.hypotheses)
        h["all_met"] = self.hypotheses.all_met
        return {
            "array": str(self.array),
            "hypotheses": h,
            "bound": {
                "theta1": self.bound.theta1,
                "bound": None if self.bound.bound_value is None else str(self.bound.bound_value),
                "relation": self.bound.relation,
            },
            "hoffman": {
                "theta_d": self.hoffman.theta_d,
                "bound": str(self.hoffman.bound_value),
                "equality": self.hoffman.equality,
                "near_2d_gon": self.hoffman.near_2d_gon,
                "consistent": self.hoffman.consistent,
            },
            "balanced": None if self.balanced is None else self.balanced.holds,
            "classical": None if self.classical_fit is None else self.classical_fit.to_json(),
            "q_polynomial": self.q_polynomial,
            "family": self.family_verdict,
            "theorem_main_consistent": self.theorem_main_consistent,
        }


def classify(arr: IntersectionArray, spectral: SpectralData | None = None,
             g: DistanceGraph | None = None, near: NearPolygonReport | None = None,
             seed: int = 0x5EED) -> ClassificationResult:
    """Run bound, balance, classical fit, Krein test and family match, and
    cross-check the implications among them.

    Hypothesis failures are recorded in the result rather than raised, so
    every array in a sweep gets a report; the implications are only asserted
    when all hypotheses hold.
    """
    spectral = spectral or spectral_data(arr)
    hyp = hypotheses(arr, near)
    bound = check_bound(arr, spectral, near)
    hoff = check_hoffman(arr, spectral)
    krein = krein_parameters(spectral)
    qp = is_q_polynomial_wrt_theta1(krein)
    evidence: dict = {"krein_nonnegative": krein.nonnegative(),
                      "multiplicities_integral": spectral.multiplicities_integral(),
                      "q_polynomial_reason": qp.reason}

    balanced = fit = None
    if arr.d >= 2 and arr.c_full[2] > 1:
        balanced = check_balanced_cosines(arr, spectral)
    if arr.d >= 3:
        fit = fit_classical_parameters(arr)
        q = arr.c_full[2] - 1
        a, c = arr.a, arr.c_full
        evidence["c3==1+q+q^2"] = c[3] == 1 + q + q * q
        evidence["c3_a3_identity"] = (a[1] + 1 + q) * (1 + q + q * q - c[3]) == a[3] - a[1] * c[3]

    ham = match_hamming(arr)
    polar = match_dual_polar(arr)
    family_detail = []
    if ham is not None:
        family_detail.append({"family": "hamming", "d": arr.d, "n": ham})
    family_detail += polar
    if ham is not None:
        verdict = "hamming"
    elif polar:
        verdict = "dual_polar"
    elif fit is not None and fit.alpha == 0 and fit.in_theorem_scope:
        verdict = "undetermined"
    else:
        verdict = "neither"

    equality = bound.relation == "equal"
    problems = []
    if not hoff.consistent:
        problems.append("Hoffman equality disagrees with the near 2d-gon condition")
    if hyp.all_met:
        family = verdict in ("hamming", "dual_polar")
        if bound.relation == "violated":
            problems.append("theta_1 exceeds the bound")
        if equality != qp.holds:
            problems.append("bound equality and Q-polynomiality disagree")
        if equality != family:
            problems.append("bound equality and family membership disagree")
        if equality:
            if not (balanced and balanced.holds):
                problems.append("equality without balanced cosines")
            if not evidence.get("c3==1+q+q^2"):
                problems.append("equality without c_3 = 1+q+q^2")
            if not evidence.get("c3_a3_identity"):
                problems.append("equality without the c_3/a_3 identity")
            if fit is None or fit.alpha != 0 or fit.q != arr.c_full[2] - 1:
                problems.append("equality without classical parameters (d, c2-1, 0, beta)")
        if verdict == "undetermined":
            problems.append("classical (d,q,0,beta) array matching no known family")
        if balanced is not None and not balanced.agree:
            problems.append("cosine balance and the intersection-number form disagree")
    if g is not None and hyp.all_met:
        cs = cauchy_schwarz_audit(g, arr, spectral, seed=seed)
        sw = check_span_witness(g, arr, spectral, seed=seed)
        evidence["cauchy_schwarz_ok"] = cs.ok
        evidence["span_witness"] = sw.holds
        if not cs.ok:
            problems.append("Cauchy-Schwarz audit failed")
        if not (sw.uniform and sw.agrees_with_bound):
            problems.append("span witness disagrees with the bound relation")

    return ClassificationResult(
        array=arr, hypotheses=hyp, bound=bound, hoffman=hoff, balanced=balanced,
        classical_fit=fit, q_polynomial=qp.holds, q_polynomial_ordering=qp.ordering,
        family_verdict=verdict, family_detail=family_detail, equality_holds=equality,
        evidence=evidence, theorem_main_consistent=not problems, inconsistencies=problems,
    )
