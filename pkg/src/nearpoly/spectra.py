"""Spectral data of an intersection array.

Eigenvalues are the roots of the characteristic polynomial of the
tridiagonal intersection matrix, computed with exact integers.  Integer roots
are found by exact evaluation; the remaining roots are isolated with a Sturm
sequence and refined by bisection over the rationals.  Cosine sequences,
multiplicities and Krein parameters are then evaluated in
:class:`fractions.Fraction` arithmetic, exactly for rational eigenvalues and
to a tiny certified error otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import DistanceGraph, IntersectionArray

# Width to which irrational eigenvalues are refined before they are used
# numerically; far below every tolerance used downstream.
APPROX_WIDTH = Fraction(1, 2**96)
ISOLATION_WIDTH = Fraction(1, 10**12)
MATRIX_TOL = 1e-8
MULTIPLICITY_TOL = 1e-6
RECURRENCE_TOL = 1e-10


# -- polynomials: ascending coefficient lists ---------------------------------

def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def poly_sub(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def poly_eval(p, x):
    acc = 0
    for coef in reversed(p):
        acc = acc * x + coef
    return acc


def poly_divmod(p, q):
    p = [Fraction(x) for x in p]
    q = _trim(q)
    if len(q) == 1 and q[0] == 0:
        raise ZeroDivisionError("polynomial division by zero")
    out = [Fraction(0)] * max(1, len(p) - len(q) + 1)
    while len(p) >= len(q) and any(p):
        coef = p[-1] / q[-1]
        shift = len(p) - len(q)
        out[shift] = coef
        for i, b in enumerate(q):
            p[shift + i] -= coef * b
        p.pop()
    return _trim(out), _trim(p or [0])


def poly_deriv(p):
    return _trim([i * p[i] for i in range(1, len(p))] or [0])


def poly_gcd(p, q):
    p, q = _trim(p), _trim(q)
    while not (len(q) == 1 and q[0] == 0):
        p, q = q, poly_divmod(p, q)[1]
    return [c / p[-1] for c in p]


def degree(p) -> int:
    p = _trim(p)
    return 0 if len(p) == 1 else len(p) - 1


def sturm_sequence(p):
    seq = [_trim(p), poly_deriv(p)]
    while degree(seq[-1]) > 0 or seq[-1][0] != 0:
        r = poly_divmod(seq[-2], seq[-1])[1]
        if len(r) == 1 and r[0] == 0:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(seq, x) -> int:
    signs = [s for s in (poly_eval(f, x) for f in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(seq, lo, hi) -> int:
    """Distinct real roots in (lo, hi] of the square-free head of ``seq``."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


# -- eigenvalues --------------------------------------------------------------

class Eigenvalue:
    """A real algebraic eigenvalue: exact rational, or an isolating interval
    ``(lo, hi]`` of a square-free rational polynomial."""

    def __init__(self, exact: Fraction | None = None, lo=None, hi=None, poly=None):
        self.exact = None if exact is None else Fraction(exact)
        self.lo, self.hi = lo, hi
        self.poly = poly
        self._seq = sturm_sequence(poly) if poly is not None else None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def refine(self, width: Fraction) -> None:
        if self.is_exact:
            return
        while self.hi - self.lo > width:
            mid = (self.lo + self.hi) / 2
            if poly_eval(self.poly, mid) == 0:
                self.exact = mid
                return
            if count_roots(self._seq, self.lo, mid):
                self.hi = mid
            else:
                self.lo = mid

    @property
    def approx(self) -> Fraction:
        if self.is_exact:
            return self.exact
        self.refine(APPROX_WIDTH)
        return self.exact if self.is_exact else (self.lo + self.hi) / 2

    @property
    def error_bound(self) -> Fraction:
        if self.is_exact:
            return Fraction(0)
        self.refine(APPROX_WIDTH)
        return Fraction(0) if self.is_exact else (self.hi - self.lo) / 2

    def __float__(self):
        return float(self.approx)

    def compare(self, r) -> int:
        """Exact sign of ``self - r`` for rational ``r``."""
        r = Fraction(r)
        if self.is_exact:
            return (self.exact > r) - (self.exact < r)
        # An irrational root never equals a rational, so shrinking the
        # isolating interval separates the two in finitely many steps.
        while self.lo < r < self.hi or r == self.hi:
            mid = (self.lo + self.hi) / 2
            if poly_eval(self.poly, mid) == 0:
                self.exact = mid
                return self.compare(r)
            if count_roots(self._seq, self.lo, mid):
                self.hi = mid
            else:
                self.lo = mid
        return 1 if r <= self.lo else -1

    def __eq__(self, other):
        if isinstance(other, Eigenvalue):
            if self.is_exact and other.is_exact:
                return self.exact == other.exact
            # Distinct isolating intervals of one square-free polynomial, or an
            # irrational against a rational: never equal.
            return self is other
        if isinstance(other, (int, Fraction)):
            return self.compare(other) == 0
        return NotImplemented

    def __hash__(self):
        return hash(self.exact) if self.is_exact else hash(float(self))

    def __repr__(self):
        return f"Eigenvalue({self})"

    def __str__(self):
        if self.is_exact:
            return str(self.exact)
        self.refine(ISOLATION_WIDTH)
        if self.is_exact:
            return str(self.exact)
        return f"{float(self.approx):.15g} ± {float(self.hi - self.lo):.1e}"


class RepeatedEigenvalue(ValueError):
    """The intersection matrix has a repeated root; not a valid array."""


def intersection_matrix(arr: IntersectionArray) -> list[list[int]]:
    """Tridiagonal (d+1)x(d+1) matrix with rows (c_i, a_i, b_i)."""
    d = arr.d
    a, b, c = arr.a, arr.b_full, arr.c_full
    M = [[0] * (d + 1) for _ in range(d + 1)]
    for i in range(d + 1):
        M[i][i] = a[i]
        if i > 0:
            M[i][i - 1] = c[i]
        if i < d:
            M[i][i + 1] = b[i]
    return M


def characteristic_polynomial(arr: IntersectionArray) -> list[int]:
    """det(xI - M) via the three-term recurrence on leading minors."""
    a, b, c = arr.a, arr.b_full, arr.c_full
    prev, cur = [1], [-a[0], 1]
    for i in range(1, arr.d + 1):
        nxt = poly_sub(poly_mul([-a[i], 1], cur), [b[i - 1] * c[i] * x for x in prev])
        prev, cur = cur, nxt
    return [int(x) for x in cur]


def eigenvalues(arr: IntersectionArray) -> list[Eigenvalue]:
    """The d+1 eigenvalues, strictly decreasing; theta_0 = k exactly.

    Roots are isolated with a Sturm sequence on (-k-1, k+1] and each interval
    is shrunk below width 1/2; the characteristic polynomial is monic with
    integer coefficients, so its only rational roots are integers, and at
    most one integer remains to test exactly per interval.
    """
    p = [Fraction(x) for x in characteristic_polynomial(arr)]
    k = arr.k
    if degree(poly_gcd(p, poly_deriv(p))) > 0:
        raise RepeatedEigenvalue(f"{arr}: characteristic polynomial has a repeated root")
    seq = sturm_sequence(p)
    bound = Fraction(k + 1)
    stack = [(-bound, bound)]
    found: list[Eigenvalue] = []
    while stack:
        lo, hi = stack.pop()
        n = count_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1 and hi - lo <= Fraction(1, 2):
            r = math.floor(hi)
            if lo < r <= hi and poly_eval(p, r) == 0:
                found.append(Eigenvalue(exact=r))
            else:
                ev = Eigenvalue(lo=lo, hi=hi, poly=p)
                ev.refine(ISOLATION_WIDTH)
                found.append(ev)
            continue
        mid = (lo + hi) / 2
        stack += [(lo, mid), (mid, hi)]
    if len(found) != arr.d + 1:
        raise ValueError(f"{arr}: found {len(found)} real eigenvalues, expected {arr.d + 1}")
    found.sort(key=lambda e: e.approx, reverse=True)
    for hi_ev, lo_ev in zip(found, found[1:]):
        if hi_ev == lo_ev:
            raise RepeatedEigenvalue(f"{arr}: repeated eigenvalue {hi_ev}")
    if found[0].exact != k:
        raise ValueError(f"{arr}: largest eigenvalue {found[0]} differs from k={k}")
    return found


# -- cosines, multiplicities -------------------------------------------------------

@dataclass
class CosineSequence:
    theta: Eigenvalue
    sigma: tuple[Fraction, ...]

    @property
    def exact(self) -> bool:
        return self.theta.is_exact

    def floats(self) -> list[float]:
        return [float(s) for s in self.sigma]


def cosine_sequence(arr: IntersectionArray, theta: Eigenvalue) -> CosineSequence:
    """sigma_0 = 1, sigma_1 = theta/k, then the three-term recurrence."""
    a, b, c = arr.a, arr.b_full, arr.c_full
    if any(b[i] == 0 for i in range(arr.d)):
        raise ValueError(f"{arr}: b_i vanishes below the diameter")
    t = theta.approx if isinstance(theta, Eigenvalue) else Fraction(theta)
    if not isinstance(theta, Eigenvalue):
        theta = Eigenvalue(exact=t)
    sig = [Fraction(1), t / arr.k]
    for i in range(1, arr.d):
        sig.append(((t - a[i]) * sig[i] - c[i] * sig[i - 1]) / b[i])
    return CosineSequence(theta, tuple(sig[: arr.d + 1]))


def recurrence_residuals(arr: IntersectionArray, cs: CosineSequence) -> list[Fraction]:
    """c_i s_{i-1} + a_i s_i + b_i s_{i+1} - theta s_i for each row."""
    a, b, c = arr.a, arr.b_full, arr.c_full
    s = list(cs.sigma)
    t = cs.theta.approx
    out = []
    for i in range(arr.d + 1):
        val = a[i] * s[i] - t * s[i]
        if i > 0:
            val += c[i] * s[i - 1]
        if i < arr.d:
            val += b[i] * s[i + 1]
        out.append(val)
    return out


@dataclass
class SpectralData:
    array: IntersectionArray
    eigenvalues: list[Eigenvalue]
    cosines: list[CosineSequence]
    multiplicities: list[Fraction]
    sphere_sizes: list[Fraction]

    @property
    def num_vertices(self) -> Fraction:
        return sum(self.sphere_sizes)

    @property
    def exact(self) -> bool:
        return all(e.is_exact for e in self.eigenvalues)

    def multiplicities_integral(self) -> bool:
        for m in self.multiplicities:
            if m <= 0 or abs(m - round(m)) > MULTIPLICITY_TOL:
                return False
            if self.exact and m.denominator != 1:
                return False
        return True

    def int_multiplicities(self) -> list[int]:
        return [int(round(m)) for m in self.multiplicities]

    def to_json(self) -> dict:
        return {
            "array": str(self.array),
            "eigenvalues": [str(e) for e in self.eigenvalues],
            "multiplicities": [str(m) if self.exact else f"{float(m):.9g}"
                               for m in self.multiplicities],
            "cosines": [[str(s) if cs.exact else f"{float(s):.15g}" for s in cs.sigma]
                        for cs in self.cosines],
            "sphere_sizes": [str(k) for k in self.sphere_sizes],
        }


def multiplicities(arr: IntersectionArray, cosines: list[CosineSequence]) -> list[Fraction]:
    """m = |X| / sum_j k_j sigma_j^2 for each cosine sequence."""
    ks = arr.sphere_sizes()
    n = sum(ks)
    return [n / sum(k * s * s for k, s in zip(ks, cs.sigma)) for cs in cosines]


def spectral_data(arr: IntersectionArray) -> SpectralData:
    evs = eigenvalues(arr)
    cos = [cosine_sequence(arr, t) for t in evs]
    return SpectralData(arr, evs, cos, multiplicities(arr, cos), arr.sphere_sizes())


# -- graph-level ---------------------------------------------------------------

def idempotent_matrix(g: DistanceGraph, arr: IntersectionArray, spectral: SpectralData,
                      i: int) -> np.ndarray:
    """E_i = m |X|^-1 sum_j sigma_j A_j as a dense float matrix."""
    D = g.distances()
    if int(D.max()) != arr.d or g.n != spectral.num_vertices:
        raise ValueError(f"graph {g.name!r} does not match array {arr}")
    sig = np.array(spectral.cosines[i].floats())
    m = float(spectral.multiplicities[i])
    return (m / g.n) * sig[D]


@dataclass
class IdempotentAudit:
    max_errors: dict
    ok: bool


def audit_idempotents(g: DistanceGraph, arr: IntersectionArray, spectral: SpectralData,
                      tol: float = MATRIX_TOL) -> IdempotentAudit:
    """Max-norm residuals of E_i^2 = E_i, E_iE_j = 0, sum E_i = I, E_0 = J/|X|,
    A E_i = theta_i E_i and <E x, E y> = m |X|^-1 sigma_{d(x,y)}."""
    n = g.n
    Es = [idempotent_matrix(g, arr, spectral, i) for i in range(arr.d + 1)]
    A = g.adjacency_matrix()
    D = g.distances()
    err = {"E_i^2-E_i": 0.0, "E_iE_j": 0.0, "sum-I": 0.0, "E_0-J/n": 0.0,
           "AE_i-theta_iE_i": 0.0, "inner_product": 0.0, "trace-m": 0.0}
    for i, Ei in enumerate(Es):
        err["E_i^2-E_i"] = max(err["E_i^2-E_i"], float(np.abs(Ei @ Ei - Ei).max()))
        th = float(spectral.eigenvalues[i])
        err["AE_i-theta_iE_i"] = max(err["AE_i-theta_iE_i"], float(np.abs(A @ Ei - th * Ei).max()))
        G = Ei.T @ Ei  # <E x^, E y^> for all x, y
        sig = np.array(spectral.cosines[i].floats())
        m = float(spectral.multiplicities[i])
        err["inner_product"] = max(err["inner_product"], float(np.abs(G - (m / n) * sig[D]).max()))
        err["trace-m"] = max(err["trace-m"], abs(float(np.trace(Ei)) - m))
        for j in range(i + 1, len(Es)):
            err["E_iE_j"] = max(err["E_iE_j"], float(np.abs(Ei @ Es[j]).max()))
    err["sum-I"] = float(np.abs(sum(Es) - np.eye(n)).max())
    err["E_0-J/n"] = float(np.abs(Es[0] - 1.0 / n).max())
    return IdempotentAudit(err, all(v <= tol for v in err.values()))


# -- Krein parameters and the Q-polynomial test ---------------------------------

@dataclass
class KreinTable:
    q: list[list[list[Fraction]]]  # q[h][i][j]
    exact: bool

    @property
    def d(self) -> int:
        return len(self.q) - 1

    def is_zero(self, h: int, i: int, j: int, tol: float = MATRIX_TOL) -> bool:
        v = self.q[h][i][j]
        return v == 0 if self.exact else abs(float(v)) <= tol

    def nonnegative(self, tol: float = MATRIX_TOL) -> bool:
        return all(float(v) >= -tol for plane in self.q for row in plane for v in row)

    def floats(self) -> np.ndarray:
        return np.array([[[float(v) for v in row] for row in plane] for plane in self.q])


def krein_parameters(spectral: SpectralData, num_vertices=None) -> KreinTable:
    """q^h_ij = (m_i m_j / |X|) sum_l k_l sigma_i(l) sigma_j(l) sigma_h(l)."""
    n = Fraction(num_vertices if num_vertices is not None else spectral.num_vertices)
    ks = spectral.sphere_sizes
    ms = spectral.multiplicities
    sig = [cs.sigma for cs in spectral.cosines]
    d = len(sig) - 1
    q = [[[Fraction(0)] * (d + 1) for _ in range(d + 1)] for _ in range(d + 1)]
    for h in range(d + 1):
        for i in range(d + 1):
            for j in range(i, d + 1):
                s = sum(ks[l] * sig[i][l] * sig[j][l] * sig[h][l] for l in range(d + 1))
                q[h][i][j] = q[h][j][i] = ms[i] * ms[j] / n * s
    return KreinTable(q, spectral.exact)


@dataclass
class QPolynomialResult:
    holds: bool
    ordering: list[int]
    reason: str = ""


def is_q_polynomial_wrt_theta1(krein: KreinTable) -> QPolynomialResult:
    """Search for an ordering E_0, E_1, E_{s_2}, ... under which q^h_{1j}
    vanishes for |h - j| > 1 and q^{j+1}_{1j} > 0.

    Each step is forced: the next idempotent must be the only unused index in
    the support of q^._{1,current}.  Several candidates mean no ordering with
    this prefix exists, which is reported rather than guessed around.
    """
    d = krein.d
    order = [0, 1]
    while len(order) < d + 1:
        cur = order[-1]
        cands = [h for h in range(d + 1) if h not in order and not krein.is_zero(h, 1, cur)]
        if not cands:
            return QPolynomialResult(False, order, f"no successor of E_{cur} in support")
        if len(cands) > 1:
            return QPolynomialResult(False, order,
                                     f"ambiguous successors {cands} of E_{cur}")
        order.append(cands[0])
    pos = {e: p for p, e in enumerate(order)}
    for h in range(d + 1):
        for j in range(d + 1):
            if abs(pos[h] - pos[j]) > 1 and not krein.is_zero(h, 1, j):
                return QPolynomialResult(False, order, f"q^{h}_1{j} nonzero off the band")
    for p in range(d):
        j, nxt = order[p], order[p + 1]
        if krein.is_zero(nxt, 1, j) or float(krein.q[nxt][1][j]) <= 0:
            return QPolynomialResult(False, order, f"q^{nxt}_1{j} not positive")
    return QPolynomialResult(True, order)


def isclose_fraction(x, y, tol=RECURRENCE_TOL) -> bool:
    return math.isclose(float(x), float(y), abs_tol=tol) if x != y else True
