"""Formed spaces over finite fields and the graphs built from them.

Dual polar graphs live on the maximal totally isotropic subspaces of a
non-degenerate formed space; Hamming graphs on words over an alphabet.
Both constructors return :class:`~nearpoly.graph.DistanceGraph` objects
with a deterministic vertex order.

Vectors and matrices hold field elements as their integer codes (see
:mod:`nearpoly.gf`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .gf import FieldElement, FiniteField, make_field
from .graph import DistanceGraph

VERTEX_GUARD = 50_000

FAMILIES = ("B", "C", "D", "2D", "2A_odd", "2A_even")

# family -> (ambient dimension as a function of d, epsilon, form kind)
FAMILY_TABLE = {
    "B": (lambda d: 2 * d + 1, Fraction(1), "quadratic"),
    "C": (lambda d: 2 * d, Fraction(1), "symplectic"),
    "D": (lambda d: 2 * d, Fraction(0), "quadratic"),
    "2D": (lambda d: 2 * d + 2, Fraction(2), "quadratic"),
    "2A_odd": (lambda d: 2 * d + 1, Fraction(3, 2), "hermitean"),
    "2A_even": (lambda d: 2 * d, Fraction(1, 2), "hermitean"),
}


class GuardExceeded(ValueError):
    """A construction would exceed its desk-scale size guard."""


def normalize_family(name: str) -> str:
    key = name.strip().replace("-", "_").replace("^", "")
    for fam in FAMILIES:
        if key.lower() == fam.lower():
            return fam
    raise ValueError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")


def q_power(q: int, exponent: Fraction) -> int:
    """``q**exponent`` for exponents in (1/2)Z, exact; q must be a square when
    the exponent is a half-integer."""
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        return q ** int(exponent)
    if exponent.denominator != 2:
        raise ValueError(f"exponent {exponent} is not a half-integer")
    r = int(round(q**0.5))
    while r * r > q:
        r -= 1
    while (r + 1) * (r + 1) <= q:
        r += 1
    if r * r != q:
        raise ValueError(f"{q} is not a square")
    return r ** int(2 * exponent)


def predicted_vertex_count(q: int, d: int, epsilon: Fraction) -> int:
    """Number of maximal isotropic subspaces: prod_{i<d} (q^(i+e) + 1)."""
    out = 1
    for i in range(d):
        out *= q_power(q, i + Fraction(epsilon)) + 1
    return out


def dual_polar_array(q: int, d: int, epsilon: Fraction):
    """Closed-form (b, c) lists for the dual polar graph with parameters (q, d, e)."""
    from .graph import IntersectionArray

    e = Fraction(epsilon)
    c = [(q**i - 1) // (q - 1) for i in range(1, d + 1)]
    b = [q_power(q, i + e) * (q ** (d - i) - 1) // (q - 1) for i in range(d)]
    return IntersectionArray(tuple(b), tuple(c))


def dual_polar_eigenvalues(q: int, d: int, epsilon: Fraction) -> list[int]:
    e = Fraction(epsilon)
    return [
        (q_power(q, d + e - i) - q_power(q, e) - q**i + 1) // (q - 1) for i in range(d + 1)
    ]


def hamming_array(d: int, n: int):
    from .graph import IntersectionArray

    return IntersectionArray(
        tuple((d - i) * (n - 1) for i in range(d)), tuple(range(1, d + 1))
    )


# --------------------------------------------------------------------------
# linear algebra over a finite field (rows are tuples of element codes)
# --------------------------------------------------------------------------

def rref(rows, F: FiniteField) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form with zero rows dropped."""
    m = [list(r) for r in rows]
    if not m:
        return ()
    ncols = len(m[0])
    pivot_row = 0
    for col in range(ncols):
        pr = next((r for r in range(pivot_row, len(m)) if m[r][col]), None)
        if pr is None:
            continue
        m[pivot_row], m[pr] = m[pr], m[pivot_row]
        inv = F.inv(m[pivot_row][col])
        m[pivot_row] = [F.mul(inv, x) for x in m[pivot_row]]
        for r in range(len(m)):
            if r != pivot_row and m[r][col]:
                f = m[r][col]
                m[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[r], m[pivot_row])]
        pivot_row += 1
        if pivot_row == len(m):
            break
    return tuple(tuple(r) for r in m[:pivot_row])


def rank(rows, F: FiniteField) -> int:
    return len(rref(rows, F))


def nullspace(rows, F: FiniteField, ncols: int | None = None) -> list[tuple[int, ...]]:
    """Basis of {x : M x = 0}."""
    R = rref(rows, F)
    if ncols is None:
        ncols = len(rows[0])
    pivots = [next(j for j, x in enumerate(r) if x) for r in R]
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for fcol in free:
        x = [0] * ncols
        x[fcol] = 1
        for r, pc in zip(R, pivots):
            x[pc] = F.neg(r[fcol])
        basis.append(tuple(x))
    return basis


def _matmul(A, B, F: FiniteField):
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = 0
            for a, brow in zip(row, B):
                if a and brow[j]:
                    acc = F.add(acc, F.mul(a, brow[j]))
            new.append(acc)
        out.append(tuple(new))
    return out


@dataclass(frozen=True, order=True)
class Subspace:
    """A subspace held by its canonical reduced-echelon basis."""

    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def label(self, F: FiniteField) -> str:
        sep = "" if F.order <= 10 else ","
        return "|".join(sep.join(str(x) for x in row) for row in self.basis)


# --------------------------------------------------------------------------
# formed spaces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PolarSpace:
    family: str
    field: FiniteField
    dim: int
    d: int
    epsilon: Fraction
    kind: str
    gram: tuple[tuple[int, ...], ...]
    quad: tuple[tuple[int, ...], ...] | None = dc_field(default=None)

    @property
    def q(self) -> int:
        # The parameter q of the closed forms is the order of the field of
        # definition (p^(2m) for the Hermitean families).
        return self.field.order

    @property
    def name(self) -> str:
        sub = {"B": "B_{d}", "C": "C_{d}", "D": "D_{d}", "2D": "2D_{d1}",
               "2A_odd": "2A_{d2}", "2A_even": "2A_{d3}"}[self.family]
        sub = sub.format(d=self.d, d1=self.d + 1, d2=2 * self.d, d3=2 * self.d - 1)
        base = self.field.p ** (self.field.n // 2 if self.kind == "hermitean" else self.field.n)
        return f"{sub}({base})"

    def predicted_count(self) -> int:
        return predicted_vertex_count(self.q, self.d, self.epsilon)

    def _sigma(self, v):
        if self.kind == "hermitean":
            return [self.field.conj(x) for x in v]
        return list(v)

    def bilinear(self, u, v) -> int:
        """u^T G sigma(v) on integer codes."""
        F = self.field
        if len(u) != self.dim or len(v) != self.dim:
            raise ValueError(f"vectors must have length {self.dim}")
        sv = self._sigma(v)
        acc = 0
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, g in enumerate(self.gram[i]):
                if g and sv[j]:
                    acc = F.add(acc, F.mul(ui, F.mul(g, sv[j])))
        return acc

    def quadratic(self, u) -> int:
        if self.quad is None:
            raise ValueError(f"family {self.family} carries no quadratic form")
        F = self.field
        if len(u) != self.dim:
            raise ValueError(f"vector must have length {self.dim}")
        acc = 0
        for i in range(self.dim):
            if not u[i]:
                continue
            for j in range(i, self.dim):
                c = self.quad[i][j]
                if c and u[j]:
                    acc = F.add(acc, F.mul(c, F.mul(u[i], u[j])))
        return acc

    def is_totally_isotropic(self, rows) -> bool:
        for i, u in enumerate(rows):
            if self.kind == "quadratic":
                if self.quadratic(u):
                    return False
            elif self.bilinear(u, u):
                return False
            for v in rows[i + 1:]:
                if self.bilinear(u, v):
                    return False
        return True


def _irreducible_binary_form(F: FiniteField) -> tuple[int, int]:
    """Smallest (t, s) with x^2 + t x + s irreducible over F."""
    for t in range(F.order):
        for s in range(1, F.order):
            if all(F.add(F.add(F.mul(x, x), F.mul(t, x)), s) for x in range(F.order)):
                return t, s
    raise AssertionError("no irreducible quadratic")  # pragma: no cover


def make_polar_space(family: str, d: int, p: int, m: int = 1) -> PolarSpace:
    """Canonical formed space for ``family`` with Witt index ``d`` over GF(p^m)
    (GF(p^(2m)) for the Hermitean families)."""
    family = normalize_family(family)
    if d < 1:
        raise ValueError("Witt index must be at least 1")
    dim_of, eps, kind = FAMILY_TABLE[family]
    F = make_field(p, 2 * m if kind == "hermitean" else m)
    N = dim_of(d)
    one, mone = 1, F.neg(1)
    gram = [[0] * N for _ in range(N)]
    quad = None
    if kind == "symplectic":
        for i in range(d):
            gram[2 * i][2 * i + 1] = one
            gram[2 * i + 1][2 * i] = mone
    elif kind == "hermitean":
        for i in range(N):
            gram[i][i] = one
    else:
        Q = [[0] * N for _ in range(N)]
        for i in range(d):
            Q[2 * i][2 * i + 1] = one
        if family == "B":
            Q[2 * d][2 * d] = one
        elif family == "2D":
            t, s = _irreducible_binary_form(F)
            Q[2 * d][2 * d] = one
            Q[2 * d][2 * d + 1] = t
            Q[2 * d + 1][2 * d + 1] = s
        for i in range(N):
            for j in range(i, N):
                if i == j:
                    gram[i][i] = F.add(Q[i][i], Q[i][i])
                else:
                    gram[i][j] = F.add(gram[i][j], Q[i][j])
                    gram[j][i] = F.add(gram[j][i], Q[i][j])
        quad = tuple(tuple(r) for r in Q)
    return PolarSpace(family, F, N, d, eps, kind, tuple(tuple(r) for r in gram), quad)


def form_value(space: PolarSpace, u, v) -> FieldElement:
    """The space's bilinear / sesquilinear form ``B(u, v)``."""
    codes = lambda w: [x.value if isinstance(x, FieldElement) else int(x) for x in w]
    return FieldElement(space.field, space.bilinear(codes(u), codes(v)))


def quadratic_value(space: PolarSpace, u) -> FieldElement:
    codes = [x.value if isinstance(x, FieldElement) else int(x) for x in u]
    return FieldElement(space.field, space.quadratic(codes))


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------

class _Vectorised:
    """Numpy helpers evaluating a space's forms on many vectors at once."""

    def __init__(self, space: PolarSpace):
        F = space.field
        self.space = space
        self.add_t, self.mul_t, _ = F.tables()
        self.N = space.dim
        q = F.order
        # candidates[c]: vectors with a leading 1 in column c
        self.candidates = []
        self.singular = []
        for c in range(self.N):
            tail = self.N - 1 - c
            free = np.array(list(itertools.product(range(q), repeat=tail)), dtype=np.int64)
            free = free.reshape(q**tail, tail)
            V = np.zeros((len(free), self.N), dtype=np.int64)
            V[:, c] = 1
            V[:, c + 1:] = free
            self.candidates.append(V)
            self.singular.append(self._self_value(V) == 0)

    def _sum(self, terms: np.ndarray) -> np.ndarray:
        acc = np.zeros(terms.shape[0], dtype=np.int64)
        for j in range(terms.shape[1]):
            acc = self.add_t[acc, terms[:, j]]
        return acc

    def _self_value(self, V: np.ndarray) -> np.ndarray:
        sp = self.space
        if sp.kind == "symplectic":
            return np.zeros(len(V), dtype=np.int64)
        if sp.kind == "quadratic":
            terms = []
            for i in range(self.N):
                for j in range(i, self.N):
                    c = sp.quad[i][j]
                    if c:
                        terms.append(self.mul_t[c, self.mul_t[V[:, i], V[:, j]]])
            if not terms:
                return np.zeros(len(V), dtype=np.int64)
            return self._sum(np.stack(terms, axis=1))
        conjV = self._conj_array(V)
        terms = []
        for i in range(self.N):
            for j in range(self.N):
                g = sp.gram[i][j]
                if g:
                    terms.append(self.mul_t[V[:, i], self.mul_t[g, conjV[:, j]]])
        return self._sum(np.stack(terms, axis=1))

    def _conj_array(self, V):
        F = self.space.field
        table = np.array([F.conj(a) for a in range(F.order)], dtype=np.int64)
        return table[V]

    def orthogonal_to(self, V: np.ndarray, w) -> np.ndarray:
        """Boolean mask of rows v of V with B(v, w) == 0."""
        sp = self.space
        sw = sp._sigma(w)
        F = sp.field
        g = [0] * self.N
        for i in range(self.N):
            acc = 0
            for j in range(self.N):
                if sp.gram[i][j] and sw[j]:
                    acc = F.add(acc, F.mul(sp.gram[i][j], sw[j]))
            g[i] = acc
        cols = [self.mul_t[V[:, i], g[i]] for i in range(self.N) if g[i]]
        if not cols:
            return np.ones(len(V), dtype=bool)
        return self._sum(np.stack(cols, axis=1)) == 0


def enumerate_maximal_isotropic(space: PolarSpace, guard: int = VERTEX_GUARD) -> list[Subspace]:
    """All d-dimensional totally isotropic subspaces, sorted by echelon basis.

    The search grows isotropic flags one dimension at a time.  A new row may
    only take a pivot column to the right of the existing pivots, in which the
    existing rows vanish; that makes the first j rows of every echelon basis
    its unique parent, so no subspace is produced twice.
    """
    predicted = space.predicted_count()
    if predicted > guard:
        raise GuardExceeded(f"{space.name}: {predicted} vertices exceeds guard {guard}")
    vec = _Vectorised(space)
    N, d = space.dim, space.d
    out: list[tuple[tuple[int, ...], ...]] = []

    def extend(rows: list[tuple[int, ...]], last_pivot: int):
        if len(rows) == d:
            out.append(tuple(rows))
            return
        for c in range(last_pivot + 1, N - (d - len(rows) - 1)):
            if any(r[c] for r in rows):
                continue
            V = vec.candidates[c]
            mask = vec.singular[c].copy()
            for r in rows:
                mask &= vec.orthogonal_to(V, r)
            for v in V[mask]:
                extend(rows + [tuple(int(x) for x in v)], c)

    extend([], -1)
    if not out:
        raise ValueError(f"{space.name}: no isotropic subspace of dimension {d}")
    first = out[0]
    if _extends(space, vec, first):
        raise ValueError(f"{space.name}: Witt index exceeds {d}; the form is degenerate")
    out.sort()
    return [Subspace(b) for b in out]


def _extends(space: PolarSpace, vec: _Vectorised, rows) -> bool:
    """Whether the isotropic subspace spanned by ``rows`` lies in a larger one."""
    F = space.field
    count = 0
    for V, sing in zip(vec.candidates, vec.singular):
        mask = sing.copy()
        for r in rows:
            mask &= vec.orthogonal_to(V, r)
        count += int(mask.sum())
    own_points = (F.order ** len(rows) - 1) // (F.order - 1)
    return count > own_points


def _projective_points(k: int, q: int):
    for c in range(k):
        for tail in itertools.product(range(q), repeat=k - 1 - c):
            yield (0,) * c + (1,) + tail


def hyperplanes(sub: Subspace, F: FiniteField) -> list[tuple[tuple[int, ...], ...]]:
    """Canonical bases of all codimension-1 subspaces of ``sub``."""
    k = sub.dim
    out = []
    for f in _projective_points(k, F.order):
        K = nullspace([f], F, ncols=k)
        out.append(rref(_matmul(K, sub.basis, F), F) if K else ())
    return out


def build_dual_polar_graph(space: PolarSpace, guard: int = VERTEX_GUARD) -> DistanceGraph:
    """Dual polar graph: maximal isotropics, adjacent when meeting in dimension d-1."""
    subs = enumerate_maximal_isotropic(space, guard=guard)
    F = space.field
    buckets: dict[tuple, list[int]] = {}
    for idx, s in enumerate(subs):
        for h in hyperplanes(s, F):
            buckets.setdefault(h, []).append(idx)
    edges = set()
    for members in buckets.values():
        for i, j in itertools.combinations(members, 2):
            edges.add((i, j))
    labels = [s.label(F) for s in subs]
    g = DistanceGraph.from_edges(len(subs), sorted(edges), name=space.name, labels=labels)
    g.subspaces = subs
    g.space = space
    return g


def build_hamming_graph(d: int, n: int, guard: int = VERTEX_GUARD) -> DistanceGraph:
    """H(d, n): words of length d over {1..n}, adjacent when differing in one place."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if n < 2:
        raise ValueError("n must be at least 2")
    if n**d > guard:
        raise GuardExceeded(f"H({d},{n}) has {n**d} vertices, exceeds guard {guard}")
    words = list(itertools.product(range(1, n + 1), repeat=d))
    weights = [n ** (d - 1 - j) for j in range(d)]
    edges = []
    for idx, w in enumerate(words):
        for j in range(d):
            for s in range(w[j] + 1, n + 1):
                edges.append((idx, idx + (s - w[j]) * weights[j]))
    labels = [",".join(map(str, w)) for w in words]
    return DistanceGraph.from_edges(len(words), edges, name=f"H({d},{n})", labels=labels)
