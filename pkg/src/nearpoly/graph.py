"""Distance-graph core.

BFS distances, extraction of intersection numbers, the p^h_ij audit, clique
machinery and the two characterisations of near polygons.  Checkers return
the first counterexample they meet rather than a bare boolean.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

DEFAULT_VERTEX_CAP = 10_000


def vertex_cap() -> int:
    env = os.environ.get("NPL_VERTEX_CAP")
    return int(env) if env else DEFAULT_VERTEX_CAP


class GraphError(ValueError):
    """Malformed or unsupported graph input."""


class NotDistanceRegular(Exception):
    """Raised with a witness when pair-independence of some count fails."""

    def __init__(self, witness: dict):
        self.witness = witness
        super().__init__(_describe(witness))


def _describe(w: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in w.items())


@dataclass(frozen=True)
class IntersectionArray:
    """``{b_0, ..., b_{d-1}; c_1, ..., c_d}``."""

    b: tuple[int, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        object.__setattr__(self, "c", tuple(int(x) for x in self.c))
        if len(self.b) != len(self.c) or not self.b:
            raise ValueError("need d >= 1 entries in both halves of the array")
        if self.c[0] != 1:
            raise ValueError("c_1 must be 1")
        if any(x <= 0 for x in self.b) or any(x <= 0 for x in self.c):
            raise ValueError("b_0..b_{d-1} and c_1..c_d must be positive")
        if any(x < 0 for x in self.a):
            raise ValueError(f"negative a_i in {self}")
        if any(self.b[i + 1] > self.b[i] for i in range(self.d - 1)):
            raise ValueError("b_i must be non-increasing")
        if any(self.c[i + 1] < self.c[i] for i in range(self.d - 1)):
            raise ValueError("c_i must be non-decreasing")

    @classmethod
    def parse(cls, text: str) -> IntersectionArray:
        """Read ``"b0,b1,...;c1,c2,..."`` (braces optional)."""
        t = text.strip().strip("{}[]")
        if ";" not in t:
            raise ValueError(f"array {text!r} lacks the ';' separator")
        left, right = t.split(";")
        try:
            b = [int(x) for x in left.split(",") if x.strip()]
            c = [int(x) for x in right.split(",") if x.strip()]
        except ValueError as exc:
            raise ValueError(f"array {text!r}: {exc}") from None
        return cls(tuple(b), tuple(c))

    def __str__(self):
        return "{" + ",".join(map(str, self.b)) + ";" + ",".join(map(str, self.c)) + "}"

    @property
    def d(self) -> int:
        return len(self.b)

    @property
    def k(self) -> int:
        return self.b[0]

    @property
    def b_full(self) -> list[int]:
        return list(self.b) + [0]

    @property
    def c_full(self) -> list[int]:
        return [0] + list(self.c)

    @property
    def a(self) -> list[int]:
        k = self.k
        return [k - bi - ci for bi, ci in zip(self.b_full, self.c_full)]

    def sphere_sizes(self) -> list[Fraction]:
        """k_i = k_{i-1} b_{i-1} / c_i; integral for feasible arrays."""
        ks = [Fraction(1)]
        for i in range(1, self.d + 1):
            ks.append(ks[-1] * self.b[i - 1] / self.c[i - 1])
        return ks

    @property
    def num_vertices(self) -> Fraction:
        return sum(self.sphere_sizes())

    def is_near_polygon_array(self) -> bool:
        """a_i = a_1 c_i for i < d and a_d >= a_1 c_d."""
        a, c = self.a, self.c_full
        return all(a[i] == a[1] * c[i] for i in range(self.d)) and a[self.d] >= a[1] * c[self.d]

    def is_near_2d_gon_array(self) -> bool:
        return self.a[self.d] == self.a[1] * self.c_full[self.d]


class DistanceGraph:
    """Finite simple undirected graph with lazily computed distances."""

    def __init__(self, n: int, adjacency: list[tuple[int, ...]], name: str = "",
                 labels: list[str] | None = None):
        self.n = n
        self.adjacency = adjacency
        self.name = name
        self.labels = labels
        self._dist = None
        self._csr = None

    @classmethod
    def from_edges(cls, n: int, edges, name: str = "", labels=None) -> DistanceGraph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for {n} vertices")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, [tuple(sorted(s)) for s in nbrs], name=name, labels=labels)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def csr(self) -> sparse.csr_matrix:
        if self._csr is None:
            rows = np.repeat(np.arange(self.n), [len(a) for a in self.adjacency])
            cols = np.fromiter((v for a in self.adjacency for v in a), dtype=np.int64,
                               count=len(rows))
            data = np.ones(len(rows), dtype=np.int8)
            self._csr = sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        return self._csr

    def adjacency_matrix(self, dtype=float) -> np.ndarray:
        return self.csr().toarray().astype(dtype)

    def distances(self, cap: int | None = None) -> np.ndarray:
        if self._dist is None:
            self._dist = all_pairs_distances(self, cap=cap)
        return self._dist

    @property
    def diameter(self) -> int:
        return int(self.distances().max())

    # -- serialisation --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "num_vertices": self.n,
            "edges": [[u, v] for u, v in self.edges()],
            "labels": list(self.labels) if self.labels else [str(i) for i in range(self.n)],
        }

    def save(self, path) -> None:
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_json()))
        else:
            path.write_text("".join(f"{u} {v}\n" for u, v in self.edges()))

    @classmethod
    def from_json(cls, data: dict) -> DistanceGraph:
        try:
            n = int(data["num_vertices"])
            edges = data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"graph JSON missing field: {exc}") from None
        return cls.from_edges(n, edges, name=data.get("name", ""), labels=data.get("labels"))

    @classmethod
    def load(cls, path) -> DistanceGraph:
        path = Path(path)
        text = path.read_text()
        if not text.strip():
            raise GraphError(f"{path}: empty graph file")
        if text.lstrip().startswith("{"):
            try:
                return cls.from_json(json.loads(text))
            except json.JSONDecodeError as exc:
                raise GraphError(f"{path}: {exc}") from None
        return cls.from_edge_list(text, name=path.stem)

    @classmethod
    def from_edge_list(cls, text: str, name: str = "") -> DistanceGraph:
        edges = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected 'u v', got {line!r}")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer vertex in {line!r}") from None
        if not edges:
            raise GraphError("edge list contains no edges")
        n = max(max(e) for e in edges) + 1
        return cls.from_edges(n, edges, name=name)


def all_pairs_distances(g: DistanceGraph, cap: int | None = None) -> np.ndarray:
    """Dense uint8 distance table by BFS from every vertex."""
    cap = vertex_cap() if cap is None else cap
    if g.n > cap:
        raise GraphError(
            f"{g.n} vertices exceeds the all-pairs cap {cap} (set NPL_VERTEX_CAP to override)")
    out = np.empty((g.n, g.n), dtype=np.uint8)
    A = g.csr()
    chunk = max(1, min(g.n, 2_000_000 // max(g.n, 1)))
    for start in range(0, g.n, chunk):
        idx = np.arange(start, min(g.n, start + chunk))
        D = csgraph.shortest_path(A, method="D", unweighted=True, directed=False, indices=idx)
        if np.isinf(D).any():
            raise GraphError("graph is disconnected")
        if D.max() > 255:
            raise GraphError("diameter exceeds 255")
        out[idx] = D.astype(np.uint8)
    return out


def extract_intersection_array(g: DistanceGraph) -> IntersectionArray:
    """Count |C(x,y)|, |A(x,y)|, |B(x,y)| over all pairs; raise
    :class:`NotDistanceRegular` at the first pair whose counts differ from
    those already seen at the same distance."""
    D = g.distances().astype(np.int16)
    d = int(D.max())
    seen: list[tuple[int, int, int] | None] = [None] * (d + 1)
    first_pair: list[tuple[int, int] | None] = [None] * (d + 1)
    for x in range(g.n):
        nb = np.array(g.adjacency[x], dtype=np.int64)
        dx = D[x]
        Dn = D[nb] if len(nb) else np.zeros((0, g.n), dtype=np.int16)
        cnt_c = (Dn == dx - 1).sum(axis=0)
        cnt_a = (Dn == dx).sum(axis=0)
        cnt_b = (Dn == dx + 1).sum(axis=0)
        for i in range(d + 1):
            ys = np.flatnonzero(dx == i)
            if len(ys) == 0:
                continue
            trip = np.stack([cnt_c[ys], cnt_a[ys], cnt_b[ys]], axis=1)
            ref = seen[i]
            if ref is None:
                ref = tuple(int(v) for v in trip[0])
                seen[i] = ref
                first_pair[i] = (x, int(ys[0]))
            bad = np.flatnonzero((trip != np.array(ref)).any(axis=1))
            if len(bad):
                y = int(ys[bad[0]])
                raise NotDistanceRegular({
                    "pair": (x, y), "distance": i,
                    "counts(c,a,b)": tuple(int(v) for v in trip[bad[0]]),
                    "expected": ref, "reference_pair": first_pair[i],
                })
    c = [seen[i][0] for i in range(1, d + 1)]
    b = [seen[i][2] for i in range(d)]
    return IntersectionArray(tuple(b), tuple(c))


def distance_matrices(g: DistanceGraph) -> list[np.ndarray]:
    D = g.distances()
    return [(D == i).astype(float) for i in range(int(D.max()) + 1)]


def verify_phij(g: DistanceGraph, h: int, i: int, j: int) -> int:
    """The constant |Gamma_i(x) & Gamma_j(y)| over pairs at distance h."""
    D = g.distances()
    if h > D.max():
        raise ValueError(f"no pairs at distance {h}")
    Ai = (D == i).astype(np.int32)
    Aj = (D == j).astype(np.int32)
    P = Ai @ Aj
    xs, ys = np.nonzero(D == h)
    vals = P[xs, ys]
    bad = np.flatnonzero(vals != vals[0])
    if len(bad):
        raise NotDistanceRegular({
            "pair": (int(xs[bad[0]]), int(ys[bad[0]])), "distance": h,
            f"p^{h}_{i}{j}": int(vals[bad[0]]), "expected": int(vals[0]),
        })
    return int(vals[0])


def phij_table(g: DistanceGraph) -> list[list[list[int]]]:
    """p[h][i][j] for every triple, raising at the first non-constant count."""
    D = g.distances()
    d = int(D.max())
    mats = [(D == i).astype(np.int32) for i in range(d + 1)]
    locs = [np.nonzero(D == h) for h in range(d + 1)]
    p = [[[0] * (d + 1) for _ in range(d + 1)] for _ in range(d + 1)]
    for i in range(d + 1):
        for j in range(i, d + 1):
            P = mats[i] @ mats[j]
            for h, (xs, ys) in enumerate(locs):
                vals = P[xs, ys]
                bad = np.flatnonzero(vals != vals[0])
                if len(bad):
                    raise NotDistanceRegular({
                        "pair": (int(xs[bad[0]]), int(ys[bad[0]])), "distance": h,
                        f"p^{h}_{i}{j}": int(vals[bad[0]]), "expected": int(vals[0]),
                    })
                p[h][i][j] = p[h][j][i] = int(vals[0])
    return p


def is_clique(g: DistanceGraph, verts) -> bool:
    verts = list(verts)
    for idx, u in enumerate(verts):
        nb = set(g.adjacency[u])
        if any(v not in nb for v in verts[idx + 1:]):
            return False
    return True


def maximal_cliques_through_edge(g: DistanceGraph, x: int, y: int) -> list[frozenset[int]]:
    """All maximal cliques containing the edge {x, y}.

    When the common neighbourhood of x and y is itself a clique it is the only
    candidate; otherwise fall back to Bron-Kerbosch on that neighbourhood.
    """
    if y not in g.adjacency[x]:
        raise ValueError(f"{x} and {y} are not adjacent")
    common = sorted(set(g.adjacency[x]) & set(g.adjacency[y]))
    if is_clique(g, common):
        return [frozenset([x, y, *common])]
    import networkx as nx

    sub = nx.Graph()
    sub.add_nodes_from(common)
    cs = set(common)
    for u in common:
        sub.add_edges_from((u, v) for v in g.adjacency[u] if v in cs and u < v)
    return sorted((frozenset([x, y, *c]) for c in nx.find_cliques(sub)), key=sorted)


def all_maximal_cliques(g: DistanceGraph) -> list[frozenset[int]]:
    found = set()
    for u, v in g.edges():
        found.update(maximal_cliques_through_edge(g, u, v))
    return sorted(found, key=sorted)


@dataclass
class NearPolygonReport:
    is_near_polygon: bool
    via_cliques: bool
    via_forbidden_subgraph: bool
    is_near_2d_gon: bool
    witness: dict | None = None
    details: dict = field(default_factory=dict)


def find_induced_k121(g: DistanceGraph) -> tuple[int, int, int, int] | None:
    """Return (s, x, y, s') spanning an induced K_{1,2,1}, or None.

    The graph has no induced K_{1,2,1} iff every local graph is a disjoint
    union of cliques, i.e. adjacent vertices of a local graph have equal
    closed local neighbourhoods.
    """
    adj_sets = [set(a) for a in g.adjacency]
    for x in range(g.n):
        nb = g.adjacency[x]
        nbset = adj_sets[x]
        for y in nb:
            if y < x:
                continue
            local_y = adj_sets[y] & nbset
            for s in local_y:
                for s2 in local_y:
                    if s < s2 and s2 not in adj_sets[s]:
                        return (s, x, y, s2)
    return None


def check_near_polygon(g: DistanceGraph, arr: IntersectionArray | None = None) -> NearPolygonReport:
    """Run the clique definition and the K_{1,2,1}/array characterisation.

    Without ``arr`` the array is extracted first; a graph that is not
    distance-regular is reported as no near polygon, with an induced
    K_{1,2,1} as witness when one exists.
    """
    if arr is None:
        try:
            arr = extract_intersection_array(g)
        except NotDistanceRegular as exc:
            k121 = find_induced_k121(g)
            witness = {"induced_K121(s,x,y,s')": k121} if k121 else {"not_distance_regular": exc.witness}
            return NearPolygonReport(False, False, False, False, witness)
    D = g.distances()
    d = arr.d
    a1 = arr.a[1]
    witness = None

    # (A) clique definition
    via_cliques = True
    cliques = all_maximal_cliques(g)
    has_far_clique = False
    for cl in cliques:
        if len(cl) != a1 + 2:
            via_cliques = False
            witness = witness or {"clique": sorted(cl), "size": len(cl), "expected": a1 + 2}
            break
    if via_cliques:
        for cl in cliques:
            cols = D[:, sorted(cl)].astype(np.int16)
            mn = cols.min(axis=1)
            n_min = (cols == mn[:, None]).sum(axis=1)
            rest_ok = ((cols == mn[:, None]) | (cols == mn[:, None] + 1)).all(axis=1)
            far = (cols == d).all(axis=1)
            ok = far | ((n_min == 1) & rest_ok & (mn <= d - 1))
            if far.any():
                has_far_clique = True
            if not ok.all():
                x = int(np.flatnonzero(~ok)[0])
                via_cliques = False
                witness = {"clique": sorted(cl), "vertex": x,
                           "distances": [int(v) for v in cols[x]]}
                break

    # (B) forbidden subgraph plus a_i = a_1 c_i
    k121 = find_induced_k121(g)
    a, c = arr.a, arr.c_full
    bad_i = next((i for i in range(d) if a[i] != a1 * c[i]), None)
    via_forbidden = k121 is None and bad_i is None
    if witness is None and k121 is not None:
        witness = {"induced_K121(s,x,y,s')": k121}
    if witness is None and bad_i is not None:
        witness = {"i": bad_i, "a_i": a[bad_i], "a1*c_i": a1 * c[bad_i]}

    is_np = via_cliques and via_forbidden
    near_2d = is_np and a[d] == a1 * c[d]
    details = {"num_maximal_cliques": len(cliques), "has_clique_at_distance_d": has_far_clique}
    return NearPolygonReport(is_np, via_cliques, via_forbidden, near_2d, witness, details)


@dataclass
class LocalDistributionReport:
    ok: bool
    pairs_checked: int
    witness: dict | None = None


def distance2_pairs(g: DistanceGraph, limit: int = 10_000, sample: int = 1_000,
                    seed: int = 0x5EED) -> np.ndarray:
    """Unordered pairs at distance 2; all of them when there are at most
    ``limit``, otherwise ``sample`` drawn with a fixed seed."""
    D = g.distances()
    xs, ys = np.nonzero(np.triu(D == 2))
    pairs = np.stack([xs, ys], axis=1)
    if len(pairs) > limit:
        rng = np.random.default_rng(seed)
        pairs = pairs[np.sort(rng.choice(len(pairs), size=sample, replace=False))]
    return pairs


def verify_local_distribution(g: DistanceGraph, arr: IntersectionArray,
                              seed: int = 0x5EED) -> LocalDistributionReport:
    """For x, y at distance 2 and z in A(x,y): z has c_2-1 neighbours in A(y,x)
    and is at distance 2 from the other a_2-c_2+1, and |C(x,y) & C(z,y)| = 1."""
    a1, c2, a2 = arr.a[1], arr.c_full[2], arr.a[2]
    if arr.d < 2 or a1 <= 0 or c2 <= 1:
        raise ValueError(f"hypotheses a_1 > 0, c_2 > 1 fail for {arr}")
    if not arr.is_near_polygon_array():
        raise ValueError(f"{arr} fails the near-polygon array conditions")
    D = g.distances()
    adj = [set(a) for a in g.adjacency]
    pairs = distance2_pairs(g, seed=seed)
    for x, y in pairs:
        for (p, r) in ((x, y), (y, x)):
            A_pr = [z for z in adj[p] if D[z, r] == 2]
            A_rp = [w for w in adj[r] if D[w, p] == 2]
            C_pr = {s for s in adj[p] if D[s, r] == 1}
            for z in A_pr:
                nbrs = sum(1 for w in A_rp if w in adj[z])
                far = sum(1 for w in A_rp if D[z, w] == 2)
                C_zr = {s for s in adj[z] if D[s, r] == 1}
                if nbrs != c2 - 1 or far != a2 - c2 + 1 or len(C_pr & C_zr) != 1:
                    return LocalDistributionReport(False, len(pairs), {
                        "x": int(p), "y": int(r), "z": int(z), "neighbours_in_A(y,x)": nbrs,
                        "at_distance_2": far, "|C(x,y)&C(z,y)|": len(C_pr & C_zr),
                    })
    return LocalDistributionReport(True, len(pairs))
