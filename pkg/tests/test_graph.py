import json
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nearpoly import graph as G
from nearpoly.graph import DistanceGraph, IntersectionArray, NotDistanceRegular


def from_nx(h, name=""):
    h = nx.convert_node_labels_to_integers(h)
    return DistanceGraph.from_edges(h.number_of_nodes(), h.edges(), name=name)


# -- intersection arrays ------------------------------------------------------------------

def test_parse_and_derived_quantities():
    arr = IntersectionArray.parse("6,4,2;1,2,3")
    assert str(arr) == "{6,4,2;1,2,3}"
    assert arr.d == 3 and arr.k == 6
    assert arr.a == [0, 1, 2, 3]
    assert arr.sphere_sizes() == [1, 6, 12, 8]
    assert arr.num_vertices == 27
    assert IntersectionArray.parse("{6,4,2;1,2,3}") == arr


@pytest.mark.parametrize("text", ["6,4;2,2", "6,4,2;1,2", "3,4;1,1", "4,5;1,2", "a;b", "2,2;1,3",
                                  "2,1;1,0"])
def test_invalid_arrays(text):
    with pytest.raises(ValueError):
        IntersectionArray.parse(text)


def test_near_polygon_array_conditions():
    assert IntersectionArray.parse("30,28,24;1,3,15").is_near_polygon_array()
    assert IntersectionArray.parse("6,4,2;1,2,3").is_near_2d_gon_array()
    # Johnson J(6,3): a_1 = 4, c_2 = 4, a_2 = 4 != a_1 c_2
    assert not IntersectionArray.parse("9,4,1;1,4,9").is_near_polygon_array()


# -- distances and extraction ---------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 30), p=st.floats(0.1, 0.6), seed=st.integers(0, 10**6))
def test_distances_match_networkx(n, p, seed):
    h = nx.gnp_random_graph(n, p, seed=seed)
    if not nx.is_connected(h):
        h = nx.compose(h, nx.path_graph(n))
    g = from_nx(h)
    D = g.distances()
    for u, lengths in nx.all_pairs_shortest_path_length(h):
        for v, dist in lengths.items():
            assert D[u, v] == dist


@pytest.mark.parametrize("builder,expected", [
    (nx.petersen_graph, "3,2;1,1"),
    (lambda: nx.cycle_graph(6), "2,1,1;1,1,2"),
    (nx.heawood_graph, "3,2,2;1,1,3"),
    (lambda: nx.hypercube_graph(4), "4,3,2,1;1,2,3,4"),
    (nx.dodecahedral_graph, "3,2,1,1,1;1,1,1,2,3"),
    (lambda: nx.complete_graph(5), "4;1"),
])
def test_extract_known_arrays(builder, expected):
    h = builder()
    g = from_nx(h)
    arr = G.extract_intersection_array(g)
    assert arr == IntersectionArray.parse(expected)
    assert arr.num_vertices == h.number_of_nodes()
    assert nx.is_distance_regular(h)


@pytest.mark.parametrize("builder", [lambda: nx.path_graph(4), lambda: nx.star_graph(3),
                                     nx.frucht_graph, lambda: nx.circular_ladder_graph(5)])
def test_not_distance_regular_has_witness(builder):
    h = builder()
    assert not nx.is_distance_regular(h)
    with pytest.raises(NotDistanceRegular) as info:
        G.extract_intersection_array(from_nx(h))
    assert "pair" in info.value.witness


def test_deleted_edge_breaks_regularity(h33):
    edges = h33.edges()[1:]
    g = DistanceGraph.from_edges(h33.n, edges)
    with pytest.raises(NotDistanceRegular):
        G.extract_intersection_array(g)


def test_disconnected_and_cap():
    g = DistanceGraph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(G.GraphError):
        g.distances()
    g = from_nx(nx.cycle_graph(12))
    with pytest.raises(G.GraphError):
        G.all_pairs_distances(g, cap=10)


def test_vertex_cap_env(monkeypatch):
    monkeypatch.setenv("NPL_VERTEX_CAP", "5")
    assert G.vertex_cap() == 5
    with pytest.raises(G.GraphError):
        G.all_pairs_distances(from_nx(nx.cycle_graph(6)))


def test_phij_table(h33):
    arr = G.extract_intersection_array(h33)
    p = G.phij_table(h33)
    k = [int(x) for x in arr.sphere_sizes()]
    d = arr.d
    for h in range(d + 1):
        for i in range(d + 1):
            assert sum(p[h][i][j] for j in range(d + 1)) == k[i]
    for i in range(d + 1):
        assert p[0][i][i] == k[i]
    for i in range(1, d + 1):
        assert p[i][1][i - 1] == arr.c_full[i]
        assert p[i][1][i] == arr.a[i]
    # k_h p^h_ij = k_i p^i_hj
    for h in range(d + 1):
        for i in range(d + 1):
            for j in range(d + 1):
                assert k[h] * p[h][i][j] == k[i] * p[i][h][j]


def test_phij_detects_irregularity():
    # Shrikhande-free check: the 4x4 rook graph is DRG, so the table exists
    g = from_nx(nx.cartesian_product(nx.complete_graph(4), nx.complete_graph(4)))
    assert G.phij_table(g)[1][1][1] == 2
    with pytest.raises(NotDistanceRegular):
        G.phij_table(from_nx(nx.path_graph(5)))


# -- near polygons ---------------------------------------------------------------------

def test_cliques_match_networkx(c32):
    mine = set(G.all_maximal_cliques(c32))
    h = nx.Graph(c32.edges())
    theirs = {frozenset(c) for c in nx.find_cliques(h) if len(c) >= 2}
    assert mine == theirs


@pytest.mark.parametrize("builder,is_np", [
    (nx.petersen_graph, True),
    (lambda: nx.cycle_graph(7), True),
    (lambda: nx.hypercube_graph(3), True),
    (nx.octahedral_graph, False),
    (lambda: nx.complete_graph(4), True),
])
def test_near_polygon_characterisations_agree(builder, is_np):
    rep = G.check_near_polygon(from_nx(builder()))
    assert rep.via_cliques == rep.via_forbidden_subgraph == is_np
    if not is_np:
        assert rep.witness


def test_induced_k121_witness():
    g = from_nx(nx.octahedral_graph())
    s, x, y, s2 = G.find_induced_k121(g)
    adj = [set(a) for a in g.adjacency]
    assert y in adj[x] and {s, s2} <= adj[x] & adj[y] and s2 not in adj[s]


def test_near_polygon_constructed(h33, c32):
    for g in (h33, c32):
        rep = G.check_near_polygon(g)
        assert rep.is_near_polygon and rep.is_near_2d_gon


def test_non_drg_near_polygon_report():
    rep = G.check_near_polygon(from_nx(nx.diamond_graph()))
    assert not rep.is_near_polygon and rep.witness


def test_local_distribution(h33, c32):
    for g in (h33, c32):
        arr = G.extract_intersection_array(g)
        rep = G.verify_local_distribution(g, arr)
        assert rep.ok and rep.pairs_checked == int(np.triu(g.distances() == 2).sum())


def test_local_distribution_hypotheses():
    g = from_nx(nx.petersen_graph())
    with pytest.raises(ValueError):
        G.verify_local_distribution(g, G.extract_intersection_array(g))


def test_distance2_sampling_is_seeded(c32):
    a = G.distance2_pairs(c32, limit=100, sample=50, seed=3)
    b = G.distance2_pairs(c32, limit=100, sample=50, seed=3)
    assert len(a) == 50 and (a == b).all()
    D = c32.distances()
    assert all(D[x, y] == 2 for x, y in a)


# -- serialisation ---------------------------------------------------------------------

def test_round_trip_json_and_edge_list(tmp_path, h33):
    for name in ("g.json", "g.txt"):
        path = tmp_path / name
        h33.save(path)
        back = DistanceGraph.load(path)
        assert back.n == h33.n and back.edges() == h33.edges()
    data = json.loads((tmp_path / "g.json").read_text())
    assert set(data) == {"name", "num_vertices", "edges", "labels"}
    assert data["labels"][0] == "1,1,1"


@pytest.mark.parametrize("content", ["", "   \n", "0 1 2\n", "a b\n", "{\"edges\": []}", "{bad json"])
def test_bad_graph_files(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(G.GraphError):
        DistanceGraph.load(path)


def test_self_loops_and_bad_vertices_rejected():
    with pytest.raises(G.GraphError):
        DistanceGraph.from_edges(3, [(0, 0)])
    with pytest.raises(G.GraphError):
        DistanceGraph.from_edges(3, [(0, 5)])
