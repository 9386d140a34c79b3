import json
import random

import pytest

from ltlab.strata import cm_embeddings, quad_ext
from ltlab.tower_graph import (DualGraph, Vertex, blow_down, check_depth_zero, cm_branching, depth_zero_ball,
                               dl_invariant_genus, export, from_json, genus_total, modular_graph,
                               orbit_stabilizer_check, quotient, sprout)


def rational(vid, end=None):
    return Vertex(vid, 0, "ramified-depth0", "P1", 0, end=end)


def test_radius_one_ball():
    G = depth_zero_ball(3, 1)
    kinds = sorted(v.kind for v in G.vertices.values())
    assert kinds == ["ramified-depth0"] * 4 + ["unramified-depth0"]
    assert len(G.edges) == 4 and G.is_tree()


def test_radius_zero_and_two():
    assert len(depth_zero_ball(5, 0).vertices) == 1
    G = depth_zero_ball(3, 2)
    assert sum(v.kind == "unramified-depth0" for v in G.vertices.values()) == 1 + 4


@pytest.mark.parametrize("q", [3, 5])
@pytest.mark.parametrize("radius", range(5))
def test_ball_is_tree_with_degrees(q, radius):
    G = depth_zero_ball(q, radius)
    assert all(check_depth_zero(G).values())
    assert G.betti1() == 0


def test_ball_errors():
    with pytest.raises(ValueError):
        depth_zero_ball(3, 7)
    with pytest.raises(ValueError):
        depth_zero_ball(4, 1)


def test_sprout_labels():
    G = depth_zero_ball(3, 1)
    H = sprout(G, "U0", quad_ext(3, "unramified"), 2)
    wild = sorted((v.depth, v.curve) for v in H.vertices.values() if v.kind == "wild")
    assert wild == [(1, "BigAS"), (2, "BigAS")]
    H = sprout(G, "R1:b0", quad_ext(3, "ramified-pi"), 2)
    wild = sorted((v.depth, v.curve, v.genus) for v in H.vertices.values() if v.kind == "wild")
    assert wild == [(1, "P1", 0), (2, "Hyper", 1)]
    assert len(sprout(G, "U0", quad_ext(3, "unramified"), 0).vertices) == len(G.vertices)


def test_sprout_rejects_mismatched_kind():
    G = depth_zero_ball(3, 1)
    with pytest.raises(ValueError):
        sprout(G, "U0", quad_ext(3, "ramified-pi"), 1)
    with pytest.raises(ValueError):
        sprout(G, "R1:b0", quad_ext(3, "unramified"), 1)


def test_cm_branching_matches_embedding_counts():
    E0 = quad_ext(3, "unramified")
    assert cm_branching(E0, 2) == [6, 9]
    assert cm_embeddings(E0, 2).num_embeddings == 6 * 9
    E1 = quad_ext(3, "ramified-pi")
    b = cm_branching(E1, 3)
    # the q+1 ramified neighbours share the ramified embeddings
    assert 4 * b[0] == cm_embeddings(E1, 1).num_embeddings
    assert 4 * b[0] * b[1] * b[2] == cm_embeddings(E1, 2).num_embeddings


def test_quotient_by_gl2_of_radius_one():
    Q = quotient(depth_zero_ball(3, 1), 0)
    assert sorted(v.kind for v in Q.vertices.values()) == ["ramified-depth0", "unramified-depth0"]
    assert len(Q.edges) == 1


def test_quotient_by_deep_level_is_identity():
    G = depth_zero_ball(3, 4)
    Q = quotient(G, 2)
    assert len(Q.vertices) == len(G.vertices) and len(Q.edges) == len(G.edges)
    assert set(Q.meta["orbits"].values()) == {1}


def test_orbit_stabilizer():
    G = sprout(depth_zero_ball(3, 1), "U0", quad_ext(3, "unramified"), 1, "cm")
    for _, orbit, stab, order in orbit_stabilizer_check(G):
        assert orbit * stab == order


def test_quotient_needs_descriptors():
    G = sprout(depth_zero_ball(3, 1), "U0", quad_ext(3, "unramified"), 1)
    with pytest.raises(ValueError):
        quotient(G, 1)


def test_quotient_keeps_wild_labels_below_conductor():
    G = sprout(depth_zero_ball(3, 2), "U0", quad_ext(3, "unramified"), 2, "cm")
    Q = quotient(G, 2)
    level1 = [v for v in Q.vertices.values() if v.kind == "wild" and v.depth == 1]
    assert level1 and all(v.curve == "BigAS" for v in level1)
    assert all(v.curve == "P1" for v in Q.vertices.values() if v.kind == "wild" and v.depth == 2)


def test_dl_unipotent_quotient_is_rational():
    assert dl_invariant_genus(3, "unipotent") == 0
    assert dl_invariant_genus(3, "SL2") == 0


def test_blow_down_path():
    G = DualGraph(3)
    G.add_vertex(rational("a", end="boundary:x"))
    G.add_vertex(rational("e", end="boundary:y"))
    for v in "bcd":
        G.add_vertex(rational(v))
    for a, b in ("ab", "bc", "cd", "de"):
        G.add_edge(a, b)
    H = blow_down(G)
    assert sorted(H.vertices) == ["a", "e"] and H.edges == [("a", "e")]


def test_blow_down_cycle():
    G = DualGraph(3)
    G.add_vertex(Vertex("h", 0, "wild", "Hyper", 1))
    for v in "abc":
        G.add_vertex(Vertex(v, 0, "wild", "Hyper", 1))
    G.add_vertex(rational("r"))
    for a, b in ("ab", "bc", "cr", "ra"):
        G.add_edge(a, b)
    G.add_edge("h", "a")
    H = blow_down(G)
    assert "r" not in H.vertices and H.betti1() == G.betti1() == 1


def test_blow_down_marked_only():
    G = DualGraph(3)
    G.add_vertex(rational("a", end="canonical:E0"))
    G.add_vertex(rational("b", end="canonical:E1"))
    G.add_edge("a", "b")
    H = blow_down(G)
    assert to_dict(H) == to_dict(G)


def to_dict(G):
    return json.loads(export(G, "json"))


def random_graph(rng: random.Random) -> DualGraph:
    G = DualGraph(3)
    n = rng.randint(1, 9)
    for i in range(n):
        g = rng.choice([0, 0, 0, 1, 3])
        end = rng.choice([None, None, None, "canonical:E0", "boundary:b0"])
        G.add_vertex(Vertex(f"v{i}", 0, "wild", "P1" if g == 0 else "Hyper", g, end=end))
    for _ in range(rng.randint(0, 2 * n)):
        G.add_edge(f"v{rng.randrange(n)}", f"v{rng.randrange(n)}")
    return G


def test_blow_down_random_graphs():
    rng = random.Random(0)
    for _ in range(1000):
        G = random_graph(rng)
        H = blow_down(G)
        assert genus_total(H) == genus_total(G)
        assert H.ends() == G.ends()
        assert to_dict(blow_down(H)) == to_dict(H)


def test_genus_total_examples():
    G = depth_zero_ball(3, 2)
    for v in G.vertices.values():
        v.genus = 0
    assert genus_total(G) == 0
    G.vertices["R1:b0"].genus = 1
    assert genus_total(G) == 1
    H = DualGraph(3)
    H.add_vertex(rational("a"))
    H.add_vertex(rational("b"))
    H.add_edge("a", "b")
    H.add_edge("a", "b")
    assert genus_total(H) == 1
    H.vertices["a"].genus = None
    with pytest.raises(ValueError):
        genus_total(H)


def test_export_dot_and_json():
    G = depth_zero_ball(3, 1)
    dot = export(G, "dot").decode()
    assert dot.count("label=") == 5 and dot.count(" -- ") == 4
    assert "color=blue" in dot and "color=black" in dot
    assert export(G, "dot") == export(G.copy(), "dot")
    assert export(DualGraph(3), "dot").decode().startswith("graph G {")
    H = from_json(export(G, "json"))
    assert export(H, "json") == export(G, "json")
    with pytest.raises(ValueError):
        export(G, "svg")


def test_modular_graph_level_one():
    G = modular_graph(3, 1, {"s": 1, "igusa_genus": 0})
    igusa = [v for v in G.vertices.values() if v.curve == "Igusa"]
    assert len(igusa) == 4 and G.ends() == []
    others = [v for v in G.vertices.values() if v.curve != "Igusa"]
    assert [(v.curve, v.genus) for v in others] == [("DL", 3)]
    assert len(G.edges) == 4 and len(G.components()) == 1


def test_modular_graph_s_values():
    G = modular_graph(3, 1, {"s": 0, "igusa_genus": 0})
    assert len(G.vertices) == 4 and not G.edges and G.meta["degenerate"]
    G = modular_graph(3, 1, {"s": 2, "igusa_genus": 1})
    # two DL copies joined through four Igusa vertices
    assert genus_total(G) == 2 * 3 + 4 * 1 + (8 - 6 + 1)
    with pytest.raises(ValueError):
        modular_graph(3, 1, {"s": 1})
