"""Double covers: construction, matching transport, PM equivalence."""

from __future__ import annotations

import random

import pytest

from genus_iso.errors import NotPerfect
from genus_iso.double_cover import (
    LabeledGraph,
    double,
    labeled_from_json,
    labeled_to_json,
    lift_matching,
    project_matching,
)

from oracles import perfect_matchings


def _k2(crossing: bool):
    edges = frozenset([(1, 2)])
    return LabeledGraph(vertices=(1, 2), edges=edges,
                        crossing=edges if crossing else frozenset(),
                        case="Klein")


def random_labeled(rng, case):
    nl, nr = rng.randint(1, 5), rng.randint(1, 5)
    left = [("l", i) for i in range(nl)]
    right = [("r", i) for i in range(nr)]
    edges = set()
    for u in left:
        for v in right:
            if rng.random() < 0.55:
                edges.add((min(u, v), max(u, v)))
    verts = sorted({x for e in edges for x in e}) or [("l", 0)]
    crossing = frozenset(e for e in edges if rng.random() < 0.4)
    return LabeledGraph(vertices=tuple(verts), edges=frozenset(edges),
                        crossing=crossing, case=case)


def test_double_k2_non_crossing():
    D = double(_k2(False))
    assert D.edges == frozenset([((1, 0), (2, 0)), ((1, 1), (2, 1))])


def test_double_k2_crossing():
    D = double(_k2(True))
    assert D.edges == frozenset([((1, 0), (2, 1)), ((1, 1), (2, 0))])


def test_double_size_and_bipartite():
    rng = random.Random(4)
    for _ in range(30):
        G = random_labeled(rng, rng.choice(("Klein", "Projective")))
        D = double(G)
        assert len(D.edges) == 2 * len(G.edges)
        assert len(D.vertices) == 2 * len(G.vertices)
        assert D.two_coloring() is not None


def test_pm_equivalence_both_cases():
    rng = random.Random(11)
    for trial in range(50):
        case = ("Klein", "Projective")[trial % 2]
        G = random_labeled(rng, case)
        D = double(G)
        has_g = bool(perfect_matchings(G.vertices, G.edges))
        has_d = bool(perfect_matchings(D.vertices, D.edges))
        assert has_g == has_d


def test_lift_is_perfect_and_round_trips():
    rng = random.Random(23)
    done = 0
    for _ in range(150):
        G = random_labeled(rng, rng.choice(("Klein", "Projective")))
        pms = perfect_matchings(G.vertices, G.edges)
        for M in pms[:2]:
            Mp = lift_matching(G, M)
            covered = {v for e in Mp for v in e}
            assert covered == set(double(G).vertices)
            assert project_matching(G, Mp) == M
            done += 1
    assert done >= 20


def test_projection_of_any_double_pm_is_pm():
    rng = random.Random(37)
    done = 0
    for _ in range(40):
        G = random_labeled(rng, rng.choice(("Klein", "Projective")))
        D = double(G)
        for Mp in perfect_matchings(D.vertices, D.edges)[:3]:
            M = project_matching(G, Mp)
            covered = {v for e in M for v in e}
            assert covered == set(G.vertices)
            assert M <= G.edges
            done += 1
    assert done >= 10


def test_eight_cycle_projection():
    G = LabeledGraph(vertices=(1, 2, 3, 4),
                     edges=frozenset([(1, 2), (2, 3), (3, 4), (1, 4)]),
                     crossing=frozenset([(1, 2)]), case="Klein")
    D = double(G)
    pms_d = perfect_matchings(D.vertices, D.edges)
    assert len(D.edges) == 8 and len(pms_d) == 2  # the double is an 8-cycle
    for Mp in pms_d:
        M = project_matching(G, Mp)
        assert {v for e in M for v in e} == {1, 2, 3, 4}


def test_lift_rejects_non_perfect():
    G = LabeledGraph(vertices=(1, 2, 3, 4),
                     edges=frozenset([(1, 2), (3, 4)]),
                     crossing=frozenset(), case="Projective")
    with pytest.raises(NotPerfect):
        lift_matching(G, frozenset([(1, 2)]))


def test_project_rejects_non_perfect():
    G = _k2(False)
    with pytest.raises(NotPerfect):
        project_matching(G, frozenset([((1, 0), (2, 0))]))


def test_doubled_edge_components_project_once():
    # both copies of the same edge matched: projection keeps the edge once
    G = _k2(False)
    Mp = frozenset([((1, 0), (2, 0)), ((1, 1), (2, 1))])
    assert project_matching(G, Mp) == frozenset([(1, 2)])


def test_json_round_trip():
    rng = random.Random(8)
    G = random_labeled(rng, "Projective")
    doc = labeled_to_json(G)
    G2 = labeled_from_json(doc)
    assert G2.edges == G.edges
    assert G2.crossing == G.crossing
    assert G2.case == G.case


def test_invalid_cases_rejected():
    with pytest.raises(ValueError):
        LabeledGraph(vertices=(1, 2), edges=frozenset([(1, 2)]),
                     crossing=frozenset(), case="Mobius")
    with pytest.raises(ValueError):
        LabeledGraph(vertices=(1, 2, 3), edges=frozenset([(1, 2), (2, 3), (1, 3)]),
                     crossing=frozenset(), case="Klein")  # odd cycle


def test_double_preserves_degrees():
    rng = random.Random(55)
    for _ in range(20):
        G = random_labeled(rng, "Klein")
        D = double(G)
        deg_g = {v: 0 for v in G.vertices}
        for (u, v) in G.edges:
            deg_g[u] += 1
            deg_g[v] += 1
        deg_d = {v: 0 for v in D.vertices}
        for (u, v) in D.edges:
            deg_d[u] += 1
            deg_d[v] += 1
        for v in G.vertices:
            assert deg_d[(v, 0)] == deg_g[v]
            assert deg_d[(v, 1)] == deg_g[v]
