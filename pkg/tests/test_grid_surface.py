"""Layout validation, gluing identities, bipartiteness, generation."""

from __future__ import annotations

import json
import random

import pytest

from genus_iso.errors import (
    BoundaryEdgeForbidden,
    InfeasibleDensity,
    NonUnitEdge,
    OutOfBounds,
    PerimeterMismatch,
    SegmentLengthOdd,
)
from genus_iso.grid_surface import (
    GenusGrid,
    Interior,
    Port,
    SegmentLayout,
    build_grid,
    canonical_id,
    gen_instance,
    instance_from_json,
    instance_to_json,
    legal_edges,
    random_layout,
    verify_bipartite,
)
from genus_iso.cycle_oracle import enumerate_simple_cycles

from oracles import perfect_matchings


def test_layout_accepts_even_lengths():
    lay = SegmentLayout(g=1, m=2, lengths=(2, 4))
    assert lay.size == 4
    assert len(lay.scan) == 12


def test_empty_instance_is_valid():
    lay = SegmentLayout(g=1, m=2, lengths=(2, 4))
    G = build_grid(lay, [])
    assert G.n_vertices == 0
    assert not G.edges


def test_odd_segment_length_rejected():
    with pytest.raises(SegmentLengthOdd):
        SegmentLayout(g=1, m=2, lengths=(3, 3))


def test_perimeter_mismatch_rejected():
    with pytest.raises(PerimeterMismatch):
        SegmentLayout(g=1, m=2, lengths=(2, 2))
    with pytest.raises(PerimeterMismatch):
        SegmentLayout(g=2, m=2, lengths=(2, 2, 2, 2))  # needs 4m-2 = 6 < 8


def test_border_edge_rejected():
    lay = SegmentLayout(g=1, m=2, lengths=(2, 4))
    with pytest.raises(BoundaryEdgeForbidden):
        build_grid(lay, [(Interior(1, 4), Interior(2, 4))])


def test_non_unit_edge_rejected():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    with pytest.raises(NonUnitEdge):
        build_grid(lay, [(Interior(2, 2), Interior(3, 3))])


def test_junction_cell_edge_rejected():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    # the first cell of S2 is a junction; its perpendicular edge is banned
    cell = lay.port_cell(2, False, 1)
    inner = (cell[0], cell[1] - 1) if cell[1] == lay.size else cell
    with pytest.raises(BoundaryEdgeForbidden):
        build_grid(lay, [(Port("S2", 1), Interior(*inner))])


def test_canonical_id_pairs_all_ports():
    for seed in range(20):
        rng = random.Random(seed)
        g = rng.choice((1, 2))
        m = rng.randint(2 if g == 1 else 3, 6)
        lay = random_layout(g, m, rng)
        seen = {}
        for i in range(1, 2 * g + 1):
            ln = lay.lengths[i - 1]
            for j in range(1, ln + 1):
                a = canonical_id(lay, Port(f"S{i}", j))
                b = canonical_id(lay, Port(f"S{i}p", j))
                assert a == b
                # idempotence through the canonical port form
                assert canonical_id(lay, Port(f"S{a[1]}", a[2])) == a
                seen.setdefault(a, set()).add((i, j))


def test_port_cell_bijection_onto_border():
    lay = SegmentLayout(g=2, m=3, lengths=(2, 2, 2, 4))
    cells = set()
    for i in range(1, 5):
        for j in range(1, lay.lengths[i - 1] + 1):
            for primed in (False, True):
                cells.add(lay.port_cell(i, primed, j))
    assert cells == set(lay.scan)
    assert len(lay.scan) == 8 * lay.m - 4


def test_interior_maps_to_itself():
    lay = SegmentLayout(g=1, m=2, lengths=(2, 4))
    assert canonical_id(lay, Interior(3, 3)) == ("i", 3, 3)


def test_port_index_out_of_bounds():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    with pytest.raises(OutOfBounds):
        canonical_id(lay, Port("S1", 5))
    with pytest.raises(OutOfBounds):
        canonical_id(lay, Port("S3", 1))
    with pytest.raises(OutOfBounds):
        canonical_id(lay, Interior(0, 1))


def test_bipartite_on_seeded_instances():
    for seed in range(100):
        rng = random.Random(seed)
        g = rng.choice((1, 2))
        m = rng.randint(2 if g == 1 else 3, 5)
        lay = random_layout(g, m, rng)
        G = gen_instance(lay, seed, rng.choice((0.3, 0.6, 1.0)))
        kind, coloring = verify_bipartite(G)
        assert kind == "coloring"
        for (u, v) in G.edges:
            assert coloring[u] != coloring[v]


def test_corrupted_instance_yields_odd_cycle():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    G = build_grid(lay, [
        (Interior(2, 2), Interior(3, 2)),
        (Interior(3, 2), Interior(3, 3)),
        (Interior(3, 3), Interior(2, 3)),
        (Interior(2, 3), Interior(2, 2)),
    ])
    # inject a diagonal shortcut (violates the unit-edge rule on purpose)
    bogus = (("i", 2, 2), ("i", 3, 3))
    edges = dict(G.edge_cells)
    edges[bogus] = ((2, 2), (3, 3))
    bad = GenusGrid(layout=lay, vertices=G.vertices,
                    edges=frozenset(edges), edge_cells=edges)
    kind, cyc = verify_bipartite(bad)
    assert kind == "odd_cycle"
    assert cyc[0] == cyc[-1]
    assert (len(cyc) - 1) % 2 == 1


def test_every_cycle_even_on_small_instances():
    for seed in range(30):
        rng = random.Random(200 + seed)
        g = rng.choice((1, 2))
        m = 2 if g == 1 else 3
        lay = random_layout(g, m, rng)
        G = gen_instance(lay, seed, 1.0)
        if G.n_vertices > 24:
            continue
        for C in enumerate_simple_cycles(G):
            assert len(C) % 2 == 0


def test_gen_instance_deterministic():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    a = gen_instance(lay, 7, 0.5)
    b = gen_instance(lay, 7, 0.5)
    assert a.edges == b.edges
    c = gen_instance(lay, 8, 0.5)
    assert c.edges != a.edges


def test_gen_density_zero_plants_unique_pm():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    G = gen_instance(lay, 7, 0.0)
    pms = perfect_matchings(G.vertices, G.edges)
    assert len(pms) == 1
    assert pms[0] == G.edges


def test_gen_ensure_pm_has_pm():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    G = gen_instance(lay, 7, 0.5)
    assert perfect_matchings(G.vertices, G.edges)


def test_gen_bad_density():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    with pytest.raises(InfeasibleDensity):
        gen_instance(lay, 7, 1.5)


def test_border_cells_carry_at_most_one_edge():
    for seed in range(20):
        rng = random.Random(seed)
        lay = random_layout(1, 4, rng)
        G = gen_instance(lay, seed, 1.0)
        per_cell = {}
        for e, (ca, cb) in G.edge_cells.items():
            for c in (ca, cb):
                if lay.is_border(c):
                    per_cell[c] = per_cell.get(c, 0) + 1
        assert all(v == 1 for v in per_cell.values())
        for (ca, cb) in G.edge_cells.values():
            assert not (lay.is_border(ca) and lay.is_border(cb))


def test_json_round_trip():
    for seed in range(25):
        rng = random.Random(seed)
        g = rng.choice((1, 2))
        m = rng.randint(2 if g == 1 else 3, 5)
        lay = random_layout(g, m, rng)
        G = gen_instance(lay, seed, 0.7)
        doc = json.loads(json.dumps(instance_to_json(G)))
        G2 = instance_from_json(doc)
        assert G2.edges == G.edges
        assert G2.edge_cells == G.edge_cells


def test_json_ports_written_unprimed():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    G = gen_instance(lay, 3, 1.0)
    doc = instance_to_json(G)
    for (a, b) in doc["edges"]:
        for pos in (a, b):
            if "seg" in pos:
                assert not pos["seg"].endswith("p")


def test_legal_edges_exclude_junctions_and_corners():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    for (ca, cb) in legal_edges(lay):
        for c in (ca, cb):
            if lay.is_border(c):
                assert c not in lay.junction_cells
