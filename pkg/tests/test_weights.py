"""Elementary weights, the combined weighting, and circulations."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from genus_iso.errors import EdgeNotOnCycle, OddCycle
from genus_iso.grid_surface import (
    Interior,
    Port,
    SegmentLayout,
    build_grid,
    gen_instance,
    random_layout,
)
from genus_iso.weights import (
    circulation,
    circulation_restricted,
    combine,
    decode_digits,
    elementary_order,
    elementary_values,
    w_alt,
    w_planar,
    w_seg,
)
from genus_iso.cycle_oracle import Cycle, enumerate_simple_cycles, make_cycle

from oracles import alternating_sum


def _port_edge(lay, i, primed, j):
    """The perpendicular edge at a given port, as a position pair."""
    cell = lay.port_cell(i, primed, j)
    x, y = cell
    n = lay.size
    if y == n:
        inner = (x, y - 1)
    elif y == 1:
        inner = (x, y + 1)
    elif x == 1:
        inner = (x + 1, y)
    else:
        inner = (x - 1, y)
    seg = f"S{i}p" if primed else f"S{i}"
    return (Port(seg, j), Interior(*inner))


def _instance_with_port(lay, i, primed, j):
    G = build_grid(lay, [_port_edge(lay, i, primed, j)])
    edge = next(iter(G.edges))
    return G, edge


LAY = SegmentLayout(g=1, m=4, lengths=(6, 8))


def test_w_seg_unprimed_edge():
    G, e = _instance_with_port(LAY, 1, False, 2)
    assert w_seg(G, 1, e) == 1
    assert w_seg(G, 2, e) == 0


def test_w_seg_primed_side_is_zero():
    G, e = _instance_with_port(LAY, 1, True, 2)
    assert w_seg(G, 1, e) == 0
    assert w_seg(G, 2, e) == 0


def test_w_seg_interior_edge_is_zero():
    G = build_grid(LAY, [(Interior(3, 3), Interior(3, 4))])
    e = next(iter(G.edges))
    assert w_seg(G, 1, e) == 0


def test_w_alt_signs_by_index_parity():
    G3, e3 = _instance_with_port(LAY, 1, False, 3)
    assert w_alt(G3, 1, e3) == 3
    G4, e4 = _instance_with_port(LAY, 1, False, 4)
    assert w_alt(G4, 1, e4) == -4
    assert w_alt(G3, 2, e3) == 0
    G_primed, ep = _instance_with_port(LAY, 1, True, 3)
    assert w_alt(G_primed, 1, ep) == 0


def test_w_planar_on_interior_horizontals():
    # row 1 from the bottom, first and second horizontal edge from the left
    G = build_grid(LAY, [
        (Interior(2, 2), Interior(3, 2)),
        (Interior(3, 2), Interior(4, 2)),
        (Interior(3, 3), Interior(3, 4)),
    ])
    by_cells = {cells: e for e, cells in
                ((e, tuple(sorted(G.edge_cells[e]))) for e in G.edges)}
    e11 = by_cells[((2, 2), (3, 2))]
    e12 = by_cells[((3, 2), (4, 2))]
    ev = by_cells[((3, 3), (3, 4))]
    assert w_planar(G, e11) == 1
    assert w_planar(G, e12) == -2
    assert w_planar(G, ev) == 0


def test_w_planar_zero_when_touching_border():
    G, e = _instance_with_port(LAY, 1, False, 2)
    assert w_planar(G, e) == 0


def test_combine_digit_placement():
    G, e = _instance_with_port(LAY, 1, False, 2)
    W = combine(G)
    B = W.base
    # order: seg1, seg2, alt1, alt2, planar at exponents 1..5
    assert W.values[e] == 1 * B + (-2) * B ** 3
    assert W.order == tuple(elementary_order(1))


def test_combine_zero_on_interior_vertical():
    G = build_grid(LAY, [(Interior(3, 3), Interior(3, 4))])
    e = next(iter(G.edges))
    assert combine(G).values[e] == 0


def test_combine_base_dominates_magnitudes():
    for seed in range(10):
        rng = random.Random(seed)
        lay = random_layout(rng.choice((1, 2)), rng.randint(3, 6), rng)
        G = gen_instance(lay, seed, 0.6)
        W = combine(G)
        max_abs = max(abs(v) for e in G.edges for v in elementary_values(G, e))
        assert W.base > 2 * G.n_vertices * max_abs


def test_combine_round_trip_decode():
    for seed in range(10):
        rng = random.Random(seed)
        lay = random_layout(rng.choice((1, 2)), rng.randint(2, 5), rng)
        if lay.g == 2 and lay.m < 3:
            continue
        G = gen_instance(lay, seed, 0.8)
        W = combine(G)
        k = 4 * lay.g + 1
        for e in G.edges:
            assert decode_digits(W, W.values[e], k) == list(elementary_values(G, e))


def _four_cycle():
    lay = SegmentLayout(g=1, m=3, lengths=(4, 6))
    G = build_grid(lay, [
        (Interior(2, 2), Interior(3, 2)),
        (Interior(3, 2), Interior(3, 3)),
        (Interior(3, 3), Interior(2, 3)),
        (Interior(2, 3), Interior(2, 2)),
    ])
    (C,) = list(enumerate_simple_cycles(G))
    return G, C


def test_circulation_constant_weights_cancel():
    _G, C = _four_cycle()
    assert circulation(C, lambda e: 7).value == 0


def test_circulation_matches_direct_alternating_sum():
    _G, C = _four_cycle()
    w = {e: i + 1 for i, e in enumerate(sorted(C.edges))}
    got = circulation(C, lambda e: w[e])
    assert got.magnitude == abs(alternating_sum(C.edges, lambda e: w[e]))
    assert got.magnitude > 0 or got.value == 0


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.integers(-50, 50), st.integers(0, 3))
def test_circulation_shift_invariance(const, seed):
    rng = random.Random(seed)
    lay = random_layout(1, 3, rng)
    G = gen_instance(lay, seed, 1.0)
    cycles = list(enumerate_simple_cycles(G))
    if not cycles:
        return
    C = cycles[seed % len(cycles)]
    w = {e: rng.randint(-9, 9) for e in C.edges}
    base = circulation(C, lambda e: w[e]).magnitude
    shifted = circulation(C, lambda e: w[e] + const).magnitude
    assert base == shifted


def test_circulation_orientation_invariance():
    _G, C = _four_cycle()
    w = {e: i * i for i, e in enumerate(sorted(C.edges))}
    rev = make_cycle(tuple(reversed(C.vertices)))
    assert circulation(C, lambda e: w[e]).magnitude == \
        circulation(rev, lambda e: w[e]).magnitude


def test_circulation_rejects_odd_cycle():
    odd = Cycle(vertices=(1, 2, 3), edges=((1, 2), (2, 3), (1, 3)))
    with pytest.raises(OddCycle):
        circulation(odd, lambda e: 1)


def test_restricted_circulation_decomposes():
    _G, C = _four_cycle()
    w = {e: i + 3 for i, e in enumerate(sorted(C.edges))}
    wf = lambda e: w[e]
    full = circulation_restricted(C, list(C.edges), wf)
    assert abs(full) == circulation(C, wf).magnitude
    assert circulation_restricted(C, [], wf) == 0
    part_a = list(C.edges)[:2]
    part_b = list(C.edges)[2:]
    assert circulation_restricted(C, part_a, wf) + \
        circulation_restricted(C, part_b, wf) == full


def test_restricted_circulation_rejects_foreign_edge():
    _G, C = _four_cycle()
    with pytest.raises(EdgeNotOnCycle):
        circulation_restricted(C, [(("i", 9, 9), ("i", 9, 10))], lambda e: 1)


def test_digit_separation_on_small_instances():
    """circ_W(C) != 0 iff some elementary circulation is nonzero."""
    names = None
    for seed in range(12):
        rng = random.Random(seed)
        g = rng.choice((1, 2))
        lay = random_layout(g, 3, rng)
        G = gen_instance(lay, seed, 1.0)
        if G.n_vertices > 24:
            continue
        W = combine(G)
        names = elementary_order(g)
        for C in enumerate_simple_cycles(G):
            combined = circulation(C, lambda e: W.values[e]).magnitude
            elems = [circulation(C, lambda e, k=k: elementary_values(G, e)[k]).magnitude
                     for k in range(len(names))]
            assert (combined != 0) == any(v != 0 for v in elems)


def test_segment_parity_matches_crossing_count():
    from genus_iso.cycle_oracle import crossing_profile
    for seed in range(12):
        rng = random.Random(100 + seed)
        lay = random_layout(1, 3, rng)
        G = gen_instance(lay, seed, 1.0)
        if G.n_vertices > 24:
            continue
        for C in enumerate_simple_cycles(G):
            prof = crossing_profile(G, C)
            for i, crossings in prof.items():
                circ = circulation(C, lambda e, i=i: w_seg(G, i, e)).value
                assert circ % 2 == len(crossings) % 2
