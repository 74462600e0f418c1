"""Edge weight functions and circulations.

There are 4g+1 elementary weights: a 0/1 indicator per segment, a signed
index weight per segment, and an alternating weight on interior horizontal
edges.  They combine into one big-integer weight ``W(e) = sum_k elem_k(e) *
B**(k+1)`` whose base dominance keeps the per-function circulations in
separate digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import EdgeNotOnCycle, OddCycle, WeightBaseTooSmall
from .grid_surface import GenusGrid


def _border_attachment(G: GenusGrid, edge):
    """(segment index, primed, j) for the border endpoint of an edge, or None."""
    ca, cb = G.edge_cells[edge]
    layout = G.layout
    if layout.is_border(ca):
        return layout.cell_port(ca)
    if layout.is_border(cb):
        return layout.cell_port(cb)
    return None


def w_seg(G: GenusGrid, i: int, edge) -> int:
    """1 if the edge attaches on (unprimed) segment Si, else 0."""
    at = _border_attachment(G, edge)
    if at is None:
        return 0
    seg, primed, _j = at
    return 1 if (seg == i and not primed) else 0


def w_alt(G: GenusGrid, i: int, edge) -> int:
    """+j / -j for an edge at index j of segment Si (j odd / even), else 0."""
    at = _border_attachment(G, edge)
    if at is None:
        return 0
    seg, primed, j = at
    if seg != i or primed:
        return 0
    return j if j % 2 == 1 else -j


def w_planar(G: GenusGrid, edge) -> int:
    """Alternating weight on interior horizontal edges; 0 elsewhere.

    The jth horizontal edge from the left in interior row i from the bottom
    gets (-1)**(i+j) * (i+j-1); with grid coordinates that is
    (-1)**(x+y) * (x+y-3) for the edge (x,y)-(x+1,y).
    """
    ca, cb = G.edge_cells[edge]
    layout = G.layout
    if layout.is_border(ca) or layout.is_border(cb):
        return 0
    if ca[0] == cb[0]:
        return 0  # vertical
    x = min(ca[0], cb[0])
    y = ca[1]
    return (x + y - 3) if (x + y) % 2 == 0 else -(x + y - 3)


def elementary_order(g: int) -> list[str]:
    """Fixed combination order: seg indicators, index weights, then planar."""
    return ([f"seg{i}" for i in range(1, 2 * g + 1)]
            + [f"alt{i}" for i in range(1, 2 * g + 1)]
            + ["planar"])


def elementary_values(G: GenusGrid, edge) -> tuple[int, ...]:
    """Values of the 4g+1 elementary functions on an edge, in combination order."""
    g = G.layout.g
    at = _border_attachment(G, edge)
    segs = [0] * (2 * g)
    alts = [0] * (2 * g)
    if at is not None:
        i, primed, j = at
        if not primed:
            segs[i - 1] = 1
            alts[i - 1] = j if j % 2 == 1 else -j
    return tuple(segs + alts + [w_planar(G, edge)])


@dataclass(frozen=True)
class CombinedWeight:
    """The combined big-integer weighting of a specific instance."""

    base: int
    order: tuple[str, ...]
    values: dict  # edge -> big int

    def __call__(self, edge) -> int:
        return self.values[edge]


def combine(G: GenusGrid) -> CombinedWeight:
    """Combine the elementary weights into W(e) = sum_k elem_k(e) * B**(k+1).

    B defaults to n**4 (n = vertex count).  Digit separation needs
    B > 2 * n * max |elem|; if the default base is too small for a tiny
    instance with far-out ports, the base is raised to the next power of n
    (or of 2) that satisfies the bound.
    """
    n = max(G.n_vertices, 2)
    per_edge = {e: elementary_values(G, e) for e in G.edges}
    max_abs = max((abs(v) for vals in per_edge.values() for v in vals), default=0)
    bound = 2 * n * max_abs
    base = n ** 4
    while base <= bound:
        base *= n if n > 1 else 2
    if base <= bound:  # pragma: no cover
        raise WeightBaseTooSmall(f"base {base} <= dominance bound {bound}")
    order = tuple(elementary_order(G.layout.g))
    values = {}
    for e, vals in per_edge.items():
        acc = 0
        for k, v in enumerate(vals):
            acc += v * base ** (k + 1)
        values[e] = acc
    return CombinedWeight(base=base, order=order, values=values)


def decode_digits(W: CombinedWeight, value: int, count: int) -> list[int]:
    """Recover elementary values from a combined weight (balanced digits)."""
    digits = []
    v = value
    assert v % W.base == 0
    v //= W.base
    for _ in range(count):
        d = v % W.base
        if d > W.base // 2:
            d -= W.base
        digits.append(d)
        v = (v - d) // W.base
    return digits


# ---------------------------------------------------------------------------
# Circulations

@dataclass(frozen=True)
class CirculationValue:
    value: int  # signed, relative to the cycle's canonical traversal

    @property
    def magnitude(self) -> int:
        return abs(self.value)


def circulation(C, weight_fn: Callable) -> CirculationValue:
    """Alternating signed sum of a weight function over a cycle's edges.

    ``C`` is a Cycle (canonical traversal fixes the sign); ``weight_fn``
    maps a canonical edge pair to an integer.
    """
    edges = C.edges
    if len(edges) % 2 != 0:
        raise OddCycle(f"cycle of odd length {len(edges)}")
    total = 0
    sign = -1  # the first edge gets (-1)**1
    for e in edges:
        total += sign * weight_fn(e)
        sign = -sign
    return CirculationValue(total)


def circulation_restricted(C, subset, weight_fn: Callable) -> int:
    """Signed sum over a subset of the cycle's edges, positions per the
    canonical traversal."""
    edges = C.edges
    index = {e: t for t, e in enumerate(edges)}
    want = set(subset)
    missing = want - set(edges)
    if missing:
        raise EdgeNotOnCycle(f"{sorted(missing)} not on the cycle")
    total = 0
    for e in want:
        sign = -1 if index[e] % 2 == 0 else 1
        total += sign * weight_fn(e)
    return total


def weight_fn_from_combined(W: CombinedWeight) -> Callable:
    return lambda e: W.values[e]


def weight_fn_elementary(G: GenusGrid, name: str) -> Callable:
    """Weight callable for one elementary function by its order name."""
    if name == "planar":
        return lambda e: w_planar(G, e)
    kind, idx = name[:3], int(name[3:])
    if kind == "seg":
        return lambda e: w_seg(G, idx, e)
    if kind == "alt":
        return lambda e: w_alt(G, idx, e)
    raise ValueError(f"unknown elementary weight {name!r}")
