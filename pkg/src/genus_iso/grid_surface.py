"""Genus-g grid graphs: boundary layouts, vertex gluing, validation, generation.

A graph in the class lives on a ``2m x 2m`` vertex grid whose border is split
into ``4g`` directed segments in the cyclic order ``S1 S2 S1' S2' S3 S4 S3'
S4' ...``.  Segment ``Si`` is glued to ``Si'`` vertex-by-vertex (the jth
vertex of one is the jth vertex of the other), every segment has even length,
and no edge runs along the border.  The resulting surface is the orientable
surface of genus g, and every graph in the class is bipartite.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Union

from .errors import (
    BoundaryEdgeForbidden,
    InfeasibleDensity,
    NonUnitEdge,
    OutOfBounds,
    PerimeterMismatch,
    SegmentLengthOdd,
)

ORIGIN_CORNERS = ("NW", "NE", "SE", "SW")

# Canonical vertex ids are plain tuples so they sort and serialize easily:
#   ("i", x, y)  -- an interior grid vertex
#   ("b", i, j)  -- the glued border vertex, named by its unprimed port
VertexId = tuple


@dataclass(frozen=True)
class Interior:
    x: int
    y: int


@dataclass(frozen=True)
class Port:
    seg: str  # "S3" for a plain segment, "S3p" for its primed partner
    idx: int  # 1-based index from the segment head


Position = Union[Interior, Port]


def seg_name(i: int, primed: bool) -> str:
    return f"S{i}p" if primed else f"S{i}"


def parse_seg(name: str) -> tuple[int, bool]:
    """Parse a segment name like ``"S3"`` or ``"S3p"`` into (index, primed)."""
    if not name.startswith("S"):
        raise OutOfBounds(f"bad segment name {name!r}")
    primed = name.endswith("p")
    body = name[1:-1] if primed else name[1:]
    try:
        i = int(body)
    except ValueError:
        raise OutOfBounds(f"bad segment name {name!r}") from None
    if i < 1:
        raise OutOfBounds(f"bad segment name {name!r}")
    return i, primed


def _border_scan(m: int, origin_corner: str) -> list[tuple[int, int]]:
    """Clockwise list of the 8m-4 border cells, starting at the given corner."""
    top = [(x, 2 * m) for x in range(1, 2 * m + 1)]          # NW -> NE
    right = [(2 * m, y) for y in range(2 * m - 1, 0, -1)]    # NE -> SE
    bottom = [(x, 1) for x in range(2 * m - 1, 0, -1)]       # SE -> SW
    left = [(1, y) for y in range(2, 2 * m)]                 # SW -> NW
    scan = top + right + bottom + left
    starts = {"NW": (1, 2 * m), "NE": (2 * m, 2 * m), "SE": (2 * m, 1), "SW": (1, 1)}
    k = scan.index(starts[origin_corner])
    return scan[k:] + scan[:k]


@dataclass(frozen=True)
class SegmentLayout:
    """Boundary segmentation of the 2m x 2m grid.

    ``lengths[i]`` is the length of segment ``S(i+1)`` (and of its partner);
    the clockwise border scan from ``origin_corner`` allocates that many
    border cells to each segment, in the cyclic order
    ``S1 S2 S1' S2' S3 S4 S3' S4' ...``.
    """

    g: int
    m: int
    lengths: tuple[int, ...]
    origin_corner: str = "NW"

    # derived, filled in by __post_init__
    scan: tuple = field(init=False, repr=False, compare=False, default=())
    cell_pos: dict = field(init=False, repr=False, compare=False, default=None)
    arcs: tuple = field(init=False, repr=False, compare=False, default=())
    junction_cells: frozenset = field(init=False, repr=False, compare=False, default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(int(v) for v in self.lengths))
        if self.g < 1 or self.m < 1:
            raise PerimeterMismatch(f"need g >= 1 and m >= 1, got g={self.g} m={self.m}")
        if self.origin_corner not in ORIGIN_CORNERS:
            raise OutOfBounds(f"origin_corner must be one of {ORIGIN_CORNERS}")
        if len(self.lengths) != 2 * self.g:
            raise PerimeterMismatch(
                f"expected {2 * self.g} segment lengths, got {len(self.lengths)}")
        for v in self.lengths:
            if v < 2 or v % 2 != 0:
                raise SegmentLengthOdd(f"segment lengths must be even and >= 2, got {v}")
        perimeter = 8 * self.m - 4
        if 2 * sum(self.lengths) != perimeter:
            raise PerimeterMismatch(
                f"2*sum(lengths) = {2 * sum(self.lengths)} but the grid border has "
                f"{perimeter} vertices")

        scan = _border_scan(self.m, self.origin_corner)
        # Cyclic arc order realized on the border: S1 S2 S1' S2' S3 S4 S3' S4' ...
        order = []
        for b in range(self.g):
            i1, i2 = 2 * b + 1, 2 * b + 2
            order += [(i1, False), (i2, False), (i1, True), (i2, True)]
        arcs = []
        start = 0
        for (i, primed) in order:
            ln = self.lengths[i - 1]
            arcs.append((i, primed, start, ln))
            start += ln
        object.__setattr__(self, "scan", tuple(scan))
        object.__setattr__(self, "cell_pos", {c: k for k, c in enumerate(scan)})
        object.__setattr__(self, "arcs", tuple(arcs))
        object.__setattr__(
            self, "junction_cells", frozenset(scan[a[2]] for a in arcs))

    @property
    def size(self) -> int:
        return 2 * self.m

    def is_border(self, cell: tuple[int, int]) -> bool:
        x, y = cell
        n = self.size
        return x == 1 or x == n or y == 1 or y == n

    def in_bounds(self, cell: tuple[int, int]) -> bool:
        x, y = cell
        return 1 <= x <= self.size and 1 <= y <= self.size

    def _arc(self, i: int, primed: bool):
        for arc in self.arcs:
            if arc[0] == i and arc[1] == primed:
                return arc
        raise OutOfBounds(f"no segment S{i}{'p' if primed else ''} in this layout")

    def port_cell(self, i: int, primed: bool, j: int) -> tuple[int, int]:
        """Border cell addressed by the jth vertex of segment Si or Si'."""
        arc = self._arc(i, primed)
        _, _, start, ln = arc
        if not 1 <= j <= ln:
            raise OutOfBounds(f"index {j} out of range 1..{ln} on {seg_name(i, primed)}")
        if not primed:
            off = j - 1
        else:
            # Primed segments run against the clockwise scan, which realizes
            # the orientation-preserving gluing (the glued surface is the
            # orientable genus-g surface, and grid parity is preserved).
            off = (ln - (j - 1)) % ln
        return self.scan[start + off]

    def cell_port(self, cell: tuple[int, int]) -> tuple[int, bool, int]:
        """Inverse of port_cell: (segment index, primed, j) for a border cell."""
        k = self.cell_pos.get(cell)
        if k is None:
            raise OutOfBounds(f"{cell} is not a border cell")
        for (i, primed, start, ln) in self.arcs:
            if start <= k < start + ln:
                off = k - start
                if not primed:
                    return i, primed, off + 1
                return i, primed, 1 if off == 0 else ln - off + 1
        raise OutOfBounds(f"{cell} not covered by any segment")  # pragma: no cover


def canonical_id(layout: SegmentLayout, pos: Position) -> VertexId:
    """Canonical vertex id of a position; glued ports share one id."""
    cell = resolve_cell(layout, pos)
    return cell_id(layout, cell)


def resolve_cell(layout: SegmentLayout, pos: Position) -> tuple[int, int]:
    """Map a Position to the physical grid cell it denotes."""
    if isinstance(pos, Interior):
        cell = (pos.x, pos.y)
        if not layout.in_bounds(cell):
            raise OutOfBounds(f"{cell} outside the {layout.size}x{layout.size} grid")
        return cell
    if isinstance(pos, Port):
        i, primed = parse_seg(pos.seg)
        if i > 2 * layout.g:
            raise OutOfBounds(f"segment index {i} exceeds 2g = {2 * layout.g}")
        return layout.port_cell(i, primed, pos.idx)
    raise OutOfBounds(f"not a position: {pos!r}")


def cell_id(layout: SegmentLayout, cell: tuple[int, int]) -> VertexId:
    """Canonical id of a grid cell (border cells canonicalize to S-side ports)."""
    if not layout.in_bounds(cell):
        raise OutOfBounds(f"{cell} outside the {layout.size}x{layout.size} grid")
    if not layout.is_border(cell):
        return ("i", cell[0], cell[1])
    i, primed, j = layout.cell_port(cell)
    return ("b", i, j)


def class_cells(layout: SegmentLayout, vid: VertexId) -> tuple[tuple[int, int], ...]:
    """All physical cells identified into the given canonical vertex."""
    if vid[0] == "i":
        return ((vid[1], vid[2]),)
    _, i, j = vid
    return (layout.port_cell(i, False, j), layout.port_cell(i, True, j))


@dataclass(frozen=True)
class GenusGrid:
    """A validated graph instance on a glued grid.

    ``edges`` hold canonical vertex-id pairs; ``edge_cells`` remembers the
    physical grid cells realizing each edge (needed by the weight functions).
    """

    layout: SegmentLayout
    vertices: frozenset
    edges: frozenset
    edge_cells: dict = field(repr=False, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def neighbors(self) -> dict:
        adj: dict = {v: [] for v in self.vertices}
        for (u, v) in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for v in adj:
            adj[v].sort()
        return adj


def _edge_key(a: VertexId, b: VertexId) -> tuple:
    return (a, b) if a <= b else (b, a)


def build_grid(layout: SegmentLayout, edges) -> GenusGrid:
    """Validate raw (Position, Position) pairs and assemble a GenusGrid.

    Rejects non-unit edges, edges along the border, and edges attached at
    segment-junction cells (the shared endpoints of consecutive segments,
    which play the role of the polygon corners and stay vertex-free).
    """
    canon_edges = {}
    for (pa, pb) in edges:
        ca = resolve_cell(layout, pa)
        cb = resolve_cell(layout, pb)
        if abs(ca[0] - cb[0]) + abs(ca[1] - cb[1]) != 1:
            raise NonUnitEdge(f"{ca} -- {cb} is not a unit grid edge")
        a_border = layout.is_border(ca)
        b_border = layout.is_border(cb)
        if a_border and b_border:
            raise BoundaryEdgeForbidden(f"{ca} -- {cb} runs along the border")
        for c, is_b in ((ca, a_border), (cb, b_border)):
            if is_b and c in layout.junction_cells:
                raise BoundaryEdgeForbidden(
                    f"{c} is a segment junction cell and cannot carry an edge")
        va = cell_id(layout, ca)
        vb = cell_id(layout, cb)
        canon_edges[_edge_key(va, vb)] = (ca, cb) if va <= vb else (cb, ca)
    vertices = frozenset(v for e in canon_edges for v in e)
    return GenusGrid(layout=layout,
                     vertices=vertices,
                     edges=frozenset(canon_edges),
                     edge_cells=canon_edges)


def verify_bipartite(G: GenusGrid):
    """Two-color the graph, or exhibit an odd cycle.

    Returns ``("coloring", {vertex: 0|1})`` on success and
    ``("odd_cycle", [v0, v1, ..., v0])`` if an odd cycle exists.
    """
    adj = G.neighbors()
    color: dict = {}
    parent: dict = {}
    for root in sorted(G.vertices):
        if root in color:
            continue
        color[root] = 0
        parent[root] = None
        queue = [root]
        while queue:
            u = queue.pop(0)
            for w in adj[u]:
                if w not in color:
                    color[w] = 1 - color[u]
                    parent[w] = u
                    queue.append(w)
                elif color[w] == color[u]:
                    return ("odd_cycle", _rebuild_odd_cycle(parent, u, w))
    return ("coloring", color)


def _rebuild_odd_cycle(parent, u, w):
    anc_u = _ancestry(parent, u)
    anc_w = _ancestry(parent, w)
    seen = set(anc_u)
    common = next(v for v in anc_w if v in seen)
    path_u = anc_u[: anc_u.index(common) + 1]   # u .. common
    path_w = anc_w[: anc_w.index(common) + 1]   # w .. common
    up = list(reversed(path_u))                 # common .. u
    return up + path_w[:-1] + [up[0]]


def _ancestry(parent, v):
    out = [v]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out


def legal_edges(layout: SegmentLayout) -> list:
    """Every unit edge the class permits, as physical cell pairs.

    Interior-interior edges plus the unique perpendicular edge of every
    usable border cell (junction cells and grid corners carry none).
    """
    n = layout.size
    out = []
    for x in range(2, n - 1):
        for y in range(2, n):
            out.append(((x, y), (x + 1, y)))  # horizontal, both interior
    for x in range(2, n):
        for y in range(2, n - 1):
            out.append(((x, y), (x, y + 1)))  # vertical, both interior
    for cell in layout.scan:
        if cell in layout.junction_cells:
            continue
        x, y = cell
        nbrs = [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
        inner = [c for c in nbrs if layout.in_bounds(c) and not layout.is_border(c)]
        if len(inner) == 1:
            out.append((cell, inner[0]))
    return out


def _cells_to_positions(layout, ca, cb):
    def pos(c):
        if layout.is_border(c):
            i, primed, j = layout.cell_port(c)
            return Port(seg_name(i, primed), j)
        return Interior(c[0], c[1])
    return (pos(ca), pos(cb))


def gen_instance(layout: SegmentLayout, seed: int, density: float,
                 ensure_pm: bool = True) -> GenusGrid:
    """Deterministic random instance; with ensure_pm a perfect matching is planted.

    The planted skeleton is a greedy matching over shuffled legal edges; extra
    edges (within the matched vertex set, so the guarantee survives) are added
    until ``density * len(legal_edges)`` edges are present or no candidate is
    left.  density=0 keeps just the skeleton; density=1 saturates the scope.
    """
    if not 0.0 <= density <= 1.0:
        raise InfeasibleDensity(f"density must lie in [0, 1], got {density}")
    rng = random.Random(seed)
    legal = legal_edges(layout)
    rng.shuffle(legal)
    target = round(density * len(legal))
    if not ensure_pm:
        chosen = legal[:target]
    else:
        # Matching and coverage live at the canonical-vertex level: the two
        # cells of a glued border vertex must not both be matched.
        covered = set()
        skeleton = []
        for (ca, cb) in legal:
            va, vb = cell_id(layout, ca), cell_id(layout, cb)
            if va not in covered and vb not in covered:
                skeleton.append((ca, cb))
                covered.add(va)
                covered.add(vb)
        in_skeleton = set(skeleton)
        extras = [e for e in legal
                  if e not in in_skeleton
                  and cell_id(layout, e[0]) in covered
                  and cell_id(layout, e[1]) in covered]
        chosen = skeleton + extras[:max(0, target - len(skeleton))]
    return build_grid(layout, [_cells_to_positions(layout, *e) for e in chosen])


def random_layout(g: int, m: int, seed_or_rng) -> SegmentLayout:
    """Random valid layout: even lengths >= 2 summing to 4m-2, random origin."""
    rng = seed_or_rng if isinstance(seed_or_rng, random.Random) else random.Random(seed_or_rng)
    parts = 2 * g
    total2 = (4 * m - 2) // 2 - parts  # leftover in units of 2 after giving each arc 2
    if total2 < 0:
        raise PerimeterMismatch(f"no valid layout for g={g}, m={m}")
    lengths = [2] * parts
    for _ in range(total2):
        lengths[rng.randrange(parts)] += 2
    return SegmentLayout(g=g, m=m, lengths=tuple(lengths),
                         origin_corner=rng.choice(ORIGIN_CORNERS))


# ---------------------------------------------------------------------------
# JSON instance files

def _pos_to_json(layout: SegmentLayout, cell) -> dict:
    if layout.is_border(cell):
        i, _primed, j = layout.cell_port(cell)
        return {"seg": seg_name(i, False), "idx": j}  # canonical S-side form
    return {"x": cell[0], "y": cell[1]}


def instance_to_json(G: GenusGrid) -> dict:
    layout = G.layout
    edges = []
    for key in sorted(G.edges):
        ca, cb = G.edge_cells[key]
        edges.append([_pos_to_json(layout, ca), _pos_to_json(layout, cb)])
    return {
        "g": layout.g,
        "m": layout.m,
        "lengths": list(layout.lengths),
        "origin_corner": layout.origin_corner,
        "edges": edges,
    }


def _pos_from_json(obj: dict) -> Position:
    if "x" in obj:
        return Interior(int(obj["x"]), int(obj["y"]))
    return Port(str(obj["seg"]), int(obj["idx"]))


def instance_from_json(doc) -> GenusGrid:
    """Load an instance; positions are canonicalized on the way in."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    layout = SegmentLayout(g=int(doc["g"]), m=int(doc["m"]),
                           lengths=tuple(int(v) for v in doc["lengths"]),
                           origin_corner=doc.get("origin_corner", "NW"))
    raw = [( _pos_from_json(a), _pos_from_json(b)) for (a, b) in doc["edges"]]
    # A border endpoint written in S-side form may physically attach on the
    # primed side: the unique class cell adjacent to the other endpoint wins.
    fixed = []
    for (pa, pb) in raw:
        fixed.append(_disambiguate(layout, pa, pb))
    return build_grid(layout, fixed)


def _disambiguate(layout, pa, pb):
    ca_opts = _candidate_cells(layout, pa)
    cb_opts = _candidate_cells(layout, pb)
    for ca in ca_opts:
        for cb in cb_opts:
            if abs(ca[0] - cb[0]) + abs(ca[1] - cb[1]) == 1:
                return (_cells_to_positions(layout, ca, cb))
    # fall through to build_grid's validation for a uniform error
    return (pa, pb)


def _candidate_cells(layout, pos):
    if isinstance(pos, Port):
        i, primed = parse_seg(pos.seg)
        if i > 2 * layout.g:
            raise OutOfBounds(f"segment index {i} exceeds 2g = {2 * layout.g}")
        return [layout.port_cell(i, False, pos.idx), layout.port_cell(i, True, pos.idx)]
    return [resolve_cell(layout, pos)]
