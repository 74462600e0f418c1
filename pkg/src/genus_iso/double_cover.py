"""Two-copy cover of a bipartite graph with crossing edges rewired.

A LabeledGraph marks the edges that cross the distinguished glued side of a
non-orientable layout (the same-sign side of the Klein-bottle block, or the
cross-cap side in the projective case; the rewiring rule is identical).  The
doubled graph has a perfect matching exactly when the original does, and
matchings transport both ways: lifting duplicates a matching into both
copies, projecting walks the degree-2 multigraph image and keeps alternate
edges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotPerfect

CASES = ("Klein", "Projective")


def _ekey(u, v):
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class LabeledGraph:
    vertices: tuple
    edges: frozenset        # of ordered 2-tuples (min, max)
    crossing: frozenset     # subset of edges
    case: str = "Klein"

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        edges = frozenset(_ekey(u, v) for (u, v) in self.edges)
        crossing = frozenset(_ekey(u, v) for (u, v) in self.crossing)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "crossing", crossing)
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        if not crossing <= edges:
            raise ValueError("crossing edges must be a subset of the edges")
        vs = set(self.vertices)
        for (u, v) in edges:
            if u not in vs or v not in vs or u == v:
                raise ValueError(f"bad edge {(u, v)}")
        if self.two_coloring() is None:
            raise ValueError("graph must be bipartite")

    def two_coloring(self):
        adj: dict = {v: [] for v in self.vertices}
        for (u, v) in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        color: dict = {}
        for root in self.vertices:
            if root in color:
                continue
            color[root] = 0
            queue = [root]
            while queue:
                u = queue.pop(0)
                for w in adj[u]:
                    if w not in color:
                        color[w] = 1 - color[u]
                        queue.append(w)
                    elif color[w] == color[u]:
                        return None
        return color


def double(G: LabeledGraph) -> LabeledGraph:
    """The two-copy cover: crossing edges connect opposite copies."""
    verts = tuple((v, c) for v in G.vertices for c in (0, 1))
    edges = []
    for (u, v) in G.edges:
        if (u, v) in G.crossing:
            edges.append(_ekey((u, 0), (v, 1)))
            edges.append(_ekey((u, 1), (v, 0)))
        else:
            edges.append(_ekey((u, 0), (v, 0)))
            edges.append(_ekey((u, 1), (v, 1)))
    return LabeledGraph(vertices=verts, edges=frozenset(edges),
                        crossing=frozenset(), case=G.case)


def _check_perfect(edges, vertices, what):
    covered: dict = {}
    for (u, v) in edges:
        for x in (u, v):
            if x in covered:
                raise NotPerfect(f"{what}: vertex {x} covered twice")
            covered[x] = True
    if set(covered) != set(vertices):
        raise NotPerfect(f"{what}: not all vertices covered")


def lift_matching(G: LabeledGraph, M) -> frozenset:
    """Both copies of a perfect matching of G, a perfect matching of double(G)."""
    M = frozenset(_ekey(u, v) for (u, v) in M)
    if not M <= G.edges:
        raise NotPerfect("matching uses unknown edges")
    _check_perfect(M, G.vertices, "lift_matching input")
    out = []
    for (u, v) in M:
        if (u, v) in G.crossing:
            out.append(_ekey((u, 0), (v, 1)))
            out.append(_ekey((u, 1), (v, 0)))
        else:
            out.append(_ekey((u, 0), (v, 0)))
            out.append(_ekey((u, 1), (v, 1)))
    return frozenset(out)


def project_matching(G: LabeledGraph, Mp) -> frozenset:
    """Project a perfect matching of double(G) back to one of G.

    The projection doubles up as a spanning multigraph of degree exactly two;
    its components are single edges taken twice or even cycles, and keeping
    alternate edges (deterministically from the least vertex) yields a
    perfect matching of G.
    """
    D = double(G)
    Mp = frozenset(_ekey(u, v) for (u, v) in Mp)
    if not Mp <= D.edges:
        raise NotPerfect("matching uses edges outside the double cover")
    _check_perfect(Mp, D.vertices, "project_matching input")
    # project with multiplicity
    mult: dict = {}
    for ((u, _cu), (v, _cv)) in Mp:
        k = _ekey(u, v)
        mult[k] = mult.get(k, 0) + 1
    adj: dict = {v: [] for v in G.vertices}
    for (u, v), k in mult.items():
        for _ in range(k):
            adj[u].append(v)
            adj[v].append(u)
    for v, nbrs in adj.items():
        if len(nbrs) != 2:
            raise NotPerfect(f"projection degree {len(nbrs)} at {v}")
        nbrs.sort()
    chosen = []
    visited = set()
    for start in G.vertices:
        if start in visited:
            continue
        if mult.get(_ekey(start, adj[start][0]), 0) == 2:
            # doubled edge: a two-cycle component, keep the edge once
            visited.add(start)
            visited.add(adj[start][0])
            chosen.append(_ekey(start, adj[start][0]))
            continue
        # walk the even cycle from its least vertex toward the lesser neighbor
        cyc = [start]
        visited.add(start)
        prev, cur = None, start
        while True:
            a, b = adj[cur]
            nxt = a if a != prev else b
            if nxt == start:
                break
            cyc.append(nxt)
            visited.add(nxt)
            prev, cur = cur, nxt
        for i in range(0, len(cyc), 2):
            chosen.append(_ekey(cyc[i], cyc[i + 1]))
    matching = frozenset(chosen)
    _check_perfect(matching, G.vertices, "projected matching")
    return matching


# ---------------------------------------------------------------------------
# JSON form used by the CLI

def labeled_to_json(G: LabeledGraph) -> dict:
    return {
        "case": G.case,
        "vertices": list(G.vertices),
        "edges": [list(e) for e in sorted(G.edges)],
        "crossing": [list(e) for e in sorted(G.crossing)],
    }


def labeled_from_json(doc) -> LabeledGraph:
    def key(e):
        u, v = e
        u = tuple(u) if isinstance(u, list) else u
        v = tuple(v) if isinstance(v, list) else v
        return _ekey(u, v)

    verts = [tuple(v) if isinstance(v, list) else v for v in doc["vertices"]]
    return LabeledGraph(
        vertices=tuple(verts),
        edges=frozenset(key(e) for e in doc["edges"]),
        crossing=frozenset(key(e) for e in doc.get("crossing", [])),
        case=doc.get("case", "Klein"),
    )
