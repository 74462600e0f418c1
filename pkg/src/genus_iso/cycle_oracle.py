"""Exhaustive simple-cycle enumeration and the per-cycle property checks.

The enumerator is Johnson-style (blocked sets, min-vertex rooting) so the
work stays proportional to the number of cycles produced.  On top of it sit
the cycle classifiers: crossing profiles, out/in alternation along segments,
the restricted-circulation index identity, and the zero-circulation scan for
the combined weighting.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import (
    BudgetExceeded,
    PreconditionOddCrossing,
    PreconditionViolated,
)
from .grid_surface import GenusGrid
from .weights import (
    circulation_restricted,
    combine,
    elementary_order,
    elementary_values,
    w_alt,
)

DEFAULT_MAX_CYCLES = 10 ** 6
_LANE = 1 << 24  # packs the 4g+1 elementary values into one int per edge


def default_cycle_cap() -> int:
    env = os.environ.get("GENUS_ISO_MAX_CYCLES")
    return int(env) if env else DEFAULT_MAX_CYCLES


# ---------------------------------------------------------------------------
# Cycle objects

@dataclass(frozen=True)
class Cycle:
    """A simple cycle in canonical traversal order.

    ``vertices[t]`` and ``vertices[(t+1) % L]`` are joined by ``edges[t]``.
    The canonical traversal is the rotation/reflection minimizing the edge
    sequence, which pins the sign conventions of restricted circulations.
    """

    vertices: tuple
    edges: tuple

    def __len__(self):
        return len(self.vertices)


def make_cycle(vids) -> Cycle:
    vids = list(vids)
    L = len(vids)
    best = None
    for rot in range(L):
        for seq in (vids[rot:] + vids[:rot],
                    list(reversed(vids[rot:] + vids[:rot]))):
            edges = tuple(
                (seq[t], seq[(t + 1) % L]) if seq[t] <= seq[(t + 1) % L]
                else (seq[(t + 1) % L], seq[t])
                for t in range(L))
            cand = (edges, tuple(seq))
            if best is None or cand < best:
                best = cand
    return Cycle(vertices=best[1], edges=best[0])


# ---------------------------------------------------------------------------
# Dense view used by the enumerator

class _DenseView:
    def __init__(self, G: GenusGrid):
        self.G = G
        self.verts = sorted(G.vertices)       # border ids sort before interior
        self.index = {v: k for k, v in enumerate(self.verts)}
        self.n = len(self.verts)
        self.nb = sum(1 for v in self.verts if v[0] == "b")
        adj = [[] for _ in range(self.n)]
        for (u, v) in G.edges:
            ui, vi = self.index[u], self.index[v]
            adj[ui].append(vi)
            adj[vi].append(ui)
        for a in adj:
            a.sort()
        self.adj = adj

    def packed_weights(self):
        """n x n table of lane-packed elementary weight vectors."""
        n = self.n
        wp = [None] * n
        for i in range(n):
            wp[i] = [0] * n
        for (u, v) in self.G.edges:
            vals = elementary_values(self.G, (u, v) if u <= v else (v, u))
            acc = 0
            for k, x in enumerate(vals):
                acc += x * (_LANE ** k)
            ui, vi = self.index[u], self.index[v]
            wp[ui][vi] = acc
            wp[vi][ui] = acc
        return wp

    def segment_bits(self):
        """n x n table: bit (i-1) set when the edge attaches unprimed on Si."""
        n = self.n
        sb = [None] * n
        for i in range(n):
            sb[i] = [0] * n
        g2 = 2 * self.G.layout.g
        for (u, v) in self.G.edges:
            vals = elementary_values(self.G, (u, v) if u <= v else (v, u))
            bits = 0
            for i in range(g2):
                if vals[i]:
                    bits |= 1 << i
            ui, vi = self.index[u], self.index[v]
            sb[ui][vi] = bits
            sb[vi][ui] = bits
        return sb

    def unprimed_attachments(self):
        """att[border_vertex][neighbor] = (segment, j) when that edge attaches
        on the unprimed side, else None."""
        att = [None] * self.nb
        for b in range(self.nb):
            att[b] = {}
        layout = self.G.layout
        for key in self.G.edges:
            ca, cb = self.G.edge_cells[key]
            u, v = key
            if layout.is_border(ca):
                bcell, bvid, ovid = ca, u, v
            elif layout.is_border(cb):
                bcell, bvid, ovid = cb, v, u
            else:
                continue
            i, primed, j = layout.cell_port(bcell)
            bi, oi = self.index[bvid], self.index[ovid]
            att[bi][oi] = None if primed else (i, j)
        return att


def _lane_decode(total: int, count: int) -> list[int]:
    digits = []
    v = total
    half = _LANE // 2
    for _ in range(count):
        d = v % _LANE
        if d > half:
            d -= _LANE
        digits.append(d)
        v = (v - d) // _LANE
    return digits


# ---------------------------------------------------------------------------
# Enumeration

def _root_subgraph(adj, n, s):
    """Adjacency of the 2-core of {v >= s}, or None if s got stripped."""
    keep = bytearray(n)
    deg = [0] * n
    for v in range(s, n):
        keep[v] = 1
        deg[v] = sum(1 for w in adj[v] if w >= s)
    stk = [v for v in range(s, n) if deg[v] < 2]
    while stk:
        v = stk.pop()
        if not keep[v]:
            continue
        keep[v] = 0
        for w in adj[v]:
            if w >= s and keep[w]:
                deg[w] -= 1
                if deg[w] < 2:
                    stk.append(w)
    if not keep[s]:
        return None
    adjf = [()] * n
    for v in range(s, n):
        if keep[v]:
            adjf[v] = tuple(w for w in adj[v] if w >= s and keep[w])
    return adjf


def _raw_cycles(adj, n, roots, on_cycle, max_len=None):
    """Drive the Johnson search; call on_cycle(path) for every simple cycle.

    on_cycle may raise to abort.  With max_len the blocked-set shortcut is
    unsound, so a plain backtracking search (still min-vertex rooted) runs
    instead; enumeration stays exact either way.
    """
    sys.setrecursionlimit(max(10000, 50 * n + 1000))
    for s in roots:
        adjf = _root_subgraph(adj, n, s)
        if adjf is None:
            continue
        if max_len is not None:
            _bounded_search(adjf, s, on_cycle, max_len)
            continue
        blocked = bytearray(n)
        B = [[] for _ in range(n)]
        path = [s]
        blocked[s] = 1

        def circuit(v):
            found = False
            for w in adjf[v]:
                if w == s:
                    if len(path) >= 3 and path[1] < path[-1]:
                        on_cycle(path)
                    found = True
                elif not blocked[w]:
                    path.append(w)
                    blocked[w] = 1
                    if circuit(w):
                        found = True
                    path.pop()
            if found:
                ustk = [v]
                while ustk:
                    x = ustk.pop()
                    if blocked[x]:
                        blocked[x] = 0
                        bx = B[x]
                        ustk.extend(bx)
                        del bx[:]
            else:
                for w in adjf[v]:
                    bw = B[w]
                    if v not in bw:
                        bw.append(v)
            return found

        circuit(s)


def _bounded_search(adjf, s, on_cycle, max_len):
    path = [s]
    on = {s}

    def walk(v):
        for w in adjf[v]:
            if w == s:
                if len(path) >= 3 and path[1] < path[-1]:
                    on_cycle(path)
            elif w not in on and len(path) < max_len:
                path.append(w)
                on.add(w)
                walk(w)
                on.discard(w)
                path.pop()

    walk(s)


def enumerate_simple_cycles(G: GenusGrid, max_len: Optional[int] = None,
                            max_cycles: Optional[int] = None,
                            border_only: bool = False) -> Iterator[Cycle]:
    """Yield every simple cycle exactly once (up to traversal representation).

    ``max_len`` bounds the cycle length.  ``max_cycles`` raises BudgetExceeded
    once more cycles than the cap exist; None uses the configured cap
    (GENUS_ISO_MAX_CYCLES, default 10**6).  ``border_only`` restricts to
    cycles through a glued border vertex.
    """
    dv = _DenseView(G)
    roots = range(dv.nb) if border_only else range(dv.n)
    budget = default_cycle_cap() if max_cycles is None else max_cycles
    results: list = []

    def collect(path):
        if len(results) >= budget:
            raise BudgetExceeded(f"more than {budget} cycles")
        results.append(tuple(path))

    _raw_cycles(dv.adj, dv.n, roots, collect, max_len=max_len)
    for path in results:
        yield make_cycle(tuple(dv.verts[i] for i in path))


# ---------------------------------------------------------------------------
# Classification and per-cycle checks

@dataclass(frozen=True)
class CycleClass:
    kind: str                 # "interior" | "crossing"
    profile: dict             # segment -> [(j, "out"/"in")], ordered along the segment
    parity: dict              # segment -> crossing count mod 2


def _edge_attachment(G: GenusGrid, edge):
    ca, cb = G.edge_cells[edge]
    layout = G.layout
    if layout.is_border(ca):
        return layout.cell_port(ca), 0
    if layout.is_border(cb):
        return layout.cell_port(cb), 1
    return None, None


def crossing_profile(G: GenusGrid, C: Cycle) -> dict:
    """Ordered (index, direction) crossings per unprimed segment."""
    prof: dict = {}
    L = len(C.vertices)
    for t in range(L):
        u = C.vertices[t]
        v = C.vertices[(t + 1) % L]
        edge = (u, v) if u <= v else (v, u)
        at, _ = _edge_attachment(G, edge)
        if at is None:
            continue
        i, primed, j = at
        if primed:
            continue
        border_end = u if u[0] == "b" else v
        direction = "out" if border_end == v else "in"
        prof.setdefault(i, []).append((j, direction))
    for i in prof:
        prof[i].sort()
    return prof


def classify(G: GenusGrid, C: Cycle) -> CycleClass:
    """Interior (no segment touched) or crossing, with per-segment parity."""
    prof = crossing_profile(G, C)
    parity = {i: len(v) % 2 for i, v in prof.items()}
    kind = "interior" if not prof else "crossing"
    return CycleClass(kind=kind, profile=prof, parity=parity)


def check_alternation(G: GenusGrid, C: Cycle) -> dict:
    """Per intersected segment: do crossings alternate out/in along it?

    Precondition: every segment is crossed an even number of times.
    """
    prof = crossing_profile(G, C)
    for i, crossings in prof.items():
        if len(crossings) % 2 != 0:
            raise PreconditionOddCrossing(
                f"segment S{i} crossed {len(crossings)} times")
    result = {}
    for i, crossings in prof.items():
        dirs = [d for (_j, d) in crossings]
        result[i] = all(dirs[k] != dirs[k + 1] for k in range(len(dirs) - 1))
    return result


def verify_weight_lemma(G: GenusGrid, C: Cycle, seg: int = 1):
    """Both sides of the restricted-circulation index identity on a segment.

    Requires an even, alternating crossing pattern.  Returns (lhs, rhs),
    which the caller may assert equal:  lhs is |restricted circulation of the
    segment's index weight|, rhs is |sum of (i_2k - i_2k-1)| over the sorted
    crossing indices.
    """
    prof = crossing_profile(G, C).get(seg, [])
    if len(prof) % 2 != 0:
        raise PreconditionViolated(f"odd crossing count on S{seg}")
    dirs = [d for (_j, d) in prof]
    if any(dirs[k] == dirs[k + 1] for k in range(len(dirs) - 1)):
        raise PreconditionViolated(f"crossings of S{seg} do not alternate")
    if not prof:
        return (0, 0)
    subset = []
    L = len(C.vertices)
    for t in range(L):
        u = C.vertices[t]
        v = C.vertices[(t + 1) % L]
        edge = (u, v) if u <= v else (v, u)
        at, _ = _edge_attachment(G, edge)
        if at is not None and not at[1] and at[0] == seg:
            subset.append(edge)
    lhs = abs(circulation_restricted(C, subset, lambda e: w_alt(G, seg, e)))
    js = sorted(j for (j, _d) in prof)
    rhs = abs(sum(js[2 * k + 1] - js[2 * k] for k in range(len(js) // 2)))
    return (lhs, rhs)


# ---------------------------------------------------------------------------
# The isolation sweep

@dataclass
class IsolationReport:
    instance: dict
    cycles_checked: int = 0
    min_abs_circulation: Optional[int] = None
    witnesses: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    budget_exceeded: bool = False
    # populated only by the full sweep
    alternation_checked: int = 0
    alternation_failures: list = field(default_factory=list)
    weight_lemma_checked: int = 0
    weight_lemma_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "cycles_checked": self.cycles_checked,
            "min_abs_circulation": (None if self.min_abs_circulation is None
                                    else str(self.min_abs_circulation)),
            "witnesses": dict(self.witnesses),
            "failures": [[list(v) for v in cyc] for cyc in self.failures],
            "budget_exceeded": self.budget_exceeded,
            "alternation_checked": self.alternation_checked,
            "alternation_failures": [[list(v) for v in c] for c in self.alternation_failures],
            "weight_lemma_checked": self.weight_lemma_checked,
            "weight_lemma_failures": [[list(v) for v in c] for c in self.weight_lemma_failures],
        }


def _instance_summary(G: GenusGrid) -> dict:
    lay = G.layout
    return {"g": lay.g, "m": lay.m, "lengths": list(lay.lengths),
            "origin_corner": lay.origin_corner,
            "n_vertices": G.n_vertices, "n_edges": len(G.edges)}


def verify_isolation(G: GenusGrid, max_cycles: Optional[int] = None) -> IsolationReport:
    """Check circ_W != 0 for every enumerated simple cycle."""
    return _sweep(G, max_cycles, crossing_checks=False)


def sweep_checks(G: GenusGrid, max_cycles: Optional[int] = None) -> IsolationReport:
    """Isolation plus alternation and index-identity checks in one pass."""
    return _sweep(G, max_cycles, crossing_checks=True)


def _sweep(G: GenusGrid, max_cycles, crossing_checks: bool) -> IsolationReport:
    cap = max_cycles if max_cycles is not None else default_cycle_cap()
    dv = _DenseView(G)
    report = IsolationReport(instance=_instance_summary(G))
    if dv.n == 0:
        return report

    n = dv.n
    wp = dv.packed_weights()
    att = dv.unprimed_attachments() if crossing_checks else None
    nb = dv.nb
    counts: dict = {}
    failures = report.failures
    alt_failures = report.alternation_failures
    wl_failures = report.weight_lemma_failures
    state = {"count": 0, "alt": 0, "wl": 0}
    sys.setrecursionlimit(max(10000, 50 * n + 1000))

    class _Budget(Exception):
        pass

    def process(path, total, parity_mask, border_count):
        if state["count"] >= cap:
            raise _Budget
        state["count"] += 1
        counts[total] = counts.get(total, 0) + 1
        if total == 0 and len(failures) < 32:
            failures.append(tuple(dv.verts[i] for i in path))
        # Eligible for the alternation checks only when every segment is
        # crossed an even number of times and some crossing exists at all.
        if crossing_checks and border_count >= 2 and parity_mask == 0:
            _crossing_check(path, len(path))

    def _crossing_check(path, L):
        per_seg: dict = {}
        for t in range(L):
            u = path[t]
            v = path[t + 1] if t + 1 < L else path[0]
            if u < nb:
                a = att[u].get(v)
                if a is not None:
                    # direction bit: 1 = out (interior -> border), 0 = in
                    per_seg.setdefault(a[0], []).append(
                        (a[1], 0, 1 if t % 2 == 0 else -1))
            elif v < nb:
                a = att[v].get(u)
                if a is not None:
                    per_seg.setdefault(a[0], []).append(
                        (a[1], 1, 1 if t % 2 == 0 else -1))
        if not per_seg:
            return
        if any(len(v) % 2 for v in per_seg.values()):
            return  # odd parity certifies the cycle; alternation not required
        state["alt"] += 1
        bad = False
        for crossings in per_seg.values():
            crossings.sort()
            dirs = [d for (_j, d, _s) in crossings]
            if any(dirs[k] == dirs[k + 1] for k in range(len(dirs) - 1)):
                bad = True
        if bad:
            if len(alt_failures) < 32:
                alt_failures.append(tuple(dv.verts[i] for i in path))
            return
        state["wl"] += 1
        for crossings in per_seg.values():
            lhs = 0
            for (j, _d, s) in crossings:
                lhs += s * (j if j % 2 == 1 else -j)
            js = sorted(j for (j, _d, _s) in crossings)
            rhs = sum(js[2 * k + 1] - js[2 * k] for k in range(len(js) // 2))
            if abs(lhs) != abs(rhs) and len(wl_failures) < 32:
                wl_failures.append(tuple(dv.verts[i] for i in path))

    sb = dv.segment_bits() if crossing_checks else None
    try:
        for s in range(n):
            adjf = _root_subgraph(dv.adj, n, s)
            if adjf is None:
                continue
            blocked = bytearray(n)
            B: list = [[] for _ in range(n)]
            path = [s]
            blocked[s] = 1

            # The alternating circulation and the per-segment crossing
            # parities accumulate along the search path, so closing a cycle
            # costs O(1) weight work.  ``acc`` carries (-1)**depth times the
            # partial alternating sum, which updates sign-free.
            if crossing_checks:
                def circuit(v, acc, px, bc, adjf=adjf, blocked=blocked, B=B,
                            path=path, s=s, wp=wp, sb=sb, nb=nb):
                    found = False
                    wrow = wp[v]
                    srow = sb[v]
                    append = path.append
                    pop = path.pop
                    for w in adjf[v]:
                        if w == s:
                            if len(path) >= 3 and path[1] < path[-1]:
                                process(path, acc + wrow[s], px ^ srow[s], bc)
                            found = True
                        elif not blocked[w]:
                            append(w)
                            blocked[w] = 1
                            if circuit(w, -acc - wrow[w], px ^ srow[w],
                                       bc + 1 if w < nb else bc):
                                found = True
                            pop()
                    if found:
                        ustk = [v]
                        while ustk:
                            x = ustk.pop()
                            if blocked[x]:
                                blocked[x] = 0
                                bx = B[x]
                                ustk.extend(bx)
                                del bx[:]
                    else:
                        for w in adjf[v]:
                            bw = B[w]
                            if v not in bw:
                                bw.append(v)
                    return found

                circuit(s, 0, 0, 1 if s < nb else 0)
            else:
                def circuit0(v, acc, adjf=adjf, blocked=blocked, B=B,
                             path=path, s=s, wp=wp):
                    found = False
                    wrow = wp[v]
                    append = path.append
                    pop = path.pop
                    for w in adjf[v]:
                        if w == s:
                            if len(path) >= 3 and path[1] < path[-1]:
                                process(path, acc + wrow[s], 1, 0)
                            found = True
                        elif not blocked[w]:
                            append(w)
                            blocked[w] = 1
                            if circuit0(w, -acc - wrow[w]):
                                found = True
                            pop()
                    if found:
                        ustk = [v]
                        while ustk:
                            x = ustk.pop()
                            if blocked[x]:
                                blocked[x] = 0
                                bx = B[x]
                                ustk.extend(bx)
                                del bx[:]
                    else:
                        for w in adjf[v]:
                            bw = B[w]
                            if v not in bw:
                                bw.append(v)
                    return found

                circuit0(s, 0)
    except _Budget:
        report.budget_exceeded = True

    report.cycles_checked = state["count"]
    report.alternation_checked = state["alt"]
    report.weight_lemma_checked = state["wl"]

    # Decode the distinct circulation values once: true combined-weight
    # magnitudes and the certifying elementary function histogram.
    if counts:
        W = combine(G)
        names = elementary_order(G.layout.g)
        k = len(names)
        min_abs = None
        witnesses: dict = {}
        for total, cnt in counts.items():
            vec = _lane_decode(total, k)
            value = 0
            for q in range(k - 1, -1, -1):
                value = value * W.base + vec[q]
            value *= W.base
            if total != 0:
                if min_abs is None or abs(value) < min_abs:
                    min_abs = abs(value)
                wit = next(names[q] for q in range(k) if vec[q] != 0)
                witnesses[wit] = witnesses.get(wit, 0) + cnt
        report.min_abs_circulation = min_abs
        report.witnesses = witnesses
    return report
