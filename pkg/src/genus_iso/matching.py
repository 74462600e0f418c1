"""Perfect matching decision, construction, and uniqueness via the weight
enumerator polynomial.

The enumerator is the determinant of the biadjacency matrix whose (u, v)
entry is x**W'(u,v) for an edge and 0 otherwise: the coefficient of x**k is
the signed count of perfect matchings of weight k.  Under an isolating
weighting the least exponent carries a coefficient of +-1, which turns the
determinant into a decision procedure, and deleting one edge at a time
recovers the minimum-weight matching itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import NotPerfect, UnbalancedClasses
from .grid_surface import GenusGrid, verify_bipartite
from .weights import CombinedWeight, circulation, combine
from .cycle_oracle import enumerate_simple_cycles


@dataclass(frozen=True)
class Matching:
    edges: frozenset
    weight: int

    def is_perfect_for(self, vertices) -> bool:
        covered = {v for e in self.edges for v in e}
        return covered == set(vertices) and 2 * len(self.edges) == len(covered)


@dataclass(frozen=True)
class WeightEnumerator:
    """Sparse signed polynomial in x, keyed by exponent."""

    coeffs: dict

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def min_exponent(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def coefficient(self, k: int) -> int:
        return self.coeffs.get(k, 0)


def shift_nonnegative(W: CombinedWeight):
    """Shift all edge weights by -min so exponents are nonnegative.

    Returns (shifted edge->weight dict, offset); every perfect matching's
    total moves by (n/2)*offset, so argmin is untouched, and circulations are
    invariant under constant shifts on even cycles.
    """
    if not W.values:
        return ({}, 0)
    offset = min(W.values.values())
    return ({e: w - offset for e, w in W.values.items()}, offset)


def _bipartition(G: GenusGrid):
    kind, data = verify_bipartite(G)
    if kind != "coloring":
        raise UnbalancedClasses("graph is not bipartite")
    left = sorted(v for v, c in data.items() if c == 0)
    right = sorted(v for v, c in data.items() if c == 1)
    return left, right


def _determinant(rows, cols, entry):
    """det of the monomial matrix entry(r, c) -> exponent or None.

    Subset dynamic program over column masks; all arithmetic is exact on
    sparse {exponent: coefficient} dicts, and the monomial entries turn
    polynomial multiplication into exponent shifts.
    """
    k = len(rows)
    if k == 0:
        return {0: 1}
    full = (1 << k) - 1
    # exponents per row as (colbit, exponent) lists
    row_entries = []
    for r in rows:
        lst = []
        for ci, c in enumerate(cols):
            w = entry(r, c)
            if w is not None:
                lst.append((ci, w))
        row_entries.append(lst)
    f = [None] * (full + 1)
    f[0] = {0: 1}
    # masks ordered by popcount via simple enumeration
    for mask in range(1, full + 1):
        r = bin(mask).count("1") - 1
        acc: dict = {}
        for (ci, w) in row_entries[r]:
            bit = 1 << ci
            if not mask & bit:
                continue
            sub = f[mask ^ bit]
            if sub is None or not sub:
                continue
            # sign of expanding row r at column position (bits below ci)
            pos = bin(mask & (bit - 1)).count("1")
            sgn = 1 if (r + pos) % 2 == 0 else -1
            for e, cf in sub.items():
                key = e + w
                nv = acc.get(key, 0) + sgn * cf
                if nv:
                    acc[key] = nv
                elif key in acc:
                    del acc[key]
        f[mask] = acc
    return f[full]


def weight_enumerator(G: GenusGrid, Wp: dict) -> WeightEnumerator:
    """Exact signed polynomial over perfect matchings, weighted by Wp >= 0."""
    if any(w < 0 for w in Wp.values()):
        raise ValueError("shifted weights must be nonnegative")
    if not G.vertices:
        return WeightEnumerator(coeffs={0: 1})
    left, right = _bipartition(G)
    if len(left) != len(right):
        raise UnbalancedClasses(
            f"color classes have sizes {len(left)} != {len(right)}")
    edge_w = {}
    for e in G.edges:
        edge_w[e] = Wp[e]

    def entry(u, v):
        key = (u, v) if u <= v else (v, u)
        return edge_w.get(key)

    coeffs = _determinant(left, right, entry)
    return WeightEnumerator(coeffs=coeffs)


def _shifted(G: GenusGrid):
    W = combine(G)
    Wp, offset = shift_nonnegative(W)
    return W, Wp, offset


def has_pm(G: GenusGrid) -> bool:
    """Perfect matching existence via the enumerator (empty graph: yes)."""
    if not G.vertices:
        return True
    if len(G.vertices) % 2 != 0:
        return False
    kind, data = verify_bipartite(G)
    if kind != "coloring":
        return False
    left = [v for v, c in data.items() if c == 0]
    if 2 * len(left) != len(G.vertices):
        return False
    _W, Wp, _off = _shifted(G)
    return not weight_enumerator(G, Wp).is_zero


def min_pm_weight(G: GenusGrid, Wp: dict) -> Optional[int]:
    """Least exponent of the enumerator (the minimum matching weight), if any."""
    if not G.vertices:
        return 0
    if len(G.vertices) % 2 != 0:
        return None
    kind, data = verify_bipartite(G)
    if kind != "coloring":
        return None
    left = [v for v, c in data.items() if c == 0]
    if 2 * len(left) != len(G.vertices):
        return None
    return weight_enumerator(G, Wp).min_exponent


def _delete_edge(G: GenusGrid, edge) -> GenusGrid:
    edges = {e: c for e, c in G.edge_cells.items() if e != edge}
    return GenusGrid(layout=G.layout,
                     vertices=G.vertices,  # keep the vertex set: deletion only
                     edges=frozenset(edges),
                     edge_cells=edges)


def construct_pm(G: GenusGrid) -> Optional[Matching]:
    """The minimum-weight perfect matching, or None when no matching exists.

    An edge belongs to the minimum matching exactly when deleting it raises
    the minimum matching weight (or destroys all matchings).
    """
    if not G.vertices:
        return Matching(edges=frozenset(), weight=0)
    W, Wp, _off = _shifted(G)
    w_G = min_pm_weight(G, Wp)
    if w_G is None:
        return None
    picked = []
    for e in sorted(G.edges):
        w_del = min_pm_weight(_delete_edge(G, e), {k: v for k, v in Wp.items() if k != e})
        if w_del is None or w_del > w_G:
            picked.append(e)
    matching = frozenset(picked)
    covered = {v for e in matching for v in e}
    if covered != set(G.vertices) or 2 * len(matching) != len(covered):
        raise NotPerfect(
            "edge-deletion sweep did not produce a perfect matching; "
            "the weighting failed to isolate")
    return Matching(edges=matching, weight=sum(W.values[e] for e in matching))


def is_unique_pm(G: GenusGrid) -> bool:
    """True when the instance has exactly one perfect matching.

    Checks existence, then deletes each matched edge in turn and asks for a
    matching again; any successful re-check exhibits a second matching.
    """
    if not G.vertices:
        return True
    if not has_pm(G):
        return False
    M = construct_pm(G)
    for e in sorted(M.edges):
        if has_pm(_delete_edge(G, e)):
            return False
    return True


# ---------------------------------------------------------------------------
# Brute-force oracle and the uniqueness lemma check

def enumerate_pms(G: GenusGrid):
    """All perfect matchings by backtracking (desk-scale oracle)."""
    verts = sorted(G.vertices)
    if len(verts) % 2 != 0:
        return
    adj = G.neighbors()
    matched: dict = {}
    out: list = []

    def rec(i):
        while i < len(verts) and verts[i] in matched:
            i += 1
        if i == len(verts):
            yield frozenset(out)
            return
        u = verts[i]
        for v in adj[u]:
            if v not in matched:
                matched[u] = v
                matched[v] = u
                out.append((u, v) if u <= v else (v, u))
                yield from rec(i + 1)
                out.pop()
                del matched[u]
                del matched[v]

    yield from rec(0)


def verify_uniquepm_lemma(G: GenusGrid, weight_fn=None, max_cycles=None) -> str:
    """Check: all circulations nonzero implies a unique minimum-weight PM.

    Returns "pass", "fail", or "not_applicable" (antecedent false with
    several matchings tied, so the implication is vacuous).
    """
    W = combine(G) if G.edges else None
    if weight_fn is None and W is not None:
        weight_fn = lambda e: W.values[e]
    pms = list(enumerate_pms(G))
    if len(pms) <= 1:
        return "pass"
    all_nonzero = True
    for C in enumerate_simple_cycles(G, max_cycles=max_cycles):
        if circulation(C, weight_fn).value == 0:
            all_nonzero = False
            break
    if not all_nonzero:
        return "not_applicable"
    weights = sorted(sum(weight_fn(e) for e in pm) for pm in pms)
    return "pass" if (len(weights) == 1 or weights[0] < weights[1]) else "fail"
