"""Polygonal schema words, surface invariants, and normalization.

A schema is a cyclic word of signed side labels, each label occurring exactly
twice; gluing the equally-labelled sides reconstructs a closed surface.  The
six rewrite rules below preserve the surface, and the normalization driver
composes them until the word reaches one of the four normal forms:

  1  a handle sequence        s1 t1 s1- t1- s2 t2 s2- t2- ...
  2  the sphere               s s-
  3  cross-cap prefix         s s X
  4  Klein-bottle prefix      s t s- t X

with X a (possibly empty) handle sequence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import PatternNotFound

Letter = tuple  # (label: str, exp: +1 | -1)


@dataclass(frozen=True)
class SchemaWord:
    sides: tuple

    def __post_init__(self):
        counts: dict = {}
        for (lab, exp) in self.sides:
            if exp not in (1, -1):
                raise ValueError(f"exponent must be +-1, got {exp!r}")
            counts[lab] = counts.get(lab, 0) + 1
        bad = {lab: c for lab, c in counts.items() if c != 2}
        if bad:
            raise ValueError(f"labels must occur exactly twice: {bad}")

    def __len__(self):
        return len(self.sides)

    @property
    def labels(self) -> set:
        return {lab for (lab, _e) in self.sides}

    def __str__(self):
        return " ".join(lab + ("-" if e < 0 else "") for (lab, e) in self.sides)


def word(text) -> SchemaWord:
    """Parse "a b a- b-" (trailing '-' marks the inverted side)."""
    if isinstance(text, SchemaWord):
        return text
    sides = []
    for tok in text.split():
        if tok.endswith("-"):
            sides.append((tok[:-1], -1))
        else:
            sides.append((tok, 1))
    return SchemaWord(tuple(sides))


def _rotations(sides):
    L = len(sides)
    for r in range(L):
        yield sides[r:] + sides[:r]


def _reverse(sides):
    return tuple(reversed(sides))


def _complement(sides):
    return tuple((lab, -e) for (lab, e) in sides)


def _relabel(sides):
    """Rename labels to 0,1,2,... by first occurrence, first exponent +1."""
    names: dict = {}
    flip: dict = {}
    out = []
    for (lab, e) in sides:
        if lab not in names:
            names[lab] = len(names)
            flip[lab] = e
        out.append((names[lab], e * flip[lab]))
    return tuple(out)


def canonical_key(s: SchemaWord) -> tuple:
    """Presentation-invariant key: min over rotation/reversal/complement."""
    best = None
    for base in (s.sides, _reverse(s.sides), _complement(s.sides),
                 _reverse(_complement(s.sides))):
        for rot in _rotations(base):
            cand = _relabel(rot)
            if best is None or cand < best:
                best = cand
    return best


# ---------------------------------------------------------------------------
# Corner classes and invariants

def corner_classes(s: SchemaWord) -> int:
    """Number of polygon-corner classes under the side identifications."""
    L = len(s.sides)
    parent = list(range(L))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    occ: dict = {}
    for k, (lab, e) in enumerate(s.sides):
        occ.setdefault(lab, []).append((k, e))
    # corner c_k sits between positions k-1 and k; side k runs c_k -> c_{k+1}
    # when its exponent is +1 and c_{k+1} -> c_k otherwise.
    for lab, pair in occ.items():
        (k1, e1), (k2, e2) = pair
        tail1 = k1 if e1 == 1 else (k1 + 1) % L
        head1 = (k1 + 1) % L if e1 == 1 else k1
        tail2 = k2 if e2 == 1 else (k2 + 1) % L
        head2 = (k2 + 1) % L if e2 == 1 else k2
        union(tail1, tail2)
        union(head1, head2)
    return len({find(k) for k in range(L)})


@dataclass(frozen=True)
class SurfaceInvariants:
    orientable: bool
    euler_char: int
    genus: int


def is_orientable_word(s: SchemaWord) -> bool:
    occ: dict = {}
    for (lab, e) in s.sides:
        occ.setdefault(lab, []).append(e)
    return all(es[0] != es[1] for es in occ.values())


def invariants(s: SchemaWord) -> SurfaceInvariants:
    """Orientability, Euler characteristic, and genus of the glued surface."""
    orient = is_orientable_word(s)
    chi = corner_classes(s) - len(s.labels) + 1
    genus = (2 - chi) // 2 if orient else 2 - chi
    return SurfaceInvariants(orientable=orient, euler_char=chi, genus=genus)


# ---------------------------------------------------------------------------
# Normal-form recognition

def _is_handle_sequence(sides) -> bool:
    """Concatenation of blocks (a b a- b-), up to per-label sign choice."""
    if len(sides) % 4 != 0:
        return False
    for k in range(0, len(sides), 4):
        (a, p), (b, q), (a2, p2), (b2, q2) = sides[k:k + 4]
        if a != a2 or b != b2 or a == b or p2 != -p or q2 != -q:
            return False
    return True


def is_normal_form(s: SchemaWord) -> Optional[int]:
    """Form id 1-4 when the word is normal (in some rotation), else None."""
    sides = s.sides
    L = len(sides)
    if L == 2:
        (a, p), (a2, p2) = sides
        if a == a2:
            return 2 if p2 == -p else 3
    for rot in _rotations(sides):
        if _is_handle_sequence(rot):
            return 1
        (a, p), (b, q) = rot[0], rot[1]
        if a == b and p == q and _is_handle_sequence(rot[2:]):
            return 3
        if L >= 4:
            (c, r), (d, t) = rot[2], rot[3]
            if (a == c and p == -r and b == d and q == t
                    and a != b and _is_handle_sequence(rot[4:])):
                return 4
    return None


# ---------------------------------------------------------------------------
# The six rewrite rules

def _fresh(s_labels, prefix, k=1):
    out = []
    n = 1
    while len(out) < k:
        name = f"{prefix}{n}"
        if name not in s_labels:
            out.append(name)
        n += 1
    return out


def _rotate_to(sides, k):
    return sides[k:] + sides[:k]


def _occurrences(sides, lab):
    return [k for k, (l, _e) in enumerate(sides) if l == lab]


def reduce_A(s: SchemaWord) -> SchemaWord:
    """Cancel an adjacent label/inverse pair:  X s s-  ->  X."""
    sides = s.sides
    L = len(sides)
    if L == 2:
        raise PatternNotFound("the sphere word is not reducible")
    for k in range(L):
        (a, p) = sides[k]
        (b, q) = sides[(k + 1) % L]
        if a == b and q == -p:
            rot = _rotate_to(sides, k)
            return SchemaWord(rot[2:])
    raise PatternNotFound("no adjacent cancelling pair")


def _apply_B_at(sides, k):
    L = len(sides)
    (b, q) = sides[(k + 1) % L]
    occ = _occurrences(sides, b)
    occ.remove((k + 1) % L)
    j = occ[0]
    if sides[j][1] != -q or j == k:
        return None
    rot = _rotate_to(sides, k)
    jj = (j - k) % L  # position of the partner in the rotation
    X = rot[2:jj]
    Y = rot[jj + 1:]
    rho = _fresh({lab for (lab, _e) in sides}, "r")[0]
    return SchemaWord(((rho, 1),) + tuple(X) + ((rho, -1), rot[0]) + tuple(Y))


def reduce_B(s: SchemaWord) -> SchemaWord:
    """Slide a side across a label/inverse pair:  s t X t- Y  ->  r X r- s Y."""
    for k in range(len(s.sides)):
        out = _apply_B_at(s.sides, k)
        if out is not None:
            return out
    raise PatternNotFound("no B pattern")


def _apply_twist_at(sides, k):
    """Same-sign counterpart of the B move:  s t X t Y  ->  r X s- r Y.

    Cuts the corner triangle off as in B, but pasting along the same-sign
    partner reverses the flap, so the fresh label comes back same-signed and
    the carried side flips.  Used by the corner-merge phase where the plain
    B move does not apply.
    """
    L = len(sides)
    (a, p) = sides[k]
    (b, q) = sides[(k + 1) % L]
    occ = _occurrences(sides, b)
    occ.remove((k + 1) % L)
    j = occ[0]
    if j == k or sides[j][1] != q:
        return None
    rot = _rotate_to(sides, k)
    jj = (j - k) % L
    X = rot[2:jj]
    Y = rot[jj + 1:]
    rho = _fresh({lab for (lab, _e) in sides}, "r")[0]
    return SchemaWord(((rho, 1),) + tuple(X) + ((a, -p), (rho, 1)) + tuple(Y))


def _apply_C_at(sides, k1):
    (a, p) = sides[k1]
    occ = _occurrences(sides, a)
    occ.remove(k1)
    k2 = occ[0]
    if sides[k2][1] != p:
        return None
    rot = _rotate_to(sides, k1)
    jj = (k2 - k1) % len(sides)
    X = rot[1:jj]
    Y = rot[jj + 1:]
    tau = _fresh({lab for (lab, _e) in sides}, "t")[0]
    rc_Y = tuple((lab, -e) for (lab, e) in reversed(Y))
    return SchemaWord(((tau, 1), (tau, 1)) + rc_Y + tuple(X))


def reduce_C(s: SchemaWord) -> SchemaWord:
    """Bring a same-sign pair together:  s X s Y  ->  t t Y* X."""
    for k in range(len(s.sides)):
        out = _apply_C_at(s.sides, k)
        if out is not None:
            return out
    raise PatternNotFound("no same-sign pair")


def _find_D(sides):
    """Least (a, b, c, d): positions of s, t, s-, t- interleaved, both labels
    with opposite-sign occurrence pairs, neither already in a handle block
    (rewriting a finished block would spin forever)."""
    L = len(sides)
    clustered = set()
    for k in _cluster_blocks(sides):
        for i in range(4):
            clustered.add(sides[(k + i) % L][0])
    for a in range(L):
        (sa, pa) = sides[a]
        if sa in clustered:
            continue
        occ = _occurrences(sides, sa)
        occ.remove(a)
        c = occ[0]
        if sides[c][1] != -pa:
            continue
        gap = (c - a) % L
        for boff in range(1, gap):
            b = (a + boff) % L
            (tb, qb) = sides[b]
            if tb in clustered:
                continue
            occt = _occurrences(sides, tb)
            occt.remove(b)
            d = occt[0]
            if sides[d][1] != -qb:
                continue
            doff = (d - a) % L
            if doff > gap:  # mate lies strictly inside the other stretch
                return a, b, c, d
    return None


def reduce_D(s: SchemaWord) -> SchemaWord:
    """Cluster two interleaved pairs:  s X t Y s- U t- V -> r p r- p- U Y X V."""
    found = _find_D(s.sides)
    if found is None:
        raise PatternNotFound("no interleaved orientable pairs")
    a, b, c, d = found
    L = len(s.sides)
    rot = _rotate_to(s.sides, a)
    bb, cc, dd = (b - a) % L, (c - a) % L, (d - a) % L
    X = rot[1:bb]
    Y = rot[bb + 1:cc]
    U = rot[cc + 1:dd]
    V = rot[dd + 1:]
    rho, pi = _fresh({lab for (lab, _e) in s.sides}, "x", 2)
    head = ((rho, 1), (pi, 1), (rho, -1), (pi, -1))
    return SchemaWord(head + tuple(U) + tuple(Y) + tuple(X) + tuple(V))


def _pair_blocks(sides):
    """Cyclic start positions of adjacent same-sign pairs (non-overlapping)."""
    L = len(sides)
    out = []
    used = set()
    for k in range(L):
        if k in used or (k + 1) % L in used:
            continue
        (a, p) = sides[k]
        (b, q) = sides[(k + 1) % L]
        if a == b and p == q:
            out.append(k)
            used.add(k)
            used.add((k + 1) % L)
    return out


def _cluster_blocks(sides):
    """Cyclic start positions of contiguous handle blocks (a b a- b-)."""
    L = len(sides)
    out = []
    used = set()
    for k in range(L):
        idx = [k, (k + 1) % L, (k + 2) % L, (k + 3) % L]
        if any(i in used for i in idx):
            continue
        (a, p), (b, q), (a2, p2), (b2, q2) = (sides[i] for i in idx)
        if a == a2 and b == b2 and a != b and p2 == -p and q2 == -q:
            out.append(k)
            used.update(idx)
    return out


def reduce_E(s: SchemaWord, direction: str = "forward") -> SchemaWord:
    """Trade a cross-cap pair and a handle for three cross-cap pairs.

    forward:  s1 s1 X a b a- b- Y  ->  t1 t1 t2 t2 t3 t3 X Y
    reverse:  t1 t1 t2 t2 t3 t3 Y  ->  s1 s1 a b a- b- Y
    """
    sides = s.sides
    L = len(sides)
    labels = {lab for (lab, _e) in sides}
    if direction == "forward":
        pairs = _pair_blocks(sides)
        clusters = _cluster_blocks(sides)
        for k in pairs:
            for l in clusters:
                span = {(l + i) % L for i in range(4)}
                if k in span or (k + 1) % L in span:
                    continue
                rot = _rotate_to(sides, k)
                ll = (l - k) % L
                X = rot[2:ll]
                Y = rot[ll + 4:]
                t1, t2, t3 = _fresh(labels, "t", 3)
                head = ((t1, 1), (t1, 1), (t2, 1), (t2, 1), (t3, 1), (t3, 1))
                return SchemaWord(head + tuple(X) + tuple(Y))
        raise PatternNotFound("need a cross-cap pair and a handle block")
    if direction == "reverse":
        pairs = set(_pair_blocks(sides))
        for k in sorted(pairs):
            k2, k3 = (k + 2) % L, (k + 4) % L
            if L >= 6 and len({k, k2, k3}) == 3 and k2 in pairs and k3 in pairs:
                rot = _rotate_to(sides, k)
                rest = rot[6:]
                s1, s2, s3 = _fresh(labels, "s", 3)
                head = ((s1, 1), (s1, 1), (s2, 1), (s3, 1), (s2, -1), (s3, -1))
                return SchemaWord(head + tuple(rest))
        raise PatternNotFound("need three consecutive cross-cap pairs")
    raise ValueError(f"direction must be forward or reverse, got {direction!r}")


def reduce_F(s: SchemaWord) -> SchemaWord:
    """Two adjacent cross-cap pairs to the Klein block:  s s t t X -> s r s- r X."""
    sides = s.sides
    L = len(sides)
    pairs = set(_pair_blocks(sides))
    for k in sorted(pairs):
        if (k + 2) % L in pairs and (k + 2) % L != k:
            rot = _rotate_to(sides, k)
            (a, p) = rot[0]
            rest = rot[4:]
            rho = _fresh({lab for (lab, _e) in sides}, "r")[0]
            return SchemaWord(((a, p), (rho, 1), (a, -p), (rho, 1)) + tuple(rest))
    raise PatternNotFound("need two adjacent cross-cap pairs")


# ---------------------------------------------------------------------------
# Normalization driver

def _corner_class_map(sides):
    L = len(sides)
    parent = list(range(L))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    occ: dict = {}
    for k, (lab, e) in enumerate(sides):
        occ.setdefault(lab, []).append((k, e))
    for lab, pair in occ.items():
        (k1, e1), (k2, e2) = pair
        tail1 = k1 if e1 == 1 else (k1 + 1) % L
        head1 = (k1 + 1) % L if e1 == 1 else k1
        tail2 = k2 if e2 == 1 else (k2 + 1) % L
        head2 = (k2 + 1) % L if e2 == 1 else k2
        ra, rb = find(tail1), find(tail2)
        if ra != rb:
            parent[ra] = rb
        ra, rb = find(head1), find(head2)
        if ra != rb:
            parent[ra] = rb
    return [find(k) for k in range(L)]


def _merge_corners(s: SchemaWord, trace: list) -> SchemaWord:
    """Phase 1: reduce to a single corner class (or the sphere).

    A is the only move that removes a class (labels drop by one while the
    Euler characteristic is fixed); between A's, a B move (or its same-sign
    twist B*) aimed at a boundary corner of the smallest class shrinks that
    class by one instance.  (classes, smallest class size) decreases
    lexicographically every iteration, so the loop terminates.
    """
    w = s
    guard = 40 * len(w.sides) + 200
    while guard:
        guard -= 1
        sides = w.sides
        L = len(sides)
        if L == 2:
            return w
        cmap = _corner_class_map(sides)
        if len(set(cmap)) == 1:
            return w
        try:
            w2 = reduce_A(w)
            trace.append(("A", w2))
            w = w2
            continue
        except PatternNotFound:
            pass
        sizes: dict = {}
        for c in cmap:
            sizes[c] = sizes.get(c, 0) + 1
        target = min(sizes, key=lambda c: (sizes[c], c))
        # v = c_{k+1} in the target class with its predecessor corner outside:
        # the move at (k, k+1) removes v's instance.
        k = next(k for k in range(L)
                 if cmap[(k + 1) % L] == target and cmap[k] != target)
        out = _apply_B_at(sides, k)
        if out is not None:
            trace.append(("B", out))
            w = out
            continue
        out = _apply_twist_at(sides, k)
        if out is None:
            raise RuntimeError(f"corner merge is stuck on {w}")  # pragma: no cover
        trace.append(("B*", out))
        w = out
    raise RuntimeError(f"corner merge did not terminate for {s}")  # pragma: no cover


def _unclustered_orientable(sides):
    """Opposite-sign labels not inside any contiguous handle block."""
    in_cluster = set()
    L = len(sides)
    for k in _cluster_blocks(sides):
        for i in range(4):
            in_cluster.add(sides[(k + i) % L][0])
    occ: dict = {}
    for (lab, e) in sides:
        occ.setdefault(lab, []).append(e)
    return [lab for lab, es in occ.items()
            if es[0] == -es[1] and lab not in in_cluster]


def _nonadjacent_same_sign(sides):
    L = len(sides)
    occ: dict = {}
    for k, (lab, e) in enumerate(sides):
        occ.setdefault(lab, []).append((k, e))
    out = []
    for lab, pair in occ.items():
        (k1, e1), (k2, e2) = pair
        if e1 == e2 and (k2 - k1) % L != 1 and (k1 - k2) % L != 1:
            out.append((min(k1, k2), lab))
    return [lab for (_k, lab) in sorted(out)]


def normalize(s: SchemaWord):
    """Normalize a schema word; returns (normal word, trace of rewrites).

    The trace lists (rule name, word after the rewrite).  Surface invariants
    are preserved by every step.
    """
    trace: list = []
    w = s
    if is_normal_form(w) is not None:
        return w, trace

    w = _merge_corners(w, trace)
    if is_normal_form(w) is not None:
        return w, trace

    if is_orientable_word(w):
        # cluster all pairs with D
        while True:
            loose = _unclustered_orientable(w.sides)
            if not loose:
                break
            w2 = reduce_D(w)
            trace.append(("D", w2))
            w = w2
        assert is_normal_form(w) == 1
        return w, trace

    # non-orientable: pair the cross-caps together
    while True:
        loose = _nonadjacent_same_sign(w.sides)
        if not loose:
            break
        k1 = min(k for k, (lab, _e) in enumerate(w.sides) if lab == loose[0])
        w2 = _apply_C_at(w.sides, k1)
        trace.append(("C", w2))
        w = w2
    # cluster the remaining orientable labels
    while _unclustered_orientable(w.sides):
        w2 = reduce_D(w)
        trace.append(("D", w2))
        w = w2
    # eliminate handles in favour of cross-caps
    while _cluster_blocks(w.sides):
        w2 = reduce_E(w, "forward")
        trace.append(("E", w2))
        w = w2
    # fold triples of cross-caps back into handles
    while len(_pair_blocks(w.sides)) >= 3:
        w2 = _reduce_E_reverse_at_run(w)
        trace.append(("E-rev", w2))
        w = w2
    if len(_pair_blocks(w.sides)) == 2:
        w2 = reduce_F(w)
        trace.append(("F", w2))
        w = w2
    assert is_normal_form(w) in (3, 4), f"normalization failed: {w}"
    return w, trace


def _reduce_E_reverse_at_run(w: SchemaWord) -> SchemaWord:
    """Reverse E applied to the three pairs just before the handle run, so
    the pair run and the handle run both stay contiguous."""
    sides = w.sides
    L = len(sides)
    pairs = sorted(_pair_blocks(sides))
    clusters = sorted(_cluster_blocks(sides))
    if clusters:
        first_cluster = clusters[0]
        # three pair blocks immediately preceding the cluster run, cyclically
        k = (first_cluster - 6) % L
    else:
        k = pairs[0]
    if k not in _pair_blocks(sides) or (k + 2) % L not in _pair_blocks(sides) \
            or (k + 4) % L not in _pair_blocks(sides):
        # fall back to any three consecutive pairs
        pset = set(_pair_blocks(sides))
        k = next(p for p in pset
                 if (p + 2) % L in pset and (p + 4) % L in pset)
    rot = _rotate_to(sides, k)
    rest = rot[6:]
    labels = {lab for (lab, _e) in sides}
    s1, s2, s3 = _fresh(labels, "s", 3)
    head = ((s1, 1), (s1, 1), (s2, 1), (s3, 1), (s2, -1), (s3, -1))
    return SchemaWord(head + tuple(rest))


# ---------------------------------------------------------------------------
# Random words for fuzzing

def random_word(n_labels: int, rng: random.Random) -> SchemaWord:
    slots = list(range(2 * n_labels))
    rng.shuffle(slots)
    sides: list = [None] * (2 * n_labels)
    for i in range(n_labels):
        a, b = slots[2 * i], slots[2 * i + 1]
        lab = f"a{i}"
        sides[a] = (lab, rng.choice((1, -1)))
        sides[b] = (lab, rng.choice((1, -1)))
    return SchemaWord(tuple(sides))
