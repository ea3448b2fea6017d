"""Finite groups as validated Cayley tables.

Every group lives on the index set 0..n-1 with the identity pinned at
index 0; constructors and the file loader renumber to enforce this, which
keeps every downstream mask formula free of an identity offset.  Subsets
of a group are plain ints used as bit masks (bit i set <=> element i in
the subset).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

MAX_PIPELINE_ORDER = 16
MAX_GROUP_ORDER = 64

_SHIFT_TABLE_MAX_ORDER = 16


class GroupValidationError(ValueError):
    """A Cayley table failed a group axiom.

    ``kind`` is one of "shape", "latin_square", "identity",
    "associativity", "inverse" and ``witness`` carries the offending
    indices (the triple (i, j, k) for an associativity failure).
    """

    def __init__(self, kind: str, message: str, witness=None):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


class FiniteGroup:
    """Immutable group on 0..n-1 given by its full multiplication table."""

    def __init__(self, table, names=None, check: bool = True):
        self.table = tuple(tuple(int(v) for v in row) for row in table)
        self.order = len(self.table)
        self.names = tuple(names) if names is not None else None
        self.identity = 0
        self.renumbering = None  # set by the file loader when it permutes indices
        if check:
            self._validate()
        self.inv = tuple(self._find_inverse(x) for x in range(self.order))
        self._shift_rows: dict[int, list[int]] = {}
        self._caches: dict[str, object] = {}

    # -- construction-time validation -------------------------------------

    def _validate(self) -> None:
        n = self.order
        if n == 0:
            raise GroupValidationError("shape", "empty table")
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise GroupValidationError("shape", f"row {i} has length {len(row)}, expected {n}")
            for j, v in enumerate(row):
                if not 0 <= v < n:
                    raise GroupValidationError("shape", f"entry ({i},{j}) = {v} out of range")
        if self.names is not None and len(self.names) != n:
            raise GroupValidationError("shape", "names length does not match order")
        ident = tuple(range(n))
        if self.table[0] != ident or tuple(self.table[i][0] for i in range(n)) != ident:
            raise GroupValidationError("identity", "index 0 is not a two-sided identity")
        for i in range(n):
            if len(set(self.table[i])) != n:
                raise GroupValidationError("latin_square", f"row {i} is not a permutation", witness=i)
            col = set(self.table[j][i] for j in range(n))
            if len(col) != n:
                raise GroupValidationError("latin_square", f"column {i} is not a permutation", witness=i)
        t = self.table
        for i in range(n):
            ti = t[i]
            for j in range(n):
                tij = ti[j]
                tj = t[j]
                for k in range(n):
                    if t[tij][k] != ti[tj[k]]:
                        raise GroupValidationError(
                            "associativity",
                            f"({i}*{j})*{k} != {i}*({j}*{k})",
                            witness=(i, j, k),
                        )
        for x in range(n):
            if self._find_inverse(x) is None:
                raise GroupValidationError("inverse", f"element {x} has no two-sided inverse", witness=x)

    def _find_inverse(self, x: int):
        for y in range(self.order):
            if self.table[x][y] == 0 and self.table[y][x] == 0:
                return y
        return None

    # -- basic arithmetic ---------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def conj(self, x: int, a: int) -> int:
        """x * a * x^-1."""
        return self.table[self.table[x][a]][self.inv[x]]

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self.table[y][x]
            k += 1
        return k

    def _cache(self, key, fn):
        if key not in self._caches:
            self._caches[key] = fn()
        return self._caches[key]

    @property
    def element_orders(self) -> tuple[int, ...]:
        return self._cache("orders", lambda: tuple(self.element_order(x) for x in range(self.order)))

    @property
    def is_abelian(self) -> bool:
        return self._cache(
            "abelian",
            lambda: all(
                self.table[a][b] == self.table[b][a]
                for a in range(self.order)
                for b in range(a + 1, self.order)
            ),
        )

    def order_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for o in self.element_orders:
            hist[o] = hist.get(o, 0) + 1
        return hist

    def center_mask(self) -> int:
        m = 0
        for x in range(self.order):
            if all(self.table[x][y] == self.table[y][x] for y in range(self.order)):
                m |= 1 << x
        return m

    def derived_subgroup_mask(self) -> int:
        def build():
            gens = set()
            for a in range(self.order):
                for b in range(self.order):
                    gens.add(self.table[self.table[self.table[a][b]][self.inv[a]]][self.inv[b]])
            return subgroup_closure(self, mask_from_elements(gens))

        return self._cache("derived", build)

    # -- subset masks ---------------------------------------------------------

    def full_mask(self) -> int:
        return (1 << self.order) - 1

    def shift_row(self, x: int) -> list[int]:
        """Table of mask -> x*mask, built lazily (orders <= 16 only)."""
        row = self._shift_rows.get(x)
        if row is None:
            if self.order > _SHIFT_TABLE_MAX_ORDER:
                raise ValueError("shift tables only built for order <= 16")
            perm = self.table[x]
            row = [0] * (1 << self.order)
            for m in range(1, 1 << self.order):
                low = m & -m
                row[m] = row[m ^ low] | (1 << perm[low.bit_length() - 1])
            self._shift_rows[x] = row
        return row

    def shift_mask(self, x: int, mask: int) -> int:
        """{x*a : a in mask} as a mask."""
        if self.order <= _SHIFT_TABLE_MAX_ORDER:
            return self.shift_row(x)[mask]
        out = 0
        row = self.table[x]
        while mask:
            low = mask & -mask
            out |= 1 << row[low.bit_length() - 1]
            mask ^= low
        return out

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


# -- mask helpers --------------------------------------------------------------


def mask_from_elements(elems) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def mask_elements(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- constructors ---------------------------------------------------------------


def make_cyclic(n: int) -> FiniteGroup:
    """Z/nZ with table[i][j] = (i+j) mod n."""
    if n < 1:
        raise ValueError("cyclic group order must be >= 1")
    if n > MAX_GROUP_ORDER:
        raise ValueError(f"order {n} exceeds cap {MAX_GROUP_ORDER}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, names=[str(i) for i in range(n)])


def make_dihedral(two_n: int) -> FiniteGroup:
    """Dihedral group of order two_n: rotations r^i then reflections r^i*s."""
    if two_n < 2 or two_n % 2:
        raise ValueError("dihedral order must be a positive even integer")
    if two_n > MAX_GROUP_ORDER:
        raise ValueError(f"order {two_n} exceeds cap {MAX_GROUP_ORDER}")
    n = two_n // 2

    def idx(i, s):
        return i % n + (n if s else 0)

    table = []
    for a in range(two_n):
        ia, sa = a % n, a >= n
        row = []
        for b in range(two_n):
            ib, sb = b % n, b >= n
            # (r^ia s^sa)(r^ib s^sb): s r^k = r^-k s
            row.append(idx(ia - ib if sa else ia + ib, sa ^ sb))
        table.append(row)
    names = [f"r{i}" for i in range(n)] + [f"r{i}s" for i in range(n)]
    return FiniteGroup(table, names=names)


def make_generalized_quaternion(two_pow: int) -> FiniteGroup:
    """Generalized quaternion group: y of order two_pow/2, x^2 = y^(two_pow/4), x y x^-1 = y^-1."""
    if two_pow not in (8, 16, 32, 64):
        raise ValueError("generalized quaternion order must be one of 8, 16, 32, 64")
    h = two_pow // 2

    def idx(i, s):
        return i % h + (h if s else 0)

    table = []
    for a in range(two_pow):
        ia, sa = a % h, a >= h
        row = []
        for b in range(two_pow):
            ib, sb = b % h, b >= h
            if not sa and not sb:
                row.append(idx(ia + ib, False))
            elif not sa:
                row.append(idx(ia + ib, True))
            elif not sb:
                # (y^ia x)(y^ib) = y^(ia-ib) x
                row.append(idx(ia - ib, True))
            else:
                # (y^ia x)(y^ib x) = y^(ia-ib) x^2 = y^(ia-ib+h/2)
                row.append(idx(ia - ib + h // 2, False))
        table.append(row)
    names = [f"y{i}" for i in range(h)] + [f"y{i}x" for i in range(h)]
    return FiniteGroup(table, names=names)


def make_alternating4() -> FiniteGroup:
    """Even permutations of 4 points under composition."""
    perms = []
    for p in _permutations4():
        if _parity(p) == 0:
            perms.append(p)
    perms.sort()  # identity (0,1,2,3) sorts first
    index = {p: i for i, p in enumerate(perms)}
    table = [
        [index[tuple(p[q[k]] for k in range(4))] for q in perms]
        for p in perms
    ]
    names = ["".join(str(v) for v in p) for p in perms]
    return FiniteGroup(table, names=names)


def _permutations4():
    from itertools import permutations

    return permutations(range(4))


def _parity(p) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inv % 2


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    if g.order * h.order > MAX_GROUP_ORDER:
        raise ValueError(f"product order {g.order * h.order} exceeds cap {MAX_GROUP_ORDER}")
    nh = h.order

    def idx(a, b):
        return a * nh + b

    table = []
    for a in range(g.order):
        for b in range(nh):
            table.append(
                [idx(g.table[a][c], h.table[b][d]) for c in range(g.order) for d in range(nh)]
            )
    names = None
    if g.names and h.names:
        names = [f"{ga},{hb}" for ga in g.names for hb in h.names]
    return FiniteGroup(table, names=names)


# -- Cayley table documents -------------------------------------------------------


def from_cayley_document(document: dict) -> FiniteGroup:
    """Validate a {"order", "table", "names"?} JSON object into a FiniteGroup.

    The loader renumbers so the identity sits at index 0 and records the
    applied permutation on the returned group (``renumbering[new] = old``).
    """
    if not isinstance(document, dict) or "order" not in document or "table" not in document:
        raise GroupValidationError("shape", 'document must contain "order" and "table"')
    n = document["order"]
    table = document["table"]
    if not isinstance(n, int) or n < 1:
        raise GroupValidationError("shape", "order must be a positive integer")
    if n > MAX_GROUP_ORDER:
        raise GroupValidationError("shape", f"order {n} exceeds cap {MAX_GROUP_ORDER}")
    if len(table) != n or any(len(row) != n for row in table):
        raise GroupValidationError("shape", f"table must be {n}x{n}")
    for i in range(n):
        for j in range(n):
            v = table[i][j]
            if not isinstance(v, int) or not 0 <= v < n:
                raise GroupValidationError("shape", f"entry ({i},{j}) = {v!r} out of range")
    for i in range(n):
        if len(set(table[i])) != n:
            raise GroupValidationError("latin_square", f"row {i} repeats a value", witness=i)
        if len(set(table[j][i] for j in range(n))) != n:
            raise GroupValidationError("latin_square", f"column {i} repeats a value", witness=i)
    ident = [e for e in range(n) if all(table[e][j] == j and table[j][e] == j for j in range(n))]
    if not ident:
        raise GroupValidationError("identity", "no two-sided identity element")
    e = ident[0]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if table[table[i][j]][k] != table[i][table[j][k]]:
                    raise GroupValidationError(
                        "associativity", f"({i}*{j})*{k} != {i}*({j}*{k})", witness=(i, j, k)
                    )
    for x in range(n):
        if not any(table[x][y] == e and table[y][x] == e for y in range(n)):
            raise GroupValidationError("inverse", f"element {x} has no inverse", witness=x)
    # renumber: swap identity to index 0
    old_order = list(range(n))
    if e != 0:
        old_order[0], old_order[e] = e, 0
    pos = {old: new for new, old in enumerate(old_order)}
    new_table = [
        [pos[table[old_order[i]][old_order[j]]] for j in range(n)] for i in range(n)
    ]
    names = document.get("names")
    new_names = [names[old] for old in old_order] if names else None
    group = FiniteGroup(new_table, names=new_names)
    group.renumbering = tuple(old_order)
    return group


def from_cayley_file(path) -> FiniteGroup:
    with open(path, "r", encoding="utf-8") as fh:
        return from_cayley_document(json.load(fh))


def to_cayley_document(g: FiniteGroup) -> dict:
    doc = {"order": g.order, "table": [list(row) for row in g.table]}
    if g.names:
        doc["names"] = list(g.names)
    return doc


# -- subgroups ------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup = field(compare=False)
    mask: int = 0
    normal: bool = False
    index: int = 0

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def elements(self):
        return mask_elements(self.mask)


def subgroup_closure(g: FiniteGroup, mask: int) -> int:
    """Smallest subgroup containing the masked elements (mask of the closure)."""
    mask |= 1
    elems = list(mask_elements(mask))
    seen = mask
    frontier = list(elems)
    while frontier:
        x = frontier.pop()
        row = g.table[x]
        for y in list(mask_elements(seen)):
            for z in (row[y], g.table[y][x]):
                if not (seen >> z) & 1:
                    seen |= 1 << z
                    frontier.append(z)
    return seen


def is_subgroup_mask(g: FiniteGroup, mask: int) -> bool:
    if not mask & 1:
        return False
    for a in mask_elements(mask):
        if not (mask >> g.inv[a]) & 1:
            return False
        for b in mask_elements(mask):
            if not (mask >> g.table[a][b]) & 1:
                return False
    return True


def is_normal_mask(g: FiniteGroup, mask: int) -> bool:
    for x in range(g.order):
        shifted = 0
        for a in mask_elements(mask):
            shifted |= 1 << g.conj(x, a)
        if shifted != mask:
            return False
    return True


def all_subgroups(g: FiniteGroup) -> list[Subgroup]:
    """Complete duplicate-free subgroup list, found by generator extension."""
    if g.order > MAX_GROUP_ORDER:
        raise ValueError(f"order {g.order} exceeds cap {MAX_GROUP_ORDER}")

    def build():
        found = {1}
        frontier = [1]
        while frontier:
            h = frontier.pop()
            for x in range(1, g.order):
                if (h >> x) & 1:
                    continue
                k = subgroup_closure(g, h | (1 << x))
                if k not in found:
                    found.add(k)
                    frontier.append(k)
        subs = []
        for mask in sorted(found, key=lambda m: (m.bit_count(), m)):
            subs.append(
                Subgroup(
                    parent=g,
                    mask=mask,
                    normal=is_normal_mask(g, mask),
                    index=g.order // mask.bit_count(),
                )
            )
        return subs

    return g._cache("subgroups", build)


# -- homomorphisms and quotients ---------------------------------------------------


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup = field(compare=False)
    target: FiniteGroup = field(compare=False)
    images: tuple[int, ...] = ()

    def __post_init__(self):
        if self.images[0] != 0:
            raise ValueError("homomorphism must send identity to identity")
        for x in range(self.source.order):
            for y in range(self.source.order):
                if self.images[self.source.table[x][y]] != self.target.table[self.images[x]][self.images[y]]:
                    raise ValueError(f"not a homomorphism at pair ({x},{y})")

    def kernel_mask(self) -> int:
        return mask_from_elements(x for x, v in enumerate(self.images) if v == 0)

    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.order


def quotient(g: FiniteGroup, n: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    """Group on the cosets of a normal subgroup, plus the projection."""
    if not n.normal:
        raise ValueError("quotient requires a normal subgroup")
    coset_of = [-1] * g.order
    reps = []
    for x in range(g.order):
        if coset_of[x] == -1:
            cid = len(reps)
            reps.append(x)
            for h in mask_elements(n.mask):
                coset_of[g.table[x][h]] = cid
    k = len(reps)
    table = [[coset_of[g.table[reps[i]][reps[j]]] for j in range(k)] for i in range(k)]
    q = FiniteGroup(table)
    hom = GroupHom(source=g, target=q, images=tuple(coset_of))
    assert hom.is_surjective() and hom.kernel_mask() == n.mask
    return q, hom


def greedy_generators(g: FiniteGroup) -> list[int]:
    """Small generating set, highest element order first."""
    gens: list[int] = []
    closed = 1
    for x in sorted(range(g.order), key=lambda v: (-g.element_orders[v], v)):
        if not (closed >> x) & 1:
            gens.append(x)
            closed = subgroup_closure(g, closed | (1 << x))
        if closed == g.full_mask():
            break
    return gens


def hom_count_to_cyclic2(g: FiniteGroup, k: int) -> int:
    """|hom(g, C_{2^k})|, by backtracking over generator images of the abelianization."""
    if g.order > MAX_GROUP_ORDER:
        raise ValueError(f"order {g.order} exceeds cap {MAX_GROUP_ORDER}")
    if k < 0 or 2**k > 2**16:
        raise ValueError("exponent out of range")
    m = 2**k
    if m == 1:
        return 1
    derived = g.derived_subgroup_mask()
    ab, _ = quotient(g, Subgroup(parent=g, mask=derived, normal=True, index=g.order // derived.bit_count()))
    gens = greedy_generators(ab)
    if not gens:
        return 1
    candidates = []
    for x in gens:
        d = gcd(m, ab.element_orders[x])
        candidates.append([i * (m // d) for i in range(d)])

    count = 0
    images = [0] * len(gens)

    def extend(depth):
        nonlocal count
        if depth == len(gens):
            if _cyclic_hom_consistent(ab, gens, images, m):
                count += 1
            return
        for z in candidates[depth]:
            images[depth] = z
            extend(depth + 1)

    extend(0)
    return count


def _cyclic_hom_consistent(ab: FiniteGroup, gens, images, m: int) -> bool:
    phi = [-1] * ab.order
    phi[0] = 0
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for gidx, s in enumerate(gens):
            y = ab.table[x][s]
            v = (phi[x] + images[gidx]) % m
            if phi[y] == -1:
                phi[y] = v
                frontier.append(y)
            elif phi[y] != v:
                return False
    for a in range(ab.order):
        for b in range(ab.order):
            if (phi[a] + phi[b]) % m != phi[ab.table[a][b]]:
                return False
    return True


# -- 2-cogroup masks (shared with the twin machinery) --------------------------------


def cogroup_masks(g: FiniteGroup) -> list[tuple[int, int, int]]:
    """All (K, KK, K_pm) mask triples: K = H_pm \\ H with H of index 2 in H_pm."""
    def build():
        subs = all_subgroups(g)
        out = {}
        for hpm in subs:
            if hpm.size % 2:
                continue
            half = hpm.size // 2
            for h in subs:
                if h.size == half and h.mask & hpm.mask == h.mask:
                    k = hpm.mask ^ h.mask
                    out[k] = (k, h.mask, hpm.mask)
        return sorted(out.values())

    return g._cache("cogroup_masks", build)


def maximal_cogroup_masks(g: FiniteGroup) -> list[tuple[int, int, int]]:
    def build():
        all_ks = cogroup_masks(g)
        out = []
        for trip in all_ks:
            k = trip[0]
            if not any(other[0] != k and other[0] & k == k for other in all_ks):
                out.append(trip)
        return out

    return g._cache("maximal_cogroup_masks", build)


def odd_subgroup(g: FiniteGroup) -> Subgroup:
    """Largest normal subgroup all of whose elements have odd order.

    Computed as the intersection of KK over all maximal 2-cogroups K and
    verified against a direct search over normal odd subgroups.
    """
    maximal = maximal_cogroup_masks(g)
    mask = g.full_mask()
    for _, kk, _ in maximal:
        mask &= kk
    # direct search: the largest normal subgroup with all element orders odd
    best = 1
    for s in all_subgroups(g):
        if s.normal and all(g.element_orders[x] % 2 for x in s.elements()):
            if s.size > best.bit_count():
                best = s.mask
            # every normal odd subgroup must sit inside the intersection
            assert s.mask & mask == s.mask, "normal odd subgroup escapes the KK intersection"
    assert mask == best, "KK intersection disagrees with direct search"
    return Subgroup(parent=g, mask=mask, normal=True, index=g.order // mask.bit_count())


# -- isomorphism testing ----------------------------------------------------------


def _fingerprint(g: FiniteGroup):
    return (
        g.order,
        g.is_abelian,
        tuple(sorted(g.order_histogram().items())),
        g.center_mask().bit_count(),
        g.derived_subgroup_mask().bit_count(),
    )


def group_isomorphic(g1: FiniteGroup, g2: FiniteGroup) -> bool:
    """Invariant fingerprints first, then exhaustive generator-image backtracking."""
    if g1.order != g2.order:
        return False
    if _fingerprint(g1) != _fingerprint(g2):
        return False
    gens = greedy_generators(g1)
    if not gens:
        return True
    by_order: dict[int, list[int]] = {}
    for x in range(g2.order):
        by_order.setdefault(g2.element_orders[x], []).append(x)

    n = g1.order

    def words(images):
        """Map every g1 element through the partial hom; None on conflict."""
        phi = [-1] * n
        phi[0] = 0
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for gi, s in enumerate(gens):
                y = g1.table[x][s]
                v = g2.table[phi[x]][images[gi]]
                if phi[y] == -1:
                    phi[y] = v
                    frontier.append(y)
                elif phi[y] != v:
                    return None
        return phi

    def backtrack(depth, images):
        if depth == len(gens):
            phi = words(images)
            if phi is None or len(set(phi)) != n:
                return False
            return all(
                phi[g1.table[a][b]] == g2.table[phi[a]][phi[b]] for a in range(n) for b in range(n)
            )
        for cand in by_order.get(g1.element_orders[gens[depth]], []):
            images.append(cand)
            if backtrack(depth + 1, images):
                return True
            images.pop()
        return False

    return backtrack(0, [])


def is_cyclic(g: FiniteGroup) -> bool:
    return g.order in g.element_orders if g.order > 1 else True


# -- finitely generated abelian presentations ----------------------------------------


INFINITY = "infinity"


@dataclass(frozen=True)
class FgAbelianPresentation:
    """Z^free_rank + sum of cyclic groups in invariant-factor form."""

    free_rank: int
    torsion_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        facs = tuple(self.torsion_factors)
        object.__setattr__(self, "torsion_factors", facs)
        for m in facs:
            if m < 2:
                raise ValueError("torsion factors must be >= 2")
        for a, b in zip(facs, facs[1:]):
            if b % a:
                raise ValueError("each invariant factor must divide the next")

    def hom_count_to_cyclic2(self, k: int) -> int:
        m = 2**k
        count = 2 ** (k * self.free_rank)
        for f in self.torsion_factors:
            count *= gcd(f, m)
        return count


def fg_abelian_q(p: FgAbelianPresentation, k) -> "int | str":
    """Number of subgroups with cyclic 2-power quotient of the given exponent.

    For the infinity token the count is not a finite number; a symbolic
    marker "zero" / "positive" is returned instead.
    """
    if k == INFINITY:
        return "zero" if p.free_rank == 0 else "positive"
    if not isinstance(k, int) or k < 1:
        raise ValueError("exponent must be a positive integer or the infinity token")
    return (p.hom_count_to_cyclic2(k) - p.hom_count_to_cyclic2(k - 1)) // 2 ** (k - 1)
