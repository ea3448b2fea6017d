"""Generic finite-semigroup machinery: idempotents, minimal ideals, Rees
decomposition, endomorphism monoids of twin-set acts, and wreath products."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product as iter_product
from math import factorial

from .groups import FiniteGroup, group_isomorphic, mask_elements
from .twin import TkData, TwoCogroup, twin_sets_for

MATERIALIZE_MAX = 4096
_EXHAUSTIVE_ASSOC_MAX = 64


class FiniteSemigroup:
    """Carrier 0..size-1 with a total product; table materialized when small.

    The memo fill is idempotent (same key always computes the same int), so
    concurrent readers may at worst duplicate a computation, never see a
    torn value.
    """

    def __init__(self, size: int, mult, labels=None, materialize: bool | None = None):
        self.size = size
        self.labels = labels
        self._memo: dict[tuple[int, int], int] = {}
        self._mult = mult
        self.table = None
        if materialize is None:
            materialize = size <= _EXHAUSTIVE_ASSOC_MAX
        if materialize:
            if size > MATERIALIZE_MAX:
                raise ValueError("refusing to materialize a table this large")
            self.table = [[mult(i, j) for j in range(size)] for i in range(size)]

    @classmethod
    def from_table(cls, table, labels=None):
        s = cls(len(table), lambda i, j: table[i][j], labels=labels, materialize=False)
        s.table = [list(row) for row in table]
        return s

    def mul(self, i: int, j: int) -> int:
        if self.table is not None:
            return self.table[i][j]
        key = (i, j)
        v = self._memo.get(key)
        if v is None:
            v = self._mult(i, j)
            self._memo[key] = v
        return v

    def label(self, i: int):
        return self.labels[i] if self.labels is not None else i


def validate_associativity(s: FiniteSemigroup, samples: int = 100_000, seed: int = 0) -> None:
    """Exhaustive for small carriers, seeded random triples otherwise."""
    n = s.size
    if n**3 <= _EXHAUSTIVE_ASSOC_MAX**3:
        triples = iter_product(range(n), repeat=3)
    else:
        rng = random.Random(seed)
        triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(samples))
    for a, b, c in triples:
        if s.mul(s.mul(a, b), c) != s.mul(a, s.mul(b, c)):
            raise AssertionError(f"associativity fails at ({a},{b},{c})")


# -- ideals -----------------------------------------------------------------------


def idempotents(s: FiniteSemigroup) -> list[int]:
    out = [i for i in range(s.size) if s.mul(i, i) == i]
    if not out:
        raise RuntimeError("finite semigroup with no idempotent: broken multiplication")
    return out


def left_ideal(s: FiniteSemigroup, x: int) -> frozenset[int]:
    return frozenset(s.mul(i, x) for i in range(s.size))


def right_ideal(s: FiniteSemigroup, x: int) -> frozenset[int]:
    return frozenset(s.mul(x, i) for i in range(s.size))


def minimal_left_ideal(s: FiniteSemigroup, start: int = 0) -> frozenset[int]:
    """Descend x -> S*y for y in S*x until every y in L regenerates L."""
    ideal = left_ideal(s, start)
    while True:
        for y in sorted(ideal):
            smaller = left_ideal(s, y)
            if smaller != ideal:
                assert smaller <= ideal
                ideal = smaller
                break
        else:
            return ideal


def minimal_ideal(s: FiniteSemigroup) -> frozenset[int]:
    """K(S) = S*x*S for any x in a minimal left ideal."""
    x = min(minimal_left_ideal(s))
    out = set()
    for y in right_ideal(s, x):
        out.update(left_ideal(s, y))
    return frozenset(out)


def minimal_left_ideals(s: FiniteSemigroup) -> list[frozenset[int]]:
    """All minimal left ideals: S*z over the minimal ideal, deduplicated."""
    seen: set[frozenset[int]] = set()
    covered: set[int] = set()
    for z in sorted(minimal_ideal(s)):
        if z in covered:
            continue
        ideal = left_ideal(s, z)
        seen.add(ideal)
        covered.update(ideal)
    return sorted(seen, key=sorted)


# -- maximal subgroups and the Rees decomposition ------------------------------------


def group_from_elements(s: FiniteSemigroup, elems, identity: int) -> tuple[FiniteGroup, list[int]]:
    """The set of semigroup elements as a FiniteGroup, identity renumbered to 0."""
    order = [identity] + sorted(e for e in elems if e != identity)
    pos = {e: i for i, e in enumerate(order)}
    table = [[pos[s.mul(a, b)] for b in order] for a in order]
    return FiniteGroup(table), order


def maximal_subgroup(s: FiniteSemigroup, e: int) -> tuple[FiniteGroup, list[int]]:
    """H_e, the largest subgroup of s with identity e.

    For a minimal idempotent this is e*S*e; in general it is the unit
    group of the local monoid e*S*e.
    """
    if s.mul(e, e) != e:
        raise ValueError("maximal_subgroup requires an idempotent")
    local = sorted({s.mul(s.mul(e, x), e) for x in range(s.size)})
    units = []
    for gx in local:
        for hx in local:
            if s.mul(gx, hx) == e and s.mul(hx, gx) == e:
                units.append(gx)
                break
    return group_from_elements(s, units, e)


@dataclass(frozen=True)
class ReesDecomposition:
    left_zero_count: int
    group: FiniteGroup = field(compare=False)
    group_elements: tuple[int, ...] = ()
    idempotent_elements: tuple[int, ...] = ()
    pairing: tuple[tuple[int, ...], ...] = ()  # pairing[z][h] = z*h, a bijection onto L


def rees_decompose(s: FiniteSemigroup, ideal: frozenset[int]) -> ReesDecomposition:
    """Split a minimal left ideal as (left zeros) x (maximal subgroup)."""
    for y in ideal:
        if left_ideal(s, y) != ideal:
            raise ValueError("input is not a minimal left ideal")
    idems = sorted(x for x in ideal if s.mul(x, x) == x)
    if not idems:
        raise RuntimeError("minimal left ideal without idempotents: broken multiplication")
    for a in idems:
        for b in idems:
            if s.mul(a, b) != a:
                raise RuntimeError("idempotents of a minimal left ideal must be left zeros")
    e = idems[0]
    hgroup, helems = maximal_subgroup(s, e)
    if len(idems) * len(helems) != len(ideal):
        raise RuntimeError("Rees size bookkeeping failed")
    pairing = []
    seen = set()
    for z in idems:
        row = tuple(s.mul(z, h) for h in helems)
        pairing.append(row)
        seen.update(row)
    if seen != set(ideal):
        raise RuntimeError("Rees pairing is not a bijection onto the ideal")
    return ReesDecomposition(
        left_zero_count=len(idems),
        group=hgroup,
        group_elements=tuple(helems),
        idempotent_elements=tuple(idems),
        pairing=tuple(pairing),
    )


# -- endomorphism monoid of the twin-set act -------------------------------------------


def end_tk(k: TwoCogroup, max_size: int = MATERIALIZE_MAX) -> tuple[FiniteSemigroup, TkData]:
    """All equivariant self-maps of T_K, one per assignment of orbit images."""
    tk = twin_sets_for(k)
    g = k.group
    twins = tk.twin_masks
    tid = {m: i for i, m in enumerate(twins)}
    r = tk.orbit_count
    h_order = len(twins) // r
    total = (h_order**r) * (r**r)
    if total > max_size:
        raise ValueError(f"|End(T_K)| = {total} exceeds budget {max_size}")

    stab_elems = list(mask_elements(k.stab))
    reps = [orb[0] for orb in tk.orbits]
    maps = []
    for images in iter_product(range(len(twins)), repeat=r):
        f = [-1] * len(twins)
        for oi, rep in enumerate(reps):
            img = twins[images[oi]]
            for x in stab_elems:
                f[tid[g.shift_mask(x, rep)]] = tid[g.shift_mask(x, img)]
        maps.append(tuple(f))
    maps.sort()
    assert len(set(maps)) == total
    index = {f: i for i, f in enumerate(maps)}

    def mult(i, j):
        fi, fj = maps[i], maps[j]
        return index[tuple(fi[v] for v in fj)]

    sem = FiniteSemigroup(len(maps), mult, labels=maps, materialize=len(maps) <= 512)
    return sem, tk


def end_tk_min_ideal_expected(sem: FiniteSemigroup, tk: TkData) -> frozenset[int]:
    """{f : image of f lies in a single orbit}, straight from the definition."""
    out = []
    for i in range(sem.size):
        f = sem.labels[i]
        orbits = {tk.orbit_of(tk.twin_masks[v]) for v in f}
        if len(orbits) == 1:
            out.append(i)
    return frozenset(out)


def idempotent_image_orbits(sem: FiniteSemigroup, tk: TkData, i: int) -> int:
    f = sem.labels[i]
    return len({tk.orbit_of(tk.twin_masks[v]) for v in f})


def expected_unit_group_size(tk: TkData, image_orbits: int) -> int:
    h_order = len(tk.twin_masks) // tk.orbit_count
    return (h_order**image_orbits) * factorial(image_orbits)


# -- wreath products --------------------------------------------------------------------


def wreath_product(h: FiniteGroup, a_size: int, max_size: int = 10**6) -> FiniteSemigroup:
    """H wr A^A: pairs (h-vector over A, self-map of A) with twisted product."""
    total = (h.order**a_size) * (a_size**a_size)
    if total > max_size:
        raise ValueError(f"wreath product size {total} exceeds budget {max_size}")
    vectors = list(iter_product(range(h.order), repeat=a_size))
    selfmaps = list(iter_product(range(a_size), repeat=a_size))
    elements = [(v, f) for v in vectors for f in selfmaps]
    index = {e: i for i, e in enumerate(elements)}

    def mult(i, j):
        (hv, f), (hv2, f2) = elements[i], elements[j]
        comb = tuple(f[f2[a]] for a in range(a_size))
        vec = tuple(h.table[hv[f2[a]]][hv2[a]] for a in range(a_size))
        return index[(vec, comb)]

    return FiniteSemigroup(len(elements), mult, labels=elements, materialize=total <= 512)


# -- isomorphism testing -----------------------------------------------------------------


def _cyclic_profile(s: FiniteSemigroup, x: int) -> tuple[int, int]:
    """(index, period) of the cyclic subsemigroup generated by x."""
    seen = {}
    cur = x
    k = 1
    while cur not in seen:
        seen[cur] = k
        cur = s.mul(cur, x)
        k += 1
    first = seen[cur]
    return first, k - first


def _element_invariants(s: FiniteSemigroup) -> list[tuple]:
    lsizes = [len(left_ideal(s, x)) for x in range(s.size)]
    rsizes = [len(right_ideal(s, x)) for x in range(s.size)]
    return [
        (s.mul(x, x) == x, _cyclic_profile(s, x), lsizes[x], rsizes[x])
        for x in range(s.size)
    ]


def _generators(s: FiniteSemigroup) -> list[int]:
    gens: list[int] = []
    closed: set[int] = set()
    for x in range(s.size):
        if x in closed:
            continue
        gens.append(x)
        closed.add(x)
        frontier = list(closed)
        while frontier:
            a = frontier.pop()
            for b in list(closed):
                for c in (s.mul(a, b), s.mul(b, a)):
                    if c not in closed:
                        closed.add(c)
                        frontier.append(c)
        if len(closed) == s.size:
            break
    return gens


class _SearchBudget(Exception):
    pass


def semigroup_isomorphic(
    s1: FiniteSemigroup, s2: FiniteSemigroup, budget: int = 2_000_000
) -> bool | None:
    """True/False when decided; None when the search budget ran out.

    Fingerprint pruning first, then backtracking over generator images with
    full-table verification of any completed bijection.
    """
    if s1.size != s2.size:
        return False
    inv1 = _element_invariants(s1)
    inv2 = _element_invariants(s2)
    if sorted(inv1) != sorted(inv2):
        return False
    n = s1.size
    gens = _generators(s1)
    by_inv: dict[tuple, list[int]] = {}
    for x in range(n):
        by_inv.setdefault(inv2[x], []).append(x)

    ops = 0

    def close(images: dict[int, int]) -> dict[int, int] | None:
        nonlocal ops
        phi = dict(images)
        frontier = list(phi)
        while frontier:
            a = frontier.pop()
            for b in list(phi):
                for c, d in (
                    (s1.mul(a, b), s2.mul(phi[a], phi[b])),
                    (s1.mul(b, a), s2.mul(phi[b], phi[a])),
                ):
                    ops += 1
                    if ops > budget:
                        raise _SearchBudget()
                    known = phi.get(c)
                    if known is None:
                        phi[c] = d
                        frontier.append(c)
                    elif known != d:
                        return None
        return phi

    def backtrack(depth: int, images: dict[int, int]) -> bool:
        if depth == len(gens):
            phi = close(images)
            if phi is None or len(phi) != n or len(set(phi.values())) != n:
                return False
            return all(
                phi[s1.mul(a, b)] == s2.mul(phi[a], phi[b]) for a in range(n) for b in range(n)
            )
        x = gens[depth]
        for cand in by_inv.get(inv1[x], []):
            if cand in images.values():
                continue
            images[x] = cand
            if backtrack(depth + 1, images):
                return True
            del images[x]
        return False

    try:
        return backtrack(0, {})
    except _SearchBudget:
        return None


def group_as_semigroup(g: FiniteGroup) -> FiniteSemigroup:
    return FiniteSemigroup.from_table(g.table)


def groups_isomorphic_as_semigroups(g1: FiniteGroup, g2: FiniteGroup) -> bool:
    # group isomorphism and semigroup isomorphism coincide for groups
    return group_isomorphic(g1, g2)
