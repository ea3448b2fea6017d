"""Twin subsets, 2-cogroups, characteristic groups, and the twinic check.

All notions here are the plain (trivial-ideal) forms: every finite group
has periodic commutators, so the ideal-decorated variants collapse to the
ones implemented here and no operation takes an ideal parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .groups import (
    FiniteGroup,
    Subgroup,
    cogroup_masks,
    group_isomorphic,
    is_cyclic,
    make_generalized_quaternion,
    mask_elements,
    maximal_cogroup_masks,
    quotient,
)


@dataclass(frozen=True)
class TwinSet:
    group: FiniteGroup = field(compare=False)
    mask: int = 0
    fix: int = 0
    fix_minus: int = 0
    fix_pm: int = 0


@dataclass(frozen=True)
class TwoCogroup:
    group: FiniteGroup = field(compare=False)
    members: int = 0          # K
    kk: int = 0               # K*K, a subgroup disjoint from K
    kpm: int = 0              # K union K*K
    stab: int = 0             # {x : x K x^-1 = K}
    index: int = 0            # |X| / |K|
    maximal: bool = False

    @property
    def size(self) -> int:
        return self.members.bit_count()

    def kpm_index(self) -> int:
        return self.group.order // self.kpm.bit_count()


@dataclass(frozen=True)
class CogroupOrbit:
    representative: TwoCogroup
    members: tuple[TwoCogroup, ...] = ()
    characteristic_type: tuple[str, int] = ("C", 1)


def fix_operators(g: FiniteGroup, a: int) -> tuple[int, int, int]:
    """(Fix, Fix-, Fix+-) of the subset a, by direct scan over all shifts."""
    comp = a ^ g.full_mask()
    fix = fixm = 0
    for x in range(g.order):
        xa = g.shift_mask(x, a)
        if xa == a:
            fix |= 1 << x
        elif xa == comp:
            fixm |= 1 << x
    return fix, fixm, fix | fixm


def make_twin_set(g: FiniteGroup, mask: int) -> TwinSet:
    fix, fixm, fixpm = fix_operators(g, mask)
    if not fixm:
        raise ValueError("mask is not a twin set")
    return TwinSet(group=g, mask=mask, fix=fix, fix_minus=fixm, fix_pm=fixpm)


def is_twin(g: FiniteGroup, a: int) -> bool:
    return fix_operators(g, a)[1] != 0


def is_pretwin(g: FiniteGroup, a: int) -> bool:
    """Some shift of a inside the complement and some shift covering it."""
    comp = a ^ g.full_mask()
    below = above = False
    for x in range(g.order):
        xa = g.shift_mask(x, a)
        below = below or (xa & comp) == xa
        above = above or (comp & xa) == comp
        if below and above:
            return True
    return False


# -- 2-cogroups ------------------------------------------------------------------


def _make_cogroup(g: FiniteGroup, k: int, kk: int, kpm: int, maximal: bool) -> TwoCogroup:
    stab = 0
    for x in range(g.order):
        conj = 0
        for a in mask_elements(k):
            conj |= 1 << g.conj(x, a)
        if conj == k:
            stab |= 1 << x
    return TwoCogroup(
        group=g,
        members=k,
        kk=kk,
        kpm=kpm,
        stab=stab,
        index=g.order // k.bit_count(),
        maximal=maximal,
    )


def enumerate_2cogroups(g: FiniteGroup) -> list[TwoCogroup]:
    """All 2-cogroups, as H_pm \\ H over index-2 subgroup pairs."""
    maximal = {trip[0] for trip in maximal_cogroup_masks(g)}
    return [
        _make_cogroup(g, k, kk, kpm, k in maximal) for k, kk, kpm in cogroup_masks(g)
    ]


def maximal_2cogroups(g: FiniteGroup) -> list[TwoCogroup]:
    def build():
        return [
            _make_cogroup(g, k, kk, kpm, True) for k, kk, kpm in maximal_cogroup_masks(g)
        ]

    return g._cache("maximal_2cogroups", build)


def conjugate_cogroup(k: TwoCogroup, x: int) -> int:
    g = k.group
    out = 0
    for a in mask_elements(k.members):
        out |= 1 << g.conj(x, a)
    return out


def cogroup_orbits(g: FiniteGroup) -> list[CogroupOrbit]:
    """Conjugation orbits of the maximal 2-cogroups, smallest mask first."""
    def build():
        cogs = {k.members: k for k in maximal_2cogroups(g)}
        seen = set()
        orbits = []
        for mask in sorted(cogs):
            if mask in seen:
                continue
            orbit_masks = sorted({conjugate_cogroup(cogs[mask], x) for x in range(g.order)})
            seen.update(orbit_masks)
            members = tuple(cogs[m] for m in orbit_masks)
            _, tag = characteristic_group(members[0])
            orbits.append(
                CogroupOrbit(representative=members[0], members=members, characteristic_type=tag)
            )
        return orbits

    return g._cache("cogroup_orbits", build)


def canonical_selector(g: FiniteGroup) -> list[TwoCogroup]:
    """One maximal 2-cogroup per conjugacy orbit: the smallest-mask member."""
    return [o.representative for o in cogroup_orbits(g)]


# -- characteristic groups ----------------------------------------------------------


class ClassificationError(RuntimeError):
    """A characteristic group failed the cyclic-or-quaternion shape guarantee."""


def _subgroup_as_group(g: FiniteGroup, mask: int) -> tuple[FiniteGroup, list[int]]:
    elems = sorted(mask_elements(mask))
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[g.table[a][b]] for b in elems] for a in elems]
    return FiniteGroup(table), elems


def classify_unique_involution_2group(h: FiniteGroup) -> tuple[str, int]:
    """("C", k) or ("Q", k) for a 2-group with a unique involution; raises otherwise."""
    n = h.order
    if n & (n - 1):
        raise ClassificationError(f"order {n} is not a power of two")
    k = n.bit_length() - 1
    if n > 1 and sum(1 for o in h.element_orders if o == 2) != 1:
        raise ClassificationError("group does not have a unique involution")
    if is_cyclic(h):
        return ("C", k)
    if n >= 8 and group_isomorphic(h, make_generalized_quaternion(n)):
        return ("Q", k)
    raise ClassificationError("group is neither cyclic nor generalized quaternion")


def characteristic_group(k: TwoCogroup) -> tuple[FiniteGroup, tuple[str, int]]:
    """Stab(K)/KK with its cyclic-or-quaternion classification tag."""
    g = k.group
    stab_group, stab_elems = _subgroup_as_group(g, k.stab)
    pos = {e: i for i, e in enumerate(stab_elems)}
    kk_inside = 0
    for e in mask_elements(k.kk):
        kk_inside |= 1 << pos[e]
    sub = Subgroup(
        parent=stab_group,
        mask=kk_inside,
        normal=True,
        index=stab_group.order // kk_inside.bit_count(),
    )
    h, _ = quotient(stab_group, sub)
    return h, classify_unique_involution_2group(h)


def tag_str(tag: tuple[str, int]) -> str:
    return f"{tag[0]}{2 ** tag[1]}"


# -- the twin sets attached to a maximal 2-cogroup --------------------------------------


@dataclass(frozen=True)
class TkData:
    """T_K with its free characteristic-group act structure."""

    cogroup: TwoCogroup
    twin_masks: tuple[int, ...] = ()
    orbits: tuple[tuple[int, ...], ...] = ()

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)

    def orbit_of(self, mask: int) -> int:
        for i, orb in enumerate(self.orbits):
            if mask in orb:
                return i
        raise KeyError(mask)


def _right_coset_transversal(g: FiniteGroup, sub_mask: int) -> list[int]:
    """Greedy smallest-element-first transversal of the right cosets sub*x."""
    reps = []
    covered = 0
    for x in range(g.order):
        if not (covered >> x) & 1:
            reps.append(x)
            for h in mask_elements(sub_mask):
                covered |= 1 << g.table[h][x]
    return reps


def twin_sets_for(k: TwoCogroup) -> TkData:
    """All twin sets with Fix- exactly K, plus their orbit decomposition.

    Built from a transversal S of the K+- cosets as KK*E union K*(S\\E),
    then verified against the literal Fix- scan.
    """
    if not k.maximal:
        raise ValueError("twin-set families are only computed for maximal 2-cogroups")
    g = k.group
    reps = _right_coset_transversal(g, k.kpm)
    kk_elems = list(mask_elements(k.kk))
    k_elems = list(mask_elements(k.members))
    built = set()
    for e_bits in range(1 << len(reps)):
        mask = 0
        for i, s in enumerate(reps):
            movers = kk_elems if (e_bits >> i) & 1 else k_elems
            for z in movers:
                mask |= 1 << g.table[z][s]
        built.add(mask)
    scan = {a for a in range(g.full_mask() + 1) if fix_operators(g, a)[1] == k.members}
    if built != scan:
        raise AssertionError("transversal construction disagrees with the direct scan")
    twins = tuple(sorted(built))
    assert len(twins) == 1 << k.kpm_index()

    stab_elems = list(mask_elements(k.stab))
    seen = set()
    orbits = []
    for a in twins:
        if a in seen:
            continue
        orb = tuple(sorted({g.shift_mask(x, a) for x in stab_elems}))
        seen.update(orb)
        orbits.append(orb)
    h_order = k.stab.bit_count() // k.kk.bit_count()
    assert all(len(o) == h_order for o in orbits), "the characteristic-group act is not free"
    return TkData(cogroup=k, twin_masks=twins, orbits=tuple(orbits))


def q_counts(g: FiniteGroup) -> dict[tuple[str, int], int]:
    """Conjugation-orbit counts of maximal 2-cogroups keyed by characteristic type."""
    out: dict[tuple[str, int], int] = {}
    for orbit in cogroup_orbits(g):
        out[orbit.characteristic_type] = out.get(orbit.characteristic_type, 0) + 1
    return out


def realized_cogroups(g: FiniteGroup) -> dict[int, bool]:
    """For each 2-cogroup mask, whether some twin set has exactly it as Fix-.

    Diagnostic only; maximal 2-cogroups are always realized, smaller ones
    need not be.
    """
    status = {k: False for k, _, _ in cogroup_masks(g)}
    for a in range(g.full_mask() + 1):
        fm = fix_operators(g, a)[1]
        if fm in status:
            status[fm] = True
    return status


# -- the twinic-triviality check -------------------------------------------------------


@dataclass(frozen=True)
class TwinicResult:
    trivial: bool
    witness: tuple[int, int] | None = None


def is_trivially_twinic(g: FiniteGroup) -> TwinicResult:
    """Whether every product ab lies in the subsemigroup generated by b+- a+-.

    Breadth-first semigroup closure with a visited bit set; the closure
    stabilizes in at most |X| growth rounds.  On failure the witness pair
    (a, b) is returned.
    """
    n = g.order
    for a in range(n):
        ai = g.inv[a]
        for b in range(n):
            target = g.table[a][b]
            bi = g.inv[b]
            gens = {g.table[b][a], g.table[b][ai], g.table[bi][a], g.table[bi][ai]}
            if target in gens:
                continue
            closure = set(gens)
            frontier = set(gens)
            found = False
            while frontier and not found:
                new = set()
                for x in frontier:
                    for s in gens:
                        for z in (g.table[x][s], g.table[s][x]):
                            if z == target:
                                found = True
                            if z not in closure:
                                closure.add(z)
                                new.add(z)
                frontier = new
            if not found and target not in closure:
                return TwinicResult(False, (a, b))
    return TwinicResult(True, None)
