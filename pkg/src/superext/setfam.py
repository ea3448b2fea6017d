"""Families of subsets of a finite group encoded at the bit level.

A maximal linked system is stored as one choice bit per complementary
pair {A, X\\A}; the representative of a pair is the mask with the smaller
integer value, so pair ids are exactly the masks 0 .. 2^(n-1)-1 and
membership is O(1).  Explicit families are only materialized for general
(non-maximal-linked) inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .groups import FiniteGroup, mask_elements

MAX_ENUM_ORDER = 6
MAX_ENUM_ORDER_WITH_BUDGET = 7


class BudgetExceeded(RuntimeError):
    """Enumeration ran out of budget; carries the count emitted so far."""

    def __init__(self, count_so_far: int):
        super().__init__(f"budget exceeded after {count_so_far} systems")
        self.count_so_far = count_so_far


class EquivarianceError(ValueError):
    """A map failed f(xA) = x f(A); carries a witness (x, mask) pair."""

    def __init__(self, witness):
        super().__init__(f"map is not equivariant at (x, A) = {witness}")
        self.witness = witness


@dataclass(frozen=True)
class FamilyOfSets:
    """An arbitrary member of the double power set: explicit masks."""

    group: FiniteGroup = field(compare=False)
    members: frozenset[int] = frozenset()

    def __contains__(self, mask: int) -> bool:
        return mask in self.members


@dataclass(frozen=True)
class MlsSignature:
    """A maximal linked system: one bit per complementary pair."""

    group: FiniteGroup = field(compare=False)
    bits: int = 0

    def contains(self, mask: int) -> bool:
        half = 1 << (self.group.order - 1)
        if mask < half:
            return bool((self.bits >> mask) & 1)
        return not (self.bits >> (mask ^ self.group.full_mask())) & 1

    def member_masks(self):
        full = self.group.full_mask()
        half = 1 << (self.group.order - 1)
        for p in range(half):
            yield p if (self.bits >> p) & 1 else p ^ full

    def to_family(self) -> FamilyOfSets:
        return FamilyOfSets(self.group, frozenset(self.member_masks()))

    def to_hex(self) -> str:
        width = (1 << (self.group.order - 1)) + 3 >> 2
        return format(self.bits, f"0{max(width, 1)}x")


def shift(g: FiniteGroup, x: int, mask: int) -> int:
    """{x*a : a in mask}."""
    return g.shift_mask(x, mask)


def principal_ultrafilter(g: FiniteGroup, x: int) -> MlsSignature:
    bits = 0
    for p in range(1 << (g.order - 1)):
        if (p >> x) & 1:
            bits |= 1 << p
    return MlsSignature(g, bits)


def is_linked(f: FamilyOfSets) -> bool:
    members = sorted(f.members)
    return all(a & b for i, a in enumerate(members) for b in members[i:])


def is_maximal_linked(f: FamilyOfSets) -> bool:
    """Linked, and no subset outside the family meets every member."""
    if not is_linked(f):
        return False
    full = f.group.full_mask()
    for a in range(full + 1):
        if a in f.members:
            continue
        if all(a & b for b in f.members):
            return False
    return True


def family_to_signature(f: FamilyOfSets) -> MlsSignature:
    if not is_maximal_linked(f):
        raise ValueError("family is not maximal linked")
    half = 1 << (f.group.order - 1)
    bits = 0
    for p in range(half):
        if p in f.members:
            bits |= 1 << p
    return MlsSignature(f.group, bits)


# -- enumeration of all maximal linked systems ------------------------------------


def _pair_order(n: int, order: str) -> list[int]:
    half = 1 << (n - 1)
    reps = list(range(1, half))  # the {empty, X} pair is pre-forced
    if order == "skew_first":
        # most-skewed pairs first; balanced pairs constrain least and go last
        reps.sort(key=lambda p: (min(p.bit_count(), n - p.bit_count()), p))
    elif order == "balanced_first":
        reps.sort(key=lambda p: (-min(p.bit_count(), n - p.bit_count()), p))
    else:
        raise ValueError(f"unknown enumeration order {order!r}")
    return reps


def enumerate_mls(
    g: FiniteGroup, order: str = "skew_first", budget: int | None = None
) -> list[MlsSignature]:
    """Every maximal linked system on g exactly once, sorted by signature.

    Backtracks over complementary pairs with unit propagation: committing a
    member M forces every superset of M in and every set disjoint from M
    out.  Orders beyond 6 require an explicit budget; order 8+ is refused.
    """
    n = g.order
    if n > MAX_ENUM_ORDER_WITH_BUDGET:
        raise ValueError(f"enumeration beyond order {MAX_ENUM_ORDER_WITH_BUDGET} is not supported")
    if n > MAX_ENUM_ORDER and budget is None:
        raise ValueError(f"order {n} enumeration requires an explicit budget")

    key = ("mls_enum", order)
    cached = g._caches.get(key)
    if cached is None:
        cached = _enumerate_bits(n, order, budget)  # raises BudgetExceeded mid-stream
        g._caches[key] = cached
    if budget is not None and len(cached) > budget:
        raise BudgetExceeded(budget)
    return [MlsSignature(g, b) for b in cached]


def _enumerate_bits(n: int, order: str, budget: int | None) -> list[int]:
    half = 1 << (n - 1)
    full = (1 << n) - 1
    reps = _pair_order(n, order)
    status = [-1] * half
    status[0] = 0  # member is X, never the empty set
    out: list[int] = []

    def propagate(member: int, trail: list[int]) -> bool:
        # member in forces: supersets of member in, sets disjoint from member out;
        # on pair representatives those two cases are exhaustive.
        for t in range(half):
            m = t & member
            if m == member:
                want = 1
            elif m == 0:
                want = 0
            else:
                continue
            cur = status[t]
            if cur == -1:
                status[t] = want
                trail.append(t)
            elif cur != want:
                return False
        return True

    def emit():
        bits = 0
        for p in range(half):
            if status[p]:
                bits |= 1 << p
        out.append(bits)
        if budget is not None and len(out) > budget:
            raise BudgetExceeded(budget)

    def search(i: int):
        while i < len(reps) and status[reps[i]] != -1:
            i += 1
        if i == len(reps):
            emit()
            return
        p = reps[i]
        for bit in (1, 0):
            member = p if bit else p ^ full
            trail: list[int] = []
            status[p] = bit
            trail.append(p)
            ok = propagate(member, trail)
            if ok:
                search(i + 1)
            for t in trail:
                status[t] = -1

    if n == 1:
        return [0]
    search(0)
    out.sort()
    return out


# -- the semigroup product and the function representation ----------------------------


def phi(a, mask: int) -> int:
    """{x : x^-1 * mask in a} for a family or signature a."""
    g = a.group
    out = 0
    if isinstance(a, MlsSignature):
        bits, half, full = a.bits, 1 << (g.order - 1), g.full_mask()
        for x in range(g.order):
            m = g.shift_mask(g.inv[x], mask)
            if m < half:
                bit = (bits >> m) & 1
            else:
                bit = 1 ^ ((bits >> (m ^ full)) & 1)
            out |= bit << x
    else:
        for x in range(g.order):
            if g.shift_mask(g.inv[x], mask) in a.members:
                out |= 1 << x
    return out


def phi_map(a) -> tuple[int, ...]:
    """The whole function representation as a tuple indexed by mask."""
    g = a.group
    return tuple(phi(a, m) for m in range(g.full_mask() + 1))


def circ(a, b):
    """Product of two families: {A : {x : x^-1 A in b} in a}.

    Two signatures yield a signature; otherwise an explicit family.
    """
    if a.group is not b.group and a.group.table != b.group.table:
        raise ValueError("operands live over different groups")
    g = a.group
    if isinstance(a, MlsSignature) and isinstance(b, MlsSignature):
        half = 1 << (g.order - 1)
        full = g.full_mask()
        abits, bbits = a.bits, b.bits
        inv = g.inv
        out = 0
        for p in range(half):
            s = 0
            for x in range(g.order):
                m = g.shift_mask(inv[x], p)
                if m < half:
                    bit = (bbits >> m) & 1
                else:
                    bit = 1 ^ ((bbits >> (m ^ full)) & 1)
                s |= bit << x
            if s < half:
                bit = (abits >> s) & 1
            else:
                bit = 1 ^ ((abits >> (s ^ full)) & 1)
            out |= bit << p
        return MlsSignature(g, out)
    fam_a = a.to_family() if isinstance(a, MlsSignature) else a
    fam_b = b.to_family() if isinstance(b, MlsSignature) else b
    members = frozenset(m for m in range(g.full_mask() + 1) if phi(fam_b, m) in fam_a.members)
    return FamilyOfSets(g, members)


def phi_inverse(f, group: FiniteGroup) -> FamilyOfSets:
    """Family {A : e in f(A)} for an equivariant self-map of the power set.

    f may be a sequence or mapping indexed by mask.  Non-equivariant input
    is rejected with a witness pair.
    """
    full = group.full_mask()

    def val(m: int) -> int:
        return f[m]

    for a in range(full + 1):
        fa = val(a)
        for x in range(group.order):
            if val(group.shift_mask(x, a)) != group.shift_mask(x, fa):
                raise EquivarianceError((x, a))
    members = frozenset(a for a in range(full + 1) if val(a) & 1)
    return FamilyOfSets(group, members)


# -- stream format -----------------------------------------------------------------


def write_mls_stream(fh, g: FiniteGroup, sigs) -> None:
    fh.write(f"n={g.order} pairs={1 << (g.order - 1)}\n")
    for s in sigs:
        fh.write(s.to_hex() + "\n")


def read_mls_stream(fh) -> tuple[int, list[int]]:
    header = fh.readline().strip()
    parts = dict(kv.split("=") for kv in header.split())
    n = int(parts["n"])
    if int(parts["pairs"]) != 1 << (n - 1):
        raise ValueError("pair count does not match the order in the header")
    bits = [int(line, 16) for line in fh if line.strip()]
    return n, bits
