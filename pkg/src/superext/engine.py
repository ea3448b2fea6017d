"""From a finite group to the type of its minimal left ideals.

Two independent routes: the structural one (maximal 2-cogroup orbits,
characteristic groups, orbit counts) runs for any group of order <= 16;
the brute one materializes the whole superextension semigroup and reads
the answer off a Rees decomposition, feasible up to order 6 (7 with an
explicit budget).  cross_check runs both and certifies agreement with an
explicit isomorphism search.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .groups import (
    FiniteGroup,
    MAX_PIPELINE_ORDER,
    direct_product,
    make_cyclic,
    make_generalized_quaternion,
)
from .setfam import MlsSignature, circ, enumerate_mls, phi, phi_inverse, family_to_signature
from .twin import (
    CogroupOrbit,
    TwoCogroup,
    canonical_selector,
    cogroup_orbits,
    conjugate_cogroup,
    fix_operators,
    maximal_2cogroups,
    tag_str,
    twin_sets_for,
)
from .semigroups import (
    FiniteSemigroup,
    minimal_left_ideal,
    rees_decompose,
    semigroup_isomorphic,
)

Tag = tuple[str, int]


# -- type expressions ---------------------------------------------------------------


def parse_tag(text: str) -> Tag:
    fam = text[0]
    order = int(text[1:])
    if fam not in ("C", "Q") or order & (order - 1) or order < 2:
        raise ValueError(f"bad factor tag {text!r}")
    return (fam, order.bit_length() - 1)


def type_string(m: int, q: dict[Tag, int]) -> str:
    """Normal form: left-zero factor, then C factors, then Q factors."""
    parts = []
    if m == 1:
        parts.append("2")
    elif m > 1:
        parts.append(f"2^{m}")
    for fam in ("C", "Q"):
        for (f, k), count in sorted(kv for kv in q.items() if kv[0][0] == fam):
            base = f"{f}{2 ** k}"
            parts.append(base if count == 1 else f"{base}^{count}")
    return " x ".join(parts) if parts else "1"


def group_type_string(q: dict[Tag, int]) -> str:
    return type_string(0, q)


def strip_left_zero_factor(type_str: str) -> str:
    parts = [p for p in type_str.split(" x ") if not (p == "2" or p.startswith("2^"))]
    return " x ".join(parts) if parts else "1"


# -- reports ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSummary:
    rep_mask: int
    kpm_index: int          # |X / K+-|
    h_order: int            # |characteristic group|
    t_size: int             # |T_K| = 2^kpm_index
    orbit_space_size: int   # |[T_K]| = t_size / h_order
    classification: Tag = ("C", 1)


@dataclass(frozen=True)
class StructureReport:
    group_name: str
    q_vector: tuple[tuple[Tag, int], ...] = ()
    left_zero_exponent: int = 0
    min_left_ideal_type: str = "1"
    max_subgroup_type: str = "1"
    idempotents_per_min_left_ideal: int = 1
    per_orbit: tuple[OrbitSummary, ...] = ()
    provenance: str = "structural"
    notes: tuple[str, ...] = ()

    def q_dict(self) -> dict[Tag, int]:
        return dict(self.q_vector)

    def to_json(self) -> dict:
        return {
            "group": self.group_name,
            "q": {tag_str(t): c for t, c in self.q_vector},
            "m": self.left_zero_exponent,
            "m_summands": [
                {
                    "K": format(o.rep_mask, "x"),
                    "orbit_size_T": o.orbit_space_size,
                    "x_mod_kpm": o.kpm_index,
                    "h_order": o.h_order,
                    "t_size": o.t_size,
                    "classification": tag_str(o.classification),
                }
                for o in self.per_orbit
            ],
            "min_left_ideal": self.min_left_ideal_type,
            "max_subgroup": self.max_subgroup_type,
            "idempotents": self.idempotents_per_min_left_ideal,
            "provenance": self.provenance,
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "StructureReport":
        q = tuple(sorted((parse_tag(t), c) for t, c in doc["q"].items()))
        per_orbit = tuple(
            OrbitSummary(
                rep_mask=int(s["K"], 16),
                kpm_index=s["x_mod_kpm"],
                h_order=s["h_order"],
                t_size=s["t_size"],
                orbit_space_size=s["orbit_size_T"],
                classification=parse_tag(s["classification"]),
            )
            for s in doc["m_summands"]
        )
        return cls(
            group_name=doc["group"],
            q_vector=q,
            left_zero_exponent=doc["m"],
            min_left_ideal_type=doc["min_left_ideal"],
            max_subgroup_type=doc["max_subgroup"],
            idempotents_per_min_left_ideal=doc["idempotents"],
            per_orbit=per_orbit,
            provenance=doc["provenance"],
            notes=tuple(doc["notes"]),
        )


# -- structural analysis ------------------------------------------------------------------


def analyze_structural(g: FiniteGroup, name: str = "?") -> StructureReport:
    if g.order > MAX_PIPELINE_ORDER:
        raise ValueError(f"structural analysis capped at order {MAX_PIPELINE_ORDER}")
    q: dict[Tag, int] = {}
    per_orbit = []
    m = 0
    for orbit in cogroup_orbits(g):
        k = orbit.representative
        kpm_index = k.kpm_index()
        h_order = k.stab.bit_count() // k.kk.bit_count()
        t_size = 1 << kpm_index
        orbit_space = t_size // h_order
        assert t_size % h_order == 0 and orbit_space & (orbit_space - 1) == 0
        m += orbit_space.bit_length() - 1
        tag = orbit.characteristic_type
        assert 1 << tag[1] == h_order
        q[tag] = q.get(tag, 0) + 1
        per_orbit.append(
            OrbitSummary(
                rep_mask=k.members,
                kpm_index=kpm_index,
                h_order=h_order,
                t_size=t_size,
                orbit_space_size=orbit_space,
                classification=tag,
            )
        )
    return StructureReport(
        group_name=name,
        q_vector=tuple(sorted(q.items())),
        left_zero_exponent=m,
        min_left_ideal_type=type_string(m, q),
        max_subgroup_type=group_type_string(q),
        idempotents_per_min_left_ideal=1 << m,
        per_orbit=tuple(per_orbit),
        provenance="structural",
    )


# -- brute-force analysis ---------------------------------------------------------------


def lambda_semigroup(g: FiniteGroup, budget: int | None = None) -> FiniteSemigroup:
    """The whole superextension as a finite semigroup (orders <= 6, 7 with budget)."""
    sigs = enumerate_mls(g, budget=budget)
    bits = [s.bits for s in sigs]
    index = {b: i for i, b in enumerate(bits)}

    def mult(i, j):
        return index[circ(sigs[i], sigs[j]).bits]

    return FiniteSemigroup(len(sigs), mult, labels=sigs, materialize=False)


def _cq_factor_candidates(two_power: int) -> list[tuple[Tag, ...]]:
    """All multisets of C/Q factor tags whose orders multiply to two_power."""
    out: list[tuple[Tag, ...]] = []
    tags: list[Tag] = []
    t = two_power.bit_length() - 1
    for k in range(1, t + 1):
        tags.append(("C", k))
    for k in range(3, t + 1):
        tags.append(("Q", k))

    def rec(remaining: int, start: int, acc: list[Tag]):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for i in range(start, len(tags)):
            k = tags[i][1]
            if k <= remaining:
                acc.append(tags[i])
                rec(remaining - k, i, acc)
                acc.pop()

    rec(t, 0, [])
    return out


def _build_factor_group(tags: tuple[Tag, ...]) -> FiniteGroup:
    group = make_cyclic(1)
    for fam, k in tags:
        factor = make_cyclic(2**k) if fam == "C" else make_generalized_quaternion(2**k)
        group = direct_product(group, factor)
    return group


def decompose_cq_type(h: FiniteGroup) -> dict[Tag, int]:
    """Express a 2-group as a product of cyclic and quaternion factors."""
    from .groups import group_isomorphic

    if h.order == 1:
        return {}
    if h.order & (h.order - 1):
        raise ValueError("only 2-groups decompose into C/Q factors")
    for cand in _cq_factor_candidates(h.order):
        if group_isomorphic(h, _build_factor_group(cand)):
            q: dict[Tag, int] = {}
            for tag in cand:
                q[tag] = q.get(tag, 0) + 1
            return q
    raise RuntimeError("no cyclic/quaternion factorization found")


def _brute_parts(g: FiniteGroup, budget: int | None = None):
    key = ("brute_parts", budget)
    cached = g._caches.get(key)
    if cached is None:
        sem = lambda_semigroup(g, budget=budget)
        ideal = minimal_left_ideal(sem)
        rees = rees_decompose(sem, ideal)
        cached = (sem, ideal, rees)
        g._caches[key] = cached
    return cached


def analyze_brute(g: FiniteGroup, name: str = "?", budget: int | None = None) -> StructureReport:
    sem, ideal, rees = _brute_parts(g, budget)
    count = rees.left_zero_count
    if count & (count - 1):
        raise RuntimeError("idempotent count of a minimal left ideal is not a power of two")
    m = count.bit_length() - 1
    q = decompose_cq_type(rees.group)
    return StructureReport(
        group_name=name,
        q_vector=tuple(sorted(q.items())),
        left_zero_exponent=m,
        min_left_ideal_type=type_string(m, q),
        max_subgroup_type=group_type_string(q),
        idempotents_per_min_left_ideal=count,
        per_orbit=(),
        provenance="brute",
        notes=(f"superextension size {sem.size}, minimal left ideal size {len(ideal)}",),
    )


# -- cross-checking the two routes ---------------------------------------------------------


def build_type_semigroup(m: int, q: dict[Tag, int]) -> FiniteSemigroup:
    """(left zeros of size 2^m) x (product of the C/Q factors), explicitly."""
    tags: list[Tag] = []
    for tag, count in sorted(q.items()):
        tags.extend([tag] * count)
    h = _build_factor_group(tuple(tags))
    z = 1 << m
    size = z * h.order
    elements = [(a, b) for a in range(z) for b in range(h.order)]
    index = {e: i for i, e in enumerate(elements)}

    def mult(i, j):
        (za, ha), (_, hb) = elements[i], elements[j]
        return index[(za, h.table[ha][hb])]

    return FiniteSemigroup(size, mult, labels=elements, materialize=size <= 512)


def sub_semigroup(sem: FiniteSemigroup, elems) -> FiniteSemigroup:
    order = sorted(elems)
    pos = {e: i for i, e in enumerate(order)}
    table = [[pos[sem.mul(a, b)] for b in order] for a in order]
    return FiniteSemigroup.from_table(table, labels=order)


@dataclass(frozen=True)
class CrossCheck:
    verdict: str  # "agree" | "disagree"
    structural: StructureReport
    brute: StructureReport
    merged: StructureReport
    isomorphism_certified: bool = False


def cross_check(g: FiniteGroup, name: str = "?", budget: int | None = None) -> CrossCheck:
    structural = analyze_structural(g, name)
    brute = analyze_brute(g, name, budget=budget)
    sem, ideal, _ = _brute_parts(g, budget)
    brute_ideal = sub_semigroup(sem, ideal)
    model = build_type_semigroup(structural.left_zero_exponent, structural.q_dict())
    iso = semigroup_isomorphic(brute_ideal, model)
    types_equal = (
        structural.min_left_ideal_type == brute.min_left_ideal_type
        and structural.max_subgroup_type == brute.max_subgroup_type
    )
    agree = types_equal and iso is True
    verdict = "agree" if agree else "disagree"
    notes = structural.notes
    if iso is None:
        notes += ("isomorphism search hit its budget: verdict indeterminate, reported as disagree",)
    merged = replace(
        structural,
        provenance=f"both({verdict})",
        notes=notes,
    )
    return CrossCheck(
        verdict=verdict,
        structural=structural,
        brute=brute,
        merged=merged,
        isomorphism_certified=iso is True,
    )


# -- minimal-ideal membership test -----------------------------------------------------------


def min_ideal_membership(g: FiniteGroup, system: MlsSignature) -> bool:
    """Two-condition test for membership in the minimal ideal of the superextension.

    (1) the image of the maximal-cogroup twin family is a minimal covering
    family (meets each conjugacy class of twin families in one shift orbit);
    (2) every other value is empty, full, or already in that image.
    """
    full = g.full_mask()
    maximal = {k.members for k in maximal_2cogroups(g)}
    fixm = [fix_operators(g, a)[1] for a in range(full + 1)]
    hat_t = [a for a in range(full + 1) if fixm[a] in maximal]
    image = {phi(system, a) for a in hat_t}
    if any(fixm[b] not in maximal for b in image):
        return False

    for orbit in cogroup_orbits(g):
        class_masks = {k.members for k in orbit.members}
        in_class = {b for b in image if fixm[b] in class_masks}
        if not in_class:
            return False
        rep = min(in_class)
        shift_orbit = {g.shift_mask(x, rep) for x in range(g.order)}
        if in_class != shift_orbit:
            return False

    allowed = {0, full} | image
    return all(phi(system, a) in allowed for a in range(full + 1))


# -- an explicit idempotent hitting the selector twin family --------------------------------


def build_projection_idempotent(
    g: FiniteGroup, selector: list[TwoCogroup] | None = None
) -> MlsSignature:
    """Constructs an idempotent of the superextension concretely.

    Identity on the selector-generated twin family, equivariant collapse of
    every other twin set onto it, and empty/full values elsewhere via a
    greedily completed maximal invariant linked family.  The result is
    verified to be idempotent; failure is a hard error.
    """
    if g.order > 6:
        raise ValueError("projection idempotent construction capped at order 6")
    full = g.full_mask()
    n = g.order
    if selector is None:
        selector = canonical_selector(g)
    orbits = cogroup_orbits(g)
    orbit_of_cogroup = {}
    for i, orbit in enumerate(orbits):
        for k in orbit.members:
            orbit_of_cogroup[k.members] = i
    chosen_twin = {}
    for k in selector:
        i = orbit_of_cogroup[k.members]
        chosen_twin[i] = (k, min(twin_sets_for(k).twin_masks))

    fixm = [fix_operators(g, a)[1] for a in range(full + 1)]
    e_map = [-1] * (full + 1)

    # twin sets: collapse X-orbits onto the selector family
    for a in range(full + 1):
        if e_map[a] != -1 or not fixm[a]:
            continue
        target = _collapse_target(g, a, fixm[a], orbits, orbit_of_cogroup, chosen_twin)
        for x in range(n):
            e_map[g.shift_mask(x, a)] = g.shift_mask(x, target)

    # non-twin sets: 0/1 values from a maximal invariant linked family,
    # completed greedily over shift orbits by descending member size
    invariant_linked: set[int] = set()
    seen = set()
    orbit_families = []
    for a in range(full + 1):
        if a in seen:
            continue
        fam = sorted({g.shift_mask(x, a) for x in range(n)})
        seen.update(fam)
        orbit_families.append(fam)
    orbit_families.sort(key=lambda fam: (-fam[0].bit_count(), fam[0]))
    for fam in orbit_families:
        ok = all(a & b for i, a in enumerate(fam) for b in fam[i:]) and all(
            a & b for a in fam for b in invariant_linked
        )
        if ok:
            invariant_linked.update(fam)
    for a in range(full + 1):
        if e_map[a] == -1:
            e_map[a] = full if a in invariant_linked else 0

    family = phi_inverse(e_map, g)  # validates equivariance
    _assert_monotone_symmetric(g, e_map)
    sig = family_to_signature(family)
    if circ(sig, sig).bits != sig.bits:
        raise RuntimeError("constructed projection is not idempotent")
    return sig


def _collapse_target(g, a, k_mask, orbits, orbit_of_cogroup, chosen_twin):
    """Twin set the orbit of `a` collapses onto: lives over a maximal
    2-cogroup containing Fix-(a), inside the selector family."""
    enclosing = sorted(
        k.members for k in maximal_2cogroups(g) if k.members & k_mask == k_mask
    )
    k_star = enclosing[0]
    oi = orbit_of_cogroup[k_star]
    rep_k, rep_twin = chosen_twin[oi]
    if k_star == rep_k.members:
        z = 0
    else:
        z = next(
            x for x in range(g.order) if conjugate_cogroup(rep_k, x) == k_star
        )
    target = g.shift_mask(z, rep_twin)
    if a == target or any(g.shift_mask(x, a) == target for x in range(g.order)):
        # `a` lies in the selector orbit itself: keep the identity there
        return a
    return target


def _assert_monotone_symmetric(g: FiniteGroup, e_map) -> None:
    full = g.full_mask()
    for a in range(full + 1):
        if e_map[a ^ full] != e_map[a] ^ full:
            raise RuntimeError(f"projection not symmetric at {a}")
        b = a
        while True:
            b = (b + 1) | a
            if b > full:
                break
            if e_map[a] & e_map[b] != e_map[a]:
                raise RuntimeError(f"projection not monotone at {a} <= {b}")


# -- the reference table ----------------------------------------------------------------------


REFERENCE_ROWS: tuple[tuple[str, int, str], ...] = (
    # (group spec, idempotents per minimal left ideal, minimal left ideal type)
    ("C2", 1, "C2"),
    ("C4", 1, "C2 x C4"),
    ("C2xC2", 1, "C2^3"),
    ("C2xC2xC2", 1, "C2^7"),
    ("C2xC4", 1, "C2^3 x C4^2"),
    ("C8", 2, "2 x C2 x C4 x C8"),
    ("D8", 2, "2^2 x C2^5"),
    ("Q8", 2, "2 x C2^3 x Q8"),
    ("A4", 64, "2^6 x C2^3"),
)


def reference_reports(with_brute: bool = False) -> list[tuple[str, StructureReport, tuple[str, int, str]]]:
    """Structural reports for the reference catalog, discrepancy-annotated."""
    from .cli import parse_spec  # late import: cli provides the spec grammar

    out = []
    for spec, ref_idem, ref_ideal in REFERENCE_ROWS:
        g = parse_spec(spec)
        report = analyze_structural(g, spec)
        if with_brute and g.order <= 6:
            report = cross_check(g, spec).merged
        notes = list(report.notes)
        ref_subgroup = strip_left_zero_factor(ref_ideal)
        if report.min_left_ideal_type != ref_ideal:
            notes.append(
                f"discrepancy: computed minimal left ideal {report.min_left_ideal_type}; "
                f"reference lists {ref_ideal}"
            )
        if report.max_subgroup_type != ref_subgroup:
            notes.append(
                f"discrepancy: computed maximal subgroup {report.max_subgroup_type}; "
                f"reference lists {ref_subgroup}"
            )
        if report.idempotents_per_min_left_ideal != ref_idem:
            notes.append(
                f"discrepancy: computed idempotent count {report.idempotents_per_min_left_ideal}; "
                f"reference lists {ref_idem}"
            )
        out.append((spec, replace(report, notes=tuple(notes)), (spec, ref_idem, ref_ideal)))
    return out


def catalog_specs(max_order: int = 16) -> list[str]:
    """Deterministic catalog of named groups up to the given order."""
    specs = [f"C{n}" for n in range(1, 17)]
    specs += ["C2xC2", "C2xC2xC2", "C2xC4", "C2xC2xC2xC2", "C2xC2xC4", "C2xC8", "C4xC4"]
    specs += [f"D{n}" for n in range(6, 17, 2)]
    specs += ["Q8", "Q16", "A4"]
    from .cli import spec_order

    return [s for s in specs if spec_order(s) <= max_order]
