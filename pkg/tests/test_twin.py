"""Twin sets, Fix operators, 2-cogroups, characteristic groups, twinic check."""

import random

import pytest

from superext.cli import parse_spec
from superext.engine import catalog_specs
from superext.groups import (
    all_subgroups,
    group_isomorphic,
    is_subgroup_mask,
    make_alternating4,
    make_cyclic,
    make_generalized_quaternion,
    mask_elements,
)
from superext.twin import (
    ClassificationError,
    canonical_selector,
    characteristic_group,
    classify_unique_involution_2group,
    cogroup_orbits,
    enumerate_2cogroups,
    fix_operators,
    is_pretwin,
    is_trivially_twinic,
    is_twin,
    maximal_2cogroups,
    q_counts,
    realized_cogroups,
    tag_str,
    twin_sets_for,
)

CATALOG_8 = [s for s in catalog_specs(8)]
CATALOG_16 = [s for s in catalog_specs(16)]


# -- Fix operators -----------------------------------------------------------------------


def test_fix_operators_c4():
    g = make_cyclic(4)
    fix, fixm, fixpm = fix_operators(g, 0b0011)
    assert fix == 0b0001 and fixm == 0b0100 and fixpm == 0b0101


def test_fix_operators_empty_set():
    g = make_cyclic(4)
    fix, fixm, _ = fix_operators(g, 0)
    assert fix == g.full_mask() and fixm == 0


def test_fix_operators_q8_cyclic_half():
    g = make_generalized_quaternion(8)
    half = 0b00001111  # the order-4 cyclic subgroup <y>
    fix, fixm, _ = fix_operators(g, half)
    assert fix == half and fixm == half ^ g.full_mask()


def test_is_twin_examples():
    g = make_cyclic(4)
    assert is_twin(g, 0b0011)
    assert not is_twin(g, 0b0111)  # wrong cardinality
    assert not is_twin(g, 0b0001)


def test_twin_needs_half_size():
    for spec in ("C4", "C6", "D6"):
        g = parse_spec(spec)
        for a in range(g.full_mask() + 1):
            if 2 * bin(a).count("1") != g.order:
                assert not is_twin(g, a), (spec, a)


def test_pretwin_equals_twin_on_catalog():
    # trivial-twinic consequence, exhaustively on small groups
    for spec in CATALOG_8:
        g = parse_spec(spec)
        for a in range(g.full_mask() + 1):
            assert is_twin(g, a) == is_pretwin(g, a), (spec, a)


def test_pretwin_equals_twin_sampled_large():
    rng = random.Random(1)
    for spec in ("C12", "A4", "C16", "D16", "Q16"):
        g = parse_spec(spec)
        for _ in range(2_000):
            a = rng.randrange(g.full_mask() + 1)
            assert is_twin(g, a) == is_pretwin(g, a)


# -- structure of Fix (subgroup laws) ---------------------------------------------------------


def test_fix_pm_subgroup_and_index_two_exhaustive():
    for spec in CATALOG_8:
        g = parse_spec(spec)
        for a in range(g.full_mask() + 1):
            fix, fixm, fixpm = fix_operators(g, a)
            assert is_subgroup_mask(g, fixpm) or fixpm == fix  # fixpm = fix when not twin
            if fixpm != fix:
                assert is_subgroup_mask(g, fixpm)
            assert is_subgroup_mask(g, fix)
            twin = fixm != 0
            assert twin == (2 * fix.bit_count() == fixpm.bit_count())


def test_fix_pm_subgroup_sampled_16():
    rng = random.Random(2)
    for spec in ("C16", "Q16", "D16", "C2xC2xC4"):
        g = parse_spec(spec)
        for _ in range(10_000):
            a = rng.randrange(g.full_mask() + 1)
            fix, fixm, fixpm = fix_operators(g, a)
            assert is_subgroup_mask(g, fixpm)
            assert (fixm != 0) == (2 * fix.bit_count() == fixpm.bit_count())


def test_fix_minus_conjugation_exhaustive():
    for spec in CATALOG_8:
        g = parse_spec(spec)
        for a in range(g.full_mask() + 1):
            fixm = fix_operators(g, a)[1]
            for x in range(g.order):
                shifted = fix_operators(g, g.shift_mask(x, a))[1]
                expected = 0
                for z in mask_elements(fixm):
                    expected |= 1 << g.conj(x, z)
                assert shifted == expected, (spec, a, x)


# -- 2-cogroups --------------------------------------------------------------------------------


def test_cogroups_c4():
    g = make_cyclic(4)
    masks = {k.members for k in enumerate_2cogroups(g)}
    assert masks == {0b0100, 0b1010}
    assert all(k.maximal for k in maximal_2cogroups(g))
    assert {k.members for k in maximal_2cogroups(g)} == masks


def test_cogroups_q8():
    g = make_generalized_quaternion(8)
    masks = {k.members for k in enumerate_2cogroups(g)}
    minus_one = 1 << 2  # y^2 is the unique involution
    assert minus_one in masks
    full = g.full_mask()
    # complements of the three cyclic order-4 subgroups
    subs4 = [s for s in all_subgroups(g) if s.size == 4]
    for s in subs4:
        assert (s.mask ^ full) in masks
    maximal = {k.members for k in maximal_2cogroups(g)}
    assert maximal == {minus_one} | {s.mask ^ full for s in subs4}
    assert len(maximal) == 4


def test_cogroups_odd_group_empty():
    assert enumerate_2cogroups(make_cyclic(5)) == []
    assert maximal_2cogroups(make_cyclic(9)) == []


def test_cogroup_invariants():
    for spec in CATALOG_16:
        g = parse_spec(spec)
        for k in enumerate_2cogroups(g):
            assert k.members & k.kk == 0
            assert k.members | k.kk == k.kpm
            assert is_subgroup_mask(g, k.kk) and is_subgroup_mask(g, k.kpm)
            assert 2 * k.kk.bit_count() == k.kpm.bit_count()
            for x in mask_elements(k.members):
                shifted = 0
                for z in mask_elements(k.members):
                    shifted |= 1 << g.table[x][z]
                assert shifted == k.kk  # xK = KK
            # KK normal in Stab(K)
            for x in mask_elements(k.stab):
                conj = 0
                for z in mask_elements(k.kk):
                    conj |= 1 << g.conj(x, z)
                assert conj == k.kk


def test_maximal_cogroups_a4():
    g = make_alternating4()
    maximal = maximal_2cogroups(g)
    assert len(maximal) == 3
    assert all(k.size == 2 for k in maximal)
    klein = max(s.mask for s in all_subgroups(g) if s.size == 4 and s.normal)
    for k in maximal:
        assert k.members & klein == k.members


def test_orbits_abelian_singletons():
    for spec in ("C8", "C2xC4", "C2xC2xC2"):
        g = parse_spec(spec)
        for orbit in cogroup_orbits(g):
            assert len(orbit.members) == 1


def test_orbits_a4_single_orbit_of_three():
    orbits = cogroup_orbits(make_alternating4())
    assert len(orbits) == 1 and len(orbits[0].members) == 3


def test_orbits_d8():
    # conjugation scan: one normal orbit per index-2 subgroup complement
    # (three of those) plus two two-element orbits at the bottom level
    orbits = cogroup_orbits(parse_spec("D8"))
    sizes = sorted(len(o.members) for o in orbits)
    assert sizes == [1, 1, 1, 2, 2]
    assert all(o.characteristic_type == ("C", 1) for o in orbits)


def test_selector_smallest_masks():
    for spec in CATALOG_16:
        g = parse_spec(spec)
        for orbit, rep in zip(cogroup_orbits(g), canonical_selector(g)):
            assert rep.members == min(k.members for k in orbit.members)


# -- characteristic groups ----------------------------------------------------------------------


def test_characteristic_group_q8_bottom():
    g = make_generalized_quaternion(8)
    k = next(k for k in maximal_2cogroups(g) if k.size == 1)
    h, tag = characteristic_group(k)
    assert tag == ("Q", 3) and group_isomorphic(h, g)


def test_characteristic_group_a4():
    g = make_alternating4()
    for k in maximal_2cogroups(g):
        h, tag = characteristic_group(k)
        assert tag == ("C", 1) and h.order == 2


def test_characteristic_group_c4():
    g = make_cyclic(4)
    k = next(k for k in maximal_2cogroups(g) if k.members == 0b0100)
    h, tag = characteristic_group(k)
    assert k.stab == g.full_mask() and k.kk == 1
    assert tag == ("C", 2) and group_isomorphic(h, g)


def test_classification_rejects_bad_shapes():
    with pytest.raises(ClassificationError):
        classify_unique_involution_2group(make_cyclic(6))
    with pytest.raises(ClassificationError):
        classify_unique_involution_2group(parse_spec("C2xC2"))
    with pytest.raises(ClassificationError):
        classify_unique_involution_2group(parse_spec("D8"))


def test_classification_catalog_16():
    for spec in CATALOG_16:
        g = parse_spec(spec)
        for k in maximal_2cogroups(g):
            h, tag = characteristic_group(k)
            assert h.order == 1 << tag[1]
            involutions = sum(1 for o in h.element_orders if o == 2)
            assert involutions == 1
            assert tag[0] == "C" or tag[1] >= 3


def test_characteristic_group_size_divides_index():
    for spec in CATALOG_16:
        g = parse_spec(spec)
        for k in maximal_2cogroups(g):
            h, _ = characteristic_group(k)
            assert k.index % h.order == 0
            if k.stab == g.full_mask():  # normal cogroup
                assert h.order == k.index


# -- the twin-set act --------------------------------------------------------------------------


def test_twin_sets_q8_bottom():
    g = make_generalized_quaternion(8)
    k = next(k for k in maximal_2cogroups(g) if k.size == 1)
    tk = twin_sets_for(k)
    assert len(tk.twin_masks) == 16 and tk.orbit_count == 2
    assert all(len(o) == 8 for o in tk.orbits)


def test_twin_sets_a4():
    g = make_alternating4()
    for k in maximal_2cogroups(g):
        tk = twin_sets_for(k)
        assert len(tk.twin_masks) == 8 and tk.orbit_count == 4
        assert all(len(o) == 2 for o in tk.orbits)


def test_twin_sets_free_act_catalog():
    for spec in CATALOG_8:
        g = parse_spec(spec)
        for k in maximal_2cogroups(g):
            tk = twin_sets_for(k)
            h_order = k.stab.bit_count() // k.kk.bit_count()
            assert len(tk.twin_masks) == 1 << k.kpm_index()
            assert all(len(o) == h_order for o in tk.orbits)


def test_twin_sets_rejects_non_maximal():
    g = make_cyclic(6)
    small = next(k for k in enumerate_2cogroups(g) if not k.maximal)
    assert small.members == 0b001000  # {3} sits inside the odd coset
    with pytest.raises(ValueError):
        twin_sets_for(small)


def test_selector_families_pairwise_disjoint():
    for spec in CATALOG_8:
        g = parse_spec(spec)
        families = [frozenset(twin_sets_for(k).twin_masks) for k in canonical_selector(g)]
        for i, a in enumerate(families):
            for b in families[i + 1 :]:
                assert a != b and not (a & b)


# -- q-counts ----------------------------------------------------------------------------------


def test_q_counts_c2xc4():
    assert q_counts(parse_spec("C2xC4")) == {("C", 1): 3, ("C", 2): 2}


def test_q_counts_q8():
    assert q_counts(parse_spec("Q8")) == {("C", 1): 3, ("Q", 3): 1}


def test_q_counts_trivial():
    assert q_counts(make_cyclic(1)) == {}
    assert q_counts(make_cyclic(9)) == {}


def test_tag_rendering():
    assert tag_str(("C", 1)) == "C2" and tag_str(("Q", 4)) == "Q16"


# -- realized cogroups --------------------------------------------------------------------------


def test_klein_singletons_unrealized():
    g = parse_spec("C2xC2")
    status = realized_cogroups(g)
    for mask, realized in status.items():
        if mask.bit_count() == 1:
            assert not realized
        else:
            assert realized


# -- twinic check -------------------------------------------------------------------------------


def test_twinic_abelian_and_small():
    for spec in ("C2", "C6", "C2xC4", "C16"):
        res = is_trivially_twinic(parse_spec(spec))
        assert res.trivial and res.witness is None


def test_twinic_nonabelian():
    for spec in ("A4", "Q8", "D8", "Q16", "D16"):
        assert is_trivially_twinic(parse_spec(spec)).trivial
