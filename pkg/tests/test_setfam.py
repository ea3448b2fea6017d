"""Maximal linked systems, the semigroup product, the function representation."""

import io
import random

import pytest

from superext.cli import parse_spec
from superext.groups import make_cyclic
from superext.setfam import (
    BudgetExceeded,
    FamilyOfSets,
    MlsSignature,
    circ,
    enumerate_mls,
    family_to_signature,
    is_linked,
    is_maximal_linked,
    phi,
    phi_inverse,
    phi_map,
    principal_ultrafilter,
    read_mls_stream,
    shift,
    write_mls_stream,
    EquivarianceError,
)

SMALL = ["C1", "C2", "C3", "C4", "C2xC2"]


def all_signature_candidates(g):
    """Independent oracle: filter every self-dual choice vector for the
    maximal-linked property on the explicit family (orders <= 4 only)."""
    half = 1 << (g.order - 1)
    for bits in range(1 << half):
        sig = MlsSignature(g, bits)
        if is_maximal_linked(sig.to_family()):
            yield bits


def majority_c3():
    g = make_cyclic(3)
    members = frozenset(m for m in range(8) if bin(m).count("1") >= 2)
    return family_to_signature(FamilyOfSets(g, members))


# -- shifts ---------------------------------------------------------------------------


def test_shift_by_identity():
    g = make_cyclic(4)
    for a in range(16):
        assert shift(g, 0, a) == a


def test_shift_modular():
    g = make_cyclic(4)
    assert shift(g, 2, 0b0011) == 0b1100


def test_shift_full_set():
    g = parse_spec("D6")
    for x in range(6):
        assert shift(g, x, g.full_mask()) == g.full_mask()


# -- linkedness ------------------------------------------------------------------------


def test_majority_family_is_maximal_linked():
    g = make_cyclic(3)
    members = frozenset(m for m in range(8) if bin(m).count("1") >= 2)
    fam = FamilyOfSets(g, members)
    assert is_linked(fam) and is_maximal_linked(fam)


def test_complement_pair_not_linked():
    g = make_cyclic(4)
    assert not is_linked(FamilyOfSets(g, frozenset({0b0011, 0b1100})))


def test_principal_ultrafilter_is_maximal_linked():
    g = make_cyclic(4)
    for x in range(4):
        assert is_maximal_linked(principal_ultrafilter(g, x).to_family())


# -- enumeration ------------------------------------------------------------------------


def test_enumeration_matches_exhaustive_oracle():
    for spec in SMALL:
        g = parse_spec(spec)
        expected = sorted(all_signature_candidates(g))
        got = [s.bits for s in enumerate_mls(g)]
        assert got == expected, spec


def test_counts_frozen():
    counts = [len(enumerate_mls(make_cyclic(n))) for n in range(1, 6)]
    assert counts == [1, 2, 4, 12, 81]


def test_two_orders_agree_through_order_five():
    for n in range(1, 6):
        g = make_cyclic(n)
        a = [s.bits for s in enumerate_mls(g, order="skew_first")]
        b = [s.bits for s in enumerate_mls(g, order="balanced_first")]
        assert a == b


def test_order_one_single_system():
    g = make_cyclic(1)
    (sig,) = enumerate_mls(g)
    assert sig.contains(1) and not sig.contains(0)


def test_enumeration_budget():
    g = make_cyclic(5)
    with pytest.raises(BudgetExceeded) as exc:
        enumerate_mls(g, budget=10)
    assert exc.value.count_so_far == 10


def test_enumeration_refuses_large_orders():
    with pytest.raises(ValueError):
        enumerate_mls(parse_spec("C7"))  # needs an explicit budget
    with pytest.raises(ValueError):
        enumerate_mls(parse_spec("C8"), budget=10)


def test_enumeration_order_seven_behind_budget():
    g = make_cyclic(7)
    with pytest.raises(BudgetExceeded) as exc:
        enumerate_mls(g, budget=50)
    assert exc.value.count_so_far == 50


# -- membership -------------------------------------------------------------------------


def test_contains_full_never_empty():
    for spec in SMALL:
        g = parse_spec(spec)
        for sig in enumerate_mls(g):
            assert sig.contains(g.full_mask()) and not sig.contains(0)


def test_principal_membership():
    g = make_cyclic(4)
    for x in range(4):
        sig = principal_ultrafilter(g, x)
        for m in range(16):
            assert sig.contains(m) == bool((m >> x) & 1)


def test_majority_membership():
    sig = majority_c3()
    assert sig.contains(0b011) and not sig.contains(0b100)


def test_self_duality_every_system():
    for spec in SMALL:
        g = parse_spec(spec)
        full = g.full_mask()
        for sig in enumerate_mls(g):
            for a in range(1, full):
                assert sig.contains(a) != sig.contains(a ^ full)


# -- the product -------------------------------------------------------------------------


def test_principal_ultrafilters_multiply_like_the_group():
    for spec in ("C4", "D6", "C2xC2"):
        g = parse_spec(spec)
        for x in range(g.order):
            for y in range(g.order):
                prod = circ(principal_ultrafilter(g, x), principal_ultrafilter(g, y))
                assert prod.bits == principal_ultrafilter(g, g.table[x][y]).bits


def test_majority_is_a_right_zero():
    g = make_cyclic(3)
    maj = majority_c3()
    assert circ(maj, maj).bits == maj.bits
    for sig in enumerate_mls(g):
        assert circ(sig, maj).bits == maj.bits


def test_circ_associative_on_lambda_c4():
    g = make_cyclic(4)
    systems = enumerate_mls(g)
    for a in systems:
        for b in systems:
            ab = circ(a, b)
            for c in systems:
                assert circ(ab, c).bits == circ(a, circ(b, c)).bits


def test_circ_family_path_matches_signature_path():
    g = make_cyclic(4)
    systems = enumerate_mls(g)
    rng = random.Random(7)
    for _ in range(20):
        a, b = rng.choice(systems), rng.choice(systems)
        fam = circ(a.to_family(), b.to_family())
        assert fam.members == circ(a, b).to_family().members


# -- the function representation --------------------------------------------------------------


def test_phi_of_identity_ultrafilter_is_identity():
    g = make_cyclic(4)
    sig = principal_ultrafilter(g, 0)
    for a in range(16):
        assert phi(sig, a) == a


def test_phi_of_majority():
    g = make_cyclic(3)
    maj = majority_c3()
    for a in range(8):
        size = bin(a).count("1")
        if size == 2:
            assert phi(maj, a) == g.full_mask()
        elif size == 1:
            assert phi(maj, a) == 0


def test_phi_equivariance():
    g = make_cyclic(4)
    for sig in enumerate_mls(g):
        for a in range(16):
            fa = phi(sig, a)
            for x in range(4):
                assert phi(sig, shift(g, x, a)) == shift(g, x, fa)


def test_phi_homomorphism_exhaustive_small():
    # phi(a o b, S) = phi(a, phi(b, S)) over every pair and every subset
    for spec in SMALL:
        g = parse_spec(spec)
        systems = enumerate_mls(g)
        masks = range(g.full_mask() + 1)
        for a in systems:
            for b in systems:
                ab = circ(a, b)
                for s in masks:
                    assert phi(ab, s) == phi(a, phi(b, s))


def test_phi_homomorphism_sampled_orders_5_6():
    rng = random.Random(0)
    for n in (5, 6):
        g = make_cyclic(n)
        systems = enumerate_mls(g)
        full = g.full_mask()
        for _ in range(10_000):
            a = rng.choice(systems)
            b = rng.choice(systems)
            s = rng.randrange(full + 1)
            assert phi(circ(a, b), s) == phi(a, phi(b, s))


def test_phi_is_injective_on_lambda():
    for spec in SMALL:
        g = parse_spec(spec)
        maps = {phi_map(s) for s in enumerate_mls(g)}
        assert len(maps) == len(enumerate_mls(g))


def test_maximal_linked_iff_map_monotone_symmetric():
    # every family of subsets, checked against its function representation
    for spec in SMALL:
        g = parse_spec(spec)
        full = g.full_mask()
        n_masks = full + 1
        mls_bits = {s.bits for s in enumerate_mls(g)}
        kept_maps = set()
        for fam_bits in range(1 << n_masks):
            members = frozenset(m for m in range(n_masks) if (fam_bits >> m) & 1)
            fam = FamilyOfSets(g, members)
            vals = tuple(phi(fam, a) for a in range(n_masks))
            monotone = True
            symmetric = all(vals[a ^ full] == vals[a] ^ full for a in range(n_masks))
            if symmetric:
                for a in range(n_masks):
                    b = a
                    while monotone:
                        b = (b + 1) | a
                        if b > full:
                            break
                        if vals[a] & vals[b] != vals[a]:
                            monotone = False
                    if not monotone:
                        break
            ok = symmetric and monotone
            assert ok == is_maximal_linked(fam), (spec, fam_bits)
            if ok:
                kept_maps.add(vals)
        # bijectivity: the monotone symmetric maps are exactly the lambda maps
        lam_maps = {phi_map(MlsSignature(g, b)) for b in mls_bits}
        assert kept_maps == lam_maps, spec


def test_phi_inverse_round_trip():
    g = make_cyclic(4)
    for sig in enumerate_mls(g):
        fam = phi_inverse(phi_map(sig), g)
        assert fam.members == sig.to_family().members


def test_phi_inverse_of_identity_map():
    g = make_cyclic(4)
    fam = phi_inverse(tuple(range(16)), g)
    assert fam.members == principal_ultrafilter(g, 0).to_family().members


def test_phi_inverse_equivariance_gate():
    g = make_cyclic(4)
    # constant at the full set is genuinely equivariant and must be accepted
    fam = phi_inverse(tuple(g.full_mask() for _ in range(16)), g)
    assert fam.members == frozenset(range(16))
    # constant at a proper subset is not equivariant: rejected with a witness
    with pytest.raises(EquivarianceError) as exc:
        phi_inverse(tuple(0b0011 for _ in range(16)), g)
    x, a = exc.value.witness
    assert shift(g, x, 0b0011) != 0b0011


# -- stream format -----------------------------------------------------------------------------


def test_stream_round_trip():
    g = make_cyclic(4)
    sigs = enumerate_mls(g)
    buf = io.StringIO()
    write_mls_stream(buf, g, sigs)
    buf.seek(0)
    n, bits = read_mls_stream(buf)
    assert n == 4 and bits == [s.bits for s in sigs]
    assert buf.getvalue().splitlines()[0] == "n=4 pairs=8"
