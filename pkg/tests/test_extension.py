import pytest

from nilcount.catalog import (abelian, cyclic, dihedral4_regular,
                              dihedral4_s4, generalized_quaternion, resolve)
from nilcount.errors import CapExceeded, NotAction, QuotientMismatch
from nilcount.extension import (ExtensionData, central_double_quotients,
                                conjugation_action, fiber_product,
                                find_isomorphism, fingerprint, is_isomorphic,
                                regular_permutation_group, semidirect,
                                solution_class_counts,
                                verify_pullback_identity,
                                verify_semidirect_decomposition)
from nilcount.permcore import PermGroup, center


def center_extension(G):
    z = next(g for g in sorted(center(G)) if not g.is_identity())
    kernel = frozenset(z ** j for j in range(z.order()))
    return ExtensionData.from_kernel(G, kernel)


def s3_extension():
    s3 = resolve("S3").group()
    c3 = frozenset(g for g in s3.elements if g.order() in (1, 3))
    return ExtensionData.from_kernel(s3, c3)


def test_extension_from_kernel():
    q8 = generalized_quaternion(4)
    ext = center_extension(q8)
    assert ext.central
    assert ext.kernel_order == 2
    assert ext.quotient.order == 4
    assert all(g.order() in (1, 2) for g in ext.quotient.elements)  # V4
    ext3 = s3_extension()
    assert not ext3.central
    assert ext3.quotient.order == 2


def test_fiber_product_diagonal_is_group_itself():
    G = generalized_quaternion(4)
    ext = ExtensionData.from_kernel(G, {G.identity})  # kappa = identity map
    fp = fiber_product(ext, ext)
    assert fp.group.order == G.order
    assert is_isomorphic(fp.group, G)


def test_fiber_product_orders():
    q8 = generalized_quaternion(4)
    fp = fiber_product(center_extension(q8), center_extension(q8))
    assert fp.group.order == 8 * 8 // 4 == 16
    ext3 = s3_extension()
    fp3 = fiber_product(ext3, ext3)
    assert fp3.group.order == 6 * 6 // 2 == 18
    assert len(fp3.pairs) == 18


def test_fiber_product_quotient_mismatch():
    q8 = generalized_quaternion(4)
    with pytest.raises(QuotientMismatch):
        fiber_product(center_extension(q8), s3_extension())


def test_semidirect_trivial_action_is_direct_product():
    A, H = cyclic(3), cyclic(2)
    psi = {h: {a: a for a in A.elements} for h in H.elements}
    sd = semidirect(A, H, psi)
    assert sd.group.order == 6
    assert sorted(g.order() for g in sd.group.elements) == [1, 2, 3, 3, 6, 6]


def test_semidirect_inversion_gives_s3():
    A, H = cyclic(3), cyclic(2)
    inv = {a: a.inverse() for a in A.elements}
    psi = {H.identity: {a: a for a in A.elements},
           H.elements[1]: inv}
    sd = semidirect(A, H, psi)
    # order profile: one identity, three involutions, two of order 3
    assert sorted(g.order() for g in sd.group.elements) == [1, 2, 2, 2, 3, 3]
    assert is_isomorphic(sd.group, resolve("S3").group())


def test_semidirect_rejects_non_action():
    A, H = cyclic(3), cyclic(4)
    inv = {a: a.inverse() for a in A.elements}
    ident = {a: a for a in A.elements}
    h = H.elements
    # h1 has order 4 but psi collapses at h1^2: psi(h1)^2 = id != psi(h1^2)
    bad = {h[0]: ident, h[1]: inv, h[2]: inv, h[3]: ident}
    with pytest.raises(NotAction):
        semidirect(A, H, bad)
    not_bijective = {x: {a: A.identity for a in A.elements} for x in h}
    with pytest.raises(NotAction):
        semidirect(A, H, not_bijective)


def test_conjugation_action_central_is_trivial():
    q8 = generalized_quaternion(4)
    psi = conjugation_action(center_extension(q8))
    for h, act in psi.items():
        assert all(act[a] == a for a in act)


def test_conjugation_action_s3_inverts():
    ext = s3_extension()
    psi = conjugation_action(ext)
    nontrivial = next(h for h in psi if not h.is_identity())
    assert any(psi[nontrivial][a] == a.inverse() and not a.is_identity()
               for a in ext.kernel)


def test_lemma_semidirect_central_kernel_gives_direct_product():
    # central kernel: conjugation is trivial, so A x| H = A x H
    d4 = dihedral4_regular()
    ext = center_extension(d4)
    psi = conjugation_action(ext)
    A = PermGroup.from_elements(ext.kernel)
    sd = semidirect(A, ext.quotient, psi)
    assert sd.group.order == 8
    assert all(g.order() in (1, 2) for g in sd.group.elements)  # C2 x V4


def test_is_isomorphic_basics():
    q8 = generalized_quaternion(4)
    d4 = dihedral4_regular()
    assert is_isomorphic(q8, q8)
    assert not is_isomorphic(q8, d4)  # one vs five involutions
    assert not is_isomorphic(abelian(4, 2), abelian(2, 2, 2))  # exponent
    assert is_isomorphic(dihedral4_s4(), d4)  # same abstract group
    assert is_isomorphic(abelian(2, 3), cyclic(6))


def test_find_isomorphism_witness_is_homomorphism():
    G1 = abelian(2, 3)
    G2 = cyclic(6)
    phi = find_isomorphism(G1, G2)
    assert phi is not None
    for a in G1.elements:
        for b in G1.elements:
            assert phi[a * b] == phi[a] * phi[b]
    assert len(set(phi.values())) == G1.order


def test_is_isomorphic_symmetric_and_cap():
    g1, g2 = resolve("Heis27").group(), abelian(3, 3, 3)
    assert is_isomorphic(g1, g2) == is_isomorphic(g2, g1) == False
    with pytest.raises(CapExceeded):
        is_isomorphic(g1, g2, cap=8)


def test_fingerprint_is_isomorphism_invariant():
    assert fingerprint(dihedral4_s4()) == fingerprint(dihedral4_regular())
    assert fingerprint(generalized_quaternion(4)) != fingerprint(dihedral4_regular())


def test_semidirect_decomposition_for_nonabelian_kernel():
    q8c3 = resolve("Q8xC3_S24").group()
    from nilcount.nilpotent import sylow_subgroup_sets
    ext = ExtensionData.from_kernel(q8c3, sylow_subgroup_sets(q8c3)[2])
    assert verify_semidirect_decomposition(ext)


def test_pullback_identity_cases():
    assert verify_pullback_identity(center_extension(generalized_quaternion(4)))
    assert verify_pullback_identity(center_extension(dihedral4_regular()))
    assert verify_pullback_identity(s3_extension())  # non-central abelian kernel


def test_pullback_identity_d4_over_c2_with_c4_kernel():
    d4 = dihedral4_regular()
    c4 = next(frozenset(g ** j for j in range(4))
              for g in d4.elements if g.order() == 4)
    ext = ExtensionData.from_kernel(d4, c4)
    assert not ext.central
    assert verify_pullback_identity(ext)


def test_central_double_quotients_q8_and_d4():
    rep = central_double_quotients(center_extension(generalized_quaternion(4)))
    assert rep.subgroup_count == 3
    assert rep.copies_of_group == 2 and rep.copies_of_split == 1
    rep = central_double_quotients(center_extension(dihedral4_regular()))
    assert rep.copies_of_group == 2 and rep.copies_of_split == 1


def test_central_double_quotients_c9_over_c3():
    G = cyclic(9)
    kernel = frozenset(g for g in G.elements if g.order() in (1, 3))
    rep = central_double_quotients(ExtensionData.from_kernel(G, kernel))
    assert rep.subgroup_count == 4
    assert rep.copies_of_group == 3 and rep.copies_of_split == 1


def test_central_double_quotients_requires_central_prime():
    with pytest.raises(ValueError):
        central_double_quotients(s3_extension())
    G = cyclic(8)
    kernel = frozenset(g for g in G.elements if g.order() in (1, 2, 4))
    with pytest.raises(ValueError):
        central_double_quotients(ExtensionData.from_kernel(G, kernel))


def test_solution_class_counts():
    q8 = generalized_quaternion(4)
    counts = solution_class_counts(q8, 2)
    assert counts.rank == 2
    assert counts.trivial_class_size == 4
    assert counts.nontrivial_class_size == 4
    assert (counts.trivial_multiplicity, counts.nontrivial_multiplicity) == (1, 1)
    assert counts.index_subgroup_count == 3

    c2 = cyclic(2)
    counts = solution_class_counts(c2, 2)
    assert counts.trivial_class_size == 2
    assert counts.nontrivial_class_size == 2

    g33 = abelian(3, 3)
    counts = solution_class_counts(g33, 3)
    assert counts.rank == 2
    assert counts.trivial_class_size == 5
    assert counts.index_subgroup_count == 4
    assert counts.nontrivial_multiplicity == 2


def test_regular_realization_faithful():
    items = list(range(5))
    group, to_perm = regular_permutation_group(items, lambda a, b: (a + b) % 5)
    assert group.order == 5
    assert to_perm[0].is_identity()
