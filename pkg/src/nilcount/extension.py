"""Group extensions, fiber products, and embedding-problem verification.

Constructions with no natural permutation action (fiber products, semidirect
products, direct products with a cyclic factor) are built on explicit element
tuples and realized as permutation groups through the regular action, keeping
a map from tuples to permutations so kernels and quotient maps stay explicit.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping

from .errors import (CapExceeded, NotAction, PropertyViolated,
                     QuotientMismatch, VerificationFailed)
from .permcore import (PermGroup, Permutation, abelianization_rank, center,
                       commutator_subgroup, conjugacy_classes, is_normal,
                       is_prime, mulclose, quotient, quotient_with_map,
                       small_generating_set)

ISO_CAP = 512


def regular_permutation_group(items: list, mul: Callable
                              ) -> tuple[PermGroup, dict[Hashable, Permutation]]:
    """Realize an explicitly listed group through left translation.

    `items` must be closed under `mul`; the returned map sends each item to
    the permutation of the (sorted) item list it induces.
    """
    items = sorted(items)
    index = {x: i for i, x in enumerate(items)}
    to_perm: dict[Hashable, Permutation] = {}
    for x in items:
        p = object.__new__(Permutation)
        p.images = tuple(index[mul(x, y)] for y in items)
        to_perm[x] = p
    group = PermGroup.from_elements(to_perm.values())
    if group.order != len(items):
        raise PropertyViolated("left translation action is not regular")
    return group, to_perm


@dataclass(frozen=True)
class ExtensionData:
    """An extension 1 -> A -> G -> H -> 1 with the quotient map explicit."""

    group: PermGroup
    kernel: frozenset[Permutation]
    quotient: PermGroup
    kappa: Mapping[Permutation, Permutation]
    central: bool

    @classmethod
    def from_kernel(cls, G: PermGroup, kernel) -> "ExtensionData":
        kernel = frozenset(kernel)
        H, kappa = quotient_with_map(G, kernel)
        return cls(G, kernel, H, kappa, kernel <= center(G))

    @property
    def kernel_order(self) -> int:
        return len(self.kernel)


@dataclass(frozen=True)
class FiberProduct:
    """Pairs with matching images in H, with a regular permutation realization."""

    pairs: tuple[tuple[Permutation, Permutation], ...]
    group: PermGroup
    to_perm: Mapping[tuple[Permutation, Permutation], Permutation]


@dataclass(frozen=True)
class SemidirectProduct:
    pairs: tuple[tuple[Permutation, Permutation], ...]
    group: PermGroup
    to_perm: Mapping[tuple[Permutation, Permutation], Permutation]


def _same_quotient(H1: PermGroup, H2: PermGroup) -> bool:
    return H1.degree == H2.degree and H1._elemset == H2._elemset


def fiber_product_maps(G1: PermGroup, kappa1: Mapping, G2: PermGroup,
                       kappa2: Mapping, H: PermGroup) -> FiberProduct:
    pairs = [(g1, g2) for g1 in G1.elements for g2 in G2.elements
             if kappa1[g1] == kappa2[g2]]
    if len(pairs) * H.order != G1.order * G2.order:
        raise PropertyViolated("fiber product order is off; maps not onto H?")

    def mul(p, q):
        return (p[0] * q[0], p[1] * q[1])

    group, to_perm = regular_permutation_group(pairs, mul)
    return FiberProduct(tuple(sorted(pairs)), group, to_perm)


def fiber_product(E1: ExtensionData, E2: ExtensionData) -> FiberProduct:
    """Subdirect product over the shared quotient; order |G1||G2|/|H|."""
    if not _same_quotient(E1.quotient, E2.quotient):
        raise QuotientMismatch("extensions do not share the same quotient group")
    return fiber_product_maps(E1.group, E1.kappa, E2.group, E2.kappa, E1.quotient)


def conjugation_action(E: ExtensionData) -> dict[Permutation, dict[Permutation, Permutation]]:
    """The kernel as an H-module: h acts by conjugation with any preimage.

    Well-definedness over the choice of preimage is checked (it holds exactly
    because the kernel is abelian).
    """
    fibers: dict[Permutation, list[Permutation]] = {}
    for g in E.group.elements:
        fibers.setdefault(E.kappa[g], []).append(g)
    psi: dict[Permutation, dict[Permutation, Permutation]] = {}
    for h, fiber in fibers.items():
        g0 = min(fiber)
        action = {a: g0 * a * g0.inverse() for a in E.kernel}
        for g in fiber:
            for a in E.kernel:
                if g * a * g.inverse() != action[a]:
                    raise NotAction(
                        "conjugation depends on the preimage; kernel not abelian?")
        psi[h] = action
    return psi


def semidirect(A: PermGroup, H: PermGroup,
               psi: Mapping[Permutation, Mapping[Permutation, Permutation]]
               ) -> SemidirectProduct:
    """Semidirect product A x| H with multiplication
    (a1, h1)(a2, h2) = (a1 * psi[h1](a2), h1 * h2).

    `psi` must send each h to an automorphism of A, multiplicatively in h
    (NotAction otherwise).  A must be abelian.
    """
    for a in A.generators:
        for b in A.generators:
            if a * b != b * a:
                raise NotAction("kernel of a semidirect product must be abelian here")
    aset = set(A.elements)
    for h in H.elements:
        if h not in psi:
            raise NotAction(f"no action for {h!r}")
        act = psi[h]
        if set(act.keys()) != aset or set(act.values()) != aset:
            raise NotAction("psi[h] is not a bijection of A")
        for a in A.elements:
            for b in A.elements:
                if act[a * b] != act[a] * act[b]:
                    raise NotAction("psi[h] is not an automorphism")
    for h1 in H.elements:
        for h2 in H.elements:
            comp = psi[h1 * h2]
            for a in A.elements:
                if comp[a] != psi[h1][psi[h2][a]]:
                    raise NotAction("psi is not multiplicative in h")

    pairs = [(a, h) for a in A.elements for h in H.elements]

    def mul(p, q):
        return (p[0] * psi[p[1]][q[0]], p[1] * q[1])

    group, to_perm = regular_permutation_group(pairs, mul)
    return SemidirectProduct(tuple(sorted(pairs)), group, to_perm)


def _element_invariants(G: PermGroup) -> dict[Permutation, tuple[int, int]]:
    out: dict[Permutation, tuple[int, int]] = {}
    for c in conjugacy_classes(G):
        for g in c.members:
            out[g] = (c.element_order, c.size)
    return out


def fingerprint(G: PermGroup) -> tuple:
    """Cheap isomorphism invariants: order, order profile, center size,
    class-size profile, abelianization order."""
    orders = tuple(sorted(Counter(g.order() for g in G.elements).items()))
    classes = tuple(sorted(c.size for c in conjugacy_classes(G)))
    ab_order = G.order // len(commutator_subgroup(G))
    return (G.order, orders, len(center(G)), classes, ab_order)


def find_isomorphism(G1: PermGroup, G2: PermGroup,
                     cap: int = ISO_CAP) -> dict[Permutation, Permutation] | None:
    """Explicit isomorphism G1 -> G2, or None.

    Search: invariant fingerprints first, then backtracking over images of a
    greedy generating sequence; the first witness in canonical order is
    returned, so the result is deterministic.
    """
    if G1.order != G2.order:
        return None
    if G1.order > cap:
        raise CapExceeded(f"isomorphism search capped at order {cap}")
    if fingerprint(G1) != fingerprint(G2):
        return None
    gens = small_generating_set(G1.elements)
    inv1 = _element_invariants(G1)
    inv2 = _element_invariants(G2)
    buckets: dict[tuple[int, int], list[Permutation]] = {}
    for g in G2.elements:
        buckets.setdefault(inv2[g], []).append(g)
    prefix_sizes = []
    for i in range(len(gens)):
        prefix_sizes.append(len(mulclose(gens[:i + 1])))

    def build(prefix: list[Permutation], images: list[Permutation]
              ) -> dict[Permutation, Permutation] | None:
        phi = {G1.identity: G2.identity}
        frontier = [G1.identity]
        while frontier:
            new = []
            for x in frontier:
                fx = phi[x]
                for a, b in zip(prefix, images):
                    xa, fxb = x * a, fx * b
                    known = phi.get(xa)
                    if known is None:
                        phi[xa] = fxb
                        new.append(xa)
                    elif known != fxb:
                        return None
            frontier = new
        if len(set(phi.values())) != len(phi):
            return None
        return phi

    def dfs(i: int) -> dict[Permutation, Permutation] | None:
        if i == len(gens):
            return build(gens, chosen)
        for b in buckets.get(inv1[gens[i]], ()):
            chosen.append(b)
            phi = build(gens[:i + 1], chosen)
            if phi is not None and len(phi) == prefix_sizes[i]:
                result = dfs(i + 1)
                if result is not None:
                    return result
            chosen.pop()
        return None

    chosen: list[Permutation] = []
    phi = dfs(0)
    if phi is None:
        return None
    if len(phi) != G1.order:
        raise PropertyViolated("witness map does not cover the group")
    return phi


def is_isomorphic(G1: PermGroup, G2: PermGroup, cap: int = ISO_CAP) -> bool:
    return find_isomorphism(G1, G2, cap=cap) is not None


def verify_semidirect_decomposition(E: ExtensionData) -> bool:
    """Check G x_H G = U x| G through the explicit map (u, g) -> (g, ug).

    Works for any kernel U (not necessarily abelian); conjugation defines the
    twisting action.  The map is checked to be a bijective homomorphism
    pointwise.
    """
    G = E.group
    items = [(u, g) for u in sorted(E.kernel) for g in G.elements]

    def mul_sd(p, q):
        # (u1, g1)(u2, g2) = (u1 * g1 u2 g1^-1, g1 g2)
        return (p[0] * (p[1] * q[0] * p[1].inverse()), p[1] * q[1])

    fp = fiber_product(E, E)
    pair_set = set(fp.pairs)

    def phi(p):
        return (p[1], p[0] * p[1])

    images = {phi(p) for p in items}
    if images != pair_set or len(images) != len(items):
        raise VerificationFailed("(u,g) -> (g,ug) is not a bijection onto the pairs")
    for p in items:
        for q in items:
            r = mul_sd(p, q)
            lhs = phi(r)
            rhs = (phi(p)[0] * phi(q)[0], phi(p)[1] * phi(q)[1])
            if lhs != rhs:
                raise VerificationFailed(
                    f"homomorphism law fails at {p!r} * {q!r}")
    return True


def verify_pullback_identity(E: ExtensionData) -> bool:
    """For an abelian-kernel extension, verify both structure identities:
    G x_H G = G x_H (A x| H), and (G x_H G) / diagonal(A) = A x| H."""
    psi = conjugation_action(E)
    A_group = PermGroup.from_elements(E.kernel)
    sd = semidirect(A_group, E.quotient, psi)
    kappa_sd = {sd.to_perm[(a, h)]: h for (a, h) in sd.pairs}

    fp_gg = fiber_product(E, E)
    fp_gs = fiber_product_maps(E.group, E.kappa, sd.group, kappa_sd, E.quotient)
    if not is_isomorphic(fp_gg.group, fp_gs.group):
        raise VerificationFailed("G x_H G and G x_H (A x| H) are not isomorphic")

    diagonal = {fp_gg.to_perm[(a, a)] for a in E.kernel}
    quot = quotient(fp_gg.group, diagonal)
    if not is_isomorphic(quot, sd.group):
        raise VerificationFailed("diagonal quotient is not A x| H")
    return True


@dataclass(frozen=True)
class DoubleQuotientReport:
    subgroup_count: int
    pattern: tuple[str, ...]
    copies_of_group: int
    copies_of_split: int
    passed: bool


def _cyclic_product(ell: int, K: PermGroup
                    ) -> tuple[PermGroup, dict[tuple[int, Permutation], Permutation]]:
    items = [(i, g) for i in range(ell) for g in K.elements]

    def mul(p, q):
        return ((p[0] + q[0]) % ell, p[1] * q[1])

    return regular_permutation_group(items, mul)


def central_double_quotients(E: ExtensionData) -> DoubleQuotientReport:
    """For a central prime-kernel extension, form C_ell x G, locate the
    central C_ell x C_ell spanned by the two kernel copies, and check that of
    its ell+1 order-ell subgroups, ell give quotients isomorphic to G and the
    remaining one gives C_ell x H."""
    ell = len(E.kernel)
    if not E.central or not is_prime(ell):
        raise ValueError("needs a central extension with kernel of prime order")
    G = E.group
    big, to_perm = _cyclic_product(ell, G)

    d_set = {to_perm[(i, a)] for i in range(ell) for a in E.kernel}
    zed = center(big)
    if not d_set <= zed:
        raise VerificationFailed("kernel square is not central in C_ell x G")
    if len(d_set) != ell * ell or any(p.order() not in (1, ell) for p in d_set):
        raise VerificationFailed("kernel square is not elementary abelian of rank 2")

    subgroups: set[frozenset[Permutation]] = set()
    for x in d_set:
        if x.order() == ell:
            subgroups.add(frozenset(x ** j for j in range(ell)))
    if len(subgroups) != ell + 1:
        raise VerificationFailed(
            f"expected {ell + 1} order-{ell} subgroups, found {len(subgroups)}")

    split, _ = _cyclic_product(ell, E.quotient)
    group_is_split = is_isomorphic(G, split)
    pattern = []
    for U in sorted(subgroups, key=lambda s: tuple(sorted(p.images for p in s))):
        if not is_normal(big, U):
            raise VerificationFailed("order-ell subgroup is not normal")
        Q = quotient(big, U)
        if is_isomorphic(Q, G):
            pattern.append("G")
        elif is_isomorphic(Q, split):
            pattern.append("CxH")
        else:
            raise VerificationFailed("quotient is neither G nor C_ell x H")
    n_g = pattern.count("G")
    n_s = pattern.count("CxH")
    ok = (n_g == ell + 1) if group_is_split else (n_g == ell and n_s == 1)
    if not ok:
        raise VerificationFailed(f"quotient pattern {pattern} is wrong")
    return DoubleQuotientReport(len(subgroups), tuple(pattern), n_g, n_s, True)


@dataclass(frozen=True)
class SolutionClassCounts:
    rank: int
    trivial_class_size: int
    nontrivial_class_size: int
    trivial_multiplicity: int
    nontrivial_multiplicity: int
    index_subgroup_count: int


def solution_class_counts(G: PermGroup, ell: int) -> SolutionClassCounts:
    """Sizes and fiber multiplicities of the solution-parameterizing classes.

    With r the ell-rank of the maximal abelian quotient, the trivial class
    has (ell^r - 1)/(ell - 1) + 1 members and one preimage; every other class
    has ell^r members and ell - 1 preimages.  The count of index-ell
    subgroups above the commutator-and-ell-th-powers subgroup is re-derived
    by explicit enumeration of functional kernels and must agree.
    """
    r = abelianization_rank(G, ell)
    hyperplanes = (ell ** r - 1) // (ell - 1)

    seeds = set(commutator_subgroup(G)) | {g ** ell for g in G.elements}
    K = mulclose(seeds)
    Q = quotient(G, K)
    if Q.order != ell ** r:
        raise PropertyViolated("mod-ell abelianization has the wrong order")

    basis = [g for g in small_generating_set(Q.elements) if not g.is_identity()]
    if len(basis) != r:
        raise PropertyViolated("elementary abelian quotient has the wrong rank")
    coords: dict[Permutation, tuple[int, ...]] = {}

    def fill(i: int, elem: Permutation, vec: tuple[int, ...]):
        if i == r:
            coords[elem] = vec
            return
        cur = elem
        for c in range(ell):
            fill(i + 1, cur, vec + (c,))
            cur = cur * basis[i]

    fill(0, Q.identity, ())
    if len(coords) != ell ** r:
        raise PropertyViolated("basis of the mod-ell quotient is not independent")
    kernels: set[frozenset[Permutation]] = set()
    for f in range(1, ell ** r):
        fv = []
        x = f
        for _ in range(r):
            fv.append(x % ell)
            x //= ell
        kernels.add(frozenset(e for e, v in coords.items()
                              if sum(fi * vi for fi, vi in zip(fv, v)) % ell == 0))
    if len(kernels) != hyperplanes:
        raise VerificationFailed(
            f"index-{ell} subgroup count {len(kernels)} != {hyperplanes}")

    return SolutionClassCounts(
        rank=r,
        trivial_class_size=hyperplanes + 1,
        nontrivial_class_size=ell ** r,
        trivial_multiplicity=1,
        nontrivial_multiplicity=ell - 1,
        index_subgroup_count=len(kernels),
    )
