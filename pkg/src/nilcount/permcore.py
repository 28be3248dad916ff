"""Exact permutation and small finite-group arithmetic.

Groups are stored by full element enumeration (default cap 20000), which is
ample for catalog-scale verification work and keeps every operation a pure
function over immutable values.  Elements are ordered lexicographically by
image table; that ordering is the tie-breaker used everywhere downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from math import lcm
from typing import Iterable, Sequence

from .errors import (CapExceeded, DegreeMismatch, NotNormal, NotPrime,
                     PropertyViolated)

DEFAULT_CAP = 20_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Permutation:
    """A permutation of {0..n-1} stored as an image table."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection on 0..{len(images) - 1}: {images!r}")
        self.images = images

    @staticmethod
    def identity(degree: int) -> "Permutation":
        p = object.__new__(Permutation)
        p.images = tuple(range(degree))
        return p

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # composition: (self * other)(x) = self(other(x))
        a, b = self.images, other.images
        if len(a) != len(b):
            raise DegreeMismatch(f"degree {len(a)} vs {len(b)}")
        p = object.__new__(Permutation)
        p.images = tuple(a[i] for i in b)
        return p

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        p = object.__new__(Permutation)
        p.images = tuple(inv)
        return p

    def __pow__(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        out = Permutation.identity(self.degree)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def orbits(self) -> list[tuple[int, ...]]:
        """Cycles of the permutation, fixed points included."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.orbits()), reverse=True))

    def order(self) -> int:
        return reduce(lcm, (len(c) for c in self.orbits()), 1)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __le__(self, other: "Permutation") -> bool:
        return self.images <= other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Permutation({cycle_string(self)!r}, degree={self.degree})"


def mulclose(gens: Iterable[Permutation], cap: int | None = None) -> set[Permutation]:
    """Closure of the generators under composition (BFS over new products)."""
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    els: set[Permutation] = {Permutation.identity(gens[0].degree)}
    els.update(gens)
    frontier = list(els)
    while frontier:
        new = []
        for a in gens:
            for b in frontier:
                c = a * b
                if c not in els:
                    els.add(c)
                    new.append(c)
                    if cap is not None and len(els) > cap:
                        raise CapExceeded(f"closure exceeds cap {cap}")
        frontier = new
    return els


def small_generating_set(elements: Iterable[Permutation]) -> list[Permutation]:
    """Greedy generating subset, scanning elements in canonical order."""
    elems = sorted(set(elements))
    if not elems:
        raise ValueError("empty element collection")
    gens: list[Permutation] = []
    have: set[Permutation] = {Permutation.identity(elems[0].degree)}
    for e in elems:
        if e not in have:
            gens.append(e)
            have = mulclose(gens)
    if not gens:  # trivial group
        gens = [elems[0]]
    return gens


class PermGroup:
    """A finite permutation group with its full element list.

    `elements` is sorted lexicographically by image table, so the identity is
    always `elements[0]` and iteration order is canonical.
    """

    __slots__ = ("degree", "generators", "elements", "_elemset", "_transitive")

    def __init__(self, degree: int, generators: Sequence[Permutation],
                 elements: Iterable[Permutation]):
        self.degree = degree
        self.generators = tuple(generators)
        self.elements = tuple(sorted(elements))
        self._elemset = frozenset(self.elements)
        self._transitive: bool | None = None
        if not self.elements or not self.elements[0].is_identity():
            raise ValueError("element list must contain the identity")

    @classmethod
    def generate(cls, gens: Sequence[Permutation], cap: int = DEFAULT_CAP) -> "PermGroup":
        gens = list(gens)
        if not gens:
            raise ValueError("need at least one generator")
        degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatch(f"degree {g.degree} vs {degree}")
        return cls(degree, gens, mulclose(gens, cap=cap))

    @classmethod
    def from_elements(cls, elements: Iterable[Permutation]) -> "PermGroup":
        """Build a group from a set already closed under composition.

        Closure is verified by regenerating from a greedy generating subset.
        """
        elems = sorted(set(elements))
        gens = small_generating_set(elems)
        regen = mulclose(gens, cap=len(elems))
        if len(regen) != len(elems) or not regen.issuperset(elems):
            raise ValueError("element collection is not multiplicatively closed")
        return cls(elems[0].degree, gens, elems)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Permutation:
        return self.elements[0]

    def __contains__(self, p: Permutation) -> bool:
        return p in self._elemset

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def is_transitive(self) -> bool:
        if self._transitive is None:
            orbit = {0}
            frontier = [0]
            while frontier:
                x = frontier.pop()
                for g in self.generators:
                    y = g(x)
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)
            self._transitive = len(orbit) == self.degree
        return self._transitive

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"


@dataclass(frozen=True)
class ConjClass:
    """A conjugacy class: canonical representative plus the member set."""

    representative: Permutation
    members: frozenset[Permutation]
    element_order: int

    @property
    def size(self) -> int:
        return len(self.members)


def conjugacy_classes(G: PermGroup) -> list[ConjClass]:
    """Conjugacy classes sorted by canonical representative."""
    seen: set[Permutation] = set()
    classes = []
    for g in G.elements:
        if g in seen:
            continue
        members = frozenset(h * g * h.inverse() for h in G.elements)
        seen |= members
        classes.append(ConjClass(min(members), members, g.order()))
    return classes


def center(G: PermGroup) -> frozenset[Permutation]:
    # commuting with every generator is commuting with everything
    return frozenset(g for g in G.elements
                     if all(g * h == h * g for h in G.generators))


def is_normal(G: PermGroup, N: Iterable[Permutation]) -> bool:
    nset = set(N)
    return all(g * n * g.inverse() in nset for g in G.generators for n in nset)


def normal_closure(G: PermGroup, seeds: Iterable[Permutation]) -> frozenset[Permutation]:
    """Smallest normal subgroup of G containing the seeds."""
    seeds = set(seeds)
    seeds.add(G.identity)
    H = mulclose(seeds)
    while True:
        extra = {g * h * g.inverse() for g in G.generators for h in H} - H
        if not extra:
            return frozenset(H)
        H = mulclose(H | extra)


def commutator_subgroup(G: PermGroup) -> frozenset[Permutation]:
    comms = {a.inverse() * b.inverse() * a * b
             for a in G.generators for b in G.generators}
    return normal_closure(G, comms)


def quotient_with_map(G: PermGroup, N: Iterable[Permutation]
                      ) -> tuple[PermGroup, dict[Permutation, Permutation]]:
    """Quotient G/N as a permutation group on left cosets, plus the map.

    Cosets are ordered by their minimal member, and the quotient acts on
    them by left translation (the regular action of G/N).
    """
    nset = frozenset(N)
    if G.identity not in nset:
        raise NotNormal("kernel does not contain the identity")
    try:
        closure = mulclose(small_generating_set(nset), cap=len(nset))
    except CapExceeded:
        raise NotNormal("kernel is not a subgroup") from None
    if closure != set(nset):
        raise NotNormal("kernel is not a subgroup")
    if not is_normal(G, nset):
        raise NotNormal("kernel is not normal")

    coset_of: dict[Permutation, int] = {}
    reps: list[Permutation] = []
    for g in G.elements:
        if g in coset_of:
            continue
        idx = len(reps)
        reps.append(g)
        for n in nset:
            coset_of[g * n] = idx
    m = len(reps)
    kappa: dict[Permutation, Permutation] = {}
    for g in G.elements:
        img = object.__new__(Permutation)
        img.images = tuple(coset_of[g * reps[j]] for j in range(m))
        kappa[g] = img
    Q = PermGroup(m, [kappa[g] for g in G.generators], set(kappa.values()))
    return Q, kappa


def quotient(G: PermGroup, N: Iterable[Permutation]) -> PermGroup:
    return quotient_with_map(G, N)[0]


def element_order(g: Permutation) -> int:
    return g.order()


def exponent(G: PermGroup) -> int:
    return reduce(lcm, (g.order() for g in G.elements), 1)


def abelianization_rank(G: PermGroup, ell: int) -> int:
    """ell-rank of the maximal abelian quotient G/[G,G]."""
    if not is_prime(ell):
        raise NotPrime(f"{ell} is not prime")
    Q = quotient(G, commutator_subgroup(G))
    powers = {q ** ell for q in Q.elements}
    index, rank = Q.order // len(powers), 0
    while index % ell == 0:
        index //= ell
        rank += 1
    if index != 1:
        raise PropertyViolated(f"ell-power index expected, got residue {index}")
    return rank


# cycle notation (1-based points, CLI-shared input format)

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(text: str, degree: int | None = None) -> Permutation:
    """Parse cycle notation like "(1,2,3,4)(5,6)" with 1-based points."""
    body = text.strip()
    cycles: list[list[int]] = []
    rest = _CYCLE_RE.sub("", body)
    if rest.strip():
        raise ValueError(f"unparsable cycle notation: {text!r}")
    for m in _CYCLE_RE.finditer(body):
        inner = m.group(1).strip()
        if not inner:
            continue
        pts = [int(tok) for tok in re.split(r"[,\s]+", inner) if tok]
        if any(p < 1 for p in pts):
            raise ValueError("points are 1-based")
        cycles.append(pts)
    flat = [p for c in cycles for p in c]
    if len(set(flat)) != len(flat):
        raise ValueError(f"cycles are not disjoint: {text!r}")
    n = max(flat, default=0)
    if degree is not None:
        if degree < n:
            raise ValueError(f"degree {degree} smaller than max point {n}")
        n = degree
    if n == 0:
        raise ValueError("cannot infer degree of the identity; pass degree=")
    images = list(range(n))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a - 1] = b - 1
    return Permutation(images)


def parse_generators(text: str, degree: int | None = None) -> list[Permutation]:
    """Parse ';'-separated cycle notation into same-degree permutations."""
    parts = [p for p in (s.strip() for s in text.split(";")) if p]
    if not parts:
        raise ValueError("no generators given")
    if degree is None:
        degree = 0
        for part in parts:
            pts = [int(tok) for m in _CYCLE_RE.finditer(part)
                   for tok in re.split(r"[,\s]+", m.group(1).strip()) if tok]
            degree = max(degree, max(pts, default=0))
    return [parse_permutation(part, degree=degree) for part in parts]


def cycle_string(p: Permutation) -> str:
    cycles = [c for c in p.orbits() if len(c) > 1]
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(x + 1) for x in c) + ")" for c in cycles)
