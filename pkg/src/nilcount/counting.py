"""Exact class-field counting over the rationals.

Degree-ell cyclic extensions of Q correspond to order-ell subgroups of the
Dirichlet character group with the allowed conductor support, so all counts
here are exact integers: the number of C_ell extensions unramified outside S
is (ell^t - 1)/(ell - 1) where t counts one rank per prime p = 1 mod ell in S
plus the wild contribution at ell (rank 2 at ell = 2 from conductors 4 and 8,
rank 1 at odd ell from conductor ell^2).  Exact-ramification counts follow by
inclusion-exclusion, and field enumerations (quadratic, cyclic of odd prime
degree, biquadratic) back everything with explicit discriminant lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import BudgetExceeded
from .malle import BaseFieldData
from .permcore import is_prime
from .dirichlet import prime_sieve, squarefree_sieve

V4_BUDGET = 1_000_000


@dataclass(frozen=True)
class RamificationProfile:
    """A prime ell with disjoint prime sets S (must ramify) and T (may ramify)."""

    ell: int
    S: frozenset[int]
    T: frozenset[int] = frozenset()

    def __post_init__(self):
        if not is_prime(self.ell):
            raise ValueError(f"{self.ell} is not prime")
        if self.S & self.T:
            raise ValueError("S and T must be disjoint")
        for p in self.S | self.T:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    @property
    def t(self) -> int:
        return character_rank(self.ell, self.S)


@dataclass(frozen=True)
class FieldRecord:
    """One enumerated field: catalog group id, |disc|, and the tuple of
    products of primes first ramified at each chain layer."""

    group: str
    discriminant: int
    ramified_tuple: tuple[int, ...]


def character_rank(ell: int, S: Iterable[int]) -> int:
    """ell-rank t of the character group with conductor support in S."""
    S = set(S)
    t = sum(1 for p in S if p % ell == 1)
    if ell in S:
        t += 2 if ell == 2 else 1
    return t


def count_unramified_outside(ell: int, S: Iterable[int]) -> int:
    """Exact number of C_ell extensions of Q unramified outside S."""
    t = character_rank(ell, S)
    return (ell ** t - 1) // (ell - 1)


def rank_bound_s(k: BaseFieldData, ell: int, S: Iterable[int]) -> int:
    """The rank bound s = rk_ell(Cl_k) + |S| + [k:Q] (+ r1 when ell = 2)."""
    s = k.rk(ell) + len(set(S)) + k.degree
    if ell == 2:
        s += k.real_places
    return s


def unramified_bound(k: BaseFieldData, ell: int, S: Iterable[int]) -> int:
    """(ell^s - 1)/(ell - 1) with the rank bound s; an upper bound for the
    exact count over Q."""
    return (ell ** rank_bound_s(k, ell, S) - 1) // (ell - 1)


def count_exactly_ramified(ell: int, S: Iterable[int], T: Iterable[int]) -> int:
    """Exact number of C_ell extensions of Q ramified in every prime of S and
    unramified outside S u T, by inclusion-exclusion over subsets of S."""
    S, T = sorted(set(S)), set(T)
    if set(S) & T:
        raise ValueError("S and T must be disjoint")
    total = 0
    for mask in range(1 << len(S)):
        subset = {S[i] for i in range(len(S)) if (mask >> i) & 1}
        sign = (-1) ** (len(S) - len(subset))
        total += sign * count_unramified_outside(ell, subset | T)
    return total


def exact_ramified_bounds(ell: int, S: Iterable[int], T: Iterable[int],
                          k: BaseFieldData | None = None) -> tuple[int, int]:
    """(tight, loose) upper bounds ell^(c+|T|) (ell-1)^|S| for the exact count.

    The constant c admits two readings; the tight one is
    c = rk + [k:Q] + |S0| + r1 with S0 the primes of S over ell, the loose one
    c = rk + 3[k:Q].  Both are evaluated; callers assert against the tight one.
    """
    if k is None:
        k = BaseFieldData.rationals()
    S, T = set(S), set(T)
    s0 = len({p for p in S if p == ell})
    c_tight = k.rk(ell) + k.degree + s0 + k.real_places
    c_loose = k.rk(ell) + 3 * k.degree
    return (ell ** (c_tight + len(T)) * (ell - 1) ** len(S),
            ell ** (c_loose + len(T)) * (ell - 1) ** len(S))


# quadratic fields: fundamental discriminants


def count_quadratic(x: int) -> int:
    """Z(Q, C2; x): fundamental discriminants d with |d| <= x, both signs."""
    if x < 3:
        return 0
    sf = squarefree_sieve(x)
    total = int(np.count_nonzero(sf[1::4])) - 1  # positive d = m = 1 mod 4, drop d = 1
    total += int(np.count_nonzero(sf[3::4]))     # d = -m with m = 3 mod 4
    y = x // 4
    if y >= 1:
        sf4 = sf[:y + 1]
        total += int(np.count_nonzero(sf4[1::4]))      # d = -4m, m = 1 mod 4
        total += 2 * int(np.count_nonzero(sf4[2::4]))  # d = +-4m, m = 2 mod 4
        total += int(np.count_nonzero(sf4[3::4]))      # d = +4m, m = 3 mod 4
    return total


def fundamental_discriminants(x: int) -> list[int]:
    """All fundamental discriminants with |d| <= x, sorted by (|d|, d)."""
    sf = squarefree_sieve(x)
    out: list[int] = []
    for m in np.nonzero(sf)[0]:
        m = int(m)
        if m % 4 == 1 and m != 1:
            out.append(m)
        elif m % 4 == 3:
            out.append(-m)
        if 4 * m <= x:
            if m % 4 == 1:
                out.append(-4 * m)
            elif m % 4 == 2:
                out.append(4 * m)
                out.append(-4 * m)
            elif m % 4 == 3:
                out.append(4 * m)
    out.sort(key=lambda d: (abs(d), d))
    return out


def _radical(n: int) -> int:
    n = abs(n)
    rad, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            rad *= d
            while n % d == 0:
                n //= d
        d += 1
    return rad * (n if n > 1 else 1)


def enumerate_quadratic(x: int) -> list[FieldRecord]:
    return [FieldRecord("C2", abs(d), (_radical(d),))
            for d in fundamental_discriminants(x)]


# cyclic fields of odd prime degree


def enumerate_cyclic_ell(ell: int, x: int) -> list[FieldRecord]:
    """All C_ell fields over Q with |disc| = f^(ell-1) <= x, one record each.

    Conductors are f = (optionally ell^2) * product of distinct primes
    p = 1 mod ell; a conductor with k cyclic character components carries
    (ell-1)^(k-1) distinct fields.
    """
    if ell == 2 or not is_prime(ell):
        raise ValueError("need an odd prime")
    f_max = _int_root(x, ell - 1)
    if f_max < 1:
        return []
    isp = prime_sieve(f_max)
    split = [int(p) for p in np.nonzero(isp)[0] if p % ell == 1]

    conductors: list[tuple[int, int, int]] = []  # (f, omega1, wild)

    def extend(i: int, f: int, omega1: int, wild: int) -> None:
        if omega1 + wild >= 1:
            conductors.append((f, omega1, wild))
        for j in range(i, len(split)):
            if f * split[j] > f_max:
                break
            extend(j + 1, f * split[j], omega1 + 1, wild)

    extend(0, 1, 0, 0)
    if ell * ell <= f_max:
        base = ell * ell
        def extend_wild(i: int, f: int, omega1: int) -> None:
            conductors.append((f, omega1, 1))
            for j in range(i, len(split)):
                if f * split[j] > f_max:
                    break
                extend_wild(j + 1, f * split[j], omega1 + 1)
        extend_wild(0, base, 0)

    records: list[FieldRecord] = []
    for f, omega1, wild in sorted(conductors):
        count = (ell - 1) ** (omega1 + wild - 1)
        rec = FieldRecord(f"C{ell}", f ** (ell - 1), (_radical(f),))
        records.extend([rec] * count)
    records.sort(key=lambda r: r.discriminant)
    return records


def count_cyclic_ell(ell: int, x: int) -> int:
    return len(enumerate_cyclic_ell(ell, x))


def _int_root(x: int, d: int) -> int:
    if d == 1:
        return x
    if x < 1:
        return 0
    r = int(round(x ** (1.0 / d)))
    while r ** d > x:
        r -= 1
    while (r + 1) ** d <= x:
        r += 1
    return r


# biquadratic fields and the fiber bound


def _squarefree_kernel(n: int, spf: np.ndarray) -> int:
    """Signed squarefree part of n, using a smallest-prime-factor table."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            out *= p
    return sign * out


def _fundamental_of(m: int) -> int:
    """Fundamental discriminant of Q(sqrt(m)) for signed squarefree m != 1."""
    return m if m % 4 == 1 else 4 * m


@dataclass(frozen=True)
class V4Field:
    triple: tuple[int, int, int]   # the three quadratic discriminants, sorted
    discriminant: int
    ramified_tuple: tuple[int, int]


@dataclass(frozen=True)
class V4FiberReport:
    x: int
    field_count: int
    fibers: dict[tuple[int, int], int] = field(compare=False)
    max_fiber: int = 0
    bound_violations: int = 0
    valuation_failures: int = 0

    @property
    def passed(self) -> bool:
        return self.bound_violations == 0 and self.valuation_failures == 0


def enumerate_v4(x: int) -> list[V4Field]:
    """All V4 = C2 x C2 fields over Q with |disc| <= x.

    A field is a triple {d1, d2, d3} of distinct fundamental discriminants
    with d3 the fundamental discriminant of d1*d2; by the conductor product
    rule |disc| = |d1 d2 d3|.
    """
    if x > V4_BUDGET:
        raise BudgetExceeded(f"biquadratic enumeration capped at {V4_BUDGET}")
    # |d1| <= |d2| and |d3| >= 3 force |d2| <= x/9; kernels need spf to x/3
    discs = fundamental_discriminants(max(8, x // 9))
    lim = max(8, x // 3)
    spf = np.zeros(lim + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, lim + 1):
        if spf[p] == 0:
            view = spf[p::p]
            view[view == 0] = p
    seen: set[tuple[int, int, int]] = set()
    fields: list[V4Field] = []
    key = lambda d: (abs(d), d)
    discs_sorted = sorted(discs, key=key)
    for i, d1 in enumerate(discs_sorted):
        if abs(d1) * abs(d1) * 3 > x:  # |d2| >= |d1|, |d3| >= 3
            break
        for d2 in discs_sorted[i + 1:]:
            if abs(d1) * abs(d2) * 3 > x:
                break
            m = _squarefree_kernel(d1 * d2, spf)
            d3 = _fundamental_of(m)
            disc = abs(d1 * d2 * d3)
            if disc > x:
                continue
            triple = tuple(sorted((d1, d2, d3), key=key))
            if triple in seen:
                continue
            seen.add(triple)
            dist = triple[0]
            rad_all = _radical(d1 * d2 * d3)
            a1 = _radical(dist)
            a2 = rad_all // a1
            fields.append(V4Field(triple, disc, (a1, a2)))
    fields.sort(key=lambda f: (f.discriminant, f.triple))
    return fields


def v4_fiber_check(x: int, tame_index: int = 2) -> V4FiberReport:
    """Group the enumerated V4 fields by their ramification tuple and check
    every fiber against the bound 2^(b1 + b2), with b_i the prime count of
    the earlier layers plus the wild constant of the exact-ramification
    bound.  Also check the tame discriminant valuations: every odd ramified
    prime must divide the discriminant exactly `tame_index` times, matching
    the index of an involution in the regular four-point action."""
    fields = enumerate_v4(x)
    fibers: dict[tuple[int, int], int] = {}
    val_fail = 0
    for f in fields:
        fibers[f.ramified_tuple] = fibers.get(f.ramified_tuple, 0) + 1
        dd = f.discriminant
        while dd % 2 == 0:
            dd //= 2
        p = 3
        while p * p <= dd:
            if dd % p == 0:
                v = 0
                while dd % p == 0:
                    dd //= p
                    v += 1
                if v != tame_index:
                    val_fail += 1
            p += 2
        if dd > 1:  # a leftover prime has valuation 1, never the tame index
            val_fail += 1
    violations = 0
    max_fiber = 0
    k = BaseFieldData.rationals()
    for (a1, a2), size in fibers.items():
        max_fiber = max(max_fiber, size)
        omega_a1 = _omega(a1)
        s0_step2 = 1 if a1 % 2 == 0 else 0
        b1 = 0 + (k.rk(2) + k.degree + 0 + k.real_places)
        b2 = omega_a1 + (k.rk(2) + k.degree + s0_step2 + k.real_places)
        bound = 2 ** (b1 + b2)  # (ell-1)^omega factors are 1 at ell = 2
        if size > bound:
            violations += 1
    return V4FiberReport(x, len(fields), fibers, max_fiber, violations, val_fail)


def _omega(n: int) -> int:
    n = abs(n)
    count, d = 0, 2
    while d * d <= n:
        if n % d == 0:
            count += 1
            while n % d == 0:
                n //= d
        d += 1
    return count + (1 if n > 1 else 0)
