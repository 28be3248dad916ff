"""Central-series refinements with prime quotients and their exponent data.

A refinement of a nilpotent group G is a chain E = G_r < ... < G_0 = G of
normal subgroups in which every quotient G_{i-1}/G_i has prime order and is
central in G/G_i.  Layer i is the difference set A_i = G_{i-1} \\ G_i with
weight m_i = |A_i| and minimal index a_i; the upper-bound exponent

    d(G) = sum of m_i over the layers with a_i equal to the global minimum,
    d(k,G) = d(G) / [k(zeta_ell):k]   (ell the order of minimal-index elements)

depends on the chosen chain.  `optimize_d` minimizes d over all valid chains;
for groups within the exhaustive cap this is done exactly by a shortest-path
search on the lattice of admissible normal subgroups (equivalent to scanning
every chain, without enumerating them one by one).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence

from .errors import (CapExceeded, InvalidChain, NotNilpotent, PropertyViolated,
                     TrivialGroup)
from .malle import BaseFieldData, ind, min_index
from .nilpotent import is_nilpotent
from .permcore import PermGroup, Permutation, center, is_prime, mulclose

EXHAUSTIVE_CAP = 128


@dataclass(frozen=True)
class Refinement:
    """A validated chain with its derived layer data.

    `subgroups` runs from the whole group down to the trivial group; layer i
    (1-based, as in the exponent formulas) sits between subgroups[i-1] and
    subgroups[i].
    """

    subgroups: tuple[frozenset[Permutation], ...]
    primes: tuple[int, ...]
    layer_sets: tuple[frozenset[Permutation], ...]
    layer_min_index: tuple[int, ...]
    weights: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.primes)

    @property
    def subgroup_orders(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.subgroups)

    @property
    def group_order(self) -> int:
        return len(self.subgroups[0])


@dataclass(frozen=True)
class OptimizeResult:
    refinement: Refinement
    d_group: int
    d_field: Fraction
    heuristic_only: bool


class _IndexedGroup:
    """Table form of a small group: canonical element indices, full
    multiplication table, and bitmask subgroup arithmetic."""

    def __init__(self, G: PermGroup):
        self.G = G
        self.elems = list(G.elements)  # canonical order, identity first
        self.n = len(self.elems)
        idx = {g: i for i, g in enumerate(self.elems)}
        self.idx = idx
        self.mul = [[idx[a * b] for b in self.elems] for a in self.elems]
        self.inv = [idx[g.inverse()] for g in self.elems]
        self.gens = sorted({idx[g] for g in G.generators})
        self.ind = [ind(g) for g in self.elems]
        self.full_mask = (1 << self.n) - 1
        self.ind_G = min(v for i, v in enumerate(self.ind) if i != 0)

    def successors(self, mask: int) -> list[int]:
        """Masks N' > N reachable by one central prime step.

        N' = <N, g> for g whose class mod N is central in G/N and has prime
        order; such N' is automatically normal in G.
        """
        out: dict[int, None] = {}
        for g in range(self.n):
            if (mask >> g) & 1:
                continue
            gi = self.inv[g]
            central = True
            for h in self.gens:
                t = self.mul[self.inv[h]][self.mul[g][h]]
                if not (mask >> self.mul[gi][t]) & 1:
                    central = False
                    break
            if not central:
                continue
            x, j = g, 1
            while not (mask >> x) & 1:
                x = self.mul[x][g]
                j += 1
            if not is_prime(j):
                continue
            new = mask
            coset_rep = g
            for _ in range(j - 1):
                rest = mask
                while rest:
                    low = rest & -rest
                    new |= 1 << self.mul[coset_rep][low.bit_length() - 1]
                    rest ^= low
                coset_rep = self.mul[coset_rep][g]
            out[new] = None
        return sorted(out)

    def layer_stats(self, lower: int, upper: int) -> tuple[int, int, int]:
        """(prime, weight, min index) of the layer between two masks."""
        diff = upper & ~lower
        weight = diff.bit_count()
        a = min(self.ind[i] for i in _bits(diff))
        prime = upper.bit_count() // lower.bit_count()
        return prime, weight, a

    def mask_to_set(self, mask: int) -> frozenset[Permutation]:
        return frozenset(self.elems[i] for i in _bits(mask))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _require_nilpotent_nontrivial(G: PermGroup) -> None:
    if G.order == 1:
        raise TrivialGroup("refinements need a nontrivial group")
    if not is_nilpotent(G):
        raise NotNilpotent("central prime refinements need a nilpotent group")


def _refinement_from_masks(ig: _IndexedGroup, masks_ascending: Sequence[int]) -> Refinement:
    """Build a Refinement from an ascending mask chain known to be valid."""
    subgroups = tuple(ig.mask_to_set(m) for m in reversed(masks_ascending))
    primes, weights, mins, layers = [], [], [], []
    for lower, upper in zip(masks_ascending, masks_ascending[1:]):
        p, w, a = ig.layer_stats(lower, upper)
        primes.append(p)
        weights.append(w)
        mins.append(a)
        layers.append(ig.mask_to_set(upper & ~lower))
    # layer 1 is the top step, so reverse the ascending order
    return Refinement(subgroups, tuple(reversed(primes)),
                      tuple(reversed(layers)), tuple(reversed(mins)),
                      tuple(reversed(weights)))


def enumerate_refinements(G: PermGroup, cap: int = EXHAUSTIVE_CAP) -> list[Refinement]:
    """All maximal chains of central prime steps, in deterministic DFS order.

    Chain counts grow very quickly with the group order; the cap guards the
    exhaustive mode (use `optimize_d` for the optimum without enumeration).
    """
    _require_nilpotent_nontrivial(G)
    if G.order > cap:
        raise CapExceeded(f"group order {G.order} exceeds enumeration cap {cap}")
    ig = _IndexedGroup(G)
    chains: list[list[int]] = []
    stack: list[int] = [1]  # the identity alone

    def dfs() -> None:
        mask = stack[-1]
        if mask == ig.full_mask:
            chains.append(list(stack))
            return
        for nxt in ig.successors(mask):
            stack.append(nxt)
            dfs()
            stack.pop()

    dfs()
    return [_refinement_from_masks(ig, ch) for ch in chains]


def refinement_data(G: PermGroup, chain: Sequence[Iterable[Permutation]]) -> Refinement:
    """Validate a user-supplied chain (whole group first, trivial group last)
    and fill in the derived layer data."""
    subgroups = [frozenset(s) for s in chain]
    if len(subgroups) < 2:
        raise InvalidChain("chain needs at least the full and trivial groups")
    if subgroups[0] != frozenset(G.elements):
        raise InvalidChain("chain must start at the whole group")
    if subgroups[-1] != frozenset({G.identity}):
        raise InvalidChain("chain must end at the trivial group")
    for upper, lower in zip(subgroups, subgroups[1:]):
        if not lower < upper:
            raise InvalidChain("chain is not strictly decreasing")
        if len(upper) % len(lower):
            raise InvalidChain("subgroup orders do not divide")
        if not is_prime(len(upper) // len(lower)):
            raise InvalidChain("quotient is not of prime order")
    for sub in subgroups[1:-1]:
        try:
            if mulclose(list(sub), cap=len(sub)) != set(sub):
                raise InvalidChain("chain member is not a subgroup")
        except CapExceeded:
            raise InvalidChain("chain member is not a subgroup") from None
    for upper, lower in zip(subgroups, subgroups[1:]):
        for g in upper:
            gi = g.inverse()
            for h in G.generators:
                if gi * h.inverse() * g * h not in lower:
                    raise InvalidChain(
                        "quotient layer is not central in the ambient quotient")
    primes, weights, mins, layers = [], [], [], []
    for upper, lower in zip(subgroups, subgroups[1:]):
        diff = upper - lower
        primes.append(len(upper) // len(lower))
        weights.append(len(diff))
        mins.append(min(ind(g) for g in diff))
        layers.append(frozenset(diff))
    return Refinement(tuple(subgroups), tuple(primes), tuple(layers),
                      tuple(mins), tuple(weights))


def critical_prime_of(refinement: Refinement) -> int:
    """Order of the minimal-index elements, read off the attaining layers."""
    a = min(refinement.layer_min_index)
    witnesses = [g for lay, ai in zip(refinement.layer_sets,
                                      refinement.layer_min_index)
                 if ai == a for g in lay if ind(g) == a]
    orders = {g.order() for g in witnesses}
    if len(orders) != 1 or not is_prime(next(iter(orders))):
        raise PropertyViolated(
            f"minimal-index elements have orders {sorted(orders)}")
    return orders.pop()


def d_constant(refinement: Refinement, k: BaseFieldData) -> tuple[int, Fraction]:
    """(d(G), d(k,G)) for one refinement; both exact."""
    a = min(refinement.layer_min_index)
    d_group = sum(m for m, ai in zip(refinement.weights,
                                     refinement.layer_min_index) if ai == a)
    ell = critical_prime_of(refinement)
    e = reduce(lcm, (g.order() for g in refinement.subgroups[0]), 1)
    return d_group, Fraction(d_group, k.n_ell(ell, e))


def all_min_index_central(G: PermGroup) -> bool:
    """True when every minimal-index element is central.

    In that case those elements together with the identity form an elementary
    abelian subgroup of order ell^s, which is asserted.
    """
    _require_nilpotent_nontrivial(G)
    ind_G, _ = min_index(G)
    minimal = {g for g in G.elements if not g.is_identity() and ind(g) == ind_G}
    if not minimal <= center(G):
        return False
    orders = {g.order() for g in minimal}
    if len(orders) != 1:
        raise PropertyViolated("central minimal-index elements of mixed order")
    ell = orders.pop()
    count = len(minimal) + 1
    while count % ell == 0:
        count //= ell
    if count != 1 or not is_prime(ell):
        raise PropertyViolated(
            f"{len(minimal)} minimal-index elements do not form C_ell^s minus 1")
    sub = minimal | {G.identity}
    for a in sub:
        for b in sub:
            if a * b not in sub:
                raise PropertyViolated("minimal-index elements are not closed")
    return True


def optimize_d(G: PermGroup, k: BaseFieldData,
               exhaustive_cap: int = EXHAUSTIVE_CAP) -> OptimizeResult:
    """Minimal d(k,G) over refinements.

    Exhaustive (exact) for |G| <= exhaustive_cap via shortest path over the
    lattice of admissible normal subgroups; above the cap a heuristic chain is
    built instead and flagged.  Ties between minimal chains are broken by the
    subgroup-order sequence and then by the canonical element order, read from
    the top of the chain.
    """
    _require_nilpotent_nontrivial(G)
    if G.order <= exhaustive_cap:
        refinement = _optimal_refinement_exact(G)
        heuristic = False
    else:
        refinement = _heuristic_refinement(G)
        heuristic = True
    d_group, d_field = d_constant(refinement, k)
    return OptimizeResult(refinement, d_group, d_field, heuristic)


def _path_key(ig: _IndexedGroup, path: tuple[int, ...]) -> tuple:
    orders_from_top = tuple(m.bit_count() for m in reversed(path))
    return (orders_from_top, tuple(reversed(path)))


def _optimal_refinement_exact(G: PermGroup) -> Refinement:
    ig = _IndexedGroup(G)
    start = 1
    best: dict[int, tuple[int, tuple[int, ...]]] = {start: (0, (start,))}
    frontier = [start]
    while frontier:
        # expand in ascending (popcount, mask) order; steps only grow masks
        frontier.sort(key=lambda m: (m.bit_count(), m))
        nxt_frontier: dict[int, None] = {}
        for mask in frontier:
            cost, path = best[mask]
            for nxt in ig.successors(mask):
                _, w, a = ig.layer_stats(mask, nxt)
                step = w if a == ig.ind_G else 0
                cand = (cost + step, path + (nxt,))
                cur = best.get(nxt)
                if (cur is None or cand[0] < cur[0]
                        or (cand[0] == cur[0]
                            and _path_key(ig, cand[1]) < _path_key(ig, cur[1]))):
                    best[nxt] = cand
                    nxt_frontier[nxt] = None
        frontier = list(nxt_frontier)
    if ig.full_mask not in best:
        raise NotNilpotent("no central prime chain reaches the whole group")
    return _refinement_from_masks(ig, best[ig.full_mask][1])


def _heuristic_refinement(G: PermGroup) -> Refinement:
    """Greedy chain for groups above the exhaustive cap.

    When the minimal-index elements are central (so they form an elementary
    abelian subgroup V), route the chain through V; the layers inside V then
    carry all the minimal-index weight and the result meets the lower bound
    of the element count, hence is optimal.  Otherwise capture minimal-index
    elements as deep (early, low-weight) as possible, greedily.
    """
    ind_G, _ = min_index(G)
    elemset = set(G.elements)
    chain_up: list[frozenset[Permutation]] = [frozenset({G.identity})]
    via_center = all_min_index_central(G)
    target_v = (frozenset(g for g in G.elements
                          if g.is_identity() or ind(g) == ind_G)
                if via_center else None)

    def successors(cur: frozenset[Permutation]) -> list[frozenset[Permutation]]:
        out: dict[frozenset[Permutation], None] = {}
        for g in sorted(elemset - cur):
            gi = g.inverse()
            if any(gi * h.inverse() * g * h not in cur for h in G.generators):
                continue
            x, j = g, 1
            while x not in cur:
                x = x * g
                j += 1
            if not is_prime(j):
                continue
            new = set(cur)
            rep = g
            for _ in range(j - 1):
                new.update(rep * n for n in cur)
                rep = rep * g
            out[frozenset(new)] = None
        return sorted(out, key=lambda s: tuple(sorted(p.images for p in s)))

    while len(chain_up[-1]) < G.order:
        cur = chain_up[-1]
        cands = successors(cur)
        if not cands:
            raise NotNilpotent("no central prime chain reaches the whole group")

        def priority(nxt: frozenset[Permutation]) -> tuple:
            layer = nxt - cur
            n_min = sum(1 for g in layer if ind(g) == ind_G)
            if target_v is not None and cur < target_v:
                # grow inside V first
                inside = 0 if nxt <= target_v else 1
                return (inside,)
            if n_min == len(layer):
                bucket = 0  # pure minimal-index layer, cheapest now
            elif n_min == 0:
                bucket = 1
            else:
                bucket = 2
            return (bucket, len(layer) if n_min else 0)

        chain_up.append(min(cands, key=lambda s: (priority(s),
                                                  tuple(sorted(p.images for p in s)))))
    chain = list(reversed(chain_up))
    return refinement_data(G, chain)


def refinement_to_json(refinement: Refinement,
                       k: BaseFieldData | None = None) -> dict:
    out = {
        "subgroup_orders": list(refinement.subgroup_orders),
        "primes": list(refinement.primes),
        "layer_min_index": list(refinement.layer_min_index),
        "weights": list(refinement.weights),
    }
    if k is not None:
        d_group, d_field = d_constant(refinement, k)
        out["d_group"] = d_group
        out["d_field"] = str(d_field)
    return out
