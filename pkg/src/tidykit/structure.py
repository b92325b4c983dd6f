"""Centres, series, Sylow and Hall subgroups, cores, Fitting data, Frobenius recognition."""

from __future__ import annotations

import math
from functools import reduce
from typing import Callable

import numpy as np

from .core import (
    ElementSet,
    Group,
    as_group,
    class_ids,
    conjugacy_classes,
    conjugates_matrix,
    generated_subgroup,
    is_prime,
    is_prime_power_of,
    is_subgroup,
    join,
    prime_part,
    quotient,
    subgroup_view,
)
from .errors import BadPrime, NotFound, NotSolvable, SamePrime


def _memo(G: Group, key: tuple, fn: Callable):
    try:
        return G._cache[key]
    except KeyError:
        val = fn()
        G._cache.setdefault(key, val)
        return G._cache[key]


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise BadPrime(f"{p} is not a prime")


def centralizer(G: Group, S: ElementSet) -> ElementSet:
    idx = S.indices()
    return ElementSet.from_mask(G, G.commuting[:, idx].all(axis=1))


def center(G: Group) -> ElementSet:
    return _memo(G, ("center",), lambda: ElementSet.from_mask(G, G.commuting.all(axis=1)))


def normalizer(G: Group, S: ElementSet) -> ElementSet:
    return ElementSet.from_mask(G, S.mask()[conjugates_matrix(G, S)].all(axis=1))


def upper_central_series(G: Group) -> list[ElementSet]:
    """``[Z_0 = 1, Z_1, ...]`` strictly increasing; the last entry is the hypercentre."""

    def compute():
        series = [G.trivial()]
        comm = G.comm
        while True:
            nxt = ElementSet.from_mask(G, series[-1].mask()[comm].all(axis=1))
            if nxt == series[-1]:
                return series
            series.append(nxt)

    return _memo(G, ("ucs",), compute)


def hypercenter(G: Group) -> ElementSet:
    return upper_central_series(G)[-1]


def derived_subgroup(G: Group, H: ElementSet | None = None) -> ElementSet:
    """``[H, H]`` for a subgroup ``H`` (default ``G``)."""
    if H is None:
        return _memo(G, ("derived",), lambda: generated_subgroup(G, ElementSet.from_indices(G, np.unique(G.comm))))
    idx = H.indices()
    return generated_subgroup(G, ElementSet.from_indices(G, np.unique(G.comm[np.ix_(idx, idx)])))


def derived_series(G: Group) -> list[ElementSet]:
    """``G = D_0 > D_1 > ...`` until the series stabilises."""

    def compute():
        series = [G.all()]
        while True:
            nxt = derived_subgroup(G, series[-1])
            if nxt == series[-1]:
                return series
            series.append(nxt)

    return _memo(G, ("derived_series",), compute)


def is_solvable(G: Group) -> bool:
    return len(derived_series(G)[-1]) == 1


def derived_length(G: Group) -> int:
    series = derived_series(G)
    if len(series[-1]) != 1:
        raise NotSolvable(f"{G.label or 'group'} is not solvable")
    return len(series) - 1


def is_nilpotent(G: Group) -> bool:
    return len(hypercenter(G)) == G.order


def is_abelian(G: Group) -> bool:
    return len(center(G)) == G.order


def exponent(G: Group) -> int:
    return reduce(math.lcm, (int(o) for o in np.unique(G.ord)), 1)


def is_cyclic(G: Group) -> bool:
    return int(G.ord.max()) == G.order


def sylow(G: Group, p: int) -> ElementSet:
    """A Sylow ``p``-subgroup, grown inside successive normalisers."""
    _check_prime(p)

    def compute():
        target = prime_part(G.order, [p])
        pel = np.array([is_prime_power_of(int(o), p) for o in G.ord])
        orders = np.where(pel, G.ord, 0)
        P = G.cyc_closure[int(np.argmax(orders))]
        while len(P) < target:
            cand = normalizer(G, P).mask() & pel & ~P.mask()
            g = int(np.argmax(cand))
            if not cand[g]:
                raise NotFound("no p-element normalises a non-Sylow p-subgroup")
            P = join(G, P, [g])
        return P

    return _memo(G, ("sylow", p), compute)


def core(G: Group, S: ElementSet) -> ElementSet:
    """Largest normal subgroup of ``G`` inside the subgroup ``S``.

    Equals the intersection of all conjugates of ``S``: the elements of
    ``S`` whose whole conjugacy class lies in ``S``.
    """
    mask = S.mask()
    cid = class_ids(G)
    keep = np.zeros(G.order, dtype=bool)
    for k, cls in enumerate(conjugacy_classes(G)):
        if cls <= S:
            keep |= cid == k
    return ElementSet.from_mask(G, keep & mask)


def p_core(G: Group, p: int) -> ElementSet:
    """``O_p(G)``."""
    _check_prime(p)
    return _memo(G, ("p_core", p), lambda: core(G, sylow(G, p)))


def fitting_subgroup(G: Group) -> ElementSet:
    return _memo(G, ("fitting",), lambda: join(G, *(p_core(G, p) for p in G.primes())))


def fitting_series(G: Group) -> list[int]:
    """Orders of the successive quotients ``G, G/F(G), ...`` down to 1."""
    if not is_solvable(G):
        raise NotSolvable(f"{G.label or 'group'} is not solvable")
    orders = [G.order]
    H = G
    while H.order > 1:
        F = fitting_subgroup(H)
        H = quotient(H, F).child
        orders.append(H.order)
    return orders


def fitting_height(G: Group) -> int:
    return _memo(G, ("fitting_height",), lambda: len(fitting_series(G)) - 1)


def normal_subgroups(G: Group) -> list[ElementSet]:
    """All normal subgroups, sorted by size then by their index lists.

    Built as the join-closure of the normal closures of single classes.
    """

    def compute():
        atoms = {}
        for cls in conjugacy_classes(G):
            N = generated_subgroup(G, cls)  # a class generates a normal subgroup
            atoms[N.bits] = N
        found = {1: G.trivial()}
        frontier = [G.trivial()]
        atom_list = list(atoms.values())
        while frontier:
            new = []
            for A in frontier:
                for B in atom_list:
                    if B <= A:
                        continue
                    J = _normal_join(G, A, B)
                    if J.bits not in found:
                        found[J.bits] = J
                        new.append(J)
            frontier = new
        return sorted(found.values(), key=lambda s: (len(s), s.indices().tolist()))

    return _memo(G, ("normal_subgroups",), compute)


def _normal_join(G: Group, A: ElementSet, B: ElementSet) -> ElementSet:
    # For normal A, B the join is the product set AB.
    prod = G.mul[np.ix_(A.indices(), B.indices())]
    return ElementSet.from_indices(G, np.unique(prod))


def has_normal_p_complement(G: Group, p: int) -> ElementSet | None:
    """The set of ``p'``-elements, if it is closed under multiplication."""
    _check_prime(p)
    K = ElementSet.from_mask(G, G.ord % p != 0)
    return K if is_subgroup(G, K) else None


def hall_subgroup(G: Group, primes) -> ElementSet:
    """A Hall ``π``-subgroup of a solvable group for the primes given.

    Sylow subgroups are added one prime at a time, scanning conjugates in
    index order; in a solvable group every ``π``-subgroup lies in a Hall
    ``π``-subgroup, so each step finds a conjugate that fits.
    """
    primes = sorted(set(primes))
    for p in primes:
        _check_prime(p)

    def compute():
        if not is_solvable(G):
            raise NotSolvable(f"{G.label or 'group'} is not solvable")
        use = [p for p in primes if G.order % p == 0]
        H = G.trivial()
        done: list[int] = []
        for p in use:
            done.append(p)
            target = prime_part(G.order, done)
            P = sylow(G, p)
            if len(H) == 1:
                H = P
                continue
            conj = conjugates_matrix(G, P)
            seen: set[bytes] = set()
            for g in range(G.order):
                key = np.sort(conj[g]).tobytes()
                if key in seen:
                    continue
                seen.add(key)
                J = join(G, H, conj[g])
                if len(J) == target:
                    H = J
                    break
            else:
                raise NotFound(f"no Hall subgroup for primes {done} in {G.label}")
        return H

    return _memo(G, ("hall", tuple(primes)), compute)


def hall_pq(G: Group, p: int, q: int) -> ElementSet:
    if p == q:
        raise SamePrime(f"hall_pq needs two distinct primes, got {p} twice")
    _check_prime(p)
    _check_prime(q)
    if not is_solvable(G):
        raise NotSolvable(f"{G.label or 'group'} is not solvable")
    return hall_subgroup(G, [p, q])


def hall_complement(G: Group, p: int) -> ElementSet:
    """A Hall ``p'``-subgroup of a solvable group."""
    return hall_subgroup(G, [r for r in G.primes() if r != p])


def frobenius_kernel(G: Group) -> ElementSet | None:
    """The largest proper nontrivial normal ``K`` with ``C_G(k) <= K`` for all ``1 != k in K``."""

    def compute():
        cm = G.commuting
        for K in reversed(normal_subgroups(G)):
            if len(K) in (1, G.order):
                continue
            kmask = K.mask()
            rows = K.indices()[1:]
            if not (cm[rows] & ~kmask).any():
                return K
        return None

    return _memo(G, ("frobenius_kernel",), compute)


def is_frobenius(G: Group) -> bool:
    return frobenius_kernel(G) is not None


def is_two_frobenius(G: Group) -> tuple[ElementSet, ElementSet] | None:
    """Normal ``1 < K < N < G`` with ``N`` Frobenius on ``K`` and ``G/K`` Frobenius on ``N/K``."""

    def compute():
        normals = normal_subgroups(G)
        for N in normals:
            if len(N) in (1, G.order):
                continue
            view = None
            for K in normals:
                if len(K) == 1 or not K < N:
                    continue
                if view is None:
                    view = subgroup_view(G, N)
                    kn = frobenius_kernel(view.group)
                    if kn is None:
                        break
                if view.restrict(K) != kn:
                    continue
                qm = quotient(G, K)
                kq = frobenius_kernel(qm.child)
                if kq is not None and kq == qm.image(N):
                    return K, N
        return None

    return _memo(G, ("two_frobenius",), compute)


def complement_order(G: Group, K: ElementSet) -> int:
    return G.order // len(K)


def sylow_group(G: Group, p: int) -> Group:
    return as_group(G, sylow(G, p), label=f"Syl_{p}({G.label})")
