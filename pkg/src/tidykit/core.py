"""Dense Cayley-table groups, bitmask element sets, and the basic constructions.

Every group is stored as an ``n x n`` table of element indices with the
identity at index 0.  Subsets of a group are :class:`ElementSet` bitmasks
that remember which group they belong to.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    ClosureTooLarge,
    EmptySet,
    GroupMismatch,
    IndexOutOfRange,
    InvalidPermutation,
    NotAGroup,
    NotAnAction,
    NotAnAutomorphism,
    NotNormal,
    NotSubgroup,
    OrderBoundExceeded,
)

DEFAULT_MAX_ORDER = 5000
DEFAULT_ISO_BOUND = 96
FULL_ASSOC_LIMIT = 512


def max_order(override: int | None = None) -> int:
    """Group-order ceiling: explicit override, then ``TIDYKIT_MAX_ORDER``, then 5000."""
    if override is not None:
        return int(override)
    env = os.environ.get("TIDYKIT_MAX_ORDER")
    return int(env) if env else DEFAULT_MAX_ORDER


def _bits_to_indices(bits: int, n: int) -> np.ndarray:
    if bits == 0:
        return np.zeros(0, dtype=np.intp)
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")[:n])


def _mask_to_bits(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def _indices_to_bits(indices: Iterable[int], n: int) -> int:
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter(indices, dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexOutOfRange(f"element index out of range for group of order {n}")
    mask[idx] = True
    return _mask_to_bits(mask)


class ElementSet:
    """A subset of a specific group, stored as an integer bitmask."""

    __slots__ = ("group", "bits")

    def __init__(self, group: "Group", bits: int):
        self.group = group
        self.bits = bits

    @classmethod
    def from_indices(cls, group: "Group", indices: Iterable[int]) -> "ElementSet":
        return cls(group, _indices_to_bits(indices, group.order))

    @classmethod
    def from_mask(cls, group: "Group", mask: np.ndarray) -> "ElementSet":
        return cls(group, _mask_to_bits(np.asarray(mask, dtype=bool)))

    def _check(self, other: "ElementSet") -> None:
        if not isinstance(other, ElementSet):
            raise TypeError(f"expected ElementSet, got {type(other).__name__}")
        if other.group is not self.group:
            raise GroupMismatch(
                f"sets belong to different groups ({self.group.label!r} vs {other.group.label!r})"
            )

    def indices(self) -> np.ndarray:
        return _bits_to_indices(self.bits, self.group.order)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.group.order, dtype=bool)
        m[self.indices()] = True
        return m

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: int) -> bool:
        return x >= 0 and (self.bits >> x) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(int(i) for i in self.indices())

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.group, self.bits & other.bits)

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.group, self.bits | other.bits)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.group, self.bits & ~other.bits)

    def __le__(self, other: "ElementSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: "ElementSet") -> bool:
        return self <= other and self.bits != other.bits

    def __ge__(self, other: "ElementSet") -> bool:
        return other <= self

    def __gt__(self, other: "ElementSet") -> bool:
        return other < self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        self._check(other)
        return self.bits == other.bits

    def __hash__(self) -> int:
        return hash((id(self.group), self.bits))

    def __repr__(self) -> str:
        items = list(self)
        shown = ", ".join(map(str, items[:12])) + (", ..." if len(items) > 12 else "")
        return f"ElementSet({{{shown}}}, size={len(items)})"

    def least(self) -> int:
        return (self.bits & -self.bits).bit_length() - 1


class Group:
    """A finite group given by its Cayley table; identity is always index 0.

    Instances are treated as immutable.  Structural results computed by
    other modules are memoised in ``_cache``.
    """

    def __init__(self, mul: np.ndarray, label: str = "", *, _trusted: bool = False):
        if not _trusted:
            raise TypeError("use from_cayley_table() to build a validated Group")
        mul = np.ascontiguousarray(mul, dtype=np.int32)
        mul.setflags(write=False)
        self.mul = mul
        self.order = n = mul.shape[0]
        self.label = label
        self.identity = 0
        rows, cols = np.nonzero(mul == 0)
        inv = np.empty(n, dtype=np.int32)
        inv[rows] = cols
        inv.setflags(write=False)
        self.inv = inv
        self.ord, bits = _orders_and_cyclic_closures(mul)
        self.cyc_closure = [ElementSet(self, b) for b in bits]
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"<Group {self.label or '?'} order={self.order}>"

    def __len__(self) -> int:
        return self.order

    def all(self) -> ElementSet:
        return ElementSet(self, (1 << self.order) - 1)

    def trivial(self) -> ElementSet:
        return ElementSet(self, 1)

    def empty(self) -> ElementSet:
        return ElementSet(self, 0)

    def set(self, indices: Iterable[int]) -> ElementSet:
        return ElementSet.from_indices(self, indices)

    def power(self, x: int, k: int) -> int:
        k %= int(self.ord[x])
        r = 0
        for _ in range(k):
            r = int(self.mul[r, x])
        return r

    def check_index(self, x: int) -> None:
        if not 0 <= x < self.order:
            raise IndexOutOfRange(f"element {x} not in group of order {self.order}")

    @property
    def comm(self) -> np.ndarray:
        """Table of commutators ``[x, y] = x^-1 y^-1 x y``."""
        c = self._cache.get("comm")
        if c is None:
            m, inv = self.mul, self.inv
            c = m[m[inv[:, None], inv[None, :]], m]
            c.setflags(write=False)
            self._cache["comm"] = c
        return c

    @property
    def commuting(self) -> np.ndarray:
        """Boolean matrix: ``commuting[x, y]`` iff ``xy = yx``."""
        c = self._cache.get("commuting")
        if c is None:
            c = self.mul == self.mul.T
            c.setflags(write=False)
            self._cache["commuting"] = c
        return c

    def primes(self) -> list[int]:
        return prime_factors(self.order)


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(p: int) -> bool:
    return p >= 2 and prime_factors(p) == [p]


def prime_part(n: int, primes: Iterable[int]) -> int:
    out = 1
    for p in primes:
        while n % p == 0:
            n //= p
            out *= p
    return out


def is_prime_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _orders_and_cyclic_closures(mul: np.ndarray) -> tuple[np.ndarray, list[int]]:
    # Walk powers once per cyclic subgroup; every power x^k inherits its
    # order o/gcd(k, o) and its closure from the powers of x.
    n = mul.shape[0]
    ord_ = np.zeros(n, dtype=np.int64)
    closure: list[int] = [0] * n
    done = np.zeros(n, dtype=bool)
    for x in range(n):
        if done[x]:
            continue
        pw = [0]
        y = x
        while y != 0:
            pw.append(y)
            y = int(mul[y, x])
            if len(pw) > n:
                raise NotAGroup(f"element {x} has no finite order", (x,))
        o = len(pw)
        sub_bits: dict[int, int] = {}
        for k in range(o):
            y = pw[k]
            if done[y]:
                continue
            d = math.gcd(k, o)
            bits = sub_bits.get(d)
            if bits is None:
                bits = 0
                for j in range(0, o, d):
                    bits |= 1 << pw[j]
                sub_bits[d] = bits
            ord_[y] = o // d
            closure[y] = bits
            done[y] = True
    ord_.setflags(write=False)
    return ord_, closure


def _trusted(mul: np.ndarray, label: str) -> Group:
    return Group(mul, label, _trusted=True)


def _first_assoc_violation(m: np.ndarray, rows: Iterable[int]) -> tuple[int, int, int] | None:
    for a in rows:
        left = m[m[a]]  # left[b, c] = (ab)c
        right = m[a][m]  # right[b, c] = a(bc)
        bad = left != right
        if bad.any():
            b, c = np.unravel_index(int(np.argmax(bad)), bad.shape)
            return int(a), int(b), int(c)
    return None


def from_cayley_table(
    table: Sequence[Sequence[int]] | np.ndarray,
    label: str = "",
    *,
    full_associativity: bool | None = None,
    seed: int = 0,
) -> Group:
    """Validate a Cayley table and return a Group with the identity renumbered to 0.

    Associativity is checked on every triple when ``n <= 512`` (or when
    ``full_associativity`` is true); otherwise ``10 n^2`` random triples are
    sampled with a fixed seed.  Violations raise :class:`NotAGroup`
    carrying the offending indices.
    """
    try:
        t = np.asarray(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise NotAGroup(f"table is not a rectangular integer matrix: {exc}") from exc
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 1:
        raise NotAGroup(f"table must be a non-empty square matrix, got shape {t.shape}")
    n = t.shape[0]
    if n > max_order():
        raise ClosureTooLarge(f"order {n} exceeds ceiling {max_order()}")
    if t.min() < 0 or t.max() >= n:
        bad = np.argwhere((t < 0) | (t >= n))[0]
        raise NotAGroup(f"entry at {tuple(bad)} out of range", tuple(int(v) for v in bad))

    want = np.arange(n)
    for axis, name in ((1, "row"), (0, "column")):
        ok = (np.sort(t, axis=axis) == (want[None, :] if axis == 1 else want[:, None])).all(axis=axis)
        if not ok.all():
            i = int(np.argmin(ok))
            line = t[i] if axis == 1 else t[:, i]
            vals, counts = np.unique(line, return_counts=True)
            dup = int(vals[np.argmax(counts)])
            j = int(np.flatnonzero(line == dup)[1])
            pair = (i, j) if axis == 1 else (j, i)
            raise NotAGroup(f"not a Latin square: {name} {i} repeats {dup}", pair)

    ids = np.flatnonzero((t == want[None, :]).all(axis=1) & (t == want[:, None]).all(axis=0))
    if ids.size == 0:
        raise NotAGroup("no two-sided identity element")
    e = int(ids[0])

    rows, cols = np.nonzero(t == e)
    right_inv = np.empty(n, dtype=np.int64)
    right_inv[rows] = cols
    left_ok = t[right_inv, np.arange(n)] == e
    if not left_ok.all():
        x = int(np.argmin(left_ok))
        raise NotAGroup(f"element {x} has no two-sided inverse", (x, int(right_inv[x])))

    order = [e] + [i for i in range(n) if i != e]
    new_of_old = np.empty(n, dtype=np.int64)
    new_of_old[order] = np.arange(n)
    old = np.asarray(order)
    m = new_of_old[t[np.ix_(old, old)]]

    full = n <= FULL_ASSOC_LIMIT if full_associativity is None else full_associativity
    if full:
        bad = _first_assoc_violation(m, range(n))
    else:
        rng = np.random.default_rng(seed)
        k = 10 * n * n
        a, b, c = (rng.integers(0, n, size=k) for _ in range(3))
        viol = m[m[a, b], c] != m[a, m[b, c]]
        bad = None
        if viol.any():
            i = int(np.argmax(viol))
            bad = (int(a[i]), int(b[i]), int(c[i]))
    if bad is not None:
        a, b, c = (int(old[v]) for v in bad)
        raise NotAGroup(f"associativity fails: ({a}*{b})*{c} != {a}*({b}*{c})", (a, b, c))
    return _trusted(m, label)


def closure_group(
    gens: Sequence[Hashable],
    op: Callable[[Hashable, Hashable], Hashable],
    identity: Hashable,
    label: str = "",
    *,
    limit: int | None = None,
) -> tuple[Group, list[Hashable]]:
    """Enumerate the group generated by ``gens`` under an associative ``op``.

    Discovery is breadth-first from the identity, right-multiplying by the
    generators in input order.  Returns the group and the list of concrete
    elements indexed like the group.
    """
    limit = max_order(limit)
    elements = [identity]
    index = {identity: 0}
    right = [[] for _ in gens]
    parent: list[tuple[int, int]] = [(-1, -1)]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        x = elements[i]
        for j, g in enumerate(gens):
            y = op(x, g)
            k = index.get(y)
            if k is None:
                k = len(elements)
                if k >= limit:
                    raise ClosureTooLarge(f"closure exceeds {limit} elements")
                index[y] = k
                elements.append(y)
                parent.append((i, j))
                queue.append(k)
            right[j].append(k)
    n = len(elements)
    # right[j] was filled in queue order, which is index order.
    rmaps = [np.asarray(r, dtype=np.int32) for r in right]
    mul = np.empty((n, n), dtype=np.int32)
    mul[:, 0] = np.arange(n)
    for y in range(1, n):
        py, j = parent[y]
        mul[:, y] = rmaps[j][mul[:, py]]
    return _trusted(mul, label), elements


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    # Left-to-right: apply p, then q.
    return tuple(q[i] for i in p)


def from_permutation_generators(
    gens: Sequence[Sequence[int]],
    degree: int | None = None,
    label: str = "",
    *,
    limit: int | None = None,
) -> Group:
    """Group generated by permutations given as image lists ``[p(0), ..., p(m-1)]``.

    Products are composed left to right (``(pq)(i) = q(p(i))``).
    """
    perms = [tuple(int(v) for v in g) for g in gens]
    if degree is None:
        degree = len(perms[0]) if perms else 0
    for g in perms:
        if len(g) != degree or sorted(g) != list(range(degree)):
            raise InvalidPermutation(f"{list(g)} is not a permutation of 0..{degree - 1}")
    group, _ = closure_group(perms, _compose, tuple(range(degree)), label, limit=limit)
    return group


def generated_subgroup(G: Group, seed: ElementSet | Iterable[int]) -> ElementSet:
    gens = _as_indices(G, seed)
    gens = gens[gens != 0]
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    if gens.size == 0:
        return G.trivial()
    frontier = np.zeros(1, dtype=np.intp)
    while frontier.size:
        prod = G.mul[np.ix_(frontier, gens)].ravel()
        new = np.unique(prod[~mask[prod]])
        mask[new] = True
        frontier = new
    return ElementSet.from_mask(G, mask)


def join(G: Group, *sets: ElementSet | Iterable[int]) -> ElementSet:
    """Subgroup generated by the union of ``sets``."""
    bits = 0
    for s in sets:
        bits |= s.bits if isinstance(s, ElementSet) else _indices_to_bits(s, G.order)
    return generated_subgroup(G, ElementSet(G, bits))


def _as_indices(G: Group, s: ElementSet | Iterable[int]) -> np.ndarray:
    if isinstance(s, ElementSet):
        if s.group is not G:
            raise GroupMismatch("element set belongs to a different group")
        return s.indices()
    idx = np.fromiter((int(v) for v in s), dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= G.order):
        raise IndexOutOfRange(f"index out of range for group of order {G.order}")
    return idx


def closure_violation(G: Group, S: ElementSet) -> tuple[int, int] | None:
    """First pair ``(g, h)`` of ``S`` (lexicographic) with ``gh`` outside ``S``."""
    if len(S) == 0:
        raise EmptySet("empty set is never a subgroup")
    idx = _as_indices(G, S)
    mask = S.mask()
    bad = ~mask[G.mul[np.ix_(idx, idx)]]
    if not bad.any():
        return None
    i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
    return int(idx[i]), int(idx[j])


def is_subgroup(G: Group, S: ElementSet) -> bool:
    return closure_violation(G, S) is None


def conjugate_set(G: Group, S: ElementSet, g: int) -> ElementSet:
    """``{g^-1 s g : s in S}``."""
    G.check_index(g)
    idx = _as_indices(G, S)
    return ElementSet.from_indices(G, G.mul[G.mul[G.inv[g], idx], g])


def conjugates_matrix(G: Group, S: ElementSet) -> np.ndarray:
    """Row ``g`` lists ``g^-1 s g`` for ``s`` in ``S``."""
    idx = _as_indices(G, S)
    all_g = np.arange(G.order)
    return G.mul[G.mul[G.inv[:, None], idx[None, :]], all_g[:, None]]


def is_normal(G: Group, S: ElementSet) -> bool:
    return bool(S.mask()[conjugates_matrix(G, S)].all())


def normal_closure(G: Group, S: ElementSet) -> ElementSet:
    conj = conjugates_matrix(G, S)
    return generated_subgroup(G, ElementSet.from_indices(G, np.unique(conj)))


def conjugacy_classes(G: Group) -> list[ElementSet]:
    """Classes in ascending order of least member (identity class first)."""
    cached = G._cache.get("classes")
    if cached is not None:
        return cached
    n = G.order
    all_g = np.arange(n)
    cls_id = np.full(n, -1, dtype=np.int64)
    classes = []
    for x in range(n):
        if cls_id[x] >= 0:
            continue
        members = np.unique(G.mul[G.mul[G.inv, x], all_g])
        cls_id[members] = len(classes)
        classes.append(ElementSet.from_indices(G, members))
    cls_id.setflags(write=False)
    G._cache["classes"] = classes
    G._cache["class_id"] = cls_id
    return classes


def class_ids(G: Group) -> np.ndarray:
    conjugacy_classes(G)
    return G._cache["class_id"]


@dataclass(frozen=True)
class SubgroupView:
    """A subgroup re-indexed as a standalone Group.

    ``embed[i]`` is the parent index of child element ``i``.
    """

    parent: Group
    subset: ElementSet
    group: Group
    embed: np.ndarray

    def lift(self, S: ElementSet) -> ElementSet:
        return ElementSet.from_indices(self.parent, self.embed[S.indices()])

    def restrict(self, S: ElementSet) -> ElementSet:
        """Intersect a parent set with the subgroup, in child indices."""
        pos = np.full(self.parent.order, -1, dtype=np.int64)
        pos[self.embed] = np.arange(len(self.embed))
        child = pos[(S & self.subset).indices()]
        return ElementSet.from_indices(self.group, child)


def subgroup_view(G: Group, S: ElementSet, label: str | None = None) -> SubgroupView:
    if S.group is not G:
        raise GroupMismatch("subgroup belongs to a different group")
    if len(S) == 0 or not is_subgroup(G, S):
        raise NotSubgroup("set is not a subgroup")
    idx = S.indices()
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[idx] = np.arange(idx.size)
    table = pos[G.mul[np.ix_(idx, idx)]]
    name = label if label is not None else f"subgroup of {G.label}" if G.label else "subgroup"
    return SubgroupView(G, S, _trusted(table, name), idx)


def as_group(G: Group, S: ElementSet, label: str | None = None) -> Group:
    return subgroup_view(G, S, label).group


@dataclass(frozen=True)
class QuotientMap:
    parent: Group
    kernel: ElementSet
    child: Group
    projection: np.ndarray

    def image(self, S: ElementSet) -> ElementSet:
        return ElementSet.from_indices(self.child, np.unique(self.projection[S.indices()]))

    def preimage(self, T: ElementSet) -> ElementSet:
        return ElementSet.from_mask(self.parent, T.mask()[self.projection])


def quotient(G: Group, N: ElementSet, label: str | None = None) -> QuotientMap:
    """``G/N`` with cosets numbered by least representative (identity coset first)."""
    if N.group is not G:
        raise GroupMismatch("kernel belongs to a different group")
    if len(N) == 0 or not is_subgroup(G, N):
        raise NotSubgroup("kernel is not a subgroup")
    if not is_normal(G, N):
        raise NotNormal("kernel is not a normal subgroup")
    n = G.order
    nidx = N.indices()
    proj = np.full(n, -1, dtype=np.int64)
    reps = []
    for g in range(n):
        if proj[g] < 0:
            proj[G.mul[g, nidx]] = len(reps)
            reps.append(g)
    reps_a = np.asarray(reps)
    table = proj[G.mul[np.ix_(reps_a, reps_a)]]
    proj.setflags(write=False)
    if label is None:
        label = f"{G.label}/N" if G.label else "quotient"
    return QuotientMap(G, N, _trusted(table, label), proj)


def direct_product(*factors: Group, label: str | None = None) -> Group:
    if not factors:
        raise ValueError("direct_product needs at least one factor")
    mul = factors[0].mul.astype(np.int64)
    for B in factors[1:]:
        n, nb = mul.shape[0], B.order
        if n * nb > max_order():
            raise ClosureTooLarge(f"product order {n * nb} exceeds ceiling {max_order()}")
        big = mul[:, None, :, None] * nb + B.mul[None, :, None, :]
        mul = big.reshape(n * nb, n * nb)
    if label is None:
        label = " x ".join(f.label or "?" for f in factors)
    return _trusted(mul, label)


def semidirect_product(
    N: Group, H: Group, act: Sequence[Sequence[int]] | np.ndarray, label: str | None = None
) -> Group:
    """``N ⋊ H`` on pairs ``(n, h)``, stored at index ``h*|N| + n``.

    ``act[h]`` is the automorphism of ``N`` induced by ``h`` and must satisfy
    ``act[h1 h2] = act[h1] ∘ act[h2]``; the product is
    ``(n1, h1)(n2, h2) = (n1 · act[h1](n2), h1 h2)``.
    """
    a = np.asarray(act, dtype=np.int64)
    nn, nh = N.order, H.order
    if a.shape != (nh, nn):
        raise NotAnAction(f"action table must have shape ({nh}, {nn}), got {a.shape}")
    if nn * nh > max_order():
        raise ClosureTooLarge(f"product order {nn * nh} exceeds ceiling {max_order()}")
    for h in range(nh):
        if sorted(a[h].tolist()) != list(range(nn)):
            raise NotAnAutomorphism(f"act[{h}] is not a permutation")
        if not (a[h][N.mul] == N.mul[a[h][:, None], a[h][None, :]]).all():
            raise NotAnAutomorphism(f"act[{h}] does not preserve multiplication")
    composed = a[np.arange(nh)[:, None, None], a[None, :, :]]
    if not (a[H.mul] == composed).all():
        h1, h2 = np.argwhere((a[H.mul] != composed).any(axis=2))[0]
        raise NotAnAction(f"act[{h1}*{h2}] != act[{h1}] o act[{h2}]")
    idx = np.arange(nn * nh)
    hs, ns = idx // nn, idx % nn
    n_part = N.mul[ns[:, None], a[hs[:, None], ns[None, :]]]
    h_part = H.mul[hs[:, None], hs[None, :]]
    mul = h_part * nn + n_part
    if label is None:
        label = f"{N.label or '?'} : {H.label or '?'}"
    return _trusted(mul, label)


def extend_homomorphism(
    H: Group, gens: Sequence[int], images: Sequence, op: Callable, identity
) -> list:
    """Images of every element of ``H`` under the map fixed on ``gens``.

    The map is propagated along a breadth-first word tree and checked for
    consistency on every edge; raises :class:`NotAnAction` otherwise.
    """
    out: list = [None] * H.order
    out[0] = identity
    queue = deque([0])
    seen = 1
    while queue:
        x = queue.popleft()
        for g, img in zip(gens, images):
            y = int(H.mul[x, g])
            val = op(out[x], img)
            if out[y] is None:
                out[y] = val
                seen += 1
                queue.append(y)
            elif out[y] != val:
                raise NotAnAction(f"generator images do not define a homomorphism (at {y})")
    if seen != H.order:
        raise NotAnAction("generators do not generate the group")
    return out


# ---------------------------------------------------------------- isomorphism


def _invariants(G: Group) -> tuple:
    from . import structure  # local import: structure depends on core

    cls_size = np.array([len(c) for c in conjugacy_classes(G)])[class_ids(G)]
    profile = sorted(zip(G.ord.tolist(), cls_size.tolist()))
    return (
        G.order,
        tuple(profile),
        len(structure.center(G)),
        len(structure.derived_subgroup(G)),
    )


def minimal_generating_sequence(G: Group) -> list[int]:
    """Greedy generators: each step adds the element enlarging the span most."""
    cached = G._cache.get("mingens")
    if cached is not None:
        return cached
    gens: list[int] = []
    H = G.trivial()
    while len(H) < G.order:
        best = None
        for x in (~H.mask()).nonzero()[0]:
            x = int(x)
            size = len(join(G, H, [x]))
            key = (size, int(G.ord[x]), -x)
            if best is None or key > best[0]:
                best = (key, x)
        gens.append(best[1])
        H = join(G, H, [best[1]])
    G._cache["mingens"] = gens
    return gens


def _partial_hom(A: Group, gens: list[int], B: Group, imgs: list[int]) -> dict[int, int] | None:
    phi = {0: 0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        fx = phi[x]
        for g, b in zip(gens, imgs):
            y = int(A.mul[x, g])
            val = int(B.mul[fx, b])
            got = phi.get(y)
            if got is None:
                phi[y] = val
                queue.append(y)
            elif got != val:
                return None
    if len(set(phi.values())) != len(phi):
        return None
    return phi


def are_isomorphic(A: Group, B: Group, bound: int | None = None) -> bool:
    """Decide ``A ≅ B`` by invariant pruning and backtracking over generator images."""
    bound = DEFAULT_ISO_BOUND if bound is None else bound
    if max(A.order, B.order) > bound:
        raise OrderBoundExceeded(f"isomorphism test limited to order {bound}")
    if A.order != B.order:
        return False
    if A is B:
        return True
    if _invariants(A) != _invariants(B):
        return False
    gens = minimal_generating_sequence(A)
    a_cls = np.array([len(c) for c in conjugacy_classes(A)])[class_ids(A)]
    b_cls = np.array([len(c) for c in conjugacy_classes(B)])[class_ids(B)]
    cands = [
        [b for b in range(B.order) if B.ord[b] == A.ord[g] and b_cls[b] == a_cls[g]] for g in gens
    ]

    def search(i: int, imgs: list[int]) -> bool:
        if i == len(gens):
            return True
        for b in cands[i]:
            phi = _partial_hom(A, gens[: i + 1], B, imgs + [b])
            if phi is not None and search(i + 1, imgs + [b]):
                return True
        return False

    return search(0, [])


# ---------------------------------------------------------------- text formats


def parse_group_text(text: str, label: str = "") -> Group:
    """Parse ``cayley <n>`` or ``perm <m>`` text; ``#`` starts a comment."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line.split())
    if not lines:
        raise NotAGroup("empty group description")
    head = lines[0]
    if len(head) != 2 or head[0] not in ("cayley", "perm"):
        raise NotAGroup(f"bad header {' '.join(head)!r}; expected 'cayley <n>' or 'perm <m>'")
    try:
        size = int(head[1])
        body = [[int(v) for v in row] for row in lines[1:]]
    except ValueError as exc:
        raise NotAGroup(f"non-integer entry: {exc}") from exc
    if head[0] == "cayley":
        if len(body) != size or any(len(r) != size for r in body):
            raise NotAGroup(f"expected {size} rows of {size} entries")
        return from_cayley_table(body, label)
    return from_permutation_generators(body, size, label)


def load_group(path: str | os.PathLike) -> Group:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_group_text(text, label=f"file({os.fspath(path)})")


def format_cayley(G: Group) -> str:
    rows = [f"cayley {G.order}"]
    rows += [" ".join(map(str, r)) for r in G.mul.tolist()]
    return "\n".join(rows) + "\n"
