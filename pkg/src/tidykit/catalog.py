"""Named group constructors, family expressions, and corpus building.

A *family expression* names a constructor and its arguments, e.g.
``cyclic(12)``, ``frobenius_metacyclic(7,3,2)`` or
``direct_product(dihedral(6),cyclic(3))``.  ``name:args`` is accepted as
shorthand for ``name(args)``.  Every group built from an expression is
labelled with the canonical form of that expression.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from . import core, structure
from .core import Group, are_isomorphic, extend_homomorphism, from_permutation_generators
from .errors import BadParameter, ClosureTooLarge, NotAnAction, UnknownFamily


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise BadParameter(msg)


def _table_group(mul: np.ndarray, label: str) -> Group:
    return core._trusted(mul, label)


# ---------------------------------------------------------------- basic families


def cyclic(n: int) -> Group:
    _need(n >= 1, f"cyclic group order must be >= 1, got {n}")
    _ceiling(n)
    i = np.arange(n)
    return _table_group((i[:, None] + i[None, :]) % n, f"cyclic({n})")


def _dicyclic_table(order: int) -> np.ndarray:
    # Elements a^i b^j (index i + m*j), a of order m = order/2, b^2 = a^(m/2),
    # b^-1 a b = a^-1.
    m = order // 2
    idx = np.arange(order)
    i, j = idx % m, idx // m
    I, J = i[:, None], j[:, None]
    K, L = i[None, :], j[None, :]
    e = np.where(J == 0, I + K, I - K + np.where(L == 1, m // 2, 0)) % m
    f = (J + L) % 2
    return e + m * f


def dihedral(order: int) -> Group:
    """Dihedral group of the given order (``2m`` with ``m >= 3``)."""
    _need(order % 2 == 0 and order >= 6, f"dihedral order must be even and >= 6, got {order}")
    _ceiling(order)
    m = order // 2
    idx = np.arange(order)
    i, j = idx % m, idx // m
    e = (i[:, None] + np.where(j[:, None] == 0, 1, -1) * i[None, :]) % m
    f = (j[:, None] + j[None, :]) % 2
    return _table_group(e + m * f, f"dihedral({order})")


def generalized_quaternion(order: int) -> Group:
    k = order.bit_length() - 1
    _need(order == 1 << k and k >= 3, f"generalized quaternion order must be 2^k, k >= 3; got {order}")
    _ceiling(order)
    return _table_group(_dicyclic_table(order), f"generalized_quaternion({order})")


def dicyclic(order: int) -> Group:
    """Dicyclic group of order ``4m`` (``m >= 2``); ``dicyclic(12)`` is ``Z3 ⋊ Z4``."""
    _need(order % 4 == 0 and order >= 8, f"dicyclic order must be a multiple of 4, >= 8; got {order}")
    _ceiling(order)
    return _table_group(_dicyclic_table(order), f"dicyclic({order})")


def _vectors(p: int, dim: int) -> np.ndarray:
    idx = np.arange(p**dim)
    return np.stack([(idx // p**k) % p for k in range(dim)], axis=1)


def _vec_index(v: np.ndarray, p: int) -> np.ndarray:
    return (v * (p ** np.arange(v.shape[-1]))).sum(axis=-1)


def elementary_abelian(p: int, rank: int) -> Group:
    _need(core.is_prime(p), f"{p} is not prime")
    _need(rank >= 0, "rank must be non-negative")
    _ceiling(p**rank)
    v = _vectors(p, rank)
    s = (v[:, None, :] + v[None, :, :]) % p
    return _table_group(_vec_index(s, p), f"elementary_abelian({p},{rank})")


def extraspecial_exponent_p(p: int) -> Group:
    """Heisenberg group of unitriangular 3x3 matrices over ``F_p`` (``p`` odd)."""
    _need(core.is_prime(p) and p > 2, f"extraspecial exponent-p group needs an odd prime, got {p}")
    _ceiling(p**3)
    v = _vectors(p, 3)
    a, b, c = v[:, 0], v[:, 1], v[:, 2]
    s = np.stack(
        [
            (a[:, None] + a[None, :]) % p,
            (b[:, None] + b[None, :]) % p,
            (c[:, None] + c[None, :] + a[:, None] * b[None, :]) % p,
        ],
        axis=-1,
    )
    return _table_group(_vec_index(s, p), f"extraspecial_exponent_p({p})")


def symmetric(n: int) -> Group:
    _need(n >= 1, "degree must be >= 1")
    _ceiling(math.factorial(n))
    gens = []
    if n >= 2:
        gens.append([*range(1, n), 0])
        gens.append([1, 0, *range(2, n)])
    return from_permutation_generators(gens, n, f"symmetric({n})")


def alternating(n: int) -> Group:
    _need(n >= 1, "degree must be >= 1")
    _ceiling(max(1, math.factorial(n) // 2))
    gens = [[(i + 1) % 3 if i < 3 else i for i in range(n)]] if n >= 3 else []
    for k in range(3, n):
        # 3-cycles (0 1 k) generate A_n
        g = list(range(n))
        g[0], g[1], g[k] = 1, k, 0
        gens.append(g)
    return from_permutation_generators(gens, n, f"alternating({n})")


def s3() -> Group:
    G = dihedral(6)
    G.label = "s3"
    return G


def s4() -> Group:
    return from_permutation_generators([[1, 2, 3, 0], [1, 0, 2, 3]], 4, "s4")


def a4() -> Group:
    return from_permutation_generators([[1, 2, 0, 3], [1, 0, 3, 2]], 4, "a4")


def direct_product(*factors: Group) -> Group:
    _need(len(factors) >= 1, "direct_product needs at least one factor")
    label = "direct_product(" + ",".join(f.label for f in factors) + ")"
    return core.direct_product(*factors, label=label)


# ---------------------------------------------------------------- actions


def _after(p: tuple, q: tuple) -> tuple:
    """``p ∘ q`` on image tuples: apply ``q`` first."""
    return tuple(p[i] for i in q)


def _matrix_perm(M: Sequence[Sequence[int]], p: int) -> tuple:
    M = np.asarray(M, dtype=np.int64) % p
    v = _vectors(p, M.shape[0])
    return tuple(_vec_index((v @ M.T) % p, p).tolist())


def _action_table(H: Group, gens: Sequence[int], perms: Sequence[tuple], degree: int) -> np.ndarray:
    table = extend_homomorphism(H, gens, perms, _after, tuple(range(degree)))
    return np.asarray(table, dtype=np.int64)


def _unit_perm(u: int, n: int) -> tuple:
    return tuple((u * x) % n for x in range(n))


def metacyclic(n: int, m: int, r: int) -> Group:
    """``Z_n ⋊ Z_m`` with the generator of ``Z_m`` acting as ``x -> r x``."""
    _need(n >= 1 and m >= 1, "orders must be positive")
    _need(math.gcd(r, n) == 1, f"{r} is not a unit mod {n}")
    _need(pow(r, m, n) == 1 % n, f"{r}^{m} is not 1 mod {n}")
    _ceiling(n * m)
    N, H = cyclic(n), cyclic(m)
    act = [_unit_perm(pow(r, h, n), n) for h in range(m)]
    return core.semidirect_product(N, H, act, label=f"metacyclic({n},{m},{r})")


def _mult_order(r: int, p: int) -> int:
    if math.gcd(r, p) != 1:
        return 0
    k, x = 1, r % p
    while x != 1 % p:
        x = x * r % p
        k += 1
    return k


def frobenius_metacyclic(p: int, q: int, r: int) -> Group:
    """``Z_p ⋊ Z_q`` with ``x -> r x``; ``r`` must have multiplicative order ``q`` mod ``p``."""
    _need(core.is_prime(p), f"{p} is not prime")
    _need(_mult_order(r, p) == q, f"{r} has multiplicative order {_mult_order(r, p)} mod {p}, not {q}")
    G = metacyclic(p, q, r)
    G.label = f"frobenius_metacyclic({p},{q},{r})"
    return G


def diagonal_frobenius(p: int, k: int, q: int, r: int) -> Group:
    """``(Z_p)^k ⋊ Z_q`` with ``x -> r x`` on every coordinate."""
    _need(core.is_prime(p), f"{p} is not prime")
    _need(_mult_order(r, p) == q, f"{r} has multiplicative order {_mult_order(r, p)} mod {p}, not {q}")
    _ceiling(p**k * q)
    N, H = elementary_abelian(p, k), cyclic(q)
    act = [tuple(((_vectors(p, k) * pow(r, h, p)) % p @ (p ** np.arange(k))).tolist()) for h in range(q)]
    return core.semidirect_product(N, H, act, label=f"diagonal_frobenius({p},{k},{q},{r})")


def wreath_pp(p: int) -> Group:
    """Regular wreath product ``Z_p ≀ Z_p`` of order ``p^(p+1)``."""
    _need(core.is_prime(p), f"{p} is not prime")
    if p ** (p + 1) > core.max_order():
        raise ClosureTooLarge(f"Z_{p} wr Z_{p} has order {p ** (p + 1)} > {core.max_order()}")
    N, H = elementary_abelian(p, p), cyclic(p)
    v = _vectors(p, p)
    act = [tuple(_vec_index(np.roll(v, h, axis=1), p).tolist()) for h in range(p)]
    return core.semidirect_product(N, H, act, label=f"wreath_pp({p})")


def quaternion_on_cyclic(n: int, ua: int, ub: int) -> Group:
    """``Z_n ⋊ Q8`` where the Q8 generators ``a, b`` act as multiplication by ``ua, ub``."""
    _need(math.gcd(ua, n) == 1 and math.gcd(ub, n) == 1, "multipliers must be units")
    _ceiling(8 * n)
    Q = generalized_quaternion(8)
    act = _action_table(Q, [1, 4], [_unit_perm(ua, n), _unit_perm(ub, n)], n)
    return core.semidirect_product(cyclic(n), Q, act, label=f"quaternion_on_cyclic({n},{ua},{ub})")


_F9_MATRICES = {
    # fixed-point-free linear groups on F_3^2
    "z4": ([[0, 2], [1, 0]],),
    "z8": ([[0, 1], [1, 2]],),
    "q8": ([[0, 2], [1, 0]], [[1, 1], [1, 2]]),
}


def _f9(kind: str) -> Group:
    mats = _F9_MATRICES[kind]
    H = {"z4": lambda: cyclic(4), "z8": lambda: cyclic(8), "q8": lambda: generalized_quaternion(8)}[kind]()
    gens = [1] if len(mats) == 1 else [1, 4]
    act = _action_table(H, gens, [_matrix_perm(M, 3) for M in mats], 9)
    return core.semidirect_product(elementary_abelian(3, 2), H, act, label=f"f9_{kind}")


def f9_z4() -> Group:
    return _f9("z4")


def f9_z8() -> Group:
    return _f9("z8")


def f9_q8() -> Group:
    return _f9("q8")


def gl2(p: int) -> Group:
    """``GL_2(F_p)`` as a matrix group."""
    _need(core.is_prime(p), f"{p} is not prime")
    _ceiling((p * p - 1) * (p * p - p))
    g = ((1, 1), (0, 1))
    r = next(x for x in range(1, p) if _mult_order(x, p) == p - 1) if p > 2 else 1
    d = ((r, 0), (0, 1))
    w = ((0, 1), (1, 0))

    def mm(x, y):
        return tuple(
            tuple(sum(x[i][k] * y[k][j] for k in range(2)) % p for j in range(2)) for i in range(2)
        )

    G, _ = core.closure_group([g, d, w], mm, ((1, 0), (0, 1)), f"gl2({p})")
    return G


def _sl2_elements(p: int) -> list[tuple]:
    return [
        ((a, b), (c, d))
        for a in range(p)
        for b in range(p)
        for c in range(p)
        for d in range(p)
        if (a * d - b * c) % p == 1
    ]


def _embed_in_sl2(H: Group, p: int) -> list[tuple] | None:
    """Matrices in ``SL_2(p)`` for ``H``'s generators giving a faithful representation."""

    def mm(x, y):
        return tuple(tuple(sum(x[i][k] * y[k][j] for k in range(2)) % p for j in range(2)) for i in range(2))

    one = ((1, 0), (0, 1))
    elements = _sl2_elements(p)

    def order(m):
        k, x = 1, m
        while x != one:
            x, k = mm(x, m), k + 1
        return k

    by_order: dict[int, list] = {}
    for m in elements:
        by_order.setdefault(order(m), []).append(m)
    gens = core.minimal_generating_sequence(H)

    def search(i, imgs):
        if i == len(gens):
            try:
                table = extend_homomorphism(H, gens, imgs, mm, one)
            except NotAnAction:
                return None
            return imgs if len(set(table)) == H.order else None
        for m in by_order.get(int(H.ord[gens[i]]), []):
            found = search(i + 1, imgs + [m])
            if found is not None:
                return found
        return None

    found = search(0, [])
    return None if found is None else [*zip(gens, found)]


def _frobenius_on_plane(H: Group, p: int, label: str) -> Group:
    _need(core.is_prime(p) and p >= 5, f"need a prime >= 5, got {p}")
    _ceiling(H.order * p * p)
    pairs = _embed_in_sl2(H, p)
    _need(pairs is not None, f"{H.label} does not embed in SL_2({p})")
    gens = [g for g, _ in pairs]
    act = _action_table(H, gens, [_matrix_perm(M, p) for _, M in pairs], p * p)
    return core.semidirect_product(elementary_abelian(p, 2), H, act, label=label)


def dicyclic12_on_plane(p: int) -> Group:
    """``(Z_p)^2 ⋊ Dic12`` through ``Dic12 < SL_2(p)``; Frobenius for primes ``p >= 5``."""
    return _frobenius_on_plane(dicyclic(12), p, f"dicyclic12_on_plane({p})")


def sl23_on_plane(p: int) -> Group:
    """``(Z_p)^2 ⋊ SL_2(3)`` through ``SL_2(3) < SL_2(p)``; Frobenius for primes ``p >= 5``."""
    return _frobenius_on_plane(sl2_3(), p, f"sl23_on_plane({p})")


# ---------------------------------------------------------------- SL2(3) and relatives


@lru_cache(maxsize=None)
def _q8_cycling_automorphism() -> tuple:
    Q = generalized_quaternion(8)
    # a -> b, b -> ab: cycles i -> j -> k
    img = extend_homomorphism(Q, [1, 4], [4, 5], lambda x, y: int(Q.mul[x, y]), 0)
    return tuple(img)


def sl2_3() -> Group:
    """``SL_2(3)`` built as ``Q8 ⋊ Z3``."""
    Q = generalized_quaternion(8)
    phi = _q8_cycling_automorphism()
    act = [tuple(range(8)), phi, _after(phi, phi)]
    return core.semidirect_product(Q, cyclic(3), act, label="sl2_3")


class _R2:
    """Exact numbers ``a + b*sqrt(2)`` with rational ``a, b``."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a, self.b = Fraction(a), Fraction(b)

    def __add__(self, o):
        return _R2(self.a + o.a, self.b + o.b)

    def __sub__(self, o):
        return _R2(self.a - o.a, self.b - o.b)

    def __mul__(self, o):
        return _R2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    def __eq__(self, o):
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))


def _qmul(x: tuple, y: tuple) -> tuple:
    w1, x1, y1, z1 = x
    w2, x2, y2, z2 = y
    return (
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    )


def binary_octahedral() -> Group:
    """The binary octahedral group (order 48) as exact unit quaternions.

    Generated by ``(1+i)/sqrt(2)`` and ``(1+i+j+k)/2``.
    """
    h = Fraction(1, 2)
    zero, half, rh = _R2(0), _R2(h), _R2(0, h)  # rh = 1/sqrt(2)
    g1 = (rh, rh, zero, zero)
    g2 = (half, half, half, half)
    one = (_R2(1), zero, zero, zero)
    G, _ = core.closure_group([g1, g2], _qmul, one, "binary_octahedral")
    return G


def _sign_character(G: Group) -> list[int]:
    """0/1 image under ``G -> G/G'`` when ``G/G'`` has order 2."""
    D = structure.derived_subgroup(G)
    _need(2 * len(D) == G.order, f"{G.label} has no index-2 derived subgroup")
    return [0 if x in D else 1 for x in range(G.order)]


def s4_ext(r: int) -> Group:
    """``V ⋊ ((Z3)^(r+1) ⋊ Z2)``: an S4-type group with ``O_3`` of rank ``r``.

    ``Z2`` inverts every ``Z3`` factor; only the first ``Z3`` factor and ``Z2``
    act on the Klein four-group ``V``, the rest is ``O_3``.
    """
    _need(r >= 0, "rank must be >= 0")
    _ceiling(24 * 3**r)
    H = diagonal_frobenius(3, r + 1, 2, 2)
    k = r + 1
    # generators of H: unit vectors e_i (index 3^i) and the Z2 generator (index 3^k)
    gens = [3**i for i in range(k)] + [3**k]
    t = _matrix_perm([[0, 1], [1, 1]], 2)
    s = _matrix_perm([[0, 1], [1, 0]], 2)
    perms = [t] + [tuple(range(4))] * r + [s]
    act = _action_table(H, gens, perms, 4)
    return core.semidirect_product(elementary_abelian(2, 2), H, act, label=f"s4_ext({r})")


def gl23tilde_ext(r: int) -> Group:
    """``(Z3)^r ⋊ 2O`` with the binary octahedral group acting through ``2O/SL_2(3)`` by inversion."""
    _need(r >= 0, "rank must be >= 0")
    _ceiling(48 * 3**r)
    B = binary_octahedral()
    sign = _sign_character(B)
    N = elementary_abelian(3, r)
    neg = tuple(_vec_index((-_vectors(3, r)) % 3, 3).tolist()) if r else (0,)
    ident = tuple(range(N.order))
    act = [neg if s else ident for s in sign]
    return core.semidirect_product(N, B, act, label=f"gl23tilde_ext({r})")


# ---------------------------------------------------------------- family expressions


def _ceiling(order: int) -> None:
    if order > core.max_order():
        raise ClosureTooLarge(f"order {order} exceeds ceiling {core.max_order()}")


@dataclass(frozen=True)
class Family:
    build: Callable[..., Group]
    order: Callable[..., int]
    kinds: str  # one char per argument: 'i' integer, 'g' group expression, '*' groups


FAMILIES: dict[str, Family] = {
    "cyclic": Family(cyclic, lambda n: n, "i"),
    "dihedral": Family(dihedral, lambda n: n, "i"),
    "generalized_quaternion": Family(generalized_quaternion, lambda n: n, "i"),
    "dicyclic": Family(dicyclic, lambda n: n, "i"),
    "elementary_abelian": Family(elementary_abelian, lambda p, r: p**r, "ii"),
    "extraspecial_exponent_p": Family(extraspecial_exponent_p, lambda p: p**3, "i"),
    "symmetric": Family(symmetric, lambda n: math.factorial(n), "i"),
    "alternating": Family(alternating, lambda n: max(1, math.factorial(n) // 2), "i"),
    "s3": Family(s3, lambda: 6, ""),
    "s4": Family(s4, lambda: 24, ""),
    "a4": Family(a4, lambda: 12, ""),
    "sl2_3": Family(sl2_3, lambda: 24, ""),
    "binary_octahedral": Family(binary_octahedral, lambda: 48, ""),
    "metacyclic": Family(metacyclic, lambda n, m, r: n * m, "iii"),
    "frobenius_metacyclic": Family(frobenius_metacyclic, lambda p, q, r: p * q, "iii"),
    "diagonal_frobenius": Family(diagonal_frobenius, lambda p, k, q, r: p**k * q, "iiii"),
    "wreath_pp": Family(wreath_pp, lambda p: p ** (p + 1), "i"),
    "quaternion_on_cyclic": Family(quaternion_on_cyclic, lambda n, a, b: 8 * n, "iii"),
    "f9_z4": Family(f9_z4, lambda: 36, ""),
    "f9_z8": Family(f9_z8, lambda: 72, ""),
    "f9_q8": Family(f9_q8, lambda: 72, ""),
    "gl2": Family(gl2, lambda p: (p * p - 1) * (p * p - p), "i"),
    "s4_ext": Family(s4_ext, lambda r: 24 * 3**r, "i"),
    "gl23tilde_ext": Family(gl23tilde_ext, lambda r: 48 * 3**r, "i"),
    "dicyclic12_on_plane": Family(dicyclic12_on_plane, lambda p: 12 * p * p, "i"),
    "sl23_on_plane": Family(sl23_on_plane, lambda p: 24 * p * p, "i"),
    "direct_product": Family(direct_product, lambda *orders: math.prod(orders), "*"),
}


@dataclass(frozen=True)
class Expr:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        fam = FAMILIES.get(self.name)
        if not self.args and fam is not None and fam.kinds == "":
            return self.name
        return f"{self.name}(" + ",".join(str(a) for a in self.args) + ")"


_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[(),:]))")


def parse_family(text: str) -> Expr:
    """Parse ``name``, ``name(args)`` or ``name:args`` into an :class:`Expr`."""
    text = text.strip()
    m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)", text, re.S)
    if m:
        text = f"{m.group(1)}({m.group(2)})"
    tokens = []
    pos = 0
    while pos < len(text):
        t = _TOKEN.match(text, pos)
        if not t or t.end() == pos:
            raise UnknownFamily(f"cannot parse family expression {text!r} at {pos}")
        pos = t.end()
        kind = t.lastgroup
        tokens.append((kind, t.group(kind)))
    tokens = [t for t in tokens if t[1] is not None]
    expr, rest = _parse_expr(tokens, text)
    if rest:
        raise UnknownFamily(f"trailing input in family expression {text!r}")
    _check_expr(expr)
    return expr


def _parse_expr(tokens, text):
    if not tokens or tokens[0][0] != "name":
        raise UnknownFamily(f"expected a family name in {text!r}")
    name = tokens[0][1]
    tokens = tokens[1:]
    args = []
    if tokens and tokens[0] == ("sym", "("):
        tokens = tokens[1:]
        if tokens and tokens[0] == ("sym", ")"):
            return Expr(name, ()), tokens[1:]
        while True:
            if tokens and tokens[0][0] == "int":
                args.append(int(tokens[0][1]))
                tokens = tokens[1:]
            else:
                sub, tokens = _parse_expr(tokens, text)
                args.append(sub)
            if not tokens:
                raise UnknownFamily(f"unbalanced parentheses in {text!r}")
            if tokens[0] == ("sym", ","):
                tokens = tokens[1:]
                continue
            if tokens[0] == ("sym", ")"):
                tokens = tokens[1:]
                break
            raise UnknownFamily(f"unexpected {tokens[0][1]!r} in {text!r}")
    return Expr(name, tuple(args)), tokens


def _check_expr(expr: Expr) -> None:
    fam = FAMILIES.get(expr.name)
    if fam is None:
        raise UnknownFamily(f"unknown family {expr.name!r}; known: {', '.join(sorted(FAMILIES))}")
    if fam.kinds == "*":
        _need(len(expr.args) >= 1, f"{expr.name} needs at least one group argument")
        for a in expr.args:
            _need(isinstance(a, Expr), f"{expr.name} takes group expressions, got {a!r}")
            _check_expr(a)
        return
    _need(len(expr.args) == len(fam.kinds), f"{expr.name} takes {len(fam.kinds)} argument(s), got {len(expr.args)}")
    for a in expr.args:
        _need(isinstance(a, int), f"{expr.name} takes integer arguments, got {a}")


def _as_expr(spec: "str | Expr | dict") -> Expr:
    if isinstance(spec, Expr):
        return spec
    if isinstance(spec, str):
        return parse_family(spec)
    if isinstance(spec, dict):
        args = tuple(_as_expr(a) if isinstance(a, (dict, str)) else int(a) for a in spec.get("params", []))
        expr = Expr(spec["name"], args)
        _check_expr(expr)
        return expr
    raise BadParameter(f"cannot interpret family descriptor {spec!r}")


def family_order(spec: "str | Expr | dict") -> int:
    expr = _as_expr(spec)
    fam = FAMILIES[expr.name]
    if fam.kinds == "*":
        return fam.order(*(family_order(a) for a in expr.args))
    return fam.order(*expr.args)


def build_family(spec: "str | Expr | dict") -> Group:
    expr = _as_expr(spec)
    fam = FAMILIES[expr.name]
    if fam.kinds == "*":
        G = fam.build(*(build_family(a) for a in expr.args))
    else:
        G = fam.build(*expr.args)
    G.label = str(expr)
    return G


# ---------------------------------------------------------------- corpus


@dataclass
class CorpusSpec:
    families: list = field(default_factory=list)
    ingest: list[str] = field(default_factory=list)
    max_order: int | None = None
    dedup: bool = False

    @classmethod
    def from_json(cls, data: dict, base_dir: str | None = None) -> "CorpusSpec":
        ingest = [
            p if base_dir is None or os.path.isabs(p) else os.path.join(base_dir, p)
            for p in data.get("ingest", [])
        ]
        return cls(
            families=list(data.get("families", [])),
            ingest=ingest,
            max_order=data.get("max_order"),
            dedup=bool(data.get("dedup", False)),
        )

    @classmethod
    def load(cls, path: str | os.PathLike) -> "CorpusSpec":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.from_json(data, os.path.dirname(os.path.abspath(path)))


def default_corpus_spec() -> CorpusSpec:
    text = resources.files("tidykit").joinpath("data/default_corpus.json").read_text(encoding="utf-8")
    return CorpusSpec.from_json(json.loads(text))


@dataclass(frozen=True)
class CorpusEntry:
    """A corpus member that can be rebuilt anywhere, e.g. in a worker process."""

    label: str
    kind: str  # "family" or "file"
    source: str

    def build(self) -> Group:
        if self.kind == "file":
            return core.load_group(self.source)
        return build_family(self.source)

    def repro_args(self) -> str:
        flag = "--input" if self.kind == "file" else "--family"
        return f"{flag} '{self.source}'"


def corpus_entries(spec: CorpusSpec) -> list[CorpusEntry]:
    """Corpus members in spec order; families over the order limit are dropped unbuilt."""
    limit = spec.max_order if spec.max_order is not None else core.max_order()
    out = []
    for item in spec.families:
        expr = _as_expr(item)
        if family_order(expr) > limit:
            continue
        out.append(CorpusEntry(str(expr), "family", str(expr)))
    for path in spec.ingest:
        out.append(CorpusEntry(f"file({path})", "file", path))
    return out


def build_corpus(spec: CorpusSpec) -> list[Group]:
    return [G for _, G in build_corpus_entries(spec)]


def build_corpus_entries(spec: CorpusSpec) -> list[tuple[CorpusEntry, Group]]:
    limit = spec.max_order if spec.max_order is not None else core.max_order()
    kept: list[tuple[CorpusEntry, Group]] = []
    for entry in corpus_entries(spec):
        G = entry.build()
        if G.order > limit:
            continue
        if spec.dedup and G.order <= core.DEFAULT_ISO_BOUND:
            if any(H.order == G.order and are_isomorphic(G, H) for _, H in kept):
                continue
        kept.append((entry, G))
    return kept
