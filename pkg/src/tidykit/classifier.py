"""Structural tidiness deciders and checkers for the sufficient conditions.

Nothing here looks at Cyc sets.  Verdicts come from Sylow shapes, cores,
hypercentres, Frobenius kernels and isomorphism against canonical groups
from :mod:`tidykit.catalog`, so they can be compared against the
brute-force oracle in :mod:`tidykit.tidy`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations

from . import catalog
from .core import (
    ElementSet,
    Group,
    are_isomorphic,
    as_group,
    generated_subgroup,
    is_normal,
    is_prime_power_of,
    is_subgroup,
    join,
    prime_factors,
    quotient,
    subgroup_view,
)
from .errors import NoMatch, NotAPGroup, NotPqGroup, NotSolvable, PreconditionError
from .structure import (
    center,
    centralizer,
    derived_subgroup,
    exponent,
    fitting_subgroup,
    frobenius_kernel,
    hall_complement,
    hall_pq,
    hall_subgroup,
    hypercenter,
    is_cyclic,
    is_nilpotent,
    is_solvable,
    normal_subgroups,
    p_core,
    sylow,
)

# ---------------------------------------------------------------- canonical targets


@lru_cache(maxsize=None)
def _canonical(expr: str) -> Group:
    return catalog.build_family(expr)


def _iso(G: Group, expr: str) -> bool:
    target = _canonical(expr)
    if G.order != target.order:
        return False
    return are_isomorphic(G, target, bound=max(G.order, 96))


def _is_klein(G: Group) -> bool:
    return G.order == 4 and exponent(G) == 2


def _is_q8(G: Group) -> bool:
    return _iso(G, "generalized_quaternion(8)")


def _sub(G: Group, S: ElementSet) -> Group:
    return as_group(G, S)


# ---------------------------------------------------------------- p-groups


class Shape(str, Enum):
    CYCLIC = "cyclic"
    EXPONENT_P = "exponent_p"
    DIHEDRAL = "dihedral"
    GENERALIZED_QUATERNION = "generalized_quaternion"


@dataclass(frozen=True)
class PGroupShape:
    prime: int
    order: int
    shapes: frozenset[Shape]
    tidy: bool


def classify_p_group(P: Group, p: int | None = None) -> PGroupShape:
    """Match a ``p``-group against the four tidy shapes.

    All matching shapes are reported; ``Z2`` is both cyclic and of
    exponent 2.  Groups of order at most ``p`` count as tidy.
    """
    n = P.order
    if p is None:
        primes = prime_factors(n)
        if len(primes) > 1:
            raise NotAPGroup(f"order {n} is not a prime power")
        p = primes[0] if primes else 2
    if not is_prime_power_of(n, p):
        raise NotAPGroup(f"order {n} is not a power of {p}")
    shapes = set()
    if is_cyclic(P):
        shapes.add(Shape.CYCLIC)
    if n > 1 and exponent(P) == p:
        shapes.add(Shape.EXPONENT_P)
    if p == 2 and n >= 8 and not shapes:
        involutions = int((P.ord == 2).sum())
        if involutions == n // 2 + 1 and _iso(P, f"dihedral({n})"):
            shapes.add(Shape.DIHEDRAL)
        elif involutions == 1 and _iso(P, f"generalized_quaternion({n})"):
            shapes.add(Shape.GENERALIZED_QUATERNION)
    return PGroupShape(p, n, frozenset(shapes), bool(shapes) or n <= p)


def sylow_shape(G: Group, p: int) -> PGroupShape:
    return classify_p_group(_sub(G, sylow(G, p)), p)


# ---------------------------------------------------------------- {p,q}-groups


class PqCase(str, Enum):
    NILPOTENT = "nilpotent"
    HYPERFROBENIUS = "hyperfrobenius"
    S4TYPE = "s4type"
    SL23TYPE = "sl23type"
    GL23TILDE = "gl23tilde"
    NOT_TIDY = "not_tidy"

    @property
    def number(self) -> int | None:
        return _CASE_NUMBERS.get(self)


_CASE_NUMBERS = {
    PqCase.NILPOTENT: 1,
    PqCase.HYPERFROBENIUS: 2,
    PqCase.S4TYPE: 3,
    PqCase.SL23TYPE: 4,
    PqCase.GL23TILDE: 5,
}


@dataclass
class PqClassification:
    case: PqCase
    primes: tuple[int, int]
    details: dict = field(default_factory=dict)
    failed: str | None = None

    @property
    def tidy(self) -> bool:
        return self.case is not PqCase.NOT_TIDY


class ConsequenceViolated(NoMatch):
    """A matched case failed one of its implied centre conditions."""


def _frobenius_over(Q: Group, kernel: ElementSet, complement_order: int | None = None) -> str | None:
    """``None`` if ``Q`` is Frobenius with exactly this kernel, else why not."""
    K = frobenius_kernel(Q)
    if K is None:
        return "not_frobenius"
    if K != kernel:
        return "wrong_kernel"
    if complement_order is not None and Q.order // len(K) != complement_order:
        return "complement_order"
    return None


def _two_three_clause(G: Group, which: str) -> str | None:
    """Check one of the three {2,3} shapes; returns the first failed condition."""
    if set(G.primes()) != {2, 3}:
        return "primes"
    O2, O3 = p_core(G, 2), p_core(G, 3)
    if which == "s4":
        if not _is_klein(_sub(G, O2)):
            return "o2_klein"
        if not _iso(quotient(G, O3).child, "s4"):
            return "mod_o3_s4"
    elif which == "sl23":
        if O2 != sylow(G, 2):
            return "o2_sylow"
        if not _is_q8(_sub(G, O2)):
            return "o2_q8"
        if not _iso(quotient(G, O3).child, "sl2_3"):
            return "mod_o3_sl23"
        return None
    else:
        if not _is_q8(_sub(G, O2)):
            return "o2_q8"
        if not _iso(quotient(G, O3).child, "binary_octahedral"):
            return "mod_o3_binary_octahedral"
    qm = quotient(G, O2)
    why = _frobenius_over(qm.child, qm.image(sylow(G, 3)), 2)
    return None if why is None else f"mod_o2_{why}"


def _hyperfrobenius(G: Group, kernel_prime: int, center_prime: int) -> dict | None:
    Z = hypercenter(G)
    if not is_prime_power_of(len(Z), center_prime):
        return None
    qm = quotient(G, Z)
    if _frobenius_over(qm.child, qm.image(sylow(G, kernel_prime))) is not None:
        return None
    return {
        "kernel_prime": kernel_prime,
        "hypercenter_prime": center_prime,
        "hypercenter_order": len(Z),
        # records whether the hypercentre is the whole Sylow subgroup
        "hypercenter_is_sylow": len(Z) == len(sylow(G, center_prime)),
    }


def classify_pq_group(G: Group) -> PqClassification:
    """Decide tidiness of a group whose order has exactly two prime divisors.

    Sylow shapes are checked first; then the nilpotent, hyper-Frobenius
    (both orientations), S4, SL2(3) and binary-octahedral shapes in that
    order.  The first match wins.
    """
    primes = G.primes()
    if len(primes) != 2:
        raise NotPqGroup(f"order {G.order} has {len(primes)} prime divisors")
    if not is_solvable(G):
        raise NotSolvable(f"{G.label or 'group'} is not solvable")
    p, q = primes
    pair = (p, q)
    for r in pair:
        shape = sylow_shape(G, r)
        if not shape.tidy:
            return PqClassification(PqCase.NOT_TIDY, pair, {"prime": r}, failed="sylow")

    if is_nilpotent(G):
        return PqClassification(PqCase.NILPOTENT, pair)
    for kernel_prime, center_prime in ((p, q), (q, p)):
        details = _hyperfrobenius(G, kernel_prime, center_prime)
        if details is not None:
            return PqClassification(PqCase.HYPERFROBENIUS, pair, details)
    if pair != (2, 3):
        return PqClassification(PqCase.NOT_TIDY, pair, failed="no_case")

    O2, O3 = p_core(G, 2), p_core(G, 3)
    Z, ZG = hypercenter(G), center(G)
    if _two_three_clause(G, "s4") is None:
        if len(ZG) != 1:
            raise ConsequenceViolated(f"{G.label}: S4-type group with nontrivial centre")
        return PqClassification(PqCase.S4TYPE, pair, {"o3_order": len(O3)})
    if _two_three_clause(G, "sl23") is None:
        zo2 = centralizer(G, O2) & O2
        if Z != join(G, zo2, O3):
            raise ConsequenceViolated(f"{G.label}: SL2(3)-type group with unexpected hypercentre")
        return PqClassification(PqCase.SL23TYPE, pair, {"o3_order": len(O3)})
    if _two_three_clause(G, "gl23tilde") is None:
        zo2 = centralizer(G, O2) & O2
        if not (Z == ZG == zo2):
            raise ConsequenceViolated(f"{G.label}: binary-octahedral-type group with unexpected centre")
        return PqClassification(PqCase.GL23TILDE, pair, {"o3_order": len(O3)})
    return PqClassification(PqCase.NOT_TIDY, pair, failed="no_case")


# ---------------------------------------------------------------- any solvable group


@dataclass
class StructuralVerdict:
    tidy: bool
    explanation: str
    failing_pair: tuple[int, int] | None = None
    classification: PqClassification | PGroupShape | None = None


def is_tidy_structural(G: Group) -> StructuralVerdict:
    """Tidiness of a solvable group from its Hall subgroups on two primes."""
    if not is_solvable(G):
        raise NotSolvable(f"{G.label or 'group'} is not solvable")
    primes = G.primes()
    if len(primes) <= 1:
        shape = classify_p_group(G, primes[0] if primes else None)
        names = ", ".join(sorted(s.value for s in shape.shapes)) or "no tidy shape"
        return StructuralVerdict(shape.tidy, f"p-group: {names}", classification=shape)
    if len(primes) == 2:
        c = classify_pq_group(G)
        why = c.case.value if c.tidy else f"not tidy ({c.failed})"
        return StructuralVerdict(c.tidy, f"{{{primes[0]},{primes[1]}}}-group: {why}", None if c.tidy else tuple(primes), c)
    for p, q in combinations(primes, 2):
        H = _sub(G, hall_pq(G, p, q))
        c = classify_pq_group(H)
        if not c.tidy:
            return StructuralVerdict(False, f"Hall {{{p},{q}}}-subgroup is not tidy ({c.failed})", (p, q), c)
    return StructuralVerdict(True, f"all {math.comb(len(primes), 2)} Hall two-prime subgroups tidy")


# ---------------------------------------------------------------- centralizer quotients


@dataclass(frozen=True)
class CentralizerQuotientCase:
    prime: int
    case: int
    centralizer: ElementSet  # C_H(O_p(G)) for a Hall p-complement H
    shape: str


def _require_tidy_solvable(G: Group) -> None:
    from .tidy import is_tidy

    if not is_solvable(G):
        raise PreconditionError(f"{G.label or 'group'} is not solvable")
    if not is_tidy(G):
        raise PreconditionError(f"{G.label or 'group'} is not tidy")


def centralizer_quotient_case(G: Group, p: int) -> CentralizerQuotientCase:
    """Identify ``G/C`` where ``C`` centralises ``O_p(G)`` inside a Hall ``p'``-subgroup.

    Raises :class:`NoMatch` if ``C`` is not normal or no shape fits.
    """
    _require_tidy_solvable(G)
    Op = p_core(G, p)
    if len(Op) == 1:
        raise PreconditionError(f"O_{p} is trivial")
    H = hall_complement(G, p)
    C = centralizer(G, Op) & H
    if not is_normal(G, C):
        raise NoMatch(f"{G.label}: centraliser of O_{p} in a Hall {p}'-subgroup is not normal")
    qm = quotient(G, C)
    Q = qm.child
    if is_prime_power_of(Q.order, p):
        return CentralizerQuotientCase(p, 1, C, "p-group")
    if _frobenius_over(Q, qm.image(Op)) is None:
        return CentralizerQuotientCase(p, 2, C, "frobenius")
    O2 = _sub(G, p_core(G, 2))
    if p == 2 and _is_q8(O2):
        for name in ("sl2_3", "binary_octahedral"):
            if _iso(Q, name):
                return CentralizerQuotientCase(p, 3, C, name)
    if p == 2 and _is_klein(O2) and _iso(Q, "s4"):
        return CentralizerQuotientCase(p, 4, C, "s4")
    if p == 3 and (_is_klein(O2) or _is_q8(O2)):
        sylow3 = qm.image(sylow(G, 3))
        P = sylow(G, 3)
        if (
            _frobenius_over(Q, sylow3, 2) is None
            and len(P) == 3 * len(Op)
            and _iso(quotient(G, join(G, Op, C)).child, "s3")
        ):
            return CentralizerQuotientCase(p, 5, C, "frobenius_sylow3_by_2")
    raise NoMatch(f"{G.label}: G/C matches no centraliser-quotient shape for p={p}")


# ---------------------------------------------------------------- coprime action on O_p


class CoprimeAction(str, Enum):
    CENTRALIZES = "centralizes"
    FROBENIUS_ACTION = "frobenius_action"
    SL23_EXCEPTION = "sl23_exception"


def coprime_action_case(G: Group, p: int, x: int) -> CoprimeAction:
    """How an element of order prime to ``p`` acts on ``O_p(G)`` in a tidy group."""
    from .tidy import is_tidy

    G.check_index(x)
    if not is_tidy(G):
        raise PreconditionError(f"{G.label or 'group'} is not tidy")
    Op = p_core(G, p)
    if len(Op) == 1:
        raise PreconditionError(f"O_{p} is trivial")
    if int(G.ord[x]) % p == 0:
        raise PreconditionError(f"element {x} has order divisible by {p}")
    cent = centralizer(G, Op)
    if x in cent:
        return CoprimeAction.CENTRALIZES
    X = join(G, [x], Op)
    view = subgroup_view(G, X)
    kernel = view.restrict(G.cyc_closure[x] & cent)
    qm = quotient(view.group, kernel)
    if _frobenius_over(qm.child, qm.image(view.restrict(Op))) is None:
        return CoprimeAction.FROBENIUS_ACTION
    if p == 2 and _is_q8(_sub(G, Op)) and _iso(qm.child, "sl2_3"):
        return CoprimeAction.SL23_EXCEPTION
    raise NoMatch(f"{G.label}: element {x} acts on O_{p} in none of the three ways")


# ---------------------------------------------------------------- sufficient conditions


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    failed: str | None = None
    alternative: int | None = None  # which branch of a two-way condition held

    def __bool__(self) -> bool:
        return self.ok


def _fail(clause: str) -> CheckResult:
    return CheckResult(False, clause)


def _complement_search(Q: Group, A: ElementSet, B: ElementSet, test) -> ElementSet | None:
    """A complement ``U`` to the normal subgroup ``A`` of ``B`` with ``test(U)``.

    Tries a Hall subgroup when the orders are coprime, then cyclic
    subgroups, then subgroups generated by two elements.
    """
    want = len(B) // len(A)
    Bv = subgroup_view(Q, B)
    Bg, Ab = Bv.group, Bv.restrict(A)

    def fits(U: ElementSet) -> bool:
        return len(U) == want and len(U & Ab) == 1

    if math.gcd(len(A), want) == 1:
        U = hall_subgroup(Bg, prime_factors(want))
        if fits(U):
            return Bv.lift(U) if test(Bv.lift(U)) else None
    seen: set[int] = set()
    candidates = [Bg.cyc_closure[u] for u in range(Bg.order)]
    for U in candidates:
        if U.bits not in seen:
            seen.add(U.bits)
            if fits(U) and test(Bv.lift(U)):
                return Bv.lift(U)
    for u, v in combinations(range(Bg.order), 2):
        if Bg.ord[u] * Bg.ord[v] < want:
            continue
        U = generated_subgroup(Bg, [u, v])
        if U.bits not in seen:
            seen.add(U.bits)
            if fits(U) and test(Bv.lift(U)):
                return Bv.lift(U)
    return None


def check_frobenius_extension(G: Group, N: ElementSet) -> CheckResult:
    """Sufficient condition for tidiness via a Frobenius quotient over the Fitting subgroup.

    Requires ``N`` normal, properly inside and Hall in ``F(G)``, ``G/N``
    Frobenius with kernel ``F(G)/N`` and complement ``H/N``, and either
    ``H`` nilpotent or (``N`` Hall in ``H'N``, ``H'N/N`` complemented in
    ``H/N`` by some ``U/N``, ``H'`` and ``U`` nilpotent); plus tidy Sylow
    subgroups for the primes of ``|F(G)|``.
    """
    if not is_subgroup(G, N) or not is_normal(G, N):
        return _fail("normal")
    F = fitting_subgroup(G)
    if not N < F:
        return _fail("inside_fitting")
    if math.gcd(len(N), len(F) // len(N)) != 1:
        return _fail("hall_in_fitting")
    qm = quotient(G, N)
    Q = qm.child
    why = _frobenius_over(Q, qm.image(F))
    if why is not None:
        return _fail(f"quotient_{why}")
    if not is_solvable(Q):
        return _fail("complement_search")
    comp = Q.order * len(N) // len(F)  # a Frobenius complement has order coprime to the kernel
    Hq = hall_subgroup(Q, prime_factors(comp))
    if len(Hq) != comp:
        return _fail("complement_search")
    H = qm.preimage(Hq)
    for r in prime_factors(len(F)):
        if not sylow_shape(G, r).tidy:
            return _fail("sylow")
    Hg = _sub(G, H)
    if is_nilpotent(Hg):
        return CheckResult(True, alternative=1)
    D = derived_subgroup(G, H)
    DN = join(G, D, N)
    if math.gcd(len(N), len(DN) // len(N)) != 1:
        return _fail("hall_in_derived")
    if not is_nilpotent(_sub(G, D)):
        return _fail("derived_nilpotent")
    U = _complement_search(Q, qm.image(DN), Hq, lambda Uq: is_nilpotent(_sub(G, qm.preimage(Uq))))
    if U is None:
        return _fail("nilpotent_complement")
    return CheckResult(True, alternative=2)


def check_two_three_extension(G: Group) -> int | None:
    """Which of the three {2,3} shapes (1: S4, 2: SL2(3), 3: binary octahedral) ``G`` has."""
    if set(G.primes()) != {2, 3}:
        return None
    for number, which in ((1, "s4"), (2, "sl23"), (3, "gl23tilde")):
        if _two_three_clause(G, which) is None:
            return number
    return None


def frobenius_extension_candidates(G: Group) -> list[ElementSet]:
    """Normal subgroups worth feeding to :func:`check_frobenius_extension`."""
    F = fitting_subgroup(G)
    return [N for N in normal_subgroups(G) if N < F and math.gcd(len(N), len(F) // len(N)) == 1]
