"""Brute-force tidiness: Cyc sets and the subgroup test on each of them."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import ElementSet, Group, closure_violation, prime_factors
from .structure import _memo


class Mode(str, Enum):
    ALL_ELEMENTS = "all_elements"
    PRIME_POWER_ONLY = "prime_power_only"


@dataclass(frozen=True)
class Witness:
    element: int
    cyc: ElementSet
    pair: tuple[int, int]  # (g, h) in cyc with g*h outside it

    def to_json(self) -> dict:
        return {"x": self.element, "cyc": self.cyc.indices().tolist(), "pair": list(self.pair)}


@dataclass
class TidinessReport:
    tidy: bool
    mode: Mode
    witnesses: list[Witness] = field(default_factory=list)
    checked: int = 0
    seconds: float = 0.0

    @property
    def verdict(self) -> str:
        return "tidy" if self.tidy else "not_tidy"


def _cyc_masks(G: Group) -> np.ndarray:
    """Row ``x`` is the boolean mask of ``Cyc_G(x)``.

    ``Cyc_G(x)`` is the union of the cyclic subgroups that contain ``x``.
    Cyclic subgroups are processed once each: every generator ``z`` of the
    same subgroup contributes the same closure.
    """

    def compute():
        n = G.order
        out = np.zeros((n, n), dtype=bool)
        seen: set[int] = set()
        for z in range(n):
            cz = G.cyc_closure[z]
            if cz.bits in seen:
                continue
            seen.add(cz.bits)
            idx = cz.indices()
            out[np.ix_(idx, idx)] = True  # every member of <z> gains all of <z>
        return out

    return _memo(G, ("cyc_masks",), compute)


def cyc_set(G: Group, x: int) -> ElementSet:
    G.check_index(x)
    return ElementSet.from_mask(G, _cyc_masks(G)[x])


def cyc_set_pairwise(G: Group, x: int) -> ElementSet:
    """``{g : <x, g> is cyclic}`` evaluated pair by pair (slow reference)."""
    from .core import generated_subgroup

    G.check_index(x)
    keep = []
    for g in range(G.order):
        H = generated_subgroup(G, [x, g])
        if int(G.ord[H.indices()].max()) == len(H):
            keep.append(g)
    return G.set(keep)


def is_tidy_at(G: Group, x: int) -> bool:
    return closure_violation(G, cyc_set(G, x)) is None


def _elements(G: Group, mode: Mode) -> list[int]:
    if mode is Mode.ALL_ELEMENTS:
        return list(range(G.order))
    return [x for x in range(1, G.order) if len(prime_factors(int(G.ord[x]))) == 1]


def is_tidy_bruteforce(
    G: Group, mode: Mode | str = Mode.ALL_ELEMENTS, *, all_witnesses: bool = False
) -> TidinessReport:
    """Decide tidiness by testing every selected ``Cyc_G(x)`` for closure.

    Witnesses come in ascending ``x``; each carries the lexicographically
    first offending pair.  Only the first is collected unless
    ``all_witnesses`` is set.
    """
    mode = Mode(mode)
    start = time.perf_counter()
    masks = _cyc_masks(G)
    report = TidinessReport(tidy=True, mode=mode)
    seen: dict[bytes, tuple[int, int] | None] = {}
    for x in _elements(G, mode):
        report.checked += 1
        key = masks[x].tobytes()
        if key not in seen:
            seen[key] = _first_bad_pair(G, masks[x])
        bad = seen[key]
        if bad is None:
            continue
        report.tidy = False
        report.witnesses.append(Witness(x, ElementSet.from_mask(G, masks[x]), bad))
        if not all_witnesses:
            break
    report.seconds = time.perf_counter() - start
    return report


def _first_bad_pair(G: Group, mask: np.ndarray) -> tuple[int, int] | None:
    idx = np.flatnonzero(mask)
    prod = G.mul[np.ix_(idx, idx)]
    bad = ~mask[prod]
    if not bad.any():
        return None
    i, j = np.argwhere(bad)[0]
    return int(idx[i]), int(idx[j])


def is_tidy(G: Group) -> bool:
    """Cached oracle verdict over prime-power elements."""
    return _memo(G, ("oracle_tidy",), lambda: is_tidy_bruteforce(G, Mode.PRIME_POWER_ONLY).tidy)

