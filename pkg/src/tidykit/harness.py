"""Corpus runner: verification suites, per-group records and JSON-lines reports."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

from . import classifier as cl
from .catalog import CorpusEntry
from .core import (
    Group,
    are_isomorphic,
    as_group,
    conjugacy_classes,
    generated_subgroup,
    prime_factors,
    quotient,
)
from .errors import TidyKitError, UnknownSuite
from .structure import (
    centralizer,
    derived_length,
    fitting_height,
    fitting_subgroup,
    has_normal_p_complement,
    is_solvable,
    is_two_frobenius,
    normal_subgroups,
    p_core,
    sylow,
)
from .tidy import Mode, is_tidy, is_tidy_bruteforce

SCHEMA = "v1"

Check = dict  # {"inputs", "expected", "observed", "pass"}


def _check(inputs, expected, observed, ok: bool) -> Check:
    return {"inputs": inputs, "expected": expected, "observed": observed, "pass": bool(ok)}


def _oracle(G: Group) -> bool:
    return is_tidy(G)


# ---------------------------------------------------------------- suites


def _mode_agreement(G: Group) -> list[Check]:
    full = is_tidy_bruteforce(G, Mode.ALL_ELEMENTS).verdict
    pp = is_tidy_bruteforce(G, Mode.PRIME_POWER_ONLY).verdict
    return [_check({}, full, pp, full == pp)]


def _pgroups(G: Group) -> list[Check]:
    primes = G.primes()
    if len(primes) != 1:
        return []
    shape = cl.classify_p_group(G, primes[0])
    observed = {"tidy": shape.tidy, "shapes": sorted(s.value for s in shape.shapes)}
    return [_check({"p": primes[0]}, {"tidy": _oracle(G)}, observed, shape.tidy == _oracle(G))]


def _pq_classification(G: Group) -> list[Check]:
    if len(G.primes()) != 2:
        return []
    c = cl.classify_pq_group(G)
    observed = {"case": c.case.value, "tidy": c.tidy, **({"failed": c.failed} if c.failed else {})}
    if c.case is cl.PqCase.HYPERFROBENIUS:
        observed["hypercenter_is_sylow"] = c.details["hypercenter_is_sylow"]
    return [_check({}, {"tidy": _oracle(G)}, observed, c.tidy == _oracle(G))]


def _hall_pairs(G: Group) -> list[Check]:
    if not is_solvable(G):
        return []
    v = cl.is_tidy_structural(G)
    return [_check({}, {"tidy": _oracle(G)}, {"tidy": v.tidy, "explanation": v.explanation}, v.tidy == _oracle(G))]


def _quotient_closure(G: Group, two_primes_only: bool) -> list[Check]:
    if not is_solvable(G) or not _oracle(G):
        return []
    if two_primes_only and len(G.primes()) != 2:
        return []
    bad = []
    normals = normal_subgroups(G)
    for N in normals:
        if not is_tidy(quotient(G, N).child):
            bad.append(N.indices().tolist())
    return [_check({"normal_subgroups": len(normals)}, {"untidy_quotients": []}, {"untidy_quotients": bad}, not bad)]


def _quotients(G: Group) -> list[Check]:
    return _quotient_closure(G, False)


def _pq_quotients(G: Group) -> list[Check]:
    return _quotient_closure(G, True)


def derived_length_mod_fitting(G: Group) -> int:
    return derived_length(quotient(G, fitting_subgroup(G)).child)


def _fitting_bound(G: Group) -> list[Check]:
    if not is_solvable(G) or not _oracle(G):
        return []
    h, d = fitting_height(G), derived_length_mod_fitting(G)
    bound = (3, 2) if G.order % 2 else (4, 4)
    observed = {"fitting_height": h, "derived_length_mod_fitting": d}
    expected = {"fitting_height_max": bound[0], "derived_length_mod_fitting_max": bound[1]}
    return [_check({"odd_order": bool(G.order % 2)}, expected, observed, h <= bound[0] and d <= bound[1])]


def sample_subgroups(G: Group, limit: int = 16) -> list:
    """Deterministic sample: Sylow subgroups, class-representative centralisers, two-generator subgroups."""
    seen, out = set(), []

    def add(S):
        if 1 < len(S) < G.order and S.bits not in seen:
            seen.add(S.bits)
            out.append(S)

    for p in G.primes():
        add(sylow(G, p))
    reps = [c.least() for c in conjugacy_classes(G)]
    for x in reps:
        add(centralizer(G, G.set([x])))
    pairs = 0
    for x, y in combinations(reps[1:], 2):
        if pairs >= limit:
            break
        before = len(out)
        add(generated_subgroup(G, [x, y]))
        pairs += len(out) > before
    return out


def _subgroups(G: Group) -> list[Check]:
    if not _oracle(G):
        return []
    subs = sample_subgroups(G)
    bad = [S.indices().tolist() for S in subs if not is_tidy(as_group(G, S))]
    return [_check({"sampled": len(subs)}, {"untidy_subgroups": []}, {"untidy_subgroups": bad}, not bad)]


def _coprime_action(G: Group) -> list[Check]:
    if not _oracle(G):
        return []
    out = []
    reps = [c.least() for c in conjugacy_classes(G)]
    for p in G.primes():
        if len(p_core(G, p)) == 1:
            continue
        counts: dict[str, int] = {}
        try:
            for x in reps:
                if G.ord[x] % p:
                    outcome = cl.coprime_action_case(G, p, x).value
                    counts[outcome] = counts.get(outcome, 0) + 1
            out.append(_check({"p": p}, "a matched outcome per class", counts, True))
        except TidyKitError as exc:
            out.append(_check({"p": p, "x": int(x)}, "a matched outcome per class", repr(exc), False))
    return out


def _two_frobenius(G: Group) -> list[Check]:
    found = is_two_frobenius(G)
    if found is None or not _oracle(G):
        return []
    K, N = found
    F = fitting_subgroup(G)
    if K != F:
        # with L = 1 and M = K the hypotheses need K to be the Fitting subgroup
        return [_check({"K": len(K), "N": len(N)}, "K = F(G)", {"fitting": len(F)}, True)]
    klein = len(K) == 4 and all(G.ord[k] <= 2 for k in K)
    s4 = G.order == 24 and are_isomorphic(G, cl._canonical("s4"))
    return [_check({"K": len(K), "N": len(N)}, {"klein_kernel": True, "s4": True}, {"klein_kernel": klein, "s4": s4}, klein and s4)]


def _centralizer_quotient(G: Group) -> list[Check]:
    if not is_solvable(G) or not _oracle(G):
        return []
    out = []
    for p in G.primes():
        if len(p_core(G, p)) == 1:
            continue
        try:
            r = cl.centralizer_quotient_case(G, p)
            out.append(_check({"p": p}, "a matched case", {"case": r.case, "shape": r.shape, "centralizer": len(r.centralizer)}, True))
        except TidyKitError as exc:
            out.append(_check({"p": p}, "a matched case", repr(exc), False))
    return out


def _frobenius_extension(G: Group) -> list[Check]:
    if not is_solvable(G):
        return []
    out = []
    for N in cl.frobenius_extension_candidates(G):
        r = cl.check_frobenius_extension(G, N)
        if r:
            out.append(_check({"N": len(N), "alternative": r.alternative}, {"tidy": True}, {"tidy": _oracle(G)}, _oracle(G)))
    return out


def _two_three_extension(G: Group) -> list[Check]:
    clause = cl.check_two_three_extension(G)
    if clause is None:
        return []
    sylows_tidy = all(cl.sylow_shape(G, p).tidy for p in (2, 3))
    observed = {"tidy": _oracle(G), "sylows_tidy": sylows_tidy}
    return [_check({"clause": clause}, {"tidy": True}, observed, _oracle(G))]


def _dihedral_sylow(G: Group) -> list[Check]:
    if G.order % 2 or 2 not in G.primes():
        return []
    shape = cl.sylow_shape(G, 2)
    O2 = p_core(G, 2)
    klein = len(O2) == 4 and all(G.ord[x] <= 2 for x in O2)
    if cl.Shape.DIHEDRAL not in shape.shapes or len(O2) == 1 or klein:
        return []
    K = has_normal_p_complement(G, 2)
    return [_check({"o2": len(O2)}, {"normal_2_complement": True}, {"normal_2_complement": K is not None}, K is not None)]


def _quaternion_sylow(G: Group) -> list[Check]:
    if G.order % 2 or not is_solvable(G) or not _oracle(G):
        return []
    shape = cl.sylow_shape(G, 2)
    if cl.Shape.GENERALIZED_QUATERNION not in shape.shapes or len(p_core(G, 2)) != 2:
        return []
    T = sylow(G, 2)
    F = fitting_subgroup(G)
    index = len(F) // len(centralizer(G, T) & F)
    observed = {
        "sylow_order": len(T),
        "normal_2_complement": has_normal_p_complement(G, 2) is not None,
        "index_primes": len(prime_factors(index)),
    }
    ok = observed["sylow_order"] == 8 and observed["normal_2_complement"] and observed["index_primes"] >= 2
    expected = {"sylow_order": 8, "normal_2_complement": True, "index_primes_min": 2}
    return [_check({"fitting": len(F)}, expected, observed, ok)]


@dataclass(frozen=True)
class Suite:
    id: str
    description: str
    run: Callable[[Group], list[Check]]


SUITES: dict[str, Suite] = {
    s.id: s
    for s in [
        Suite("mode_agreement", "all-element and prime-power-only oracle verdicts agree", _mode_agreement),
        Suite("pgroups", "p-group shape classifier matches the oracle", _pgroups),
        Suite("pq_classification", "two-prime classifier matches the oracle", _pq_classification),
        Suite("hall_pairs", "Hall two-prime structural decider matches the oracle", _hall_pairs),
        Suite("quotients", "quotients of solvable tidy groups are tidy", _quotients),
        Suite("pq_quotients", "quotients of tidy two-prime groups are tidy", _pq_quotients),
        Suite("fitting_bound", "Fitting height and derived length of G/F(G) are bounded", _fitting_bound),
        Suite("subgroups", "sampled subgroups of tidy groups are tidy", _subgroups),
        Suite("coprime_action", "coprime elements act on O_p in one of three ways", _coprime_action),
        Suite("two_frobenius", "a tidy 2-Frobenius group over its Fitting subgroup is S4", _two_frobenius),
        Suite("centralizer_quotient", "G/C_H(O_p) has one of five shapes", _centralizer_quotient),
        Suite("frobenius_extension", "Frobenius-extension hypotheses imply tidy", _frobenius_extension),
        Suite("two_three_extension", "the three {2,3} shapes imply tidy", _two_three_extension),
        Suite("dihedral_sylow", "dihedral Sylow 2 with non-Klein O_2 > 1 gives a normal 2-complement", _dihedral_sylow),
        Suite("quaternion_sylow", "quaternion Sylow 2 with |O_2| = 2 forces Q8 and more", _quaternion_sylow),
    ]
}


def resolve_suites(spec: str | Iterable[str]) -> list[str]:
    names = spec.split(",") if isinstance(spec, str) else list(spec)
    names = [n.strip() for n in names if n.strip()]
    if names == ["all"]:
        return list(SUITES)
    for n in names:
        if n not in SUITES:
            raise UnknownSuite(f"unknown suite {n!r}; known: {', '.join(SUITES)}")
    return names


# ---------------------------------------------------------------- records


def group_summary(G: Group, *, all_witnesses: bool = False) -> dict:
    """Fields shared by every record about ``G``."""
    solvable = is_solvable(G)
    report = is_tidy_bruteforce(G, Mode.PRIME_POWER_ONLY, all_witnesses=all_witnesses)
    structural = case = height = dl = None
    if solvable:
        v = cl.is_tidy_structural(G)
        structural = v.tidy
        if isinstance(v.classification, cl.PqClassification) and len(G.primes()) == 2:
            case = v.classification.case.value
        height = fitting_height(G)
        dl = derived_length_mod_fitting(G)
    return {
        "schema": SCHEMA,
        "label": G.label,
        "order": G.order,
        "primes": G.primes(),
        "solvable": solvable,
        "tidy_oracle": report.tidy,
        "tidy_structural": structural,
        "case": case,
        "fitting_height": height,
        "derived_length_mod_fitting": dl,
        "witnesses": [w.to_json() for w in report.witnesses],
    }


def repro_command(entry: CorpusEntry, suite: str) -> str:
    return f"tidykit corpus --suites {suite} {entry.repro_args()}"


def _entry_for(G: Group) -> CorpusEntry:
    if G.label.startswith("file(") and G.label.endswith(")"):
        return CorpusEntry(G.label, "file", G.label[5:-1])
    return CorpusEntry(G.label, "family", G.label)


def suite_records(
    G: Group, entry: CorpusEntry, suites: Sequence[str], *, all_witnesses: bool = False, timing: bool = True
) -> dict[str, tuple[list[dict], float]]:
    """Records and elapsed seconds for each suite on one group."""
    summary = group_summary(G, all_witnesses=all_witnesses)
    out: dict[str, tuple[list[dict], float]] = {}
    for sid in suites:
        start = time.perf_counter()
        try:
            checks = SUITES[sid].run(G)
        except TidyKitError as exc:
            checks = [_check({}, "no error", repr(exc), False)]
        elapsed = time.perf_counter() - start
        ms = round(elapsed * 1000, 3) if timing else 0
        recs = []
        for c in checks:
            rec = {**summary, "suite": sid, **c, "ms": ms}
            if not c["pass"]:
                rec["repro"] = repro_command(entry, sid)
            recs.append(rec)
        out[sid] = (recs, elapsed if timing else 0.0)
    return out


def _work(args) -> dict[str, tuple[list[dict], float]]:
    entry, suites, all_witnesses, timing = args
    return suite_records(entry.build(), entry, suites, all_witnesses=all_witnesses, timing=timing)


@dataclass
class SuiteReport:
    suite: str
    records: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> int:
        return sum(r["pass"] for r in self.records)

    @property
    def failed(self) -> int:
        return len(self.records) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def notes(self) -> dict:
        if self.suite == "fitting_bound" and self.records:
            obs = [r["observed"] for r in self.records]
            odd = [r["observed"] for r in self.records if r["inputs"]["odd_order"]]
            return {
                "max_fitting_height": max(o["fitting_height"] for o in obs),
                "max_derived_length_mod_fitting": max(o["derived_length_mod_fitting"] for o in obs),
                "max_fitting_height_odd": max((o["fitting_height"] for o in odd), default=None),
                "max_derived_length_mod_fitting_odd": max((o["derived_length_mod_fitting"] for o in odd), default=None),
            }
        if self.suite == "pq_classification":
            cases: dict[str, int] = {}
            for r in self.records:
                cases[r["observed"]["case"]] = cases.get(r["observed"]["case"], 0) + 1
            full = sum(1 for r in self.records if r["observed"].get("hypercenter_is_sylow"))
            return {"cases": cases, "hyperfrobenius_with_full_sylow_hypercenter": full}
        return {}

    def summary(self, timing: bool = True) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "summary": {
                "records": len(self.records),
                "passed": self.passed,
                "failed": self.failed,
                "seconds": round(self.seconds, 3) if timing else 0,
                **self.notes(),
            },
        }


def run_entries(
    entries: Sequence[CorpusEntry],
    suites: Sequence[str],
    *,
    threads: int = 1,
    all_witnesses: bool = False,
    timing: bool = True,
    groups: Sequence[Group] | None = None,
) -> list[SuiteReport]:
    """Run suites over corpus entries; output order is suite order, then corpus order."""
    suites = resolve_suites(suites)
    if threads > 1 and groups is None:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            jobs = [(e, suites, all_witnesses, timing) for e in entries]
            results = list(pool.map(_work, jobs))
    else:
        built = groups if groups is not None else [e.build() for e in entries]
        results = [
            suite_records(G, e, suites, all_witnesses=all_witnesses, timing=timing) for e, G in zip(entries, built)
        ]
    reports = []
    for sid in suites:
        rep = SuiteReport(sid)
        for res in results:
            recs, seconds = res[sid]
            rep.records.extend(recs)
            rep.seconds += seconds
        reports.append(rep)
    return reports


def run_suite(corpus: Sequence[Group], suite_id: str, *, timing: bool = True) -> SuiteReport:
    if suite_id not in SUITES:
        raise UnknownSuite(f"unknown suite {suite_id!r}; known: {', '.join(SUITES)}")
    entries = [_entry_for(G) for G in corpus]
    return run_entries(entries, [suite_id], groups=corpus, timing=timing)[0]


def write_report(reports: Sequence[SuiteReport], fh, *, timing: bool = True) -> None:
    for rep in reports:
        for rec in rep.records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
        fh.write(json.dumps(rep.summary(timing), sort_keys=True) + "\n")


def format_table(reports: Sequence[SuiteReport]) -> str:
    width = max(len(r.suite) for r in reports) if reports else 5
    lines = [f"{'suite':<{width}}  records  passed  failed"]
    for r in reports:
        lines.append(f"{r.suite:<{width}}  {len(r.records):>7}  {r.passed:>6}  {r.failed:>6}")
        notes = r.notes()
        if notes:
            lines.append(" " * (width + 2) + json.dumps(notes, sort_keys=True))
        for rec in r.records:
            if not rec["pass"]:
                lines.append(f"  FAIL {rec['label']}: observed {json.dumps(rec['observed'])}")
                lines.append(f"       repro: {rec['repro']}")
    return "\n".join(lines)
