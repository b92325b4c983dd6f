"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

import time

import pytest

from conftest import record_acceptance
from tidykit import catalog, core, harness
from tidykit import structure as st
from tidykit.classifier import (
    PqCase,
    check_frobenius_extension,
    check_two_three_extension,
    classify_p_group,
    classify_pq_group,
    frobenius_extension_candidates,
)
from tidykit.tidy import Mode, is_tidy, is_tidy_bruteforce

P_GROUPS = [
    *(f"cyclic({n})" for n in (2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128)),
    "elementary_abelian(2,2)", "elementary_abelian(2,3)", "elementary_abelian(2,4)", "elementary_abelian(3,2)",
    "elementary_abelian(3,3)", "elementary_abelian(5,2)", "elementary_abelian(7,2)", "elementary_abelian(2,6)",
    *(f"dihedral({n})" for n in (8, 16, 32, 64, 128)),
    *(f"generalized_quaternion({n})" for n in (8, 16, 32, 64, 128)),
    "extraspecial_exponent_p(3)", "extraspecial_exponent_p(5)",
    "direct_product(cyclic(4),cyclic(2))", "direct_product(cyclic(9),cyclic(3))", "wreath_pp(2)", "wreath_pp(3)",
    "direct_product(cyclic(8),cyclic(2))", "direct_product(cyclic(4),cyclic(4))", "direct_product(dihedral(8),cyclic(2))",
    "direct_product(generalized_quaternion(8),cyclic(2))", "direct_product(cyclic(16),cyclic(2))",
    "direct_product(cyclic(25),cyclic(5))", "direct_product(extraspecial_exponent_p(3),cyclic(3))",
    "direct_product(generalized_quaternion(16),cyclic(4))", "metacyclic(8,2,5)", "metacyclic(16,2,9)",
]

PQ_EXAMPLES = {
    "cyclic(6)": PqCase.NILPOTENT,
    "frobenius_metacyclic(7,3,2)": PqCase.HYPERFROBENIUS,
    "s4": PqCase.S4TYPE,
    "sl2_3": PqCase.SL23TYPE,
    "binary_octahedral": PqCase.GL23TILDE,
    "direct_product(s3,cyclic(3))": PqCase.NOT_TIDY,
}


@pytest.fixture(scope="module")
def full_run():
    """All suites over the pinned default corpus on one thread."""
    entries = catalog.corpus_entries(catalog.default_corpus_spec())
    start = time.perf_counter()
    reports = harness.run_entries(entries, "all", threads=1)
    return {r.suite: r for r in reports}, time.perf_counter() - start


def test_criterion_01_oracle_sanity():
    start = time.perf_counter()
    G = catalog.build_family("direct_product(s3,cyclic(3))")
    report = is_tidy_bruteforce(G, Mode.ALL_ELEMENTS)
    w = report.witnesses[0] if report.witnesses else None
    genuine = w is not None and int(G.mul[w.pair]) not in w.cyc and w.pair[0] in w.cyc and w.pair[1] in w.cyc
    sylows = {p: is_tidy(st.sylow_group(G, p)) for p in G.primes()}
    seconds = time.perf_counter() - start
    ok = G.order == 18 and not report.tidy and genuine and all(sylows.values()) and seconds < 1
    record_acceptance(1, ok, f"S3xZ3 not tidy, witness x={w.element if w else None} pair={w.pair if w else None}, "
                             f"Sylows tidy {sylows}, {seconds:.3f}s")
    assert ok


def test_criterion_02_p_group_iff(corpus):
    start = time.perf_counter()
    groups = [catalog.build_family(x) for x in P_GROUPS]
    groups += [G for G in corpus if len(G.primes()) == 1 and G.order <= 128]
    bad = [G.label for G in groups if classify_p_group(G).tidy != is_tidy(G)]
    seconds = time.perf_counter() - start
    ok = not bad and seconds < 30
    record_acceptance(2, ok, f"{len(groups)} p-groups of order <= 128, {len(bad)} disagreements, {seconds:.1f}s")
    assert ok, bad


def test_criterion_03_pq_iff(corpus):
    start = time.perf_counter()
    pq = [G for G in corpus if len(G.primes()) == 2 and G.order <= 400]
    labels = {G.label for G in pq}
    required = {"s4", "sl2_3", "binary_octahedral", "dicyclic(12)", "direct_product(s3,cyclic(3))",
                "frobenius_metacyclic(7,3,2)"}
    bad = [G.label for G in pq if classify_pq_group(G).tidy != is_tidy(G)]
    wrong_case = {lab: classify_pq_group(catalog.build_family(lab)).case.value
                  for lab, case in PQ_EXAMPLES.items() if classify_pq_group(catalog.build_family(lab)).case is not case}
    seconds = time.perf_counter() - start
    ok = len(pq) >= 40 and required <= labels and not bad and not wrong_case and seconds < 300
    record_acceptance(3, ok, f"{len(pq)} {{p,q}}-groups, {len(bad)} disagreements, "
                             f"named cases {'match' if not wrong_case else wrong_case}, {seconds:.1f}s")
    assert ok, (bad, wrong_case, required - labels)


def test_criterion_04_mode_agreement(full_run):
    rep = full_run[0]["mode_agreement"]
    ok = rep.ok and len(rep.records) == len(catalog.corpus_entries(catalog.default_corpus_spec()))
    record_acceptance(4, ok, f"{len(rep.records)} groups, {rep.failed} disagreements")
    assert ok


def test_criterion_05_quotient_closure(full_run):
    rep = full_run[0]["quotients"]
    quotients = sum(r["inputs"]["normal_subgroups"] for r in rep.records)
    ok = rep.ok and len(rep.records) > 0
    record_acceptance(5, ok, f"{len(rep.records)} tidy solvable groups, {quotients} quotients, {rep.failed} failures")
    assert ok


def test_criterion_06_fitting_bound(full_run):
    rep = full_run[0]["fitting_bound"]
    notes = rep.notes()
    ok = rep.ok and len(rep.records) > 0
    record_acceptance(6, ok, f"{rep.failed} violations; maxima height {notes['max_fitting_height']}, "
                             f"derived length mod F {notes['max_derived_length_mod_fitting']}; odd order "
                             f"{notes['max_fitting_height_odd']} and {notes['max_derived_length_mod_fitting_odd']}")
    assert ok


def test_criterion_07_case_totality(full_run):
    coprime = full_run[0]["coprime_action"]
    cq = full_run[0]["centralizer_quotient"]
    ok = coprime.ok and cq.ok and coprime.records and cq.records
    record_acceptance(7, ok, f"coprime action {len(coprime.records)} inputs, centralizer quotient "
                             f"{len(cq.records)} inputs, {coprime.failed + cq.failed} unmatched")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="direct_product(sl2_3,cyclic(9)) meets the second {2,3} clause but its Sylow 3-subgroup Z9xZ3 is not tidy",
)
def test_criterion_08_sufficiency(full_run):
    frob = full_run[0]["frobenius_extension"]
    two_three = full_run[0]["two_three_extension"]
    bad = [r["label"] for r in frob.records + two_three.records if not r["pass"]]
    ok = not bad and frob.records and two_three.records
    record_acceptance(8, ok, f"Frobenius extension {len(frob.records)} passing (group, N) pairs, "
                             f"{{2,3}} clauses {len(two_three.records)} groups; untidy: {bad}")
    assert ok


def test_criterion_08_holds_with_tidy_sylows(corpus):
    """The {2,3} clauses do imply tidiness once the Sylow subgroups are tidy."""
    checked = 0
    for G in corpus:
        for N in frobenius_extension_candidates(G):
            if check_frobenius_extension(G, N):
                assert is_tidy(G), G.label
        if check_two_three_extension(G) is not None:
            if all(classify_p_group(st.sylow_group(G, p)).tidy for p in (2, 3)):
                checked += 1
                assert is_tidy(G), G.label
    assert checked >= 5


def test_criterion_09_two_frobenius(corpus):
    S4 = catalog.s4()
    s4_ok = st.is_two_frobenius(S4) is not None and is_tidy(S4)
    hits, bad = [], []
    for G in corpus:
        if not is_tidy(G) or st.is_two_frobenius(G) is None:
            continue
        hits.append(G.label)
        if G.order != 24 or not core.are_isomorphic(G, S4):
            bad.append(G.label)
    ok = s4_ok and not bad
    record_acceptance(9, ok, f"S4 detected: {s4_ok}; tidy 2-Frobenius corpus groups {hits}; counterexamples {bad}")
    assert ok


def test_criterion_10_performance(full_run):
    timings = {}
    for label in ("direct_product(generalized_quaternion(16),cyclic(24))",
                  "direct_product(generalized_quaternion(128),cyclic(3))"):
        G = catalog.build_family(label)
        assert G.order == 384
        start = time.perf_counter()
        verdict = is_tidy_bruteforce(G, Mode.ALL_ELEMENTS, all_witnesses=True).verdict
        timings[label] = (verdict, round(time.perf_counter() - start, 3))
    total = full_run[1]
    ok = all(t < 5 for _, t in timings.values()) and total < 600
    record_acceptance(10, ok, f"order 384 oracle, every element checked {timings}; "
                              f"full corpus, all suites, one thread {total:.1f}s")
    assert ok
