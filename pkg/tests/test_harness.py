import io
import json

import pytest

from tidykit import catalog, harness
from tidykit.errors import UnknownSuite

SMALL_CORPUS = ["s3", "s4", "sl2_3", "direct_product(s3,cyclic(3))", "dicyclic(12)", "dihedral(8)",
                "direct_product(cyclic(4),cyclic(2))", "frobenius_metacyclic(7,3,2)", "cyclic(30)"]

RECORD_FIELDS = {"schema", "label", "order", "primes", "solvable", "tidy_oracle", "tidy_structural", "case",
                 "fitting_height", "derived_length_mod_fitting", "witnesses", "suite", "pass", "ms"}


@pytest.fixture(scope="module")
def small():
    return [catalog.build_family(x) for x in SMALL_CORPUS]


def test_registry_is_complete():
    assert len(harness.SUITES) == 15
    assert harness.resolve_suites("all") == list(harness.SUITES)
    assert harness.resolve_suites("pgroups, hall_pairs") == ["pgroups", "hall_pairs"]
    with pytest.raises(UnknownSuite):
        harness.resolve_suites("nonesuch")
    with pytest.raises(UnknownSuite):
        harness.run_suite([], "nonesuch")


def test_hall_pairs_records_s3_times_z3(small):
    rep = harness.run_suite(small, "hall_pairs")
    assert rep.ok
    rec = next(r for r in rep.records if r["label"] == "direct_product(s3,cyclic(3))")
    assert rec["tidy_oracle"] is False and rec["tidy_structural"] is False


def test_fitting_bound_maxima(small):
    rep = harness.run_suite(small, "fitting_bound")
    assert rep.ok and rep.notes()["max_fitting_height"] == 3


def test_record_schema(small):
    rep = harness.run_suite(small, "pq_classification")
    assert rep.records
    for rec in rep.records:
        assert RECORD_FIELDS <= set(rec)
        assert rec["schema"] == "v1"
        assert rec["case"] in {"nilpotent", "hyperfrobenius", "s4type", "sl23type", "gl23tilde", "not_tidy"}


def test_report_is_deterministic(small):
    def render():
        buf = io.StringIO()
        reports = harness.run_entries([harness._entry_for(G) for G in small], "all", groups=small, timing=False)
        harness.write_report(reports, buf, timing=False)
        return buf.getvalue()

    a, b = render(), render()
    assert a == b
    lines = [json.loads(x) for x in a.splitlines()]
    assert sum("summary" in x for x in lines) == 15


def test_threads_give_identical_report():
    entries = catalog.corpus_entries(catalog.CorpusSpec(families=SMALL_CORPUS))

    def render(threads):
        buf = io.StringIO()
        harness.write_report(harness.run_entries(entries, "all", threads=threads, timing=False), buf, timing=False)
        return buf.getvalue()

    assert render(1) == render(2)


def test_failures_carry_a_repro_command():
    G = catalog.build_family("direct_product(sl2_3,cyclic(9))")
    rep = harness.run_suite([G], "two_three_extension")
    assert rep.failed == 1
    rec = rep.records[0]
    assert rec["repro"] == "tidykit corpus --suites two_three_extension --family 'direct_product(sl2_3,cyclic(9))'"
    assert rec["observed"] == {"tidy": False, "sylows_tidy": False}


def test_witnesses_in_records():
    G = catalog.build_family("direct_product(s3,cyclic(3))")
    summary = harness.group_summary(G, all_witnesses=True)
    assert summary["tidy_oracle"] is False and len(summary["witnesses"]) > 1
    assert len(harness.group_summary(G)["witnesses"]) == 1


def test_table_output_mentions_failures():
    G = catalog.build_family("direct_product(sl2_3,cyclic(9))")
    text = harness.format_table([harness.run_suite([G], "two_three_extension")])
    assert "FAIL direct_product(sl2_3,cyclic(9))" in text and "repro:" in text


def test_sample_subgroups_are_proper_and_distinct():
    G = catalog.s4()
    subs = harness.sample_subgroups(G)
    assert subs and all(1 < len(S) < 24 for S in subs)
    assert len({S.bits for S in subs}) == len(subs)
