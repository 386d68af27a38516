"""Campaign plumbing: determinism, ordering, witness capping, serialisation."""

import json

import pytest

from g2calc.suites import MAX_WITNESSES, SUITE_IDS, Campaign, all_passed, emit

FAST = ("appendixA", "appendixB", "propD1", "dhym", "product")


@pytest.fixture(scope="module")
def full_run():
    campaign = Campaign(seed=3, samples=30)
    return campaign, campaign.run()


class TestCampaign:
    def test_suite_ids_are_the_published_names(self):
        assert list(SUITE_IDS) == [
            "appendixA", "appendixB", "thmC1", "propD1",
            "corD2", "dhym", "product", "torus",
        ]
        assert sorted(SUITE_IDS.values()) == list(range(1, 9))

    def test_suites_normalised_to_canonical_order(self):
        campaign = Campaign(seed=0, suites=("torus", "appendixA", "dhym"))
        assert campaign.suites == ("appendixA", "dhym", "torus")

    def test_duplicate_suites_collapse(self):
        campaign = Campaign(seed=0, suites=("propD1", "propD1"))
        assert campaign.suites == ("propD1",)

    def test_unknown_suite_rejected(self):
        with pytest.raises(ValueError, match="unknown suites: appendixZ"):
            Campaign(seed=0, suites=("appendixZ",))

    def test_nonpositive_samples_rejected(self):
        with pytest.raises(ValueError, match="samples must be positive"):
            Campaign(seed=0, samples=0)

    def test_to_dict_round_trips_through_json(self):
        campaign = Campaign(seed=5, samples=10, suites=("dhym",))
        payload = json.loads(json.dumps(campaign.to_dict()))
        assert payload == {
            "seed": 5, "samples": 10, "tol_rel": 1e-9,
            "tol_identity": 1e-8, "suites": ["dhym"],
        }


class TestDeterminism:
    def test_same_seed_gives_identical_bytes(self):
        first = Campaign(seed=11, samples=25, suites=FAST)
        second = Campaign(seed=11, samples=25, suites=FAST)
        assert emit(first.run(), "json", first) == emit(second.run(), "json", second)

    def test_different_seed_changes_the_bytes(self):
        base = Campaign(seed=11, samples=25, suites=("propD1", "dhym"))
        other = Campaign(seed=12, samples=25, suites=("propD1", "dhym"))
        assert emit(base.run(), "json", base) != emit(other.run(), "json", other)

    def test_subset_reproduces_the_full_run(self, full_run):
        campaign, reports = full_run
        by_name = {r.suite: r for r in reports}
        subset = Campaign(seed=3, samples=30, suites=("product", "thmC1")).run()
        assert [r.suite for r in subset] == ["thmC1", "product"]
        for rep in subset:
            assert rep == by_name[rep.suite]


class TestReports:
    def test_every_suite_passes(self, full_run):
        _, reports = full_run
        assert [r.suite for r in reports] == list(SUITE_IDS)
        for rep in reports:
            assert rep.failed == 0, rep.witnesses
            assert rep.passed > 0
            assert rep.witnesses == ()
        assert all_passed(reports)

    def test_worst_residuals_comfortably_inside_tolerance(self, full_run):
        _, reports = full_run
        for rep in reports:
            assert rep.worst_residual < 1e-10

    def test_torus_details_carry_the_dimension_summary(self, full_run):
        _, reports = full_run
        torus = next(r for r in reports if r.suite == "torus")
        for key, value in (("cutoff", 3), ("dim_check_H1", 7),
                           ("dim_H2", 0), ("b1", 7)):
            assert torus.details[key] == value

    def test_witnesses_capped_and_json_clean(self):
        campaign = Campaign(seed=2, samples=12, tol_rel=1e-30,
                            suites=("propD1",))
        rep = campaign.run()[0]
        assert rep.failed == 12
        assert len(rep.witnesses) == MAX_WITNESSES
        dumped = json.loads(json.dumps(rep.to_dict()))
        assert dumped["failed"] == 12
        for witness in dumped["witnesses"]:
            assert witness["check"] == "type split reassembles the residual"
            assert witness["tolerance"] == 1e-30
            assert witness["flux"]["dim"] == 7
            assert witness["flux"]["grade"] == 2
            assert len(witness["flux"]["coeffs"]) == 21


class TestEmit:
    def test_json_payload_is_the_report_array(self, full_run):
        campaign, reports = full_run
        blob = emit(reports, "json", campaign)
        assert blob.endswith(b"\n")
        payload = json.loads(blob)
        assert isinstance(payload, list)
        assert [r["suite"] for r in payload] == list(SUITE_IDS)
        assert all(r["failed"] == 0 for r in payload)
        torus = payload[-1]
        assert torus["details"]["dim_check_H1"] == 7

    def test_empty_report_list_is_an_empty_array(self):
        assert json.loads(emit([], "json")) == []

    def test_text_lines(self, full_run):
        campaign, reports = full_run
        lines = emit(reports, "text", campaign).decode().splitlines()
        assert lines[0].startswith("campaign seed=3 ")
        assert lines[1].startswith("suite appendixA: passed=")
        assert lines[-1] == "overall: PASS"

    def test_text_reports_failures(self):
        campaign = Campaign(seed=2, samples=3, tol_rel=1e-30, suites=("propD1",))
        text = emit(campaign.run(), "text", campaign).decode()
        assert "failed=3" in text
        assert "witness" in text
        assert text.rstrip().endswith("overall: FAIL")

    def test_unknown_format_rejected(self, full_run):
        campaign, reports = full_run
        with pytest.raises(ValueError, match="unknown format"):
            emit(reports, "yaml", campaign)
