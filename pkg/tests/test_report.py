import json

from stuffedmaps.report import REFUTED, bridged_quadrangulation_report, discrepancy_ledger, nested_radical_gamma2


def test_ledger_entries_are_adjudicated():
    ledger = discrepancy_ledger(5, 5)
    assert len({e["identity"] for e in ledger}) == len(ledger)
    for e in ledger:
        assert set(e) >= {"identity", "printed_variant", "adopted_variant", "oracle", "verdict"}
        assert e["verdict"] == REFUTED
    json.dumps(ledger)


def test_exponent_entry_lists_every_candidate():
    entry = next(e for e in discrepancy_ledger(5, 4) if e["identity"] == "pointed_relation_exponent")
    assert entry["detail"] == {"2k-l": False, "4k-2l": False, "2k+2l": True}


def test_report_rows():
    r = bridged_quadrangulation_report(6, 5, hypermobiles=False)
    rows = {x["check"]: x for x in r["rows"]}
    assert r["ok"]
    assert rows["enumeration_matches_T2"]["passed"]
    for name in ("bridged_tree_equation_plus_quartic", "T2_doubled_t_term", "pointed_T2_linear_denominator"):
        assert rows[name]["expected_to_fail"] and not rows[name]["passed"]
    assert rows["adopted_quartic_numeric"]["gap_to_plus_quartic_root"] < 1e-9


def test_report_without_enumeration():
    r = bridged_quadrangulation_report(2, 0)
    assert r["ok"]
    assert "hypermobiles_match_pointed_maps" not in {x["check"] for x in r["rows"]}


def test_nested_radical_is_finite():
    v = nested_radical_gamma2(0.01, 0.1, 0.1)
    assert v == v
