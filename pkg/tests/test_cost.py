from collections import Counter
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from acewage.config import DEFAULT_CONFIG as CFG
from acewage.constants import UnsupportedDegree
from acewage.cost import (
    DEFAULT_GE,
    KINDS,
    GateInventory,
    GeCostTable,
    calibration_ratio,
    degrees,
    estimate_area,
    optimality,
    permutation_inventory,
    reference_area,
    reference_table,
    report_csv,
    report_json,
    report_text,
    sb_gates,
    scaling_report,
    throughput_bpc,
    wage_sponge_support_inventory,
)


def total(cipher, p):
    return estimate_area(permutation_inventory(cipher, p, CFG)).total


def test_sponge_support_inventory_matches_listing():
    inv = wage_sponge_support_inventory(CFG)
    assert inv.count("mux2", 7) == 24 and inv.count("mux2", 2) == 1
    assert inv.count("xor2", 7) == 10 and inv.count("xor2", 2) == 1
    assert inv.count("and2", 7) == 3
    assert inv.bits() == Counter({"mux2": 170, "xor2": 72, "and2": 21})


def test_sponge_support_follows_config():
    # one more rate stage means one more absorb mux, replace mux and absorb xor
    cfg = replace(CFG, wage_rate_stages=CFG.wage_rate_stages + (1,))
    inv = wage_sponge_support_inventory(cfg)
    assert inv.count("mux2", 7) == 26 and inv.count("xor2", 7) == 11


def test_wage_instance_counts():
    inv = permutation_inventory("wage", 3, CFG)
    assert inv.components["wgp"][("and2", 1)] == 6 * 98
    assert inv.bits("sb") == Counter({k: 3 * v for k, v in
                                      GateInventory().add_many("sb", sb_gates(CFG), 4).bits().items()})


def test_sb_generator_gate_count():
    g = sb_gates(CFG)
    assert g[("and2", 1)] == g[("xor2", 1)] == 15


@pytest.mark.parametrize("c", ["ace", "wage"])
def test_registers_do_not_scale(c):
    ffs = {p: permutation_inventory(c, p, CFG).count("ff") for p in degrees(c)}
    assert len(set(ffs.values())) == 1


def test_ace_unrolling_only_touches_round_logic():
    d = permutation_inventory("ace", 8, CFG).difference(permutation_inventory("ace", 1, CFG))
    assert set(d) == {"sb64", "const_lfsr"}
    assert all(n > 0 for gates in d.values() for n in gates.values())


@pytest.mark.parametrize("c", ["ace", "wage"])
def test_area_grows_with_p(c):
    a = [total(c, p) for p in degrees(c)]
    assert a == sorted(a) and len(set(a)) == len(a)


@given(st.integers(1, 5))
def test_area_is_linear_in_inventory(k):
    inv = permutation_inventory("wage", 2, CFG)
    assert estimate_area(inv.scaled(k)).total == pytest.approx(k * estimate_area(inv).total)


@given(st.floats(0.5, 10), st.floats(0.5, 10))
def test_area_is_linear_in_ge_values(x, y):
    inv = GateInventory().add("a", "xor2", 7, 3).add("b", "ff", 1, 5)
    ge = GeCostTable(xor2=x, ff=y)
    assert estimate_area(inv, ge).total == pytest.approx(21 * x + 5 * y)


def test_empty_inventory_is_zero():
    assert estimate_area(GateInventory()).total == 0


def test_inventory_validation():
    with pytest.raises(ValueError):
        GateInventory().add("x", "nor3")
    with pytest.raises(ValueError):
        GateInventory().add("x", "and2", count=-1)
    with pytest.raises(ValueError):
        GeCostTable(xor2=0)
    assert set(KINDS) >= {"nand2", "ff"} and DEFAULT_GE["nand2"] == 1.0


@pytest.mark.parametrize("c,want", [("ace", [0.5, 1, 2, 4]), ("wage", [0.57, 1.14, 1.68, 2.29, 3.37, 4.57])])
def test_bpc(c, want):
    assert [round(float(throughput_bpc(c, p, CFG)), 2) for p in degrees(c)] == want


def test_bpc_rejects_unsupported():
    with pytest.raises(UnsupportedDegree):
        throughput_bpc("ace", 3, CFG)


def test_optimality():
    assert optimality(1, 10) == pytest.approx(0.01)
    # doubling the area quarters the metric
    assert optimality(2, 20) == pytest.approx(optimality(2, 10) / 4)
    for a in (0, -1):
        with pytest.raises(ValueError):
            optimality(1, a)


def test_calibration_and_scaling_ratios():
    assert calibration_ratio(CFG) == pytest.approx(1.08, abs=0.03)
    assert 1.4 <= total("ace", 8) / total("ace", 1) <= 2.1
    assert 3.0 <= total("wage", 8) / total("wage", 1) <= 4.6


def test_reference_data():
    doc = reference_table()
    assert "st65" in doc["areas"]["ace"]
    assert reference_area("ace", 1) > 0
    assert reference_area("ace", 3) is None


def test_reference_ace_optimality_increases():
    opt = [optimality(throughput_bpc("ace", p, CFG), reference_area("ace", p)) for p in degrees("ace")]
    assert opt == sorted(opt) and len(set(opt)) == len(opt)


def test_reference_wage_optimality_peaks_at_3_among_unrolled():
    ps = [p for p in degrees("wage") if p >= 2 and reference_area("wage", p)]
    opt = {p: optimality(throughput_bpc("wage", p, CFG), reference_area("wage", p)) for p in ps}
    assert max(opt, key=opt.get) == 3


@pytest.mark.parametrize("c", ["ace", "wage"])
def test_report_shapes(c):
    rows = scaling_report(c, CFG)
    assert [r.p for r in rows] == list(degrees(c))
    assert rows[0].ratio_to_p1 == 1.0
    assert len(report_csv(rows).splitlines()) == len(rows) + 1
    assert len(report_text(rows).splitlines()) == len(rows) + 1
    assert '"rows"' in report_json(rows)
