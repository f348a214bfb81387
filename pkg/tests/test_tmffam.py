import json

import pytest

from brauerkit.abelian import FgAbGroup
from brauerkit.kofam import SHIPPED_RINGS, EtaleRingDescriptor
from brauerkit.sheaftab import (
    ClosedPush,
    KStarVShriek,
    QuasiCoherent,
    SheafExtension,
)
from brauerkit.tmffam import (
    UNRESOLVED_NAMES,
    TmfPageData,
    lbr_m_o,
    lbr_tmf,
    pic_tmf_c4inv,
    pic_tmf_global,
    pic_tmf_r,
    run_pic_tmf,
)

Z2 = FgAbGroup.cyclic(2)


@pytest.fixture(scope="module")
def data():
    return TmfPageData.load()


# ---------------------------------------------------------------------------
# data validation
# ---------------------------------------------------------------------------


def test_data_citations_present(data):
    for item in data.column0:
        assert item["citation"]
    for rule in data.special_rules:
        assert rule["citation"]


def test_data_unresolved_set(data):
    assert set(data.unresolved) == set(UNRESOLVED_NAMES)


def test_data_rejects_missing_citation(data, tmp_path):
    with open(__import__("brauerkit.sheaftab", fromlist=["data_dir"]).data_dir()
              / "tmf_pages.json") as fh:
        raw = json.load(fh)
    raw["column0"][0]["citation"] = ""
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(raw))
    with pytest.raises(ValueError, match="citation"):
        TmfPageData.load(bad)


def test_data_rejects_nonzero_d11(data, tmp_path):
    from brauerkit.sheaftab import data_dir
    with open(data_dir() / "tmf_pages.json") as fh:
        raw = json.load(fh)
    for rule in raw["special_rules"]:
        if rule["name"] == "d11_77":
            rule["kind"] = "iso"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(raw))
    with pytest.raises(ValueError, match="fixed to zero"):
        TmfPageData.load(bad)


# ---------------------------------------------------------------------------
# column-0 filtration
# ---------------------------------------------------------------------------


def test_run_pic_tmf_stages(data):
    report = run_pic_tmf(data)
    by_s = {}
    for g in report.stages:
        by_s.setdefault(g.s, []).append(g)
    assert set(by_s) == {0, 1, 3, 5, 7}
    # gr^0 = Z/2, gr^1 = R^1j_*G_m
    assert "Z/2" in by_s[0][0].display()
    assert by_s[1][0].symbol.__class__.__name__ == "R1jGm"
    # gr^3 = k_*v_!Z/2 (kernel of the twisted Artin-Schreier d3)
    assert isinstance(by_s[3][0].symbol, KStarVShriek)
    # gr^5: 2-local extension of the skyscraper by O/(2,j), 3-local skyscraper Z/3
    fives = {g.local: g for g in by_s[5]}
    assert isinstance(fives[2].symbol, SheafExtension)
    assert isinstance(fives[3].symbol, ClosedPush)
    assert fives[3].symbol.group.same_structure(FgAbGroup.cyclic(3))
    # gr^7 is only an upper bound pending the open d23
    seven = by_s[7][0]
    assert isinstance(seven.symbol, QuasiCoherent) and not seven.exact
    assert "d23_row7" in seven.assumed


def test_run_pic_tmf_nothing_above_row_7(data):
    report = run_pic_tmf(data)
    assert max(g.s for g in report.stages) == 7


def test_run_pic_tmf_iso_config_kills_row_7(data):
    report = run_pic_tmf(data, config={"d23_row7": "iso"})
    seven = [g for g in report.stages if g.s == 7][0]
    assert seven.symbol is None and seven.exact


def test_run_pic_tmf_assumed_markers(data):
    report = run_pic_tmf(data)
    five = [g for g in report.stages if g.s == 5 and g.local == 2][0]
    assert set(five.assumed) == {"d13_row5", "d25_row5"}
    assert not five.exact
    assert "assuming" in five.display()


# ---------------------------------------------------------------------------
# global Picard groups
# ---------------------------------------------------------------------------


def test_pic_tmf_global_values():
    out = pic_tmf_global()
    assert out[2].same_structure(FgAbGroup.cyclic(64))
    assert out[3].same_structure(FgAbGroup.cyclic(9))
    assert out[5].is_zero()


def test_pic_tmf_global_locality_knobs():
    # the open 2-local differentials do not touch the 3-local answer
    base = pic_tmf_global()
    for name in ("d13_row5", "d25_row5", "d23_row7"):
        tweaked = pic_tmf_global(config={name: "iso"})
        assert tweaked[3].same_structure(base[3])
    # ... and flipping them changes (only) the 2-local order
    all_iso = pic_tmf_global(config={n: "iso" for n in
                                     ("d13_row5", "d25_row5", "d23_row7")})
    assert all_iso[2].order() < base[2].order()
    assert all_iso[3].same_structure(base[3])


def test_pic_tmf_c4inv():
    got = pic_tmf_c4inv()
    assert got.same_structure(FgAbGroup.from_orders([2, 8]))
    # degenerate control: without the k_* contribution only Z/8 remains
    assert pic_tmf_c4inv(include_kstar=False).same_structure(FgAbGroup.cyclic(8))


def test_pic_tmf_r_integers():
    rep = pic_tmf_r(SHIPPED_RINGS["Z"])
    assert rep.quotient.same_structure(FgAbGroup.cyclic(24))
    assert rep.h0_ideal_order == 24
    assert rep.sections_order == 576
    assert rep.total_order == 576
    # consistency with the assembled global groups
    out = pic_tmf_global()
    assert rep.total_order == out[2].order() * out[3].order()


def test_pic_tmf_r_z_one_sixth():
    r = EtaleRingDescriptor("Z[1/6]", Z2, FgAbGroup.zero(), (), Z2,
                            FgAbGroup.zero(), inverted_primes=(2, 3))
    rep = pic_tmf_r(r)
    assert rep.h0_ideal_order == 1
    assert rep.sections_order == 24
    assert len(rep.notes) == 2


def test_pic_tmf_r_pic_contributes():
    r = EtaleRingDescriptor("toy", Z2, FgAbGroup.cyclic(5), (1,), Z2,
                            FgAbGroup.zero())
    rep = pic_tmf_r(r)
    assert rep.total_order == 5 * 576


# ---------------------------------------------------------------------------
# local Brauer groups
# ---------------------------------------------------------------------------


def test_lbr_tmf_structure():
    rep = lbr_tmf(32)
    assert rep.three_torsion.same_structure(FgAbGroup.cyclic(3))
    assert rep.p_gt_3_torsion.is_zero()
    assert rep.split_surjection and rep.kernel_finite
    assert rep.kernel_order_bound == 2
    assert rep.br_pi0_zero
    assert len(rep.two_local_basis) >= 15
    assert rep.two_local_basis[0] == "j^2"
    assert set(rep.assumed) == {"d13_row5", "d25_row5", "d23_row7"}


def test_lbr_tmf_window_doubling_extends_prefix():
    a = lbr_tmf(16)
    b = lbr_tmf(32)
    assert b.two_local_basis[:len(a.two_local_basis)] == a.two_local_basis
    assert len(b.two_local_basis) > len(a.two_local_basis)
    assert a.three_torsion.same_structure(b.three_torsion)


def test_lbr_tmf_rejects_tiny_window():
    with pytest.raises(ValueError):
        lbr_tmf(4)


def test_lbr_mo_structure():
    rep = lbr_m_o(32)
    assert rep.two_local_kernel_order == 8
    assert "exactly 8" in rep.kernel_footnote
    assert rep.three_local.same_structure(FgAbGroup.cyclic(3))
    assert rep.iso_after_inverting_2
    assert rep.cokernel_order_bound == 8
    assert rep.injection_distinct
    assert rep.assumed == ("d9_lbr_row6",)


def test_lbr_mo_matches_lbr_tmf_away_from_2():
    a = lbr_tmf(16)
    b = lbr_m_o(16)
    assert a.three_torsion.same_structure(b.three_local)
    assert a.two_local_basis == b.two_local_basis


def test_lbr_window_invariance_of_finite_parts():
    for n in (8, 16, 32):
        rep = lbr_m_o(n)
        assert rep.two_local_kernel_order == 8
        assert rep.cokernel_order_bound == 8
