import shutil
from pathlib import Path

import pytest

import bpfgl.golden as golden
from bpfgl.checks import check_ids
from bpfgl.poly import F2, Poly

REPO_GOLDEN = Path(__file__).resolve().parent.parent / "golden"


def test_repository_files_are_current():
    for cid in check_ids():
        r = golden.check_golden(cid, REPO_GOLDEN)
        assert r.ok, r.witness


def test_regen_is_idempotent(tmp_path):
    golden.regen_golden("pn-oracle", tmp_path)
    first = (tmp_path / "pn-oracle.txt").read_bytes()
    golden.regen_golden("pn-oracle", tmp_path)
    assert (tmp_path / "pn-oracle.txt").read_bytes() == first
    assert b"\r\n" not in first
    assert golden.check_golden("pn-oracle", tmp_path).ok


def test_sources_are_labelled():
    values = golden.parse_golden((REPO_GOLDEN / "pn-oracle.txt").read_text())
    sources = {v.name: v.source for v in values}
    assert sources["p_3"] == "published"
    assert sources["p_5"].startswith("computed: ")
    assert sources["status"] == "identity"


def test_tampering_is_detected(tmp_path):
    shutil.copy(REPO_GOLDEN / "ideal-j-n2.txt", tmp_path)
    path = tmp_path / "ideal-j-n2.txt"
    path.write_text(path.read_text().replace("v1^12*v2", "v1^12*v3", 1))
    r = golden.check_golden("ideal-j-n2", tmp_path)
    assert not r.ok and "line" in r.witness
    assert not golden.check_golden("pwk", tmp_path).ok


def test_disagreement_blocks_regen(tmp_path, monkeypatch):
    real = golden.p_n_extracted

    def wrong(n, N=None):
        out = real(n, N)
        out[4] = out[4] + Poly.v(1, F2, 14)
        return out

    monkeypatch.setattr(golden, "p_n_extracted", wrong)
    with pytest.raises(golden.GoldenError, match="p_4"):
        golden.regen_golden("pn-oracle", tmp_path)
    assert not (tmp_path / "pn-oracle.txt").exists()


def test_init_writes_skeletons_once(tmp_path):
    made = golden.init_golden(tmp_path)
    assert len(made) == len(check_ids())
    assert golden.init_golden(tmp_path) == []
    assert golden.parse_golden(made[0].read_text()) == []


def test_malformed_line():
    with pytest.raises(golden.GoldenError):
        golden.parse_golden("p_1 v2")
