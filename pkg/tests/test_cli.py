import filecmp
import json
import os

import numpy as np
import pytest

from rabivar.cli import main
from rabivar.errors import InvalidTau
from rabivar.scan import (
    LevelsConfig,
    ScanConfig,
    WavefunctionConfig,
    read_table,
    run_levels,
    run_scan,
    run_wavefunction,
    write_table,
)
from rabivar.verify import oracle_checks, run_all

SMALL_SCAN = dict(
    delta=20.0,
    tau=1.0,
    lambda_min=0.0,
    lambda_max=0.9,
    lambda_step=0.3,
    methods=("ED", "CS1", "CSS1", "CSS2"),
    n_tr=128,
)


def assert_trees_identical(a, b):
    cmp = filecmp.dircmp(a, b)
    assert not cmp.left_only and not cmp.right_only
    for name in cmp.common_files:
        with open(os.path.join(a, name), "rb") as fa, open(os.path.join(b, name), "rb") as fb:
            assert fa.read() == fb.read(), f"{name} differs"


def test_scan_outputs_and_roundtrip(tmp_path):
    out = tmp_path / "scan"
    rows = run_scan(ScanConfig(**SMALL_SCAN), str(out))
    for name in ("ED.tsv", "CS1.tsv", "CSS1.tsv", "CSS2.tsv", "combined.tsv", "meta.json", "plot.gp"):
        assert (out / name).exists()
    columns, parsed = read_table(str(out / "combined.tsv"))
    assert len(parsed) == len(rows) == 4 * 4
    for mem, disk in zip(rows, parsed):
        for col in columns:
            val = mem.get(col)
            if isinstance(val, bool):
                val = float(val)
            if val is None:
                assert disk[col] is None
            elif isinstance(val, str):
                assert disk[col] == val
            else:
                assert disk[col] == float(val)  # bit-exact float round trip


def test_scan_missing_fields_empty_not_zero(tmp_path):
    out = tmp_path / "scan"
    run_scan(ScanConfig(**SMALL_SCAN), str(out))
    _, rows = read_table(str(out / "ED.tsv"))
    for row in rows:
        for col in ("beta1", "beta2", "c1", "c2", "xi"):
            assert row[col] is None
    _, rows = read_table(str(out / "CSS1.tsv"))
    for row in rows:
        assert row["beta1"] is not None and row["xi"] is not None
        assert row["c1"] is None and row["beta2"] is None


def test_scan_deterministic_across_fresh_dirs(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    run_scan(ScanConfig(**SMALL_SCAN), str(out1))
    run_scan(ScanConfig(**SMALL_SCAN), str(out2))
    assert_trees_identical(str(out1), str(out2))


def test_scan_restart_recomputes_only_missing_rows(tmp_path):
    full_dir, partial_dir = tmp_path / "full", tmp_path / "partial"
    cfg = ScanConfig(**SMALL_SCAN)
    run_scan(cfg, str(full_dir))
    columns, rows = read_table(str(full_dir / "combined.tsv"))
    kept = [r for i, r in enumerate(rows) if i % 2 == 0]
    os.makedirs(partial_dir)
    write_table(str(partial_dir / "combined.tsv"), columns, kept)
    run_scan(cfg, str(partial_dir))
    assert_trees_identical(str(full_dir), str(partial_dir))


def test_scan_cli_flags_override_config(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"delta": 50.0, "lambda_max": 0.4, "lambda_step": 0.2, "methods": ["ED"], "n_tr": 64}))
    out = tmp_path / "out"
    rc = main(
        [
            "scan",
            "--config",
            str(cfg_file),
            "--delta",
            "10",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["config"]["delta"] == 10.0
    assert meta["config"]["lambda_max"] == 0.4
    assert meta["version"]


def test_unknown_config_key_rejected(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(SystemExit):
        main(["scan", "--config", str(cfg_file), "--out", str(tmp_path / "x")])


def test_levels_on_resolvable_detuning(tmp_path):
    out = tmp_path / "levels"
    cfg = LevelsConfig(delta=8.0, tau=0.5, g_min=0.96, g_max=1.04, g_step=0.005, n_tr=96)
    rows = run_levels(cfg, str(out))
    meta = json.loads((out / "meta.json").read_text())
    assert meta["g_c1"] == pytest.approx(np.sqrt(8.0 / 0.75))
    # closed-form splitting gives an essentially exact location; the sector
    # solve is limited by the grid step around the degeneracy
    assert abs(meta["crossing"]["CSS2"] - 1.0) < 1e-6
    assert abs(meta["crossing"]["ED"] - 1.0) <= cfg.g_step
    ed = [r for r in rows if r["method"] == "ED"]
    assert all(r["splitting"] < 0 for r in ed if r["g_ratio"] < 0.99)
    assert all(r["splitting"] > 0 for r in ed if r["g_ratio"] > 1.01)
    assert all(r["mean_photon_ground"] >= 0 for r in ed)


def test_levels_requires_tau_below_one(tmp_path):
    with pytest.raises(InvalidTau):
        run_levels(LevelsConfig(delta=8.0, tau=1.0), str(tmp_path / "x"))


def test_wavefunction_profiles(tmp_path):
    out = tmp_path / "wf"
    cfg = WavefunctionConfig(delta=100.0, tau=1.0, lambdas=(1.1,), source="ED", n_tr=256)
    summary = run_wavefunction(cfg, str(out))
    assert summary[0]["peaks_plus"] == 2
    assert summary[0]["norm"] == pytest.approx(1.0, abs=1e-3)
    _, rows = read_table(str(out / summary[0]["file"]))
    assert len(rows) == len(cfg.xs())
    cfg2 = WavefunctionConfig(delta=100.0, tau=1.0, lambdas=(1.1,), source="CSS2", n_tr=256)
    summary2 = run_wavefunction(cfg2, str(tmp_path / "wf2"))
    assert summary2[0]["peaks_plus"] == 2
    assert summary2[0]["norm"] == pytest.approx(1.0, abs=1e-3)


def test_wavefunction_source_validated(tmp_path):
    with pytest.raises(ValueError):
        run_wavefunction(WavefunctionConfig(source="XX"), str(tmp_path / "x"))


def test_verify_suite_passes_and_writes_report(tmp_path, capsys):
    rc = main(["verify", "--out", str(tmp_path / "v")])
    assert rc == 0
    text = (tmp_path / "v" / "verify.txt").read_text()
    assert "FAIL" not in text
    assert text == capsys.readouterr().out


def test_verify_flags_corrupted_antisymmetric_sign():
    results = oracle_checks(n_sets=6, corrupt="ani-sign")
    by_name = {r.name: r for r in results}
    assert not by_name["energy-two-packet-even-vs-fock"].passed
    assert not by_name["energy-two-packet-odd-vs-fock"].passed
    assert by_name["energy-single-packet-vs-fock"].passed
    assert by_name["overlap-vs-fock"].passed


def test_verify_report_deterministic():
    from rabivar.verify import format_report

    a = format_report(run_all())
    b = format_report(run_all())
    assert a == b
