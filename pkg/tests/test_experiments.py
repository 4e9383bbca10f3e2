"""Pipeline orchestration: artifacts, verdicts, determinism, error paths."""

import json
import os

import numpy as np
import pytest

from twophase1d.config import ConfigError, parse_config_text
from twophase1d.diagnostics import NormSeries
from twophase1d.experiments import run_experiment, validate
from twophase1d.spectral import DISPERSION_COLUMNS


def _cfg(kind, out, extra=""):
    return parse_config_text(f"[experiment]\nkind = {kind}\n"
                             f"output_dir = {out}\n" + extra)


_SMALL_RUN = ("[grid]\nL = 100.0\nN = 256\n"
              "[scheme]\nt_end = 30.0\noutput_every = 20\n"
              "[initial]\nwidth = 5.0\n"
              "[fit]\nt_lo = 1.0\nt_hi = 30.0\ntolerance = 5.0\n")


def test_nonlinear_run_writes_all_artifacts(tmp_path):
    out = str(tmp_path / "nl")
    summary = run_experiment(_cfg("nonlinear-decay", out, _SMALL_RUN),
                             quiet=True)
    for name in ("norms.csv", "fits.txt", "summary.json"):
        assert os.path.exists(os.path.join(out, name))
    assert summary["ok"] is True
    assert set(summary["verdicts"]) == {"l2", "dx1_l2", "udiff_l2"}
    series = NormSeries.from_csv(os.path.join(out, "norms.csv"))
    assert len(series) >= 10 and series.t[0] == 0.0
    with open(os.path.join(out, "summary.json")) as fh:
        on_disk = json.load(fh)
    assert on_disk["config"]["grid"] == {"L": 100.0, "N": 256}
    assert on_disk["version"] == summary["version"]
    assert {"N0", "N1"} <= set(on_disk["weighted_sups"])
    assert on_disk["weighted_sups"]["N0"]["value"] > 0


def test_fit_report_is_key_value(tmp_path):
    out = str(tmp_path / "nl")
    run_experiment(_cfg("nonlinear-decay", out, _SMALL_RUN), quiet=True)
    with open(os.path.join(out, "fits.txt")) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    assert all("=" in ln for ln in lines)
    keys = {ln.split("=")[0] for ln in lines}
    assert {"l2.alpha", "l2.verdict", "dx1_l2.alpha", "udiff_l2.alpha"} <= keys


def test_zero_amplitude_run_is_degenerate_but_ok(tmp_path):
    out = str(tmp_path / "zero")
    extra = ("[grid]\nL = 100.0\nN = 128\n[scheme]\nt_end = 5.0\n"
             "[initial]\nepsilon = 0.0\nwidth = 5.0\n")
    summary = run_experiment(_cfg("nonlinear-decay", out, extra), quiet=True)
    assert summary["ok"] is True
    assert summary["fits"] == {} and summary["verdicts"] == {}
    assert any("degenerate" in note for note in summary["notes"])
    series = NormSeries.from_csv(os.path.join(out, "norms.csv"))
    assert np.all(series.column("l2") == 0.0)


def test_norm_series_output_is_deterministic(tmp_path):
    extra = ("[grid]\nL = 100.0\nN = 128\n"
             "[scheme]\nt_end = 10.0\noutput_every = 2\n"
             "[initial]\nfamily = random-band-limited\nepsilon = 0.005\n"
             "seed = 4\n[fit]\nt_lo = 1.0\nt_hi = 10.0\ntolerance = 5.0\n")
    outs = []
    for sub in ("a", "b"):
        out = str(tmp_path / sub)
        run_experiment(_cfg("nonlinear-decay", out, extra),
                       deterministic=True, quiet=True)
        with open(os.path.join(out, "norms.csv"), "rb") as fh:
            outs.append(fh.read())
    assert outs[0] == outs[1]


def test_dispersion_run_writes_table(tmp_path):
    out = str(tmp_path / "disp")
    summary = run_experiment(_cfg("dispersion-table", out,
                                  "[dispersion]\nnum = 12\n"), quiet=True)
    assert summary["ok"] is True
    path = os.path.join(out, "dispersion.csv")
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    assert header == list(DISPERSION_COLUMNS)
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    assert table.shape == (12, len(DISPERSION_COLUMNS))
    assert np.all(np.diff(table[:, 0]) > 0)


def test_entropy_audit_reports_residual_and_factor(tmp_path):
    out = str(tmp_path / "aud")
    extra = ("[grid]\nL = 100.0\nN = 128\n[scheme]\nt_end = 20.0\n"
             "[initial]\nepsilon = 0.005\nwidth = 8.0\n")
    summary = run_experiment(_cfg("entropy-audit", out, extra), quiet=True)
    audit = summary["audit"]
    assert audit["entropy_initial"] > 0
    assert audit["residual_rel"] == pytest.approx(
        audit["residual_abs"] / audit["entropy_initial"])
    # second-order scheme: halving dx and dt cuts the residual ~4x even here
    assert summary["verdicts"]["refinement"] == "pass"
    assert summary["ok"] == all(v == "pass"
                                for v in summary["verdicts"].values())


def test_linear_spectral_short_run(tmp_path):
    out = str(tmp_path / "lin")
    extra = ("[initial]\nfamily = gaussian\n"
             "[fit]\nt_lo = 100.0\nt_hi = 1000.0\ntolerance = 0.1\n"
             "[spectral]\nsamples = 8\n")
    summary = run_experiment(_cfg("linear-spectral", out, extra), quiet=True)
    assert summary["ok"] is True
    assert summary["fits"]["k0"]["alpha"] == pytest.approx(-0.25, abs=0.1)
    assert summary["fits"]["k1"]["alpha"] == pytest.approx(-0.75, abs=0.1)
    with open(os.path.join(out, "norms.csv")) as fh:
        assert fh.readline().strip() == "t,l2_k0,l2_k1"


def test_failed_run_serializes_error_into_summary(tmp_path):
    out = str(tmp_path / "bad")
    extra = ("[grid]\nL = 40.0\nN = 256\n"
             "[initial]\nfamily = random-band-limited\nepsilon = 10.0\n"
             "seed = 1\n")
    with pytest.raises(ConfigError, match="positivity"):
        run_experiment(_cfg("nonlinear-decay", out, extra), quiet=True)
    with open(os.path.join(out, "summary.json")) as fh:
        summary = json.load(fh)
    assert summary["ok"] is False
    assert summary["error"]["type"] == "ConfigError"
    assert "positivity" in summary["error"]["message"]


def test_validate_rejects_bad_combinations(tmp_path):
    bad_family = _cfg("linear-spectral", str(tmp_path),
                      "[initial]\nfamily = compact-bump\n")
    with pytest.raises(ConfigError, match="gaussian or"):
        validate(bad_family)
    bad_positivity = _cfg("nonlinear-decay", str(tmp_path),
                          "[grid]\nL = 40.0\nN = 256\n"
                          "[initial]\nfamily = random-band-limited\n"
                          "epsilon = 10.0\nseed = 1\n")
    with pytest.raises(ConfigError, match="positivity"):
        validate(bad_positivity)
    validate(_cfg("dispersion-table", str(tmp_path)))
