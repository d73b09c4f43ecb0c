import shutil
import subprocess

import numpy as np
import pytest

from runup.cli import EXIT_BREAKING, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from runup.config import ConfigError, parse_config, read_config_file
from runup.core import Grid1D, PhysicalIC, ShorelineSeries
from runup.csvio import InputError, emit_results, read_series_csv, write_columns
from runup.inverse import GaussianSum


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


# configuration


def test_parse_mode_and_defaults():
    cfg = parse_config(["--mode", "roundtrip", "--bay-m", "2"])
    assert cfg.mode == "roundtrip" and cfg.m == 2.0
    assert (cfg.n_k, cfg.proj_order, cfg.fit_terms) == (2048, 2, 12)
    assert parse_config(["forward"]).mode == "forward"


def test_flag_overrides_file(tmp_path):
    f = write(tmp_path / "run.cfg", "# comment\nmode = forward\nn_k = 1024\nfit-terms = 8  # trailing\n")
    cfg = parse_config(["--config", f, "--nk", "2048"])
    assert cfg.n_k == 2048 and cfg.fit_terms == 8 and cfg.mode == "forward"
    assert parse_config(["--config", f]).n_k == 1024


def test_negative_bay_rejected():
    with pytest.raises(ConfigError, match="bay-m must be positive"):
        parse_config(["forward", "--bay-m", "-1"])


def test_unknown_key_reports_line(tmp_path):
    f = write(tmp_path / "bad.cfg", "mode = forward\n\nspeed = 3\n")
    with pytest.raises(ConfigError, match=r"bad\.cfg:3: unknown key 'speed'"):
        read_config_file(f)


def test_bad_value_reports_key(tmp_path):
    f = write(tmp_path / "bad.cfg", "nk = lots\n")
    with pytest.raises(ConfigError, match="nk expects int"):
        read_config_file(f)
    with pytest.raises(ConfigError, match="kmax"):
        parse_config(["forward", "--kmax", "nan"])


def test_mode_requirements():
    with pytest.raises(ConfigError, match="needs --in"):
        parse_config(["inverse"])
    with pytest.raises(ConfigError, match="no mode"):
        parse_config([])
    with pytest.raises(ConfigError, match="together"):
        parse_config(["forward", "--h0", "100"])


# CSV


def test_read_runup_series(tmp_path):
    t = np.linspace(-5, 5, 1000)
    write_columns(tmp_path / "r.csv", ("t", "R"), (t, np.exp(-t * t)))
    R = read_series_csv(tmp_path / "r.csv")
    assert isinstance(R, ShorelineSeries) and len(R.R) == 1000


def test_read_ic_with_zero_velocity(tmp_path):
    f = write(tmp_path / "ic.csv", "x,eta0,u0\n0,0,0\n1,1e-5,0\n2,0,0\n")
    ic = read_series_csv(f)
    assert isinstance(ic, PhysicalIC) and not ic.u0.any()


@pytest.mark.parametrize("text, match", [
    ("t,R\n0,1\n1,2\n1,3\n", "row 4"),
    ("t,R\n0,1\n2,1\n1,3\n", "row 4"),
    ("t,X\n0,1\n1,2\n", "missing column 'R'"),
    ("t,R\n0,1\n1,inf\n", "row 3.*non-finite"),
    ("t,R\n0,1\n1,abc\n", "row 3.*not a number"),
    ("t,R\n0,1\n1\n", "row 3 has 1 fields"),
    ("a,b\n0,1\n", "header must contain"),
    ("", "empty"),
])
def test_csv_errors(tmp_path, text, match):
    with pytest.raises(InputError, match=match):
        read_series_csv(write(tmp_path / "bad.csv", text))


def test_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(7)
    t = np.cumsum(rng.uniform(1e-3, 1.0, 200))
    R = rng.normal(size=200) * 10.0 ** rng.integers(-300, 300, 200)
    write_columns(tmp_path / "r.csv", ("t", "R"), (t, R))
    back = read_series_csv(tmp_path / "r.csv")
    np.testing.assert_array_equal(back.t.nodes, t)
    np.testing.assert_array_equal(back.R, R)


def test_emit_inverse_only_omits_original(tmp_path):
    t = np.linspace(0, 1, 5)
    x = np.linspace(0, 1, 4)
    ic = PhysicalIC(Grid1D(x, "x"), np.zeros(4), np.zeros(4))
    files = emit_results(tmp_path, runup=ShorelineSeries(Grid1D(t, "t"), t), recovered=ic, diagnostics={"a": 1.5})
    names = sorted(p.name for p in files)
    assert names == ["diagnostics.csv", "recovered_ic.csv", "runup.csv"]
    assert (tmp_path / "diagnostics.csv").read_text() == "metric,value\na,1.5\n"


# end to end


@pytest.fixture(scope="module")
def roundtrip_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("rt")
    assert main(["roundtrip", "--out", str(out / "a"), "--n-tau", "256"]) == EXIT_OK
    return out


def test_roundtrip_writes_six_files(roundtrip_dir):
    names = sorted(p.name for p in (roundtrip_dir / "a").iterdir())
    assert names == ["diagnostics.csv", "gamma.csv", "original_ic.csv", "plot_compare.csv",
                     "recovered_ic.csv", "runup.csv"]
    header = (roundtrip_dir / "a" / "plot_compare.csv").read_text().splitlines()[0]
    assert header == "x,eta0_orig,eta0_rec,u0_orig,u0_rec"
    diag = dict(line.split(",") for line in (roundtrip_dir / "a" / "diagnostics.csv").read_text().splitlines()[1:])
    assert float(diag["eta0_rel_err"]) < 0.1 and float(diag["u0_rel_err"]) < 0.1
    assert 0.9 < float(diag["breaking_margin"]) < 1.0


def test_rerun_is_byte_identical(roundtrip_dir):
    assert main(["roundtrip", "--out", str(roundtrip_dir / "b"), "--n-tau", "256"]) == EXIT_OK
    for f in (roundtrip_dir / "a").iterdir():
        assert f.read_bytes() == (roundtrip_dir / "b" / f.name).read_bytes(), f.name


def test_inverse_mode_from_file(roundtrip_dir, tmp_path):
    assert main(["inverse", "--in", str(roundtrip_dir / "a" / "runup.csv"), "--out", str(tmp_path)]) == EXIT_OK
    assert not (tmp_path / "original_ic.csv").exists()
    a = read_series_csv(tmp_path / "recovered_ic.csv")
    b = read_series_csv(roundtrip_dir / "a" / "recovered_ic.csv")
    np.testing.assert_array_equal(a.eta0, b.eta0)


def test_fit_mode(tmp_path):
    t = np.linspace(-4, 6, 400)
    g = GaussianSum([1e-5], [2.0], [1.0])
    write_columns(tmp_path / "r.csv", ("t", "R"), (t, g(t)))
    assert main(["fit", "--in", str(tmp_path / "r.csv"), "--fit-terms", "1", "--out", str(tmp_path / "o")]) == EXIT_OK
    a, b, c = np.loadtxt(tmp_path / "o" / "fit.csv", delimiter=",", skiprows=1)
    assert (a, b, c) == pytest.approx((1e-5, 2.0, 1.0), rel=1e-8)


def test_exit_codes(tmp_path):
    assert main(["forward", "--bay-m", "-1"]) == EXIT_CONFIG
    assert main(["forward", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["forward", "--amplitude", "2e-3", "--out", str(tmp_path / "b")]) == EXIT_BREAKING
    bad = write(tmp_path / "bad.csv", "t,R\n0,1\n0,2\n")
    assert main(["inverse", "--in", bad, "--out", str(tmp_path / "c")]) == EXIT_CONFIG
    # an IC file handed to a mode that needs a run-up series
    ic = write(tmp_path / "ic.csv", "x,eta0,u0\n0,0,0\n1,0,0\n")
    assert main(["fit", "--in", ic, "--out", str(tmp_path / "d")]) == EXIT_CONFIG
    # a run-up record far too short for the requested recovery window
    t = np.linspace(-0.5, 0.5, 64)
    write_columns(tmp_path / "short.csv", ("t", "R"), (t, 1e-5 * np.exp(-4 * t * t)))
    code = main(["inverse", "--in", str(tmp_path / "short.csv"), "--fit-terms", "1", "--n-x", "64",
                 "--out", str(tmp_path / "e")])
    assert code in (EXIT_OK, EXIT_NUMERIC)


def test_check_breaking_on_series(tmp_path):
    t = np.linspace(-5, 5, 2001)
    write_columns(tmp_path / "ok.csv", ("t", "R"), (t, 1e-3 * np.exp(-t * t)))
    write_columns(tmp_path / "bad.csv", ("t", "R"), (t, np.exp(-t * t)))
    assert main(["check-breaking", "--in", str(tmp_path / "ok.csv"), "--fit-terms", "1",
                 "--out", str(tmp_path / "o1")]) == EXIT_OK
    assert main(["check-breaking", "--in", str(tmp_path / "bad.csv"), "--fit-terms", "1",
                 "--out", str(tmp_path / "o2")]) == EXIT_BREAKING


@pytest.mark.skipif(shutil.which("runup") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = subprocess.run(["runup", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "roundtrip" in out.stdout
    bad = subprocess.run(["runup", "forward", "--bay-m", "0"], capture_output=True, text=True)
    assert bad.returncode == 2 and "bay-m must be positive" in bad.stderr
