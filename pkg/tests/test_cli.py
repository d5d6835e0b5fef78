import csv
import filecmp
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from motirr.cli import emit_csv, main, parse_config, run_command
from motirr.errors import ConfigError

ROOT = Path(__file__).resolve().parent.parent
DATA = Path(__file__).resolve().parent / "data"
sys.path.insert(0, str(ROOT / "scripts"))
import make_fixtures  # noqa: E402


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_minimal_config():
    cfg = parse_config("command = eta-curve\nR = 0.98\nsource.kind = cw\nn_max = 300\n")
    assert cfg.command == "eta-curve"
    assert cfg.R == 0.98 and cfg["n_max"] == 300
    assert cfg.sources[0].is_cw
    assert cfg.seed == 0
    assert cfg["grid.points"] == 4001 and cfg["grid.span_sigmas"] == 8.0
    assert cfg["outcomes.efficiency"] == 0.85


def test_comments_and_blank_lines():
    cfg = parse_config("# comment\n\ncommand = spectrum  # trailing\nR=0.5\n")
    assert cfg.R == 0.5


@pytest.mark.parametrize(
    "text,key",
    [
        ("command=eta-curve\nR=1.2\nsource.kind=cw\nn_max=3", "R"),
        ("command=eta-curve\nR=0.98\nsource.kind=pulse\nn_max=3", "source.a"),
        ("command=eta-curve\nR=0.98\nsource.kind=cw", "n_max"),
        ("command=eta-curve\nR=0.98\nsource.kind=cw\nn_max=3\nbogus=1", "bogus"),
        ("command=spectrum\nR=abc", "R"),
        ("command=eta-limit\nR=0.9\nsource.kind=pulse\nsource.a=100\ngrid.points=100", "grid.points"),
        ("command=eta-limit\nR=0.9\nsource.kind=pulse\nsource.a=100\ngrid.span_sigmas=2", "grid.span_sigmas"),
        ("command=outcomes\nR=0.9\noutcomes.efficiency=2", "outcomes.efficiency"),
        ("command=transient\nR=0.9\nscenario.T_ns=0.1\nscenario.rate_ns=1", "scenario.duration_ns"),
        ("command=nope", "command"),
        ("R=0.9", "command"),
    ],
)
def test_config_errors_name_key(text, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.key == key
    assert key in str(exc.value)


def test_pulse_error_mentions_a():
    with pytest.raises(ConfigError, match=r"\ba\b"):
        parse_config("command=eta-curve\nR=0.98\nsource.kind=pulse\nn_max=3")


def test_overrides_take_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("command = eta-curve\nR = 0.9\nsource.kind = cw\nn_max = 3\n")
    out = tmp_path / "o.csv"
    assert main(["--config", str(cfg_file), "R=0.98", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert float(rows[2][1]) == pytest.approx(0.98**3, rel=1e-11)


def test_eta_curve_cw_equals_closed_form(tmp_path):
    out = tmp_path / "eta.csv"
    assert main(["eta-curve", "R=0.98", "source.kind=cw", "n_max=300", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["n", "eta"]
    n = np.array([int(r[0]) for r in rows[1:]])
    eta = np.array([float(r[1]) for r in rows[1:]])
    np.testing.assert_array_equal(n, np.arange(301))
    np.testing.assert_allclose(eta, 0.98 ** (2 * n + 1), rtol=1e-11)


def test_eta_curve_pulse_three_curves(tmp_path, capsys):
    out = tmp_path / "pulse.csv"
    code = main(["eta-curve", "R=0.98", "source.kind=pulse", "source.a=100,200,400", "n_max=400", "n_step=50", "-o", str(out)])
    assert code == 0
    curves = [np.array([float(r[1]) for r in read_csv(tmp_path / f"pulse_a{a}.csv")[1:]]) for a in (100, 200, 400)]
    assert np.all(curves[0][1:] > curves[1][1:]) and np.all(curves[1][1:] > curves[2][1:])
    report = capsys.readouterr().out
    assert report.count("eta_limit") == 3


def test_outcomes_exact_only(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["outcomes", "R=0.98", "outcomes.bomb=true", "outcomes.trials=0", "-o", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["outcome", "probability", "empirical"]
    probs = {r[0]: float(r[1]) for r in rows[1:]}
    assert probs["DR"] == 0.98
    assert probs["EXPLODE"] == pytest.approx(0.0196, abs=1e-12)
    assert probs["DT"] == pytest.approx(0.0004, abs=1e-12)
    assert all(r[2] == "" for r in rows[1:])


def test_outcomes_records_export(tmp_path):
    out, rec = tmp_path / "o.csv", tmp_path / "trials.csv"
    args = ["outcomes", "R=0.98", "outcomes.trials=1000", f"outcomes.records_output={rec}", "--seed", "3", "-o", str(out)]
    assert main(args) == 0
    rows = read_csv(rec)
    assert rows[0] == ["trial_id", "outcome", "detected"]
    assert len(rows) == 1001
    assert {r[1] for r in rows[1:]} <= {"DR", "DT", "EXPLODE", "LOST"}


def test_million_row_export_round_trips(tmp_path):
    from motirr.outcomes import simulate_trials

    batch, _ = simulate_trials(0.98, True, 1_000_000, seed=0)
    path = tmp_path / "big.csv"
    emit_csv(("trial_id", "outcome", "detected"), zip(batch.trial_id, batch.outcome, batch.detected), path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        assert next(reader) == ["trial_id", "outcome", "detected"]
        back = np.array([(int(a), int(b), int(c)) for a, b, c in reader])
    np.testing.assert_array_equal(back[:, 0], batch.trial_id)
    np.testing.assert_array_equal(back[:, 1], batch.outcome)
    np.testing.assert_array_equal(back[:, 2], batch.detected)


def test_empty_rows_header_only(tmp_path):
    path = tmp_path / "e.csv"
    emit_csv(("n", "eta"), [], path)
    assert path.read_bytes() == b"n,eta\n"


@pytest.mark.parametrize(
    "args",
    [
        ["reflectivity", "gap.points=50"],
        ["match-gap", "alpha=0.0005,0.0015"],
        ["eta-limit", "R=0.98", "source.kind=pulse", "source.a=200"],
        ["spectrum", "R=0.98", "spectrum.points=101"],
        ["outcomes", "R=0.98", "outcomes.trials=5000"],
        ["transient", "R=0.98", "scenario.T_ns=0.1", "scenario.rate_ns=2", "scenario.duration_ns=30", "scenario.schedule=5:on,15:off"],
    ],
)
def test_commands_byte_deterministic(tmp_path, args):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = a.read_bytes()
    assert data.endswith(b"\n") and b"\r" not in data
    data.decode("utf-8")


def test_transient_schema(tmp_path):
    out = tmp_path / "t.csv"
    args = ["transient", "R=0.98", "scenario.T_ns=0.1", "scenario.rate_ns=2", "scenario.duration_ns=30", "scenario.schedule=5:on,15:off"]
    assert main(args + ["-o", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["time_ns", "detector", "hypothesis"]
    times = [float(r[0]) for r in rows[1:]]
    assert times == sorted(times)
    assert {r[1] for r in rows[1:]} <= {"DR", "DT", "DP"}
    assert {r[2] for r in rows[1:]} == {"instantaneous", "delayed"}


def test_transient_report_implied_round_trip(capsys, tmp_path):
    args = ["transient", "R=0.9999", "scenario.T_ns=0.01", "scenario.rate_ns=0.1", "scenario.duration_ns=10"]
    assert main(args + ["-o", str(tmp_path / "t.csv")]) == 0
    out = capsys.readouterr().out
    assert "23025" in out and "4.343 ps" in out


def test_spectrum_csv():
    cfg = parse_config({"command": "spectrum", "R": "0.98", "spectrum.points": "5"})
    header, rows = run_command(cfg).tables[""]
    assert header == ("u", "ratio")
    assert rows[2][1] == 0.0


def test_exit_codes(tmp_path, capsys):
    assert main(["eta-curve", "R=1.2", "source.kind=cw", "n_max=3"]) == 2
    assert main(["match-gap", "alpha=50", "coupler.n1=1.7", "coupler.theta1_deg=50"]) == 2
    assert main(["eta-limit", "R=0.98", "source.kind=pulse", "source.a=200", "grid.points=5"]) == 3
    assert main(["eta-curve", "R=0.9", "source.kind=cw", "n_max=3", "-o", str(tmp_path / "nodir" / "x.csv")]) == 4
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 4
    capsys.readouterr()


def test_config_error_writes_nothing(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["eta-curve", "R=0.98", "source.kind=pulse", "n_max=3", "-o", str(out)]) == 2
    assert not out.exists()


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "motirr", "eta-curve", "R=0.5", "source.kind=cw", "n_max=2"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout == "n,eta\n0,0.5\n1,0.125\n2,0.03125\n"


@pytest.mark.parametrize("name", sorted(make_fixtures.FIXTURES))
def test_golden_fixtures_byte_stable(tmp_path, name, monkeypatch):
    monkeypatch.setattr(make_fixtures, "DATA", tmp_path)
    assert main(make_fixtures.fixture_args(name)) == 0
    produced = sorted(p.name for p in tmp_path.iterdir())
    assert produced
    for fname in produced:
        assert filecmp.cmp(tmp_path / fname, DATA / fname, shallow=False), fname


def test_flags_may_precede_overrides(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["eta-curve", "-o", str(out), "R=0.5", "--seed", "1", "source.kind=cw", "n_max=1"]) == 0
    assert out.read_text() == "n,eta\n0,0.5\n1,0.125\n"
