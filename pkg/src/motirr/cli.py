"""
Command-line front end.

Usage::

    motirr COMMAND [--config FILE] [-o OUT] [--seed N] [KEY=VALUE ...]

Settings are resolved in order: built-in defaults, then the config file
(flat ``key = value`` lines, ``#`` comments), then ``KEY=VALUE`` words on the
command line, then the explicit ``--output`` / ``--seed`` flags.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from motirr import ftir, outcomes, ring, spectral, transient
from motirr.errors import ConfigError, ConvergenceError

COMMANDS = ("reflectivity", "match-gap", "eta-curve", "eta-limit", "spectrum", "outcomes", "transient")

CSV_HEADERS = {
    "reflectivity": ("x_m", "r", "delta"),
    "match-gap": ("alpha", "x_m", "r"),
    "eta-curve": ("n", "eta"),
    "eta-limit": ("a", "eta_limit"),
    "spectrum": ("u", "ratio"),
    "outcomes": ("outcome", "probability", "empirical"),
    "transient": ("time_ns", "detector", "hypothesis"),
}


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _schedule(text: str) -> tuple[tuple[float, bool], ...]:
    # "5:on,50:off"
    out = []
    for item in text.split(","):
        if not item.strip():
            continue
        t, state = item.split(":")
        out.append((float(t), _bool(state)))
    return tuple(out)


# key -> (parser, default)
KEYS: dict[str, tuple[Callable[[str], Any], Any]] = {
    "command": (str, None),
    "R": (float, None),
    "alpha": (_floats, None),
    "source.kind": (str, None),
    "source.a": (_floats, None),
    "source.amplitude_scale": (float, 1.0),
    "grid.points": (int, spectral.DEFAULT_POINTS),
    "grid.span_sigmas": (float, spectral.DEFAULT_SPAN_SIGMAS),
    "n_max": (int, None),
    "n_step": (int, 1),
    "coupler.lambda0": (float, 633e-9),
    "coupler.n1": (float, 1.5),
    "coupler.n2": (float, 1.5),
    "coupler.n_gap": (float, 1.0),
    "coupler.theta1_deg": (float, 45.0),
    "coupler.printed_b": (_bool, False),
    "gap.max": (float, None),
    "gap.points": (int, 201),
    "spectrum.psi_max": (float, math.pi),
    "spectrum.points": (int, 2001),
    "outcomes.bomb": (_bool, True),
    "outcomes.trials": (int, 0),
    "outcomes.efficiency": (float, 0.85),
    "outcomes.n": (int, None),
    "outcomes.records_output": (str, None),
    "scenario.T_ns": (float, None),
    "scenario.rate_ns": (float, None),
    "scenario.duration_ns": (float, None),
    "scenario.reaction_ns": (float, 0.1),
    "scenario.info_delay_ns": (float, 4.0),
    "scenario.schedule": (_schedule, ()),
    "scenario.initial_blocked": (_bool, False),
    "scenario.epsilon": (float, 0.01),
    "scenario.settle_ns": (float, 100.0),
    "seed": (int, 0),
    "output": (str, None),
}

REQUIRED = {
    "reflectivity": (),
    "match-gap": ("alpha",),
    "eta-curve": ("R", "source.kind", "n_max"),
    "eta-limit": ("R", "source.kind"),
    "spectrum": ("R",),
    "outcomes": ("R",),
    "transient": ("R", "scenario.T_ns", "scenario.rate_ns", "scenario.duration_ns"),
}


def parse_pairs(text: str) -> dict[str, str]:
    """Read flat ``key = value`` lines. Blank lines and ``#`` comments are skipped."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        pairs[key] = value
    return pairs


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one CLI command."""

    command: str
    settings: dict[str, Any]
    sources: tuple[spectral.SourceSpec, ...] = ()
    coupler: ftir.CouplerParams | None = None
    scenario: transient.SwitchScenario | None = None
    given: frozenset[str] = frozenset()

    def __getitem__(self, key: str) -> Any:
        return self.settings[key]

    @property
    def R(self) -> float | None:
        return self.settings["R"]

    @property
    def seed(self) -> int:
        return self.settings["seed"]

    @property
    def output_path(self) -> str | None:
        return self.settings["output"]


def _grid_for(cfg_settings: dict[str, Any], a: float) -> spectral.FrequencyGrid:
    return spectral.make_grid(a, cfg_settings["grid.points"], cfg_settings["grid.span_sigmas"])


def parse_config(text: str | dict[str, str], overrides: dict[str, str] | None = None) -> RunConfig:
    """
    Validate a flat key/value document into a ``RunConfig``.

    Raises ``ConfigError`` naming the offending key for unknown keys, missing
    required keys and out-of-range values.
    """
    pairs = dict(parse_pairs(text) if isinstance(text, str) else text)
    pairs.update(overrides or {})
    for key in pairs:
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
    s: dict[str, Any] = {}
    for key, (conv, default) in KEYS.items():
        if key in pairs:
            try:
                s[key] = conv(pairs[key])
            except ValueError as exc:
                raise ConfigError(key, f"cannot parse {pairs[key]!r}: {exc}") from None
        else:
            s[key] = default

    cmd = s["command"]
    if cmd is None:
        raise ConfigError("command", "missing required key")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")
    for key in REQUIRED[cmd]:
        if s[key] is None:
            raise ConfigError(key, "missing required key")

    if s["R"] is not None and not 0.0 <= s["R"] < 1.0:
        raise ConfigError("R", f"must lie in [0, 1), got {s['R']}")
    if s["alpha"] is not None and not all(a >= 0 for a in s["alpha"]):
        raise ConfigError("alpha", "must be non-negative")
    if s["n_max"] is not None and s["n_max"] < 0:
        raise ConfigError("n_max", "must be >= 0")
    if s["n_step"] < 1:
        raise ConfigError("n_step", "must be >= 1")
    points = s["grid.points"]
    if points < 3 or points % 2 == 0:
        raise ConfigError("grid.points", f"must be an odd integer >= 3, got {points}")
    if not s["grid.span_sigmas"] > 0:
        raise ConfigError("grid.span_sigmas", "must be positive")
    if s["spectrum.points"] < 2:
        raise ConfigError("spectrum.points", "must be >= 2")
    if not s["spectrum.psi_max"] > 0:
        raise ConfigError("spectrum.psi_max", "must be positive")
    if s["gap.points"] < 2:
        raise ConfigError("gap.points", "must be >= 2")
    if s["gap.max"] is not None and not s["gap.max"] > 0:
        raise ConfigError("gap.max", "must be positive")
    if s["outcomes.trials"] < 0:
        raise ConfigError("outcomes.trials", "must be >= 0")
    if not 0.0 <= s["outcomes.efficiency"] <= 1.0:
        raise ConfigError("outcomes.efficiency", "must lie in [0, 1]")
    if s["outcomes.n"] is not None and s["outcomes.n"] < 0:
        raise ConfigError("outcomes.n", "must be >= 0")
    if not s["scenario.epsilon"] > 0:
        raise ConfigError("scenario.epsilon", "must be positive")
    if not s["scenario.settle_ns"] > 0:
        raise ConfigError("scenario.settle_ns", "must be positive")
    if s["seed"] < 0:
        raise ConfigError("seed", "must be non-negative")

    sources: tuple[spectral.SourceSpec, ...] = ()
    kind = s["source.kind"]
    if kind is not None:
        if kind == "cw":
            if s["source.a"] is not None:
                raise ConfigError("source.a", "a cw source takes no coherence ratio")
            sources = (spectral.SourceSpec.cw(s["source.amplitude_scale"]),)
        elif kind == "pulse":
            if not s["source.a"]:
                raise ConfigError("source.a", "missing required key a for a pulse source")
            try:
                sources = tuple(spectral.SourceSpec.pulse(a, s["source.amplitude_scale"]) for a in s["source.a"])
            except ValueError as exc:
                raise ConfigError("source.a", str(exc)) from None
            for src in sources:
                grid = _grid_for(s, src.a)
                try:
                    grid.check_covers(src.a)
                except ValueError as exc:
                    raise ConfigError("grid.span_sigmas", str(exc)) from None
        else:
            raise ConfigError("source.kind", f"must be cw or pulse, got {kind!r}")
    if len(sources) > 1 and s["output"] is None and cmd == "eta-curve":
        raise ConfigError("output", "several curves need an output path")

    coupler = None
    if cmd in ("reflectivity", "match-gap"):
        try:
            coupler = ftir.CouplerParams(
                s["coupler.lambda0"],
                s["coupler.n1"],
                s["coupler.n2"],
                math.radians(s["coupler.theta1_deg"]),
                s["coupler.n_gap"],
                s["coupler.printed_b"],
            )
            ftir.evanescent_b(coupler)
        except ValueError as exc:
            raise ConfigError("coupler", str(exc)) from None

    scenario = None
    if cmd == "transient":
        try:
            scenario = transient.SwitchScenario(
                s["scenario.schedule"],
                s["scenario.T_ns"],
                s["scenario.rate_ns"],
                s["scenario.duration_ns"],
                s["scenario.reaction_ns"],
                s["scenario.info_delay_ns"],
                s["scenario.initial_blocked"],
            )
        except ValueError as exc:
            raise ConfigError("scenario", str(exc)) from None
    return RunConfig(cmd, s, sources, coupler, scenario, frozenset(pairs) | {"seed"})


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: str | Path | None) -> None:
    """Write a comma-separated UTF-8 file, header first, 12 significant digits."""
    text = format_csv(header, rows)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


@dataclass
class Result:
    """CSV tables keyed by output path suffix, plus report lines."""

    tables: dict[str, tuple[Sequence[str], list[Sequence[Any]]]]
    report: list[str]


def _n_values(cfg: RunConfig) -> list[int]:
    n_max = cfg["n_max"]
    ns = list(range(0, n_max + 1, cfg["n_step"]))
    if ns[-1] != n_max:
        ns.append(n_max)
    return ns


def _cmd_reflectivity(cfg: RunConfig) -> Result:
    p = cfg.coupler
    x_max = cfg["gap.max"] or 10 * p.lambda0
    xs, r, d = ftir.reflectivity_sweep(p, x_max, cfg["gap.points"])
    rows = list(zip(xs, r, d))
    rep = [
        f"evanescent b = {ftir.evanescent_b(p):.12g} 1/m",
        f"r(0) = {r[0]:.12g}, r({x_max:.6g} m) = {r[-1]:.12g}",
    ]
    return Result({"": (CSV_HEADERS["reflectivity"], rows)}, rep)


def _cmd_match_gap(cfg: RunConfig) -> Result:
    p = cfg.coupler
    rows = []
    rep = []
    for alpha in cfg["alpha"]:
        x_m = ftir.match_gap(alpha, p)
        r = ftir.complex_reflection(x_m, p).r
        rows.append((alpha, x_m, r))
        rep.append(f"alpha = {alpha:.12g}: x_m = {x_m:.12g} m, |r - exp(-alpha)| = {abs(r - math.exp(-alpha)):.3g}")
    rep.append(f"tolerance on |r|: {ftir.MATCH_TOL:g}")
    return Result({"": (CSV_HEADERS["match-gap"], rows)}, rep)


def _cmd_eta_curve(cfg: RunConfig) -> Result:
    R = cfg.R
    ns = _n_values(cfg)
    tables = {}
    rep = []
    for src in cfg.sources:
        curve = ring.eta_curve(R, ns, src)
        suffix = "" if len(cfg.sources) == 1 else f"_a{src.a:g}"
        tables[suffix] = (CSV_HEADERS["eta-curve"], curve.rows())
        label = "cw" if src.is_cw else f"pulse a={src.a:g}"
        limit = ring.eta_limit(R, src, None if src.is_cw else _grid_for(cfg.settings, src.a))
        rep.append(
            f"{label}: eta_{ns[-1]} = {curve.eta_values[-1]:.12g}, eta_limit = {limit:.12g}, "
            f"|difference| = {abs(curve.eta_values[-1] - limit):.3g}"
        )
    return Result(tables, rep)


def _cmd_eta_limit(cfg: RunConfig) -> Result:
    rows = []
    rep = []
    for src in cfg.sources:
        if src.is_cw:
            rows.append(("inf", 0.0))
            rep.append("cw: eta_limit = 0 (symbolic)")
            continue
        val = ring.eta_limit(cfg.R, src, _grid_for(cfg.settings, src.a))
        approx = ring.eta_limit_small_angle(cfg.R, src.a)
        rows.append((src.a, val))
        rep.append(f"a = {src.a:g}: eta_limit = {val:.12g} (small-angle erfcx form {approx:.12g})")
    rep.append(f"refinement tolerance: {ring.LIMIT_REFINE_TOL:g}")
    return Result({"": (CSV_HEADERS["eta-limit"], rows)}, rep)


def _cmd_spectrum(cfg: RunConfig) -> Result:
    m = cfg["spectrum.psi_max"]
    u = np.linspace(-m, m, cfg["spectrum.points"])
    ratio = ring.asymptotic_spectral_ratio(cfg.R, u)
    other = ring.asymptotic_spectral_ratio(cfg.R, u, "lorentzian")
    rep = [f"max |amplitude form - lorentzian form| = {np.max(np.abs(ratio - other)):.3g}"]
    return Result({"": (CSV_HEADERS["spectrum"], list(zip(u, ratio)))}, rep)


def _cmd_outcomes(cfg: RunConfig) -> Result:
    R, bomb, trials, eff = cfg.R, cfg["outcomes.bomb"], cfg["outcomes.trials"], cfg["outcomes.efficiency"]
    exact = outcomes.exact_distribution(R, bomb, cfg["outcomes.n"])
    tables = {}
    rep = [f"bomb present: {bomb}"]
    if trials:
        expected = exact.thinned(eff)
        batch, emp = outcomes.simulate_trials(R, bomb, trials, eff, cfg.seed, n=cfg["outcomes.n"])
        rows = [(o.name, p, e) for o, p, e in zip(outcomes.Outcome, expected.as_tuple(), emp.as_tuple())]
        rep.append(f"{trials} trials, detector efficiency {eff:g}, seed {cfg.seed}")
        for o, p, e in zip(outcomes.Outcome, expected.as_tuple(), emp.as_tuple()):
            sigma = math.sqrt(max(p * (1 - p), 0.0) / trials)
            z = abs(e - p) / sigma if sigma > 0 else (0.0 if e == p else math.inf)
            rep.append(f"  {o.name:8s} expected {p:.6g} empirical {e:.6g} ({z:.2f} sigma)")
        if cfg["outcomes.records_output"]:
            tables["@records"] = (
                ("trial_id", "outcome", "detected"),
                [(r.trial_id, r.outcome.name, r.detected) for r in batch.records()],
            )
    else:
        rows = [(o.name, p, "") for o, p in zip(outcomes.Outcome, exact.as_tuple())]
        rep.append("exact distribution only")
    merit = outcomes.ifm_merit(R)
    rep.append(f"p_dr = {exact.p_dr:.12g}, p_explode = {exact.p_explode:.12g}, p_dt = {exact.p_dt:.12g}")
    rep.append(f"detection merit {merit.p_detect:.12g}, safe fraction 1/(2-R) = {merit.safe_fraction:.12g}")
    tables[""] = (CSV_HEADERS["outcomes"], rows)
    return Result(tables, rep)


def _cmd_transient(cfg: RunConfig) -> Result:
    R, sc = cfg.R, cfg.scenario
    eps = cfg["scenario.epsilon"]
    n_thr = transient.rounds_to_threshold(R, eps)
    timelines = transient.run_switch_experiment(sc, R, cfg.seed)
    rows = []
    for tag in sorted(timelines):
        rows.extend(timelines[tag].events)
    rows.sort(key=lambda e: (e[0], e[2]))
    rep = [
        f"round trips until reflected power <= {eps:g}: {n_thr}",
        f"build-up time at T = {sc.round_trip_time:g} ns: {n_thr * sc.round_trip_time:.6g} ns",
    ]
    if n_thr:
        settle = cfg["scenario.settle_ns"]
        rep.append(
            f"settling within {settle:g} ns would need T = "
            f"{transient.implied_round_trip_time(R, eps, settle) * 1e3:.4g} ps (parameter-dependent, not asserted)"
        )
    for tag in sorted(timelines):
        tl = timelines[tag]
        rep.append(f"{tag}: " + ", ".join(f"{d}={tl.count(d)}" for d in transient.DETECTORS))
    return Result({"": (CSV_HEADERS["transient"], rows)}, rep)


DISPATCH: dict[str, Callable[[RunConfig], Result]] = {
    "reflectivity": _cmd_reflectivity,
    "match-gap": _cmd_match_gap,
    "eta-curve": _cmd_eta_curve,
    "eta-limit": _cmd_eta_limit,
    "spectrum": _cmd_spectrum,
    "outcomes": _cmd_outcomes,
    "transient": _cmd_transient,
}


def run_command(cfg: RunConfig) -> Result:
    return DISPATCH[cfg.command](cfg)


def _output_path(base: str | None, suffix: str) -> str | None:
    if base is None or not suffix:
        return base
    p = Path(base)
    return str(p.with_name(f"{p.stem}{suffix}{p.suffix or '.csv'}"))


def write_result(cfg: RunConfig, result: Result, report_stream=None) -> None:
    for suffix, (header, rows) in result.tables.items():
        if suffix == "@records":
            emit_csv(header, rows, cfg["outcomes.records_output"])
        else:
            emit_csv(header, rows, _output_path(cfg.output_path, suffix))
    stream = report_stream or (sys.stdout if cfg.output_path else sys.stderr)
    print(f"# motirr {cfg.command}", file=stream)
    for k in sorted(cfg.given - {"command"}):
        print(f"#   {k} = {cfg.settings[k]}", file=stream)
    for line in result.report:
        print(line, file=stream)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="motirr", description="Ring-resonator interaction-free detection simulator.")
    ap.add_argument("words", nargs="*", metavar="COMMAND|KEY=VALUE", help=f"one of {', '.join(COMMANDS)} and overrides")
    ap.add_argument("-c", "--config", help="flat key=value config file")
    ap.add_argument("-o", "--output", help="CSV output path (stdout if omitted)")
    ap.add_argument("--seed", type=int, help="random seed (default 0)")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_intermixed_args(argv)
    try:
        overrides: dict[str, str] = {}
        for word in args.words:
            if "=" in word:
                k, v = word.split("=", 1)
                overrides[k.strip()] = v.strip()
            elif word in COMMANDS:
                overrides["command"] = word
            else:
                raise ConfigError("command", f"unknown command {word!r}")
        if args.output is not None:
            overrides["output"] = args.output
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        text = ""
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read config: {exc}", file=sys.stderr)
                return 4
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_command(cfg)
    except ConvergenceError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        write_result(cfg, result)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
