"""Regenerate the golden CSV fixtures under tests/data/ through the CLI."""

from pathlib import Path

from motirr.cli import main

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

CW_R = (0.98, 0.99, 0.995, 0.997, 0.998)

FIXTURES = {
    **{
        f"cw_buildup_R{R:g}.csv": ["eta-curve", f"R={R}", "source.kind=cw", "n_max=1000", "n_step=10"]
        for R in CW_R
    },
    "pulse_buildup_cw.csv": ["eta-curve", "R=0.98", "source.kind=cw", "n_max=4000", "n_step=20"],
    "pulse_buildup.csv": ["eta-curve", "R=0.98", "source.kind=pulse", "source.a=100,200,400", "n_max=4000", "n_step=20"],
    "pulse_limits.csv": ["eta-limit", "R=0.98", "source.kind=pulse", "source.a=100,200,400"],
}


def fixture_args(name):
    return FIXTURES[name] + ["-o", str(DATA / name)]


if __name__ == "__main__":
    DATA.mkdir(parents=True, exist_ok=True)
    for name in FIXTURES:
        code = main(fixture_args(name))
        if code:
            raise SystemExit(code)
