"""
Energy ratio versus round trips for R = 0.98: cw and Gaussian pulses with
a = 100, 200, 400, plus the asymptotic values the pulse curves approach.

    python scripts/pulse_buildup.py [--plot pulse_buildup.png]
"""

import argparse

import numpy as np

from motirr import SourceSpec, eta_curve, eta_limit

R = 0.98


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=4000)
    ap.add_argument("--plot", help="write a PNG (needs matplotlib)")
    args = ap.parse_args()

    ns = np.arange(0, args.n_max + 1, 10)
    sources = [SourceSpec.cw()] + [SourceSpec.pulse(a) for a in (100, 200, 400)]
    curves = {src: eta_curve(R, ns, src) for src in sources}
    print(f"{'source':>10} {'eta_100':>12} {'eta_400':>12} {'eta_nmax':>12} {'eta_inf':>12}")
    for src, c in curves.items():
        label = "cw" if src.is_cw else f"a={src.a:g}"
        at = dict(zip(c.n_values.tolist(), c.eta_values.tolist()))
        print(f"{label:>10} {at[100]:12.6g} {at[400]:12.6g} {c.eta_values[-1]:12.6g} {eta_limit(R, src):12.6g}")

    if args.plot:
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots()
        for src, c in curves.items():
            label = "cw" if src.is_cw else f"a = {src.a:g}"
            ax.plot(c.n_values, c.eta_values, label=label)
            if not src.is_cw:
                ax.plot([ns[-1]], [eta_limit(R, src)], "ko")
        ax.set_xlabel("round trips n")
        ax.set_ylabel("eta_n")
        ax.set_ylim(0, 0.3)
        ax.legend()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
