"""
cw build-up curves for R = 0.98, 0.99, 0.995, 0.997, 0.998, computed both from
the energy-ratio series and by iterating the cavity trip by trip.

    python scripts/cw_buildup.py [--plot cw_buildup.png]
"""

import argparse

import numpy as np

from motirr import SourceSpec, build_up_curve, eta_curve, rounds_to_threshold

RS = (0.98, 0.99, 0.995, 0.997, 0.998)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=1500)
    ap.add_argument("--plot")
    args = ap.parse_args()

    ns = np.arange(args.n_max + 1)
    curves = {}
    for R in RS:
        series = eta_curve(R, ns, SourceSpec.cw())
        trips = build_up_curve(R, args.n_max)
        dev = np.max(np.abs(series.eta_values - trips.eta_values))
        curves[R] = series
        print(f"R={R:<6} eta_500={series.eta_values[500]:.6g}  n(eta<=0.01)={rounds_to_threshold(R, 0.01):5d}  "
              f"max|series - trips|={dev:.2g}")

    if args.plot:
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots()
        for R, c in curves.items():
            ax.plot(c.n_values, c.eta_values, label=f"R = {R}")
        ax.set_xlabel("round trips n")
        ax.set_ylabel("eta_n")
        ax.legend()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
