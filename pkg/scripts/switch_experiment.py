"""
Pockels-cell switching runs: how long D_r keeps firing after the round-trip
path is unblocked, and whether an instantaneous response can be told apart
from one delayed by the light travel time inside the crystal.

    python scripts/switch_experiment.py [--runs 10000]
"""

import argparse

import numpy as np
from scipy import stats

from motirr.transient import SwitchScenario, first_click_times, implied_round_trip_time, rounds_to_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    R, eps = 0.9999, 0.01
    n = rounds_to_threshold(R, eps)
    print(f"R={R}: {n} round trips until reflected power <= {eps}")
    print(f"settling in 100 ns needs a round-trip time of {implied_round_trip_time(R, eps, 100.0) * 1e3:.3g} ps")

    # switching on: one photon per 0.1 ns, D_r monitored right after
    sc = SwitchScenario(((2.0, True),), round_trip_time=0.05, photon_rate=10.0, duration=12.0, info_delay=4.0)
    ft = first_click_times(sc, 0.98, args.runs, args.seed)
    inst, dly = ft["instantaneous"], ft["delayed"]
    ks = stats.ks_2samp(inst, dly)
    print(f"first D_r click after switch-on: instantaneous median {np.median(inst):.3f} ns, "
          f"delayed median {np.median(dly):.3f} ns, KS D={ks.statistic:.3f} p={ks.pvalue:.2g}")


if __name__ == "__main__":
    main()
