"""
Trip-by-trip cavity evolution under a switchable round-trip path.

The intracavity amplitude ``c`` is taken just inside the input coupler, for a
unit cw drive. One round trip maps

    reflected = -sqrt(R) + sqrt(1 - R) * g
    c'        =  sqrt(1 - R) + sqrt(R) * g,       g = sqrt(R) e^{i psi} c

where ``g`` is the field returning to the input coupler after reflection at
the output coupler. Light reaching the output coupler leaves into D_t with
power ``(1 - R)|c|^2``. When the Pockels cell is on (``blocked``) the path is
redirected into D_p, so ``g = 0`` and ``R |c|^2`` goes to D_p.

The switch experiment drives this state machine with a schedule of Pockels
transitions, each taking effect after the cell reaction time plus a
hypothesis-dependent information delay, and samples Poisson photon arrivals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from motirr.ring import EtaCurve
from motirr.spectral import SourceSpec

DETECTORS = ("DR", "DT", "DP")


@dataclass(frozen=True)
class CavityState:
    intracavity: complex = 0j
    trips_elapsed: int = 0
    blocked: bool = False

    def __post_init__(self) -> None:
        if self.trips_elapsed < 0:
            raise ValueError("trips_elapsed must be >= 0")
        if not math.isfinite(abs(self.intracavity)):
            raise ValueError("intracavity amplitude must be finite")

    @classmethod
    def steady(cls, R: float, blocked: bool = False, psi: float = 0.0) -> "CavityState":
        """Fixed point of ``step_cavity`` for the given path configuration."""
        if blocked:
            return cls(complex(math.sqrt(1.0 - R)), 0, True)
        return cls(math.sqrt(1.0 - R) / (1.0 - R * complex(math.cos(psi), math.sin(psi))), 0, False)


def _returning(s: CavityState, R: float, psi: float) -> complex:
    if s.blocked:
        return 0j
    return math.sqrt(R) * complex(math.cos(psi), math.sin(psi)) * s.intracavity


def reflected_amplitude(s: CavityState, R: float, psi: float = 0.0) -> complex:
    """Field leaving towards D_r during the current trip."""
    return -math.sqrt(R) + math.sqrt(1.0 - R) * _returning(s, R, psi)


def trip_powers(s: CavityState, R: float, psi: float = 0.0) -> tuple[float, float, float]:
    """``(reflected, transmitted, redirected)`` powers for the current trip."""
    c2 = abs(s.intracavity) ** 2
    return (
        abs(reflected_amplitude(s, R, psi)) ** 2,
        (1.0 - R) * c2,
        R * c2 if s.blocked else 0.0,
    )


def step_cavity(s: CavityState, R: float, psi: float = 0.0) -> CavityState:
    """Advance the cavity by one round trip."""
    if not 0.0 <= R < 1.0:
        raise ValueError(f"R must lie in [0, 1), got {R}")
    c = math.sqrt(1.0 - R) + math.sqrt(R) * _returning(s, R, psi)
    return CavityState(c, s.trips_elapsed + 1, s.blocked)


def build_up_curve(R: float, n_max: int, psi: float = 0.0) -> EtaCurve:
    """Reflected power per trip for an initially empty, unblocked cavity."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    s = CavityState()
    eta = np.empty(n_max + 1)
    for n in range(n_max + 1):
        eta[n] = abs(reflected_amplitude(s, R, psi)) ** 2
        s = step_cavity(s, R, psi)
    return EtaCurve(np.arange(n_max + 1), np.minimum(eta, 1.0), SourceSpec.cw(), R)


def rounds_to_threshold(R: float, epsilon: float) -> int:
    """Smallest ``n`` with on-resonance reflected power ``R^{2n+1} <= epsilon``."""
    if not 0.0 <= R < 1.0:
        raise ValueError(f"R must lie in [0, 1), got {R}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if epsilon >= R:
        return 0
    n = max(0, math.ceil((math.log(epsilon) / math.log(R) - 1.0) / 2.0))
    # the logarithm ratio can land one off near integers
    while R ** (2 * n + 1) > epsilon:
        n += 1
    while n > 0 and R ** (2 * n - 1) <= epsilon:
        n -= 1
    return n


def implied_round_trip_time(R: float, epsilon: float, settle_ns: float) -> float:
    """Round-trip time [ns] for which the reflected power falls to ``epsilon`` within ``settle_ns``."""
    return settle_ns / rounds_to_threshold(R, epsilon)


@dataclass(frozen=True)
class SwitchScenario:
    """
    Pockels-cell switching run.

    ``schedule`` lists ``(time_ns, blocked)`` transitions. Before the first
    one the path is in ``initial_blocked`` state and the cavity has reached
    its fixed point for it. ``info_delay`` is the extra latency of the delayed
    hypothesis; the instantaneous hypothesis always uses zero.
    """

    schedule: tuple[tuple[float, bool], ...]
    round_trip_time: float
    photon_rate: float
    duration: float
    pockels_reaction: float = 0.1
    info_delay: float = 4.0
    initial_blocked: bool = False

    def __post_init__(self) -> None:
        sched = tuple((float(t), bool(b)) for t, b in self.schedule)
        object.__setattr__(self, "schedule", sched)
        if not self.round_trip_time > 0:
            raise ValueError(f"round_trip_time must be positive, got {self.round_trip_time}")
        if not self.photon_rate > 0:
            raise ValueError(f"photon_rate must be positive, got {self.photon_rate}")
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.pockels_reaction < 0 or self.info_delay < 0:
            raise ValueError("pockels_reaction and info_delay must be non-negative")
        times = [t for t, _ in sched]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("schedule times must be strictly increasing")
        if times and (times[0] < 0 or times[-1] > self.duration):
            raise ValueError(f"schedule times must lie in [0, {self.duration}]")

    def hypotheses(self) -> dict[str, float]:
        hyp = {"instantaneous": 0.0}
        if self.info_delay > 0:
            hyp["delayed"] = self.info_delay
        return hyp

    @property
    def trips(self) -> int:
        return int(math.ceil(self.duration / self.round_trip_time)) + 1


@dataclass(frozen=True)
class ClickTimeline:
    """Detector clicks of one run under one hypothesis, ordered in time."""

    hypothesis: str
    times: NDArray[np.float64]
    detectors: NDArray[np.int8]

    def __len__(self) -> int:
        return self.times.size

    @property
    def events(self) -> list[tuple[float, str, str]]:
        return [(t, DETECTORS[d], self.hypothesis) for t, d in zip(self.times.tolist(), self.detectors.tolist())]

    def count(self, detector: str) -> int:
        return int(np.count_nonzero(self.detectors == DETECTORS.index(detector)))

    def first(self, detector: str, after: float = 0.0) -> float:
        """Time of the first ``detector`` click at or after ``after``; NaN if none."""
        sel = (self.detectors == DETECTORS.index(detector)) & (self.times >= after)
        idx = np.flatnonzero(sel)
        return float(self.times[idx[0]]) if idx.size else math.nan


def trip_probabilities(sc: SwitchScenario, R: float, delay: float, psi: float = 0.0) -> NDArray[np.float64]:
    """
    Per-trip photon fate probabilities, shape ``(trips, 3)`` over (DR, DT, DP).

    A photon in trip ``k`` reaches D_r with the reflected power of that trip;
    when the path is blocked it is redirected with at most the remaining
    probability, and the rest exits through D_t.
    """
    if not 0.0 <= R < 1.0:
        raise ValueError(f"R must lie in [0, 1), got {R}")
    lag = sc.pockels_reaction + delay
    switches = [(t + lag, b) for t, b in sc.schedule]
    s = CavityState.steady(R, sc.initial_blocked, psi)
    out = np.empty((sc.trips, 3))
    i = 0
    for k in range(sc.trips):
        t = k * sc.round_trip_time
        while i < len(switches) and switches[i][0] <= t:
            s = replace(s, blocked=switches[i][1])
            i += 1
        refl, _, redirected = trip_powers(s, R, psi)
        p_dr = min(refl, 1.0)
        p_dp = min(redirected, 1.0 - p_dr)
        out[k] = (p_dr, 1.0 - p_dr - p_dp, p_dp)
        s = step_cavity(s, R, psi)
    return out


def _sample(sc: SwitchScenario, tables: dict[str, NDArray[np.float64]], rng: np.random.Generator) -> dict[str, ClickTimeline]:
    n = rng.poisson(sc.photon_rate * sc.duration)
    times = np.sort(rng.uniform(0.0, sc.duration, n))
    u = rng.random(n)
    trip = np.minimum((times / sc.round_trip_time).astype(np.int64), sc.trips - 1)
    result = {}
    for tag, table in tables.items():
        cum = np.cumsum(table[trip], axis=1)
        det = (u[:, None] >= cum[:, :2]).sum(axis=1).astype(np.int8)
        result[tag] = ClickTimeline(tag, times, det)
    return result


def run_switch_experiment(sc: SwitchScenario, R: float, seed: int = 0) -> dict[str, ClickTimeline]:
    """
    One run of the switching experiment, one timeline per hypothesis.

    Both hypotheses see the same photon arrivals and uniforms, so any
    difference between their timelines comes from the switch latency alone.
    """
    tables = {tag: trip_probabilities(sc, R, d) for tag, d in sc.hypotheses().items()}
    return _sample(sc, tables, np.random.default_rng(np.random.SeedSequence(seed)))


def first_click_times(
    sc: SwitchScenario, R: float, runs: int, seed: int = 0, detector: str = "DR", after: float = 0.0
) -> dict[str, NDArray[np.float64]]:
    """First ``detector`` click time at or after ``after`` for ``runs`` independent runs."""
    tables = {tag: trip_probabilities(sc, R, d) for tag, d in sc.hypotheses().items()}
    streams = np.random.SeedSequence(seed).spawn(runs)
    out = {tag: np.empty(runs) for tag in tables}
    for i, ss in enumerate(streams):
        for tag, tl in _sample(sc, tables, np.random.default_rng(ss)).items():
            out[tag][i] = tl.first(detector, after)
    return out
