"""
Single-photon fates at the resonator and their Monte Carlo sampling.

With the object in the ring a photon is reflected into D_r with probability
``R``, absorbed by the object with ``R (1 - R)`` and transmitted into D_t with
``(1 - R)^2``. Without the object and with the resonance fully built up the
photon always leaves through D_t.

Random numbers come from numpy's PCG64. The trial range is cut into fixed
blocks of ``SHARD_SIZE`` trials and block ``k`` draws from
``SeedSequence(seed, spawn_key=(k,))``, so records depend only on the seed,
never on how many workers processed the blocks.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
from numpy.typing import NDArray

from motirr.ring import eta_n
from motirr.spectral import SourceSpec

SHARD_SIZE = 1 << 16
SUM_TOL = 1e-12


class Outcome(enum.IntEnum):
    DR = 0
    DT = 1
    EXPLODE = 2
    LOST = 3


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the four single-photon fates."""

    p_dr: float
    p_dt: float
    p_explode: float
    p_lost: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_dr", "p_dt", "p_explode", "p_lost"):
            p = getattr(self, name)
            if not -SUM_TOL <= p <= 1 + SUM_TOL:
                raise ValueError(f"{name}={p} outside [0, 1]")
        if abs(self.total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {self.total!r}, not 1")

    @property
    def total(self) -> float:
        return math.fsum(self.as_tuple())

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_dr, self.p_dt, self.p_explode, self.p_lost)

    def as_dict(self) -> dict[str, float]:
        return {o.name: p for o, p in zip(Outcome, self.as_tuple())}

    def thinned(self, efficiency: float) -> "OutcomeDistribution":
        """Distribution of registered events when D_r and D_t fire with ``efficiency``."""
        if not 0.0 <= efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in [0, 1], got {efficiency}")
        missed = (1.0 - efficiency) * (self.p_dr + self.p_dt)
        return OutcomeDistribution(
            efficiency * self.p_dr, efficiency * self.p_dt, self.p_explode, self.p_lost + missed
        )


def exact_distribution(R: float, bomb_present: bool, n: int | None = None) -> OutcomeDistribution:
    """
    Exact fate probabilities for one photon.

    With no object, ``n`` optionally limits the build-up to ``n`` round trips of
    a cw source; the photon is then reflected with probability ``eta_n`` and
    transmitted otherwise. ``n=None`` means fully established resonance.
    """
    if not 0.0 <= R < 1.0:
        raise ValueError(f"R must lie in [0, 1), got {R}")
    if bomb_present:
        return OutcomeDistribution(R, (1.0 - R) ** 2, R * (1.0 - R), 0.0)
    if n is None:
        return OutcomeDistribution(0.0, 1.0, 0.0, 0.0)
    p_dr = eta_n(R, n, SourceSpec.cw())
    return OutcomeDistribution(p_dr, 1.0 - p_dr, 0.0, 0.0)


class Merit(NamedTuple):
    p_detect: float
    """probability that D_r announces the object"""
    safe_fraction: float
    """``p_dr / (p_dr + p_explode) = 1 / (2 - R)``"""


def ifm_merit(R: float) -> Merit:
    """Detection probability with the object present and its share among non-transmitted photons."""
    if not 0.0 <= R < 1.0:
        raise ValueError(f"R must lie in [0, 1), got {R}")
    d = exact_distribution(R, True)
    return Merit(d.p_dr, 1.0 / (2.0 - R))


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    outcome: Outcome
    detected: bool


@dataclass(frozen=True)
class TrialBatch:
    """
    Column-wise trial records.

    ``outcome`` holds the physical fate (never LOST for an ideal resonator);
    ``detected`` is False where a D_r or D_t photon escaped the detector.
    """

    trial_id: NDArray[np.int64]
    outcome: NDArray[np.int8]
    detected: NDArray[np.bool_]

    def __len__(self) -> int:
        return self.trial_id.size

    def records(self) -> Iterator[TrialRecord]:
        for t, o, d in zip(self.trial_id.tolist(), self.outcome.tolist(), self.detected.tolist()):
            yield TrialRecord(t, Outcome(o), d)

    def counts(self) -> dict[Outcome, int]:
        """Registered-event counts; undetected photons are tallied as LOST."""
        reg = np.where(self.detected, self.outcome, Outcome.LOST)
        c = np.bincount(reg, minlength=len(Outcome))
        return {o: int(c[o]) for o in Outcome}

    def empirical(self) -> OutcomeDistribution:
        n = len(self)
        c = self.counts()
        dr, dt, ex = c[Outcome.DR] / n, c[Outcome.DT] / n, c[Outcome.EXPLODE] / n
        return OutcomeDistribution(dr, dt, ex, 1.0 - dr - dt - ex)


def _shard(probs: NDArray[np.float64], efficiency: float, seed: int, shard: int, start: int, stop: int) -> TrialBatch:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(shard,))))
    size = stop - start
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    outcome = np.searchsorted(cum, rng.random(size), side="right").astype(np.int8)
    hit = rng.random(size) < efficiency
    detected = np.where((outcome == Outcome.DR) | (outcome == Outcome.DT), hit, outcome == Outcome.EXPLODE)
    return TrialBatch(np.arange(start, stop, dtype=np.int64), outcome, detected)


def simulate_trials(
    R: float,
    bomb_present: bool,
    trials: int,
    efficiency: float = 0.85,
    seed: int = 0,
    workers: int = 1,
    n: int | None = None,
) -> tuple[TrialBatch, OutcomeDistribution]:
    """
    Sample ``trials`` single-photon tests.

    Returns the records and the empirical distribution of registered events,
    which converges to ``exact_distribution(R, bomb_present, n).thinned(efficiency)``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must lie in [0, 1], got {efficiency}")
    exact = exact_distribution(R, bomb_present, n)
    probs = np.clip(np.array(exact.as_tuple()), 0.0, 1.0)
    bounds = [(k, s, min(s + SHARD_SIZE, trials)) for k, s in enumerate(range(0, trials, SHARD_SIZE))]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda b: _shard(probs, efficiency, seed, *b), bounds))
    else:
        parts = [_shard(probs, efficiency, seed, *b) for b in bounds]
    batch = TrialBatch(
        np.concatenate([p.trial_id for p in parts]),
        np.concatenate([p.outcome for p in parts]),
        np.concatenate([p.detected for p in parts]),
    )
    return batch, batch.empirical()
