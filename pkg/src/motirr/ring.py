"""
Ring-resonator response: steady state, round-trip series and energy ratios.

Two models live side by side. The steady-state one uses the coupler
amplitude ``r``, the round-trip loss constant ``alpha`` and the finesse. The
round-trip series is lossless and parametrised only by the power
reflectivity ``R`` of the coupling faces: the reflected amplitude after ``n``
round trips is

    B_n / A = sqrt(R) * (-1 + (1 - R) e^{i psi} sum_{k<n} (R e^{i psi})^k)

with ``psi = u`` the dimensionless detuning. Averaging ``|B_n|^2`` over a
Gaussian packet of width ``a`` turns every ``cos(j psi)`` into
``Phi(j) = exp(-j^2 / (4 a^2))``; a cw line has ``Phi = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from motirr.errors import ConvergenceError
from motirr.spectral import FrequencyGrid, SourceSpec, make_grid

#: maximal change of the asymptotic ratio under grid refinement
LIMIT_REFINE_TOL = 1e-8


def _check_R(R: float) -> None:
    if not 0.0 <= R < 1.0:
        raise ValueError(f"R must lie in [0, 1), got {R}")


def finesse(rho: float) -> float:
    """Finesse ``pi sqrt(rho) / (1 - rho)`` for round-trip amplitude factor ``rho``."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"round-trip amplitude factor must lie in [0, 1), got {rho}")
    return math.pi * math.sqrt(rho) / (1.0 - rho)


def coupling_c(r: float, alpha: float) -> float:
    """Coupling ``(1 - e^{-2 alpha})(1 - r^2) / (1 - e^{-alpha} r)^2``; 1 when ``r = e^{-alpha}``."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"amplitude reflectivity r must lie in [0, 1), got {r}")
    if not alpha >= 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    return -math.expm1(-2 * alpha) * (1.0 - r * r) / (1.0 - math.exp(-alpha) * r) ** 2


@dataclass(frozen=True)
class RingParams:
    """
    Steady-state resonator parameters.

    ``R`` is the power reflectivity of the coupler (``r = sqrt(R)``), ``phi``
    the round-trip phase and ``delta`` the coupler reflection phase. The
    finesse is derived from ``rho = e^{-alpha} r``.
    """

    R: float
    alpha: float
    phi: float = 0.0
    delta: float = 0.0
    finesse: float = field(init=False)

    def __post_init__(self) -> None:
        _check_R(self.R)
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        object.__setattr__(self, "finesse", finesse(math.exp(-self.alpha) * self.r))

    @property
    def r(self) -> float:
        return math.sqrt(self.R)

    @property
    def coupling(self) -> float:
        return coupling_c(self.r, self.alpha)

    @classmethod
    def on_resonance(cls, R: float, alpha: float, delta: float = 0.0, order: int = 1) -> "RingParams":
        """Parameters with ``phi = 2 pi order - delta``."""
        return cls(R, alpha, 2 * math.pi * order - delta, delta)

    @classmethod
    def matched(cls, alpha: float, delta: float = 0.0) -> "RingParams":
        """Impedance-matched coupler ``r = e^{-alpha}`` on resonance."""
        return cls.on_resonance(math.exp(-2 * alpha), alpha, delta)


def steady_eta(rp: RingParams, detuning_phase: float = 0.0) -> float:
    """Reflected/incident power ratio in steady state, ``phi`` shifted by ``detuning_phase``."""
    s = (2 * rp.finesse / math.pi) * math.sin((rp.delta + rp.phi + detuning_phase) / 2)
    return 1.0 - rp.coupling / (1.0 + s * s)


def partial_amplitude(
    n: int, R: float, psi: ArrayLike, method: Literal["closed", "loop"] = "closed"
) -> complex | NDArray[np.complex128]:
    """
    Reflected amplitude ``B_n / A`` after ``n`` round trips.

    ``method="loop"`` accumulates the round-trip contributions one by one;
    ``"closed"`` sums the geometric progression in closed form.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    _check_R(R)
    psi_arr = np.asarray(psi, dtype=float)
    ph = np.exp(1j * psi_arr)
    sr = math.sqrt(R)
    if method == "loop":
        out = np.full(psi_arr.shape, -sr, dtype=complex)
        term = sr * (1.0 - R) * ph
        q = R * ph
        for _ in range(n):
            out = out + term
            term = term * q
    elif method == "closed":
        q = R * ph
        geom = (1.0 - q**n) / (1.0 - q)
        out = sr * (-1.0 + (1.0 - R) * ph * geom)
    else:
        raise ValueError(f"unknown method {method!r}")
    return complex(out) if out.ndim == 0 else out


def asymptotic_spectral_ratio(
    R: float, psi: ArrayLike, form: Literal["amplitude", "lorentzian"] = "amplitude"
) -> float | NDArray[np.float64]:
    """
    ``|B_r / A|^2`` for infinitely many round trips at detuning ``psi``.

    ``form="amplitude"`` evaluates ``R |1 - e^{i psi}|^2 / |1 - R e^{i psi}|^2``;
    ``"lorentzian"`` evaluates ``1 - (1 - R)^2 / (1 - 2 R cos psi + R^2)``.
    """
    _check_R(R)
    psi_arr = np.asarray(psi, dtype=float)
    if form == "amplitude":
        ph = np.exp(1j * psi_arr)
        out = R * np.abs(1.0 - ph) ** 2 / np.abs(1.0 - R * ph) ** 2
    elif form == "lorentzian":
        # 1 - 2R cos psi + R^2 written as (1-R)^2 + 4R sin^2(psi/2) to avoid cancellation
        out = 1.0 - (1.0 - R) ** 2 / ((1.0 - R) ** 2 + 4.0 * R * np.sin(psi_arr / 2) ** 2)
    else:
        raise ValueError(f"unknown form {form!r}")
    return float(out) if out.ndim == 0 else out


def coherence_factors(source: SourceSpec, j: NDArray[np.float64]) -> NDArray[np.float64]:
    """``Phi(j)``: 1 for cw, ``exp(-j^2 / (4 a^2))`` for a Gaussian pulse."""
    if source.is_cw:
        return np.ones_like(j, dtype=float)
    return np.exp(-(j * j) / (4.0 * source.a**2))


def eta_n(R: float, n: int, source: SourceSpec, form: Literal["stable", "literal"] = "stable") -> float:
    """
    Reflected/incident energy ratio after ``n`` round trips.

    ``form="literal"`` evaluates

        R {1 - (1-R)/(1+R) [R^{2n} - 1 + 2 sum_{j=1}^n (1 + R^{2n-2j+1}) R^{j-1} Phi(j)]}

    with a correctly rounded sum. Its bracket cancels to ~1e-16 of the leading
    term, so tiny ratios come out as rounding noise. ``form="stable"`` (the
    default) subtracts the ``Phi = 1`` value of the bracket exactly, leaving

        R^{2n+1} + 2 R (1-R)/(1+R) sum_j (R^{j-1} + R^{2n-j}) (1 - Phi(j))

    whose terms are all non-negative.
    """
    _check_R(R)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0 or R == 0.0:
        return R
    j = np.arange(1, n + 1, dtype=float)
    # powers of R underflow to 0 once n|ln R| > ~700, which is harmless in both forms
    weights = R ** (j - 1) + R ** (2 * n - j)
    if form == "literal":
        terms = 2.0 * weights * coherence_factors(source, j)
        bracket = math.fsum(np.concatenate(([R ** (2 * n), -1.0], terms)).tolist())
        eta = R * (1.0 - (1.0 - R) / (1.0 + R) * bracket)
    elif form == "stable":
        eta = R ** (2 * n + 1)
        if not source.is_cw:
            missing = -np.expm1(-(j * j) / (4.0 * source.a**2))
            eta += 2.0 * R * (1.0 - R) / (1.0 + R) * math.fsum(np.sort(weights * missing).tolist())
    else:
        raise ValueError(f"unknown form {form!r}")
    return min(max(eta, 0.0), 1.0)


@dataclass(frozen=True)
class EtaCurve:
    """Energy ratio versus round-trip count for one source and reflectivity."""

    n_values: NDArray[np.int64]
    eta_values: NDArray[np.float64]
    source: SourceSpec
    R: float

    def __post_init__(self) -> None:
        n = np.asarray(self.n_values, dtype=np.int64)
        e = np.asarray(self.eta_values, dtype=float)
        if n.shape != e.shape:
            raise ValueError("n_values and eta_values differ in length")
        if np.any((e < 0) | (e > 1)):
            raise ValueError("eta values must lie in [0, 1]")
        object.__setattr__(self, "n_values", n)
        object.__setattr__(self, "eta_values", e)

    def rows(self) -> list[tuple[int, float]]:
        return list(zip(self.n_values.tolist(), self.eta_values.tolist()))


def eta_curve(R: float, n_values: Sequence[int], source: SourceSpec) -> EtaCurve:
    """``eta_n`` evaluated at every ``n`` in ``n_values``."""
    ns = [int(n) for n in n_values]
    return EtaCurve(np.array(ns, dtype=np.int64), np.array([eta_n(R, n, source) for n in ns]), source, R)


def _limit_on_grid(R: float, a: float, grid: FrequencyGrid) -> float:
    u = grid.detuning
    w = np.exp(-((a * u) ** 2))
    num = grid.integrate(w / (1.0 - 2.0 * R * np.cos(u) + R * R))
    return 1.0 - (1.0 - R) ** 2 * num / grid.integrate(w)


def eta_limit(R: float, source: SourceSpec, grid: FrequencyGrid | None = None) -> float:
    """
    Asymptotic energy ratio ``lim eta_n`` by quadrature over the detuning grid.

    The result is checked against the same quadrature on a grid with half the
    spacing; a change above ``LIMIT_REFINE_TOL`` raises ``ConvergenceError``.
    A cw line sits exactly on resonance, where nothing is reflected.
    """
    _check_R(R)
    if source.is_cw:
        return 0.0
    if grid is None:
        grid = make_grid(source.a)
    grid.check_covers(source.a)
    coarse = _limit_on_grid(R, source.a, grid)
    fine = _limit_on_grid(R, source.a, grid.refined())
    if abs(fine - coarse) > LIMIT_REFINE_TOL:
        raise ConvergenceError(
            f"asymptotic ratio changed by {abs(fine - coarse):.3g} under refinement "
            f"({grid.points} -> {2 * grid.points - 1} points)"
        )
    return fine


def eta_limit_small_angle(R: float, a: float) -> float:
    """
    Closed-form asymptotic ratio with ``1 - cos u ~ u^2 / 2``.

    The Lorentzian becomes ``(1-R)^2 + R u^2`` and its Gaussian average is a
    scaled complementary error function.
    """
    _check_R(R)
    if R == 0.0:
        return 0.0
    g = (1.0 - R) / math.sqrt(R)
    mean = a * math.sqrt(math.pi) / (R * g) * special.erfcx(a * g)
    return 1.0 - (1.0 - R) ** 2 * mean
