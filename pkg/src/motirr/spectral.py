"""
Frequency grids, Gaussian source spectra and beam-energy quadrature.

All detunings are dimensionless, ``u = (omega - omega_res) * T`` with ``T`` the
round-trip time, so a Gaussian packet of coherence time ``tau`` becomes
``exp(-(a*u)**2 / 2)`` with ``a = tau / T``. Integrals that formally run over
``omega in [0, inf)`` are taken over a symmetric truncated grid around the
resonance; for ``a >> 1`` the packet has no support near ``omega = 0``.

cw sources are a single spectral line and are never sampled on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from numpy.typing import NDArray

DEFAULT_POINTS = 4001
DEFAULT_SPAN_SIGMAS = 8.0
DEFAULT_WEIGHT_FLOOR = 1e-12


def _frozen(arr) -> NDArray[np.float64]:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FrequencyGrid:
    """
    Uniform symmetric detuning grid with composite-trapezoid weights.

    Parameters
    ----------
    detuning : ndarray
        Samples of ``u = (omega - omega_res) T``, strictly increasing and
        symmetric about zero.
    weights : ndarray
        Positive quadrature weights, same length as ``detuning``.
    """

    detuning: NDArray[np.float64]
    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        u = _frozen(self.detuning)
        w = _frozen(self.weights)
        object.__setattr__(self, "detuning", u)
        object.__setattr__(self, "weights", w)
        if u.ndim != 1 or u.size == 0:
            raise ValueError("grid must be a non-empty 1-D array")
        if w.shape != u.shape:
            raise ValueError(f"weights shape {w.shape} does not match detuning shape {u.shape}")
        if not np.all(np.isfinite(u)) or not np.all(np.isfinite(w)):
            raise ValueError("grid contains non-finite values")
        if u.size > 1 and not np.all(np.diff(u) > 0):
            raise ValueError("detuning samples must be strictly increasing")
        if not np.array_equal(u, -u[::-1]):
            raise ValueError("detuning samples must be symmetric about 0")
        if not np.all(w > 0):
            raise ValueError("quadrature weights must be positive")

    def __len__(self) -> int:
        return self.detuning.size

    @property
    def points(self) -> int:
        return self.detuning.size

    @property
    def half_width(self) -> float:
        return float(self.detuning[-1])

    def endpoint_weight(self, a: float) -> float:
        """Relative Gaussian weight ``exp(-(a u)^2)`` at the grid edge."""
        return math.exp(-((a * self.half_width) ** 2))

    def check_covers(self, a: float, floor: float = DEFAULT_WEIGHT_FLOOR) -> None:
        """Raise ``ValueError`` if the edge weight for width ``a`` is not below ``floor``."""
        w = self.endpoint_weight(a)
        if w > floor:
            raise ValueError(
                f"grid half-width {self.half_width:.3g} too narrow for a={a}: "
                f"edge weight {w:.3g} > floor {floor:.3g}"
            )

    def integrate(self, values) -> float:
        """Trapezoid quadrature of sampled ``values`` over the grid."""
        values = np.asarray(values)
        if values.shape != self.detuning.shape:
            raise ValueError("values must be sampled on the grid")
        return float(np.dot(self.weights, values))

    def refined(self) -> "FrequencyGrid":
        """Same span with the sample spacing halved (``2N - 1`` points)."""
        return _uniform_grid(self.half_width, 2 * self.points - 1)


def _uniform_grid(half_width: float, points: int) -> FrequencyGrid:
    m = (points - 1) // 2
    if m == 0:
        return FrequencyGrid(np.zeros(1), np.ones(1))
    half = half_width * np.arange(1, m + 1) / m
    u = np.concatenate([-half[::-1], [0.0], half])
    h = half_width / m
    w = np.full(points, h)
    w[0] = w[-1] = h / 2
    return FrequencyGrid(u, w)


def make_grid(
    a: float, points: int = DEFAULT_POINTS, span_sigmas: float = DEFAULT_SPAN_SIGMAS
) -> FrequencyGrid:
    """
    Build a symmetric grid spanning ``+-span_sigmas`` standard deviations.

    The standard deviation refers to the normalised intensity weight
    ``exp(-(a u)^2)``, i.e. ``sigma = 1 / (a sqrt(2))``. ``points`` must be odd
    so that ``u = 0`` is a sample.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if points < 3 or points % 2 == 0:
        raise ValueError(f"points must be an odd integer >= 3, got {points}")
    if not span_sigmas > 0:
        raise ValueError(f"span_sigmas must be positive, got {span_sigmas}")
    sigma = 1.0 / (a * math.sqrt(2.0))
    return _uniform_grid(span_sigmas * sigma, points)


@dataclass(frozen=True)
class SourceSpec:
    """
    Light source driving the resonator.

    ``kind="pulse"`` is a Gaussian packet with coherence ratio ``a = tau / T``;
    ``kind="cw"`` is a single line locked to resonance and takes no ``a``.
    """

    kind: Literal["cw", "pulse"]
    a: Optional[float] = None
    amplitude_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind == "pulse":
            if self.a is None or not self.a > 0 or not math.isfinite(self.a):
                raise ValueError(f"pulse source requires finite a > 0, got {self.a}")
        elif self.kind == "cw":
            if self.a is not None:
                raise ValueError("cw source carries no coherence ratio a")
        else:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if not self.amplitude_scale > 0:
            raise ValueError(f"amplitude_scale must be positive, got {self.amplitude_scale}")

    @classmethod
    def cw(cls, amplitude_scale: float = 1.0) -> "SourceSpec":
        return cls("cw", None, amplitude_scale)

    @classmethod
    def pulse(cls, a: float, amplitude_scale: float = 1.0) -> "SourceSpec":
        return cls("pulse", a, amplitude_scale)

    @property
    def is_cw(self) -> bool:
        return self.kind == "cw"


@dataclass(frozen=True)
class SpectralAmplitude:
    """
    Complex spectral amplitude on a grid, or a single cw line.

    For ``line=True`` the spectrum is the symbolic delta at resonance;
    ``grid`` is ``None`` and ``values`` holds the one line amplitude.
    """

    grid: Optional[FrequencyGrid]
    values: NDArray[np.complex128]
    line: bool = False

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if not np.all(np.isfinite(v)):
            raise ValueError("spectral amplitude contains non-finite values")
        if self.line:
            if self.grid is not None or v.shape != (1,):
                raise ValueError("a cw line carries exactly one value and no grid")
        elif self.grid is None or v.shape != self.grid.detuning.shape:
            raise ValueError("values must have the same length as the grid")

    def __add__(self, other: "SpectralAmplitude") -> "SpectralAmplitude":
        if self.line or other.line or self.grid is not other.grid:
            raise ValueError("can only add spectra sampled on the same grid")
        return SpectralAmplitude(self.grid, self.values + other.values)

    def scaled(self, factor: complex) -> "SpectralAmplitude":
        return SpectralAmplitude(self.grid, self.values * factor, self.line)


def cw_line(source: SourceSpec) -> SpectralAmplitude:
    """Symbolic single-line spectrum of a cw source."""
    if not source.is_cw:
        raise ValueError("cw_line needs a cw source")
    return SpectralAmplitude(None, np.array([source.amplitude_scale], dtype=complex), line=True)


def gaussian_spectrum(source: SourceSpec, grid: FrequencyGrid) -> SpectralAmplitude:
    """Sample ``amplitude_scale * exp(-(a u)^2 / 2)`` on ``grid``."""
    if source.kind != "pulse":
        raise ValueError("gaussian_spectrum requires a pulse source; cw is a symbolic line")
    u = grid.detuning
    vals = source.amplitude_scale * np.exp(-0.5 * (source.a * u) ** 2)
    return SpectralAmplitude(grid, vals.astype(complex))


def beam_energy(spec: SpectralAmplitude) -> float:
    """
    Energy ``int |A(u)|^2 du`` by trapezoid quadrature.

    For a cw line the line power ``|A|^2`` is returned; only ratios of cw
    energies are meaningful.
    """
    if spec.line:
        return float(abs(spec.values[0]) ** 2)
    if spec.grid is None or len(spec.grid) == 0:
        raise ValueError("empty grid")
    return spec.grid.integrate(np.abs(spec.values) ** 2)
