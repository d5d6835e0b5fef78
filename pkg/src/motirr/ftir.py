"""
Frustrated-total-internal-reflection (FTIR) coupler between prism and resonator.

The coupler reflection for a gap ``x`` is

    r e^{i delta} = [1 - 2 sin d1 sin d2 / (cosh 2bx - cos(d1 + d2))]
                    * exp(i sin d1 sinh 2bx / (cos d1 cosh 2bx - cos d2))

with ``d1``, ``d2`` the s-polarised total-reflection phases at the prism and
resonator faces and ``b`` the evanescent decay constant in the gap.

Two reading choices are built in:

* The exponential is a pure phase (``exp(i * ...)``). A real exponential
  would push ``|r|`` above one.
* ``b`` uses the gap-medium index, ``b = (2 pi / lambda0) sqrt(n1^2 sin^2 theta1
  - n_gap^2)``. Setting ``printed_b=True`` uses the resonator index ``n2``
  instead, which is imaginary for a symmetric prism/resonator pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from motirr.errors import ConvergenceError, NoEvanescentFieldError, NoSolutionError

#: absolute tolerance on |r| at the impedance-matched gap
MATCH_TOL = 1e-10


@dataclass(frozen=True)
class CouplerParams:
    """
    Prism / gap / resonator configuration.

    Parameters
    ----------
    lambda0 : float
        Vacuum wavelength [m].
    n1, n2 : float
        Refractive indices of the coupling prism and the resonator.
    theta1 : float
        Incidence angle inside the prism [rad].
    n_gap : float
        Index of the gap medium (air by default).
    printed_b : bool
        Use ``n2`` instead of ``n_gap`` under the square root of ``b``.
    """

    lambda0: float = 633e-9
    n1: float = 1.5
    n2: float = 1.5
    theta1: float = math.pi / 4
    n_gap: float = 1.0
    printed_b: bool = False

    def __post_init__(self) -> None:
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")
        if not self.n_gap >= 1:
            raise ValueError(f"n_gap must be >= 1, got {self.n_gap}")
        if not (self.n1 > self.n_gap and self.n2 > self.n_gap):
            raise ValueError(f"n1={self.n1}, n2={self.n2} must exceed n_gap={self.n_gap}")
        if not 0 < self.theta1 < math.pi / 2:
            raise ValueError(f"theta1 must lie in (0, pi/2), got {self.theta1}")
        if not self.n1 * math.sin(self.theta1) > self.n_gap:
            raise NoEvanescentFieldError(
                f"n1 sin(theta1) = {self.n1 * math.sin(self.theta1):.6g} <= n_gap = {self.n_gap}"
            )

    @property
    def theta2(self) -> float:
        """Incidence angle on the resonator face (tangential wavevector conserved)."""
        s = self.n1 * math.sin(self.theta1) / self.n2
        if s >= 1:
            raise NoEvanescentFieldError("no propagating wave inside the resonator")
        return math.asin(s)


@dataclass(frozen=True)
class ComplexReflection:
    """Coupler field reflection ``r e^{i delta}``; ``delta`` wrapped to (-pi, pi]."""

    r: float
    delta: float

    @property
    def R(self) -> float:
        return self.r * self.r

    @property
    def value(self) -> complex:
        return self.r * complex(math.cos(self.delta), math.sin(self.delta))


def _wrap(phase: float) -> float:
    w = math.remainder(phase, 2 * math.pi)
    return math.pi if w == -math.pi else w


def evanescent_b(p: CouplerParams) -> float:
    """Evanescent decay constant of the gap field [1/m]."""
    n_out = p.n2 if p.printed_b else p.n_gap
    arg = (p.n1 * math.sin(p.theta1)) ** 2 - n_out**2
    if arg <= 0:
        raise NoEvanescentFieldError(
            f"n1^2 sin^2(theta1) - {n_out}^2 = {arg:.6g} <= 0: no evanescent field"
        )
    return 2 * math.pi / p.lambda0 * math.sqrt(arg)


def tir_phase(theta: float, n_rel: float) -> float:
    """
    s-polarisation phase shift on total internal reflection.

    ``tan(delta/2) = sqrt(sin^2 theta - n_rel^2) / cos theta`` with ``n_rel`` the
    low/high index ratio. Zero at the critical angle, ``pi`` at grazing incidence.
    """
    s = math.sin(theta)
    if not 0 < n_rel < 1:
        raise ValueError(f"n_rel must lie in (0, 1), got {n_rel}")
    if s < n_rel:
        raise ValueError(f"theta={theta} is below the critical angle asin({n_rel})")
    return 2 * math.atan2(math.sqrt(max(s * s - n_rel * n_rel, 0.0)), math.cos(theta))


def _face_phases(p: CouplerParams) -> tuple[float, float]:
    d1 = tir_phase(p.theta1, p.n_gap / p.n1)
    d2 = tir_phase(p.theta2, p.n_gap / p.n2)
    return d1, d2


def _magnitude(two_bx: float, d1: float, d2: float) -> float:
    # cosh t - cos s = 2 sinh^2(t/2) + 2 sin^2(s/2) avoids cancellation near x = 0
    if two_bx > 700:
        return 1.0
    den = 2 * math.sinh(two_bx / 2) ** 2 + 2 * math.sin((d1 + d2) / 2) ** 2
    if den == 0:
        return 0.0
    return max(1.0 - 2 * math.sin(d1) * math.sin(d2) / den, 0.0)


def complex_reflection(x: float, p: CouplerParams) -> ComplexReflection:
    """Field reflection of the coupler at gap ``x`` [m]."""
    if x < 0:
        raise ValueError(f"gap must be non-negative, got {x}")
    b = evanescent_b(p)
    d1, d2 = _face_phases(p)
    two_bx = 2 * b * x
    r = _magnitude(two_bx, d1, d2)
    if r == 0.0:
        return ComplexReflection(0.0, 0.0)
    if two_bx > 700:
        # sinh/cosh -> 1 in the ratio
        arg = math.sin(d1) / math.cos(d1) if math.cos(d1) != 0 else math.copysign(math.inf, math.sin(d1))
    else:
        num = math.sin(d1) * math.sinh(two_bx)
        den = math.cos(d1) * math.cosh(two_bx) - math.cos(d2)
        arg = num / den if den != 0 else math.copysign(math.inf, num)
    if math.isinf(arg):
        delta = math.copysign(math.pi / 2, arg)
    else:
        delta = _wrap(arg)
    return ComplexReflection(min(r, 1.0), delta)


def reflectivity_sweep(p: CouplerParams, x_max: float, points: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gap sweep ``x in [0, x_max]`` returning ``(x, r, delta)`` arrays."""
    xs = np.linspace(0.0, x_max, points)
    refl = [complex_reflection(float(x), p) for x in xs]
    return xs, np.array([c.r for c in refl]), np.array([c.delta for c in refl])


def match_gap(alpha: float, p: CouplerParams, max_iter: int = 200) -> float:
    """
    Gap ``x_m`` at which ``|r(x_m)| = exp(-alpha)`` (impedance matching).

    Solved by bracketed bisection; ``r`` is nondecreasing in ``x``.
    """
    if not alpha >= 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    target = math.exp(-alpha)
    r0 = complex_reflection(0.0, p).r
    if not r0 <= target < 1.0:
        raise NoSolutionError(f"target |r| = {target:.12g} outside attainable range [{r0:.6g}, 1)")
    if target == r0:
        return 0.0
    b = evanescent_b(p)
    hi = 1.0 / b
    while complex_reflection(hi, p).r < target:
        hi *= 2
        if hi * b > 350:
            raise NoSolutionError(f"target |r| = {target!r} is not reached at any finite gap")

    def resid(x: float) -> float:
        return complex_reflection(x, p).r - target

    try:
        x_m = optimize.bisect(resid, 0.0, hi, xtol=1e-30, rtol=4 * np.finfo(float).eps, maxiter=max_iter)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    if abs(resid(x_m)) >= MATCH_TOL:
        raise ConvergenceError(f"|r(x_m) - target| = {abs(resid(x_m)):.3g} exceeds {MATCH_TOL}")
    return x_m
