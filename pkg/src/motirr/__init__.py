"""Interaction-free object detection in a total-internal-reflection ring resonator.

Submodules
----------
spectral
    Frequency grids, Gaussian source spectra and beam-energy quadrature.
ftir
    Frustrated-total-internal-reflection coupler and impedance-match solver.
ring
    Steady-state response, round-trip amplitude series and energy ratios.
outcomes
    Single-photon outcome distributions and Monte Carlo trials.
transient
    Trip-by-trip cavity build-up and Pockels-cell switching runs.
cli
    Command-line front end writing CSV curves and text reports.
"""

from motirr.errors import ConfigError, ConvergenceError, NoEvanescentFieldError, NoSolutionError
from motirr.spectral import FrequencyGrid, SourceSpec, SpectralAmplitude, beam_energy, gaussian_spectrum, make_grid
from motirr.ftir import ComplexReflection, CouplerParams, complex_reflection, evanescent_b, match_gap, tir_phase
from motirr.ring import (
    EtaCurve,
    RingParams,
    asymptotic_spectral_ratio,
    coupling_c,
    eta_curve,
    eta_limit,
    eta_n,
    partial_amplitude,
    steady_eta,
)
from motirr.outcomes import OutcomeDistribution, exact_distribution, ifm_merit, simulate_trials
from motirr.transient import (
    CavityState,
    ClickTimeline,
    SwitchScenario,
    build_up_curve,
    rounds_to_threshold,
    run_switch_experiment,
    step_cavity,
)

__version__ = "0.1.0"
