"""Simulation and analysis of narrowband polarization-entangled photon pairs.

Modules: quantum (states, fidelity, CHSH), optics (Jones calculus, two-path
source), spectrum (biphoton spectrum and waveform), phaselock (interferometer
lock), coincidence (time tags and correlations), tomography (16-setting MLE).
"""
from .quantum import BellKind, bell_state, chsh_max, fidelity
from .optics import AnalyzerChain, bell_config, two_path_state
from .spectrum import SpectralModelParams, biphoton_waveform, coherence_time
from .phaselock import lock_ratio, simulate_lock, visibility_penalty
from .coincidence import ExperimentScenario, cross_correlation, generate_timetags
from .tomography import mle_reconstruct, standard_projection_set

__version__ = "0.1.0"
