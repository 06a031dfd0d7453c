"""Biphoton spectrum, temporal waveform and coherence-time calibration.

The joint spectrum is represented by a declared parametric stand-in rather
than the full EIT/FWM susceptibility:

    Phi(u) = W(u) * P(u + i*gamma)

with u the anti-Stokes detuning (rad/s) from line center,
W(u) = 1/(1 - i u/Gamma) a complex Lorentzian transparency window and
P(z) = (exp(i z T) - 1)/(i z T) = exp(i z T/2) sinc(z T/2) the phase-matching
factor for group delay T. The imaginary shift gamma (ground-state dephasing)
makes the phase mismatch lossy, which in the time domain is an exponential
envelope exp(-gamma tau) over 0 < tau < T. The group delay is tied to the
coupling power through a power law for the coherence time.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

EDGE_RATIO_MAX = 1e-3


class PowerLaw(NamedTuple):
    """tau_c = a * P**(-b), with P in mW and tau_c in ns."""

    a: float
    b: float

    def __call__(self, power_mw: float) -> float:
        return self.a * power_mw ** (-self.b)


def calibrate_power_law(points) -> PowerLaw:
    """Least-squares fit of log tau_c = log a - b log P (exact through two points)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("need at least two (power_mw, tau_ns) points")
    if np.any(pts <= 0):
        raise ValueError("powers and coherence times must be positive")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.ptp(x) == 0:
        return PowerLaw(float(np.exp(y.mean())), 0.0)
    slope, intercept = np.polyfit(x, y, 1)
    return PowerLaw(float(np.exp(intercept)), float(-slope))


# (coupling power mW, coherence time ns)
ANCHORS = ((2.0, 300.0), (0.13, 900.0))
ANCHOR_BANDWIDTHS_MHZ = {2.0: 2.9, 0.13: 0.8}
DEFAULT_LAW = calibrate_power_law(ANCHORS)


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform, centered frequency grid; the conjugate time step is 1/span."""

    n: int = 2**17
    span_hz: float = 1e9

    def __post_init__(self):
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"grid length must be a power of two, got {self.n}")
        if self.span_hz <= 0:
            raise ValueError("grid span must be positive")

    @property
    def df(self) -> float:
        return self.span_hz / self.n

    @property
    def freq_hz(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.df

    @property
    def omega(self) -> np.ndarray:
        return 2 * np.pi * self.freq_hz

    @property
    def dtau_ns(self) -> float:
        return 1e9 / self.span_hz

    @property
    def tau_ns(self) -> np.ndarray:
        return (np.arange(self.n) - self.n // 2) * self.dtau_ns


DEFAULT_GRID = SpectralGrid()


@dataclass(frozen=True)
class SpectralModelParams:
    coupling_power_mw: float = 2.0
    optical_depth: float = 32.0
    length_m: float = 0.017
    pump_detuning_mhz: float = 80.0
    dephasing_mhz: float = 0.035
    eit_window_mhz: float = 100.0
    law: PowerLaw = field(default=DEFAULT_LAW)
    group_delay_ns: float | None = None
    rise_time_ns: float = 25.0

    def __post_init__(self):
        if self.optical_depth <= 0 or self.length_m <= 0 or self.coupling_power_mw <= 0:
            raise ValueError("optical depth, medium length and coupling power must be positive")
        if self.dephasing_mhz < 0 or self.eit_window_mhz <= 0 or self.rise_time_ns < 0:
            raise ValueError("dephasing and rise time must be >= 0, EIT window > 0")
        if self.group_delay_ns is not None and self.group_delay_ns <= 0:
            raise ValueError("group delay must be positive")
        object.__setattr__(self, "law", PowerLaw(*self.law))


# Shape used for the correlation-function reproduction: 300 ns correlation length,
# fast decay and a 25 ns rise so that the g2 peak sits near 25 ns.
G2_SHAPE_PARAMS = SpectralModelParams(
    coupling_power_mw=2.0, group_delay_ns=300.0, dephasing_mhz=1.7, rise_time_ns=25.0
)


@dataclass(frozen=True)
class BiphotonSpectrum:
    omega: np.ndarray  # rad/s, offset from line center
    amplitude: np.ndarray

    @property
    def df(self) -> float:
        return float(self.omega[1] - self.omega[0]) / (2 * np.pi)

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2


@dataclass(frozen=True)
class TemporalWaveform:
    tau_ns: np.ndarray
    psi: np.ndarray

    @property
    def dtau_ns(self) -> float:
        return float(self.tau_ns[1] - self.tau_ns[0])

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    @property
    def norm(self) -> float:
        return float(self.intensity.sum() * self.dtau_ns)

    def normalized(self) -> "TemporalWaveform":
        n = self.norm
        if n <= 0:
            raise ValueError("all-zero waveform")
        return TemporalWaveform(self.tau_ns, self.psi / np.sqrt(n))


def _phase_matching(z: np.ndarray, t_s: float) -> np.ndarray:
    x = 1j * z * t_s
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1 + x / 2, np.expm1(safe) / safe)


def _raw_spectrum(group_delay_ns: float, params: SpectralModelParams, grid: SpectralGrid) -> BiphotonSpectrum:
    u = grid.omega
    gamma = 2 * np.pi * params.dephasing_mhz * 1e6
    window_hwhm = np.pi * params.eit_window_mhz * 1e6
    amp = _phase_matching(u + 1j * gamma, group_delay_ns * 1e-9) / (1 - 1j * u / window_hwhm)
    return BiphotonSpectrum(u, amp)


def fwhm_mhz(spec: BiphotonSpectrum) -> float:
    """Full width at half maximum of |Phi|^2, interpolated between samples."""
    p = spec.power
    k = int(np.argmax(p))
    half = p[k] / 2
    f = spec.omega / (2 * np.pi)

    def crossing(indices):
        prev = k
        for i in indices:
            if p[i] < half:
                return f[prev] + (half - p[prev]) * (f[i] - f[prev]) / (p[i] - p[prev])
            prev = i
        return f[prev]

    lo = crossing(range(k - 1, -1, -1))
    hi = crossing(range(k + 1, len(p)))
    return float(hi - lo) / 1e6


def spectrum(params: SpectralModelParams, grid: SpectralGrid = DEFAULT_GRID) -> BiphotonSpectrum:
    """Joint-spectrum amplitude on ``grid``.

    Without an explicit ``group_delay_ns`` the delay is solved so the waveform's
    coherence time matches ``params.law`` at the coupling power.
    """
    t = params.group_delay_ns
    if t is None:
        t = solve_group_delay(params, grid)
    spec = _raw_spectrum(t, params, grid)
    mag = np.abs(spec.amplitude)
    edge = max(mag[0], mag[-1]) / mag.max()
    if edge > EDGE_RATIO_MAX:
        # |Phi| falls off as 1/u^2 far from the line
        need = grid.span_hz * np.sqrt(edge / EDGE_RATIO_MAX) * 1.1
        raise ValueError(
            f"grid span {grid.span_hz / 1e6:.0f} MHz too narrow: edge/peak = {edge:.2e}; "
            f"need at least {need / 1e6:.0f} MHz"
        )
    width = fwhm_mhz(spec)
    if grid.span_hz / 1e6 < 10 * width:
        raise ValueError(f"grid span must cover 10 spectral widths ({10 * width:.1f} MHz)")
    return spec


def waveform_from_spectrum(spec: BiphotonSpectrum, normalize: bool = True) -> TemporalWaveform:
    """psi(tau) = integral Phi(u) exp(-i u tau) du / 2pi, as a discrete transform.

    With ``normalize=False`` the raw transform is returned (psi in 1/sqrt(s) units
    relative to the spectrum), which satisfies Parseval with dtau in seconds.
    """
    n = len(spec.omega)
    df = spec.df
    psi = df * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(spec.amplitude)))
    tau_ns = (np.arange(n) - n // 2) * (1e9 / (n * df))
    wf = TemporalWaveform(tau_ns, psi)
    return wf.normalized() if normalize else wf


def spectrum_from_waveform(wf: TemporalWaveform) -> BiphotonSpectrum:
    """Inverse of :func:`waveform_from_spectrum` (raw, unnormalized)."""
    n = len(wf.tau_ns)
    dtau_s = wf.dtau_ns * 1e-9
    amp = dtau_s * n * np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(wf.psi)))
    omega = 2 * np.pi * (np.arange(n) - n // 2) / (n * dtau_s)
    return BiphotonSpectrum(omega, amp)


def apply_rise_time(wf: TemporalWaveform, rise_ns: float) -> TemporalWaveform:
    """Multiply the two-photon intensity |psi|^2 by (1 - exp(-tau/rise_ns)) and renormalize."""
    if rise_ns <= 0:
        return wf.normalized()
    tau = np.clip(wf.tau_ns, 0, None)
    factor = np.where(wf.tau_ns > 0, -np.expm1(-tau / rise_ns), 0.0)
    return TemporalWaveform(wf.tau_ns, wf.psi * np.sqrt(factor)).normalized()


def coherence_time(wf: TemporalWaveform) -> float:
    """Equivalent width of |psi|^2 in ns (integral over peak)."""
    intensity = wf.intensity
    peak = intensity.max()
    if not peak > 0:
        raise ValueError("all-zero waveform has no coherence time")
    return float(intensity.sum() * wf.dtau_ns / peak)


def bandwidth_mhz(wf: TemporalWaveform) -> float:
    """FWHM of the power spectrum of the (shaped) waveform."""
    return fwhm_mhz(spectrum_from_waveform(wf))


def _waveform_for_delay(group_delay_ns: float, params: SpectralModelParams, grid: SpectralGrid) -> TemporalWaveform:
    wf = waveform_from_spectrum(_raw_spectrum(group_delay_ns, params, grid))
    return apply_rise_time(wf, params.rise_time_ns)


@functools.lru_cache(maxsize=64)
def solve_group_delay(params: SpectralModelParams, grid: SpectralGrid = DEFAULT_GRID) -> float:
    """Group delay (ns) whose waveform has the coherence time law(P_c)."""
    target = params.law(params.coupling_power_mw)

    def excess(t):
        return coherence_time(_waveform_for_delay(t, params, grid)) - target

    lo, hi = 1.0, max(2 * target, 10.0)
    while excess(hi) < 0:
        hi *= 2
        if hi > 0.5 * grid.n * grid.dtau_ns:
            raise ValueError(
                f"coherence time {target:.0f} ns unreachable with dephasing {params.dephasing_mhz} MHz"
            )
    if excess(lo) > 0:
        raise ValueError(f"coherence time {target:.1f} ns shorter than the rise/window limit")
    return float(brentq(excess, lo, hi, xtol=1e-6, rtol=1e-12))


def biphoton_waveform(params: SpectralModelParams, grid: SpectralGrid = DEFAULT_GRID) -> TemporalWaveform:
    """Spectrum -> waveform -> rise-time shaping, normalized."""
    wf = waveform_from_spectrum(spectrum(params, grid))
    return apply_rise_time(wf, params.rise_time_ns)


def params_for_power(power_mw: float, **kwargs) -> SpectralModelParams:
    return replace(SpectralModelParams(**kwargs), coupling_power_mw=power_mw)


def save_waveform_csv(path: str | Path, wf: TemporalWaveform) -> None:
    data = np.column_stack([wf.tau_ns, wf.psi.real, wf.psi.imag])
    np.savetxt(path, data, delimiter=",", header="tau_ns,real,imag", comments="", fmt="%.17g")


def load_waveform_csv(path: str | Path) -> TemporalWaveform:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return TemporalWaveform(data[:, 0], data[:, 1] + 1j * data[:, 2])


def save_spectrum_csv(path: str | Path, spec: BiphotonSpectrum) -> None:
    data = np.column_stack([spec.omega, spec.amplitude.real, spec.amplitude.imag])
    np.savetxt(path, data, delimiter=",", header="omega_rad_s,real,imag", comments="", fmt="%.17g")


def load_spectrum_csv(path: str | Path) -> BiphotonSpectrum:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return BiphotonSpectrum(data[:, 0], data[:, 1] + 1j * data[:, 2])
