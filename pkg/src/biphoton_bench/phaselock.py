"""Two-path phase algebra, reference-interferometer locking and phase-noise penalty.

The SFWM phase is set by the coupling and pump path differences. A locking
laser at lambda_l runs through the same two arms, so its interferometer phase
tracks the wavelength-weighted length sum and can be servoed to a setpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

LAMBDA_P = 780e-9
LAMBDA_C = 795e-9
LAMBDA_L = 795e-9
CALIBRATION_SETPOINTS = (0.0, np.pi / 3, 2 * np.pi / 3, np.pi)


@dataclass(frozen=True)
class InterferometerGeometry:
    """Arm lengths in metres, wavelengths in metres, offset phase in radians."""

    L_c1: float = 1.0
    L_c2: float = 1.0
    L_p1: float = 1.0
    L_p2: float = 1.0
    lambda_p: float = LAMBDA_P
    lambda_c: float = LAMBDA_C
    lambda_l: float = LAMBDA_L
    phi0: float = 0.0

    def __post_init__(self):
        if min(self.L_c1, self.L_c2, self.L_p1, self.L_p2) <= 0:
            raise ValueError("arm lengths must be positive")
        if min(self.lambda_p, self.lambda_c, self.lambda_l) <= 0:
            raise ValueError("wavelengths must be positive")

    @property
    def k0(self) -> float:
        return np.pi / self.lambda_c + np.pi / self.lambda_p

    @property
    def delta(self) -> float:
        return np.pi / self.lambda_c - np.pi / self.lambda_p

    @property
    def common(self) -> float:
        """(L_c2 + L_p2) - (L_c1 + L_p1)."""
        return (self.L_c2 + self.L_p2) - (self.L_c1 + self.L_p1)

    @property
    def differential(self) -> float:
        """(L_c2 - L_p2) - (L_c1 - L_p1)."""
        return (self.L_c2 - self.L_p2) - (self.L_c1 - self.L_p1)

    @property
    def ratio(self) -> float:
        return lock_ratio(self.lambda_p, self.lambda_c, self.lambda_l)


def sfwm_phase_exact(geom: InterferometerGeometry, wrap: bool = False) -> float:
    phi = (2 * np.pi / geom.lambda_c) * (geom.L_c2 - geom.L_c1) + (2 * np.pi / geom.lambda_p) * (geom.L_p2 - geom.L_p1)
    return float(np.mod(phi, 2 * np.pi)) if wrap else float(phi)


def lock_ratio(lambda_p: float = LAMBDA_P, lambda_c: float = LAMBDA_C, lambda_l: float = LAMBDA_L) -> float:
    """k0/k_l with k0 the mean of the coupling and pump wavenumbers."""
    if min(lambda_p, lambda_c, lambda_l) <= 0:
        raise ValueError("wavelengths must be positive")
    return (1 / lambda_c + 1 / lambda_p) / 2 * lambda_l


def sfwm_phase_approx(phi_lock: float | np.ndarray, ratio: float, phi0: float = 0.0):
    return ratio * phi_lock + phi0


def lock_setpoint_for(phi: float | np.ndarray, ratio: float, phi0: float = 0.0):
    """Reference phase that yields the SFWM phase ``phi`` (inverse of the linear map)."""
    if ratio == 0:
        raise ValueError("lock ratio of zero cannot be inverted")
    return (phi - phi0) / ratio


def reference_phase(geom: InterferometerGeometry) -> float:
    """Locking-laser interferometer phase.

    The locking beam does not overlap the pump/coupling fields; ``phi0`` is the
    resulting offset, defined so that sfwm_phase_approx(reference_phase) equals
    k0 times the common-mode path difference.
    """
    return float(2 * np.pi / geom.lambda_l * geom.common - geom.phi0 / geom.ratio)


def approximation_error(geom: InterferometerGeometry) -> float:
    """exact - approx; equals delta times the differential path difference."""
    approx = sfwm_phase_approx(reference_phase(geom), geom.ratio, geom.phi0)
    return sfwm_phase_exact(geom) - approx


@dataclass(frozen=True)
class DriftModel:
    """Random walk of the reference phase (rad per sqrt(step)).

    ``differential_nm`` adds an independent random walk (nm per sqrt(step)) to
    the differential path, which the locking laser cannot see.
    """

    std: float = 0.02
    interval_ms: float = 1.0
    seed: int = 0
    differential_nm: float = 0.0

    def __post_init__(self):
        if self.std < 0 or self.differential_nm < 0:
            raise ValueError("drift std must be >= 0")
        if self.interval_ms <= 0:
            raise ValueError("step interval must be positive")


@dataclass(frozen=True)
class ControllerParams:
    kp: float = 0.5
    ki: float = 0.05
    limit: float = 0.5  # rad per step
    setpoint: float = 0.0

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0:
            raise ValueError("controller gains must be >= 0")
        if self.limit <= 0:
            raise ValueError("actuation limit must be positive")


@dataclass(frozen=True)
class PhaseTrace:
    t_ms: np.ndarray
    phi_lock: np.ndarray
    phi: np.ndarray
    target: float

    def __post_init__(self):
        if len(self.t_ms) == 0:
            raise ValueError("empty trace")
        if np.any(np.diff(self.t_ms) <= 0):
            raise ValueError("trace times must be strictly increasing")

    @property
    def residual(self) -> np.ndarray:
        return self.phi - self.target

    @property
    def residual_rms(self) -> float:
        return float(np.sqrt(np.mean(self.residual**2)))


def simulate_lock(drift: DriftModel, controller: ControllerParams, duration_ms: float,
                  geom: InterferometerGeometry | None = None, tolerance: float = 0.05) -> PhaseTrace:
    """Servo the reference phase against a random-walk drift with a clamped PI law.

    Each step the drift kicks the reference phase, the controller reads the
    error and applies a correction of at most ``limit``. The integrator holds
    while the actuator saturates. The SFWM phase is evaluated both exactly and
    through the linear lock map; their difference must stay within ``tolerance``.
    """
    if duration_ms <= 0:
        raise ValueError("duration must be positive")
    geom = geom or InterferometerGeometry()
    n = max(1, int(round(duration_ms / drift.interval_ms)))
    rng = np.random.default_rng(drift.seed)
    kicks = rng.normal(0.0, drift.std, n) if drift.std > 0 else np.zeros(n)
    diff_kicks = rng.normal(0.0, drift.differential_nm * 1e-9, n) if drift.differential_nm > 0 else np.zeros(n)

    k_l = 2 * np.pi / geom.lambda_l
    ratio = geom.ratio
    target = float(sfwm_phase_approx(controller.setpoint, ratio, geom.phi0))
    # start locked at the setpoint; lengths tracked as common/differential offsets
    lock = controller.setpoint
    diff = geom.differential
    integral = 0.0
    phi_lock = np.empty(n)
    phi = np.empty(n)
    for i in range(n):
        lock += kicks[i]
        diff += diff_kicks[i]
        err = lock - controller.setpoint
        u = -(controller.kp * err + controller.ki * (integral + err))
        if abs(u) < controller.limit:
            integral += err
        else:
            u = np.copysign(controller.limit, u)
        lock += u
        phi_lock[i] = lock
        common = (lock + geom.phi0 / ratio) / k_l
        phi[i] = geom.k0 * common + geom.delta * diff

    approx = sfwm_phase_approx(phi_lock, ratio, geom.phi0)
    worst = float(np.max(np.abs(phi - approx)))
    if worst > tolerance:
        raise ValueError(f"small-delta approximation broken: |exact - approx| reached {worst:.3g} rad")
    t_ms = drift.interval_ms * np.arange(1, n + 1)
    return PhaseTrace(t_ms, phi_lock, phi, target)


def visibility_penalty(trace: PhaseTrace | np.ndarray) -> float:
    """|<exp(i phi)>| over the trace; scales the two-path coherence."""
    phi = trace.phi if isinstance(trace, PhaseTrace) else np.asarray(trace, dtype=float)
    if phi.size == 0:
        raise ValueError("empty trace")
    return float(min(1.0, abs(np.mean(np.exp(1j * phi)))))


@dataclass(frozen=True)
class LockCalibration:
    setpoints: np.ndarray
    phases: np.ndarray
    slope: float
    intercept: float
    r2: float

    def rows(self) -> list[tuple[float, float, float]]:
        fit = self.slope * self.setpoints + self.intercept
        return list(zip(self.setpoints.tolist(), self.phases.tolist(), fit.tolist()))


def fit_affine(x, y) -> tuple[float, float, float]:
    """Least-squares line y = slope*x + intercept and its R^2."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def calibrate_lock_points(setpoints=CALIBRATION_SETPOINTS, drift: DriftModel | None = None,
                          controller: ControllerParams | None = None, duration_ms: float = 1000.0,
                          geom: InterferometerGeometry | None = None) -> LockCalibration:
    """Lock at each setpoint, record the mean SFWM phase, fit phase vs setpoint.

    The intercept estimates phi0 and the slope the lock ratio.
    """
    drift = drift or DriftModel()
    controller = controller or ControllerParams()
    sp = np.asarray(setpoints, dtype=float)
    phases = []
    for i, s in enumerate(sp):
        d = DriftModel(drift.std, drift.interval_ms, drift.seed + i, drift.differential_nm)
        c = ControllerParams(controller.kp, controller.ki, controller.limit, float(s))
        tr = simulate_lock(d, c, duration_ms, geom)
        phases.append(np.angle(np.mean(np.exp(1j * (tr.phi - tr.target)))) + tr.target)
    phases = np.asarray(phases)
    slope, intercept, r2 = fit_affine(sp, phases)
    return LockCalibration(sp, phases, slope, intercept, r2)


def save_trace_csv(path: str | Path, trace: PhaseTrace) -> None:
    data = np.column_stack([trace.t_ms, trace.phi_lock, trace.phi])
    np.savetxt(path, data, delimiter=",", header="t_ms,phi_lock_rad,phi_rad", comments="", fmt="%.17g")


def load_trace_csv(path: str | Path, target: float = 0.0) -> PhaseTrace:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return PhaseTrace(data[:, 0], data[:, 1], data[:, 2], target)
