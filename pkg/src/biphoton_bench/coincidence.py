"""Synthetic time-tag generation and coincidence analysis.

Streams are integer-nanosecond event times for the Stokes (channel 0) and
anti-Stokes (channel 1) detectors. Pairs are emitted as a Poisson process,
analysed by the polarization state, thinned by the efficiency chain and
delayed by a draw from |psi(tau)|^2. Uncorrelated singles sit on top.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .optics import AnalyzerChain, analyzer_projector, linear_analyzer
from .quantum import density
from .spectrum import TemporalWaveform

STOKES = 0
ANTI_STOKES = 1
DEFAULT_WINDOW_NS = (0, 300)
PEAK_SMOOTH_BINS = 5
RECORD_DTYPE = np.dtype([("channel", "<u1"), ("time", "<u8")])  # 9-byte packed records


@dataclass(frozen=True)
class Efficiencies:
    fiber: float = 0.70
    filter: float = 0.70
    detector: float = 0.50

    def __post_init__(self):
        for name in ("fiber", "filter", "detector"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"efficiency {name} must lie in (0, 1], got {v}")

    @property
    def channel(self) -> float:
        return self.fiber * self.filter * self.detector

    @property
    def pair(self) -> float:
        return self.channel**2

    def scaled(self, alpha: float) -> "Efficiencies":
        return replace(self, detector=self.detector * alpha)


UNIT_EFFICIENCIES = Efficiencies(1.0, 1.0, 1.0)


@dataclass(frozen=True)
class TimeTagStream:
    channel: int
    times: np.ndarray  # int64 ns, non-decreasing
    duration_ns: int | None = None

    def __post_init__(self):
        t = np.asarray(self.times)
        if t.ndim != 1:
            raise ValueError("time tags must be one-dimensional")
        t = t.astype(np.int64, copy=False)
        if t.size and (t[0] < 0 or np.any(np.diff(t) < 0)):
            raise ValueError(f"channel {self.channel}: time tags must be non-negative and non-decreasing")
        object.__setattr__(self, "times", t)
        if self.duration_ns is None:
            object.__setattr__(self, "duration_ns", int(t[-1]) + 1 if t.size else 0)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def rate(self) -> float:
        """Events per second."""
        return len(self) / (self.duration_ns * 1e-9) if self.duration_ns else 0.0


@dataclass(frozen=True)
class ExperimentScenario:
    """Source, channels and analyzers for one acquisition.

    ``pair_rate`` is the generated pair rate while the pump is on; ``duty``
    scales it to the time average. ``singles_rate`` is the uncorrelated
    source-level rate per channel before efficiencies. ``leakage`` replaces
    that fraction of the pair state with the maximally mixed state.
    """

    state: np.ndarray
    waveform: TemporalWaveform
    pair_rate: float = 9800.0
    singles_rate: tuple[float, float] = (0.0, 0.0)
    efficiencies: Efficiencies = field(default_factory=Efficiencies)
    duty: float = 0.10
    analyzer_s: AnalyzerChain | None = None
    analyzer_as: AnalyzerChain | None = None
    duration_s: float = 1.0
    seed: int = 0
    leakage: float = 0.0
    thermal_singles: bool = False
    thermal_block_ns: float = 1000.0
    max_events: int = 50_000_000

    def __post_init__(self):
        object.__setattr__(self, "state", density(self.state))
        object.__setattr__(self, "singles_rate", tuple(float(r) for r in self.singles_rate))
        if self.pair_rate < 0 or min(self.singles_rate) < 0 or len(self.singles_rate) != 2:
            raise ValueError("rates must be non-negative (two singles rates)")
        if not 0 < self.duty <= 1:
            raise ValueError(f"duty cycle must lie in (0, 1], got {self.duty}")
        if not 0 <= self.leakage <= 1:
            raise ValueError(f"leakage must lie in [0, 1], got {self.leakage}")
        if self.duration_s <= 0 or self.thermal_block_ns <= 0:
            raise ValueError("duration and thermal block length must be positive")

    def with_analyzers(self, analyzer_s, analyzer_as) -> "ExperimentScenario":
        return replace(self, analyzer_s=analyzer_s, analyzer_as=analyzer_as)

    @property
    def effective_state(self) -> np.ndarray:
        return (1 - self.leakage) * self.state + self.leakage * np.eye(4) / 4

    def outcome_probabilities(self) -> np.ndarray:
        """P(pass, pass), P(pass, block), P(block, pass), P(block, block) per pair."""
        ps = _projector(self.analyzer_s)
        pa = _projector(self.analyzer_as)
        rho = self.effective_state
        eye = np.eye(2)

        def expect(a, b):
            return float(np.trace(rho @ np.kron(a, b)).real)

        pp = expect(ps, pa)
        p_s = expect(ps, eye)
        p_as = expect(eye, pa)
        probs = np.array([pp, p_s - pp, p_as - pp, 1 - p_s - p_as + pp])
        probs = np.clip(probs, 0, None)
        return probs / probs.sum()

    def detected_rates(self) -> dict[str, float]:
        """Time-averaged detected rates (s^-1): pairs, and singles per channel."""
        p = self.outcome_probabilities()
        eta = self.efficiencies.channel
        rp = self.pair_rate * self.duty
        pass_s = 0.5 if self.analyzer_s is not None else 1.0
        pass_as = 0.5 if self.analyzer_as is not None else 1.0
        return {
            "pairs": rp * p[0] * eta**2,
            "stokes": rp * (p[0] + p[1]) * eta + self.singles_rate[0] * self.duty * eta * pass_s,
            "anti_stokes": rp * (p[0] + p[2]) * eta + self.singles_rate[1] * self.duty * eta * pass_as,
        }

    def expected_events(self) -> float:
        r = self.detected_rates()
        return (r["stokes"] + r["anti_stokes"]) * self.duration_s


def _projector(chain: AnalyzerChain | None) -> np.ndarray:
    if chain is None:
        return np.eye(2)
    a = analyzer_projector(chain)
    return np.outer(a, a.conj())


def delay_distribution(wf: TemporalWaveform) -> tuple[np.ndarray, np.ndarray]:
    """Left bin edges (ns) and probabilities of |psi|^2 on the waveform grid."""
    w = wf.intensity * wf.dtau_ns
    return wf.tau_ns, w / w.sum()


def sample_delays(rng: np.random.Generator, wf: TemporalWaveform, n: int) -> np.ndarray:
    """Inverse-CDF draws from |psi|^2, uniform within each grid cell."""
    edges, p = delay_distribution(wf)
    cdf = np.cumsum(p)
    idx = np.searchsorted(cdf, rng.random(n) * cdf[-1], side="right")
    idx = np.minimum(idx, len(edges) - 1)
    return edges[idx] + rng.random(n) * wf.dtau_ns


def _background(rng: np.random.Generator, rate_ns: float, duration_ns: float,
                thermal: bool, block_ns: float) -> np.ndarray:
    if rate_ns <= 0:
        return np.empty(0)
    if not thermal:
        return rng.uniform(0, duration_ns, rng.poisson(rate_ns * duration_ns))
    # Bose-Einstein counts per coherence block; only non-empty blocks are drawn
    n_blocks = int(duration_ns // block_ns)
    mean = rate_ns * block_ns
    p0 = 1 / (1 + mean)
    k = rng.binomial(n_blocks, 1 - p0)
    starts = rng.choice(n_blocks, size=k, replace=False) * block_ns
    counts = rng.geometric(p0, k)
    return np.repeat(starts, counts) + rng.random(counts.sum()) * block_ns


@dataclass(frozen=True)
class Acquisition:
    stokes: TimeTagStream
    anti_stokes: TimeTagStream
    generated_pairs: int


def acquire(scenario: ExperimentScenario) -> Acquisition:
    """Monte Carlo realization of one acquisition; deterministic per seed."""
    sc = scenario
    expected = sc.expected_events()
    if expected > sc.max_events:
        raise ValueError(f"expected {expected:.3g} events exceeds cap {sc.max_events:.3g}; shorten the duration")
    rng = np.random.default_rng(sc.seed)
    t_end = sc.duration_s * 1e9
    eta = sc.efficiencies.channel

    n = rng.poisson(sc.pair_rate * sc.duty * sc.duration_s)
    t0 = rng.uniform(0, t_end, n)
    outcome = rng.choice(4, size=n, p=sc.outcome_probabilities())
    keep_s = (outcome <= 1) & (rng.random(n) < eta)
    keep_as = ((outcome == 0) | (outcome == 2)) & (rng.random(n) < eta)
    t_as = t0 + sample_delays(rng, sc.waveform, n)

    pass_s = 0.5 if sc.analyzer_s is not None else 1.0
    pass_as = 0.5 if sc.analyzer_as is not None else 1.0
    bg_s = _background(rng, sc.singles_rate[0] * 1e-9 * sc.duty * eta * pass_s, t_end,
                       sc.thermal_singles, sc.thermal_block_ns)
    bg_as = _background(rng, sc.singles_rate[1] * 1e-9 * sc.duty * eta * pass_as, t_end,
                        sc.thermal_singles, sc.thermal_block_ns)

    def stream(channel, *parts):
        t = np.floor(np.concatenate(parts))
        t = t[(t >= 0) & (t < t_end)].astype(np.int64)
        t.sort(kind="stable")
        return TimeTagStream(channel, t, int(np.ceil(t_end)))

    return Acquisition(stream(STOKES, t0[keep_s], bg_s), stream(ANTI_STOKES, t_as[keep_as], bg_as), int(n))


def generate_timetags(scenario: ExperimentScenario) -> tuple[TimeTagStream, TimeTagStream]:
    """(Stokes, anti-Stokes) streams of :func:`acquire`."""
    acq = acquire(scenario)
    return acq.stokes, acq.anti_stokes


# -- analysis ----------------------------------------------------------------

@dataclass(frozen=True)
class CoincidenceHistogram:
    bin_ns: int
    edges: np.ndarray  # left edges, ns
    counts: np.ndarray
    singles: tuple[int, int]
    duration_ns: int

    @property
    def tau_ns(self) -> np.ndarray:
        """Mean delay of each bin; integer delays k cover true delays centered on k."""
        return self.edges + (self.bin_ns - 1) / 2

    @property
    def accidental_per_bin(self) -> float:
        n1, n2 = self.singles
        return n1 * n2 * self.bin_ns / self.duration_ns

    @property
    def g2(self) -> np.ndarray:
        return self.counts / self.accidental_per_bin


def _check_streams(s1: TimeTagStream, s2: TimeTagStream) -> int:
    if len(s1) == 0 or len(s2) == 0:
        raise ValueError("cannot correlate an empty stream")
    return max(s1.duration_ns, s2.duration_ns)


def _delays(t1: np.ndarray, t2: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """All t2 - t1 in [lo, hi), via binary search of each t1 into t2."""
    start = np.searchsorted(t2, t1 + lo, side="left")
    stop = np.searchsorted(t2, t1 + hi, side="left")
    n = stop - start
    total = int(n.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    owner = np.repeat(np.arange(len(t1)), n)
    offset = np.arange(total) - np.repeat(np.cumsum(n) - n, n)
    return t2[start[owner] + offset] - t1[owner]


def cross_correlation(s1: TimeTagStream, s2: TimeTagStream, bin_ns: int = 1,
                      range_ns: tuple[int, int] = (-100, 500)) -> CoincidenceHistogram:
    """Histogram of tau = t2 - t1 with g2 normalized to the singles product."""
    duration = _check_streams(s1, s2)
    lo, hi = int(range_ns[0]), int(range_ns[1])
    if bin_ns <= 0 or hi <= lo or (hi - lo) % bin_ns:
        raise ValueError(f"range {range_ns} must be a positive multiple of bin {bin_ns}")
    d = _delays(s1.times, s2.times, lo, hi)
    nbins = (hi - lo) // bin_ns
    counts = np.bincount((d - lo) // bin_ns, minlength=nbins)
    edges = lo + bin_ns * np.arange(nbins)
    return CoincidenceHistogram(bin_ns, edges, counts, (len(s1), len(s2)), duration)


def smoothed(values: np.ndarray, width: int = PEAK_SMOOTH_BINS) -> np.ndarray:
    """Centered moving average; edges use the bins available."""
    kernel = np.ones(width)
    return np.convolve(values, kernel, "same") / np.convolve(np.ones_like(values, dtype=float), kernel, "same")


def g2_peak(hist: CoincidenceHistogram, width: int = PEAK_SMOOTH_BINS) -> tuple[float, float]:
    """(peak g2, tau at peak) after moving-average smoothing."""
    g = smoothed(hist.g2.astype(float), width)
    k = int(np.argmax(g))
    return float(g[k]), float(hist.tau_ns[k])


def window_g2(s1: TimeTagStream, s2: TimeTagStream, window_ns=DEFAULT_WINDOW_NS) -> float:
    """g2 of one integration bin spanning ``window_ns``."""
    lo, hi = window_ns
    hist = cross_correlation(s1, s2, bin_ns=hi - lo, range_ns=(lo, hi))
    return float(hist.g2[0])


def window_counts(s1: TimeTagStream, s2: TimeTagStream, window_ns=DEFAULT_WINDOW_NS) -> int:
    lo, hi = window_ns
    return int(len(_delays(s1.times, s2.times, lo, hi)))


def auto_correlation(s: TimeTagStream, bin_ns: int = 1, method: str = "direct", seed: int = 0) -> float:
    """Zero-delay autocorrelation of one detector.

    ``direct`` counts event pairs closer than ``bin_ns`` within the stream;
    ``hbt`` splits the stream 50/50 and cross-correlates the halves.
    """
    n = len(s)
    if n < 2:
        raise ValueError("autocorrelation needs at least two events")
    if n < 1000:
        warnings.warn(f"only {n} events; autocorrelation estimate is very uncertain", stacklevel=2)
    duration = s.duration_ns
    if method == "direct":
        t = s.times
        close = np.searchsorted(t, t + bin_ns, side="left") - np.arange(n) - 1
        pairs = int(close.sum())
        # unordered pairs whose integer separation is below bin_ns
        expected = n * (n - 1) / 2 * (2 * bin_ns - 1) / duration
        return pairs / expected
    if method == "hbt":
        mask = np.random.default_rng(seed).random(n) < 0.5
        a = TimeTagStream(s.channel, s.times[mask], duration)
        b = TimeTagStream(s.channel, s.times[~mask], duration)
        hist = cross_correlation(a, b, bin_ns=bin_ns, range_ns=(0, bin_ns))
        return float(hist.g2[0])
    raise ValueError(f"unknown autocorrelation method {method!r}")


def cauchy_schwarz_factor(g2_cross: float, g2_auto_s: float, g2_auto_as: float) -> float:
    """g2_cross^2 / (g2_s g2_as); values above 1 violate the classical bound."""
    if g2_auto_s <= 0 or g2_auto_as <= 0:
        raise ValueError("autocorrelations must be positive")
    return g2_cross**2 / (g2_auto_s * g2_auto_as)


def visibility_from_g2(g2: float) -> float:
    if g2 < 0:
        raise ValueError("g2 must be non-negative")
    if np.isinf(g2):
        return 1.0
    return (g2 - 1) / (g2 + 1)


def g2_from_visibility(v: float) -> float:
    if not -1 <= v < 1:
        raise ValueError("visibility must lie in [-1, 1)")
    return (1 + v) / (1 - v)


# -- expected (noise-free) statistics ------------------------------------------

def expected_g2_curve(scenario: ExperimentScenario) -> tuple[np.ndarray, np.ndarray]:
    """Expected g2 on the waveform grid, before shot noise."""
    edges, p = delay_distribution(scenario.waveform)
    r = scenario.detected_rates()
    acc = r["stokes"] * r["anti_stokes"] * 1e-9 * scenario.waveform.dtau_ns
    return edges, 1 + r["pairs"] * p / acc


def expected_peak_g2(scenario: ExperimentScenario, width: int = PEAK_SMOOTH_BINS) -> float:
    _, g = expected_g2_curve(scenario)
    return float(smoothed(g, width).max())


def expected_window_g2(scenario: ExperimentScenario, window_ns=DEFAULT_WINDOW_NS) -> float:
    edges, p = delay_distribution(scenario.waveform)
    lo, hi = window_ns
    frac = p[(edges >= lo) & (edges < hi)].sum()
    r = scenario.detected_rates()
    acc = r["stokes"] * r["anti_stokes"] * 1e-9 * (hi - lo)
    return float(1 + r["pairs"] * frac / acc)


def expected_window_rate(scenario: ExperimentScenario, window_ns=DEFAULT_WINDOW_NS) -> float:
    """Expected coincidences per second in the window: pairs plus accidentals."""
    edges, p = delay_distribution(scenario.waveform)
    lo, hi = window_ns
    frac = p[(edges >= lo) & (edges < hi)].sum()
    r = scenario.detected_rates()
    return r["pairs"] * frac + r["stokes"] * r["anti_stokes"] * 1e-9 * (hi - lo)


def tune_singles_for_peak(scenario: ExperimentScenario, target_peak: float = 35.0) -> ExperimentScenario:
    """Set equal uncorrelated singles on both channels so the expected smoothed peak g2 hits the target."""

    def excess(r):
        return expected_peak_g2(replace(scenario, singles_rate=(r, r))) - target_peak

    if excess(0.0) < 0:
        raise ValueError(f"peak g2 {target_peak} unreachable: pairs alone give {excess(0.0) + target_peak:.3g}")
    hi = max(scenario.pair_rate, 1.0)
    while excess(hi) > 0:
        hi *= 4
    return replace(scenario, singles_rate=(brentq(excess, 0.0, hi, xtol=1e-9),) * 2)


# -- polarization fringes ----------------------------------------------------

@dataclass(frozen=True)
class FringeResult:
    angles: np.ndarray  # analyzer angle (rad) of the scanned arm
    counts: np.ndarray
    offset: float
    cos_amp: float
    sin_amp: float
    visibility: float
    ok: bool = True

    @property
    def phase(self) -> float:
        return float(np.arctan2(self.sin_amp, self.cos_amp) / 2)

    def model(self, angles) -> np.ndarray:
        a = 2 * np.asarray(angles)
        return self.offset + self.cos_amp * np.cos(a) + self.sin_amp * np.sin(a)


def fit_sinusoid(angles, counts) -> FringeResult:
    """Least-squares fit of A + B cos(2 theta) + C sin(2 theta); V = sqrt(B^2 + C^2)/A."""
    angles = np.asarray(angles, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if len(angles) < 3:
        return FringeResult(angles, counts, np.nan, np.nan, np.nan, np.nan, ok=False)
    design = np.column_stack([np.ones_like(angles), np.cos(2 * angles), np.sin(2 * angles)])
    (a, b, c), *_ = np.linalg.lstsq(design, counts, rcond=None)
    rank = np.linalg.matrix_rank(design)
    ok = bool(rank == 3 and a > 0)
    v = float(np.hypot(b, c) / a) if ok else np.nan
    return FringeResult(angles, counts, float(a), float(b), float(c), v, ok)


def fringe_scan(scenario: ExperimentScenario, fixed_angle: float, scan_angles,
                window_ns=DEFAULT_WINDOW_NS) -> FringeResult:
    """Windowed coincidences with the Stokes analyzer at ``fixed_angle`` while scanning the anti-Stokes one."""
    counts = []
    for i, theta in enumerate(scan_angles):
        sc = replace(scenario.with_analyzers(linear_analyzer(fixed_angle), linear_analyzer(theta)),
                     seed=scenario.seed + i)
        s, a = generate_timetags(sc)
        counts.append(window_counts(s, a, window_ns))
    return fit_sinusoid(scan_angles, counts)


def expected_fringe(scenario: ExperimentScenario, fixed_angle: float, scan_angles,
                    window_ns=DEFAULT_WINDOW_NS) -> FringeResult:
    rates = [expected_window_rate(scenario.with_analyzers(linear_analyzer(fixed_angle), linear_analyzer(t)), window_ns)
             for t in scan_angles]
    return fit_sinusoid(scan_angles, np.asarray(rates) * scenario.duration_s)


def tune_leakage_for_visibility(scenario: ExperimentScenario, target: float = 0.893,
                                fixed_angle: float = 0.0, window_ns=DEFAULT_WINDOW_NS) -> ExperimentScenario:
    """Choose the leakage fraction so the expected fringe visibility equals ``target``."""
    angles = np.linspace(0, np.pi, 8, endpoint=False)

    def excess(leak):
        return expected_fringe(replace(scenario, leakage=leak), fixed_angle, angles, window_ns).visibility - target

    v0 = excess(0.0) + target
    if v0 < target:
        raise ValueError(f"visibility {target} unreachable: accidentals alone limit it to {v0:.3f}")
    return replace(scenario, leakage=brentq(excess, 0.0, 1.0, xtol=1e-10))


# -- brightness --------------------------------------------------------------

@dataclass(frozen=True)
class BrightnessReport:
    generated_rate: float  # s^-1
    spectral: float  # s^-1 MHz^-1
    normalized: float  # s^-1 MHz^-1 mW^-1


def generated_rate(detected_rate: float, efficiencies: Efficiencies = Efficiencies(), duty: float = 0.10) -> float:
    if detected_rate < 0 or not 0 < duty <= 1:
        raise ValueError("detected rate must be >= 0 and duty in (0, 1]")
    return detected_rate / (efficiencies.pair * duty)


def spectral_brightness(generated: float, bandwidth_mhz: float, pump_power_mw: float) -> tuple[float, float]:
    if bandwidth_mhz <= 0 or pump_power_mw <= 0:
        raise ValueError("bandwidth and pump power must be positive")
    spectral = generated / bandwidth_mhz
    return spectral, spectral / pump_power_mw


def brightness_report(detected_rate: float, efficiencies: Efficiencies = Efficiencies(), duty: float = 0.10,
                      bandwidth_mhz: float = 2.9, pump_power_mw: float = 0.016) -> BrightnessReport:
    gen = generated_rate(detected_rate, efficiencies, duty)
    return BrightnessReport(gen, *spectral_brightness(gen, bandwidth_mhz, pump_power_mw))


# -- file formats ------------------------------------------------------------

def _records(*streams: TimeTagStream) -> np.ndarray:
    total = sum(len(s) for s in streams)
    rec = np.empty(total, dtype=RECORD_DTYPE)
    i = 0
    for s in streams:
        rec["channel"][i:i + len(s)] = s.channel
        rec["time"][i:i + len(s)] = s.times
        i += len(s)
    order = np.lexsort((rec["channel"], rec["time"]))
    return rec[order]


def save_timetags(path: str | Path, *streams: TimeTagStream) -> None:
    """Little-endian (u8 channel, u64 time_ns) records, merged in time order."""
    Path(path).write_bytes(_records(*streams).tobytes())


def save_timetags_csv(path: str | Path, *streams: TimeTagStream) -> None:
    rec = _records(*streams)
    with open(path, "w") as fh:
        fh.write("channel,time_ns\n")
        for c, t in zip(rec["channel"].tolist(), rec["time"].tolist()):
            fh.write(f"{c},{t}\n")


def _split(channel: np.ndarray, times: np.ndarray, duration_ns: int | None) -> dict[int, TimeTagStream]:
    if times.size and times.max() > np.iinfo(np.int64).max:
        raise ValueError("time tag overflows int64")
    times = times.astype(np.int64)
    if duration_ns is None and times.size:
        duration_ns = int(times.max()) + 1
    return {int(c): TimeTagStream(int(c), times[channel == c], duration_ns) for c in np.unique(channel)}


def load_timetags(path: str | Path, duration_ns: int | None = None) -> dict[int, TimeTagStream]:
    """Read a binary record file into per-channel streams (shared duration)."""
    raw = Path(path).read_bytes()
    if len(raw) % RECORD_DTYPE.itemsize:
        raise ValueError(f"{path}: size {len(raw)} is not a multiple of {RECORD_DTYPE.itemsize}-byte records")
    rec = np.frombuffer(raw, dtype=RECORD_DTYPE)
    return _split(rec["channel"], rec["time"], duration_ns)


def load_timetags_csv(path: str | Path, duration_ns: int | None = None) -> dict[int, TimeTagStream]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.uint64, ndmin=2)
    return _split(data[:, 0].astype(np.uint8), data[:, 1], duration_ns)


def save_histogram_csv(path: str | Path, hist: CoincidenceHistogram) -> None:
    data = np.column_stack([hist.edges, hist.counts, hist.g2])
    np.savetxt(path, data, delimiter=",", header="tau_ns,counts,g2", comments="", fmt=["%d", "%d", "%.10g"])
