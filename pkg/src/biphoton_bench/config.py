"""Scenario configuration: a versioned YAML document mapped onto the domain types.

Every section is a flat mapping; unknown keys and out-of-range values are
rejected with the dotted field path so the CLI can report them.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import coincidence as co
from . import phaselock as pl
from . import spectrum as sp
from .optics import AnalyzerChain, bell_config, two_path_density
from .quantum import BellKind, bell_state, load_density_json

SCHEMA = "biphoton-bench/1"
OUTPUT_ENV = "BIPHOTON_BENCH_OUT"
DEFAULT_OUTPUT = "biphoton_out"


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass
class SourceSection:
    state: str = "PsiPlus"  # Bell label or path to a density-matrix JSON
    pair_rate: float = 9800.0
    singles_rate: Any = "auto"  # "auto" or [stokes, anti_stokes] in s^-1
    target_peak_g2: float = 35.0
    leakage: Any = "auto"  # number, or "auto" to match target_visibility
    target_visibility: float = 0.893
    duty: float = 0.10
    thermal_singles: bool = True
    thermal_block_ns: float = 1000.0
    phase_coherence: Any = "lock"  # number in [0, 1] or "lock" (from the lock simulation)


@dataclass
class EfficiencySection:
    fiber: float = 0.70
    filter: float = 0.70
    detector: float = 0.50


@dataclass
class SpectrumSection:
    coupling_power_mw: float = 2.0
    optical_depth: float = 32.0
    length_m: float = 0.017
    pump_detuning_mhz: float = 80.0
    dephasing_mhz: float = 1.7
    eit_window_mhz: float = 100.0
    group_delay_ns: Any = 300.0  # number, or null to solve from the power law
    rise_time_ns: float = 25.0
    law_a: Any = None
    law_b: Any = None


@dataclass
class AcquisitionSection:
    duration_s: float = 500.0
    analyzer_s: Any = None
    analyzer_as: Any = None
    write_csv: bool = False
    max_events: int = 50_000_000
    fringe_scan: bool = True
    fringe_fixed_deg: float = 0.0
    fringe_unlocked_fixed_deg: float = -45.0
    fringe_step_deg: float = 20.0
    fringe_duration_s: float = 500.0


@dataclass
class AnalysisSection:
    bin_ns: int = 1
    range_ns: list = field(default_factory=lambda: [-100, 500])
    window_ns: list = field(default_factory=lambda: [0, 300])
    auto_window_ns: int = 20
    auto_method: str = "direct"


@dataclass
class TomographySection:
    time_per_setting_s: float = 2000.0
    likelihood: str = "poisson"
    restarts: int = 3
    bootstrap: int = 250
    target: Any = None  # defaults to the source state when it is a Bell label
    roundtrip_states: int = 100
    roundtrip_intensity: float = 1e6


@dataclass
class LockSection:
    lambda_p_nm: float = 780.0
    lambda_c_nm: float = 795.0
    lambda_l_nm: float = 795.0
    phi0: float = 0.0
    drift_std: float = 0.02
    interval_ms: float = 1.0
    differential_nm: float = 0.0
    duration_ms: float = 10_000.0
    kp: float = 0.5
    ki: float = 0.05
    limit: float = 0.5
    setpoint: float = 0.0
    locked: bool = True
    unlocked_drift_std: float = 1.0
    tolerance: float = 0.05


@dataclass
class ScenarioConfig:
    schema: str = SCHEMA
    seed: int = 0
    output_dir: Any = None
    source: SourceSection = field(default_factory=SourceSection)
    efficiencies: EfficiencySection = field(default_factory=EfficiencySection)
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    acquisition: AcquisitionSection = field(default_factory=AcquisitionSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    tomography: TomographySection = field(default_factory=TomographySection)
    lock: LockSection = field(default_factory=LockSection)
    base_dir: Path = field(default=Path("."), repr=False)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out.pop("base_dir")
        return out


SECTIONS = {
    "source": SourceSection,
    "efficiencies": EfficiencySection,
    "spectrum": SpectrumSection,
    "acquisition": AcquisitionSection,
    "analysis": AnalysisSection,
    "tomography": TomographySection,
    "lock": LockSection,
}


def _coerce(path: str, value: Any, default: Any) -> Any:
    """Match the type of the default where it is unambiguous."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true/false, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    if isinstance(default, list) and not isinstance(value, list):
        raise ConfigError(path, f"expected a list, got {value!r}")
    return value


def _section(name: str, cls, doc: Any):
    if doc is None:
        return cls()
    if not isinstance(doc, dict):
        raise ConfigError(name, "expected a mapping")
    defaults = cls()
    types = {f.name: f.type for f in dataclasses.fields(cls)}
    for key in doc:
        if key not in types:
            raise ConfigError(f"{name}.{key}", "unknown key")
    values = {k: v if types[k] == "Any" else _coerce(f"{name}.{k}", v, getattr(defaults, k))
              for k, v in doc.items()}
    return dataclasses.replace(defaults, **values)


def parse_config(doc: Any, base_dir: Path | str = ".") -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("", "config must be a mapping")
    schema = doc.get("schema")
    if schema != SCHEMA:
        raise ConfigError("schema", f"expected {SCHEMA!r}, got {schema!r}")
    top = {"schema", "seed", "output_dir", *SECTIONS}
    for key in doc:
        if key not in top:
            raise ConfigError(key, "unknown key")
    cfg = ScenarioConfig(base_dir=Path(base_dir))
    cfg.seed = _coerce("seed", doc.get("seed", 0), 0)
    cfg.output_dir = doc.get("output_dir")
    for name, cls in SECTIONS.items():
        setattr(cfg, name, _section(name, cls, doc.get(name)))
    validate(cfg)
    return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark else str(path)
        raise ConfigError(where, f"invalid YAML: {getattr(exc, 'problem', exc)}") from exc
    return parse_config(doc, path.parent)


def default_config() -> ScenarioConfig:
    return ScenarioConfig()


def dump_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def _guard(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    except OSError as exc:
        raise ConfigError(path, f"cannot read {exc.filename}: {exc.strerror}") from exc


def validate(cfg: ScenarioConfig) -> None:
    """Build every domain object once so physical bounds fail at parse time."""
    src = cfg.source
    if not (src.singles_rate == "auto" or (isinstance(src.singles_rate, list) and len(src.singles_rate) == 2)):
        raise ConfigError("source.singles_rate", "expected 'auto' or [stokes, anti_stokes]")
    if not (src.leakage == "auto" or isinstance(src.leakage, (int, float))):
        raise ConfigError("source.leakage", "expected a number or 'auto'")
    if not (src.phase_coherence == "lock" or (isinstance(src.phase_coherence, (int, float))
                                              and 0 <= src.phase_coherence <= 1)):
        raise ConfigError("source.phase_coherence", "expected 'lock' or a number in [0, 1]")
    _guard("source.state", source_state, cfg, 1.0)
    efficiencies(cfg)
    spectral_params(cfg)
    for key in ("analyzer_s", "analyzer_as"):
        doc = getattr(cfg.acquisition, key)
        if doc is not None:
            _guard(f"acquisition.{key}", AnalyzerChain.from_dict, doc)
    acq = cfg.acquisition
    if acq.duration_s <= 0 or acq.fringe_duration_s <= 0 or acq.fringe_step_deg <= 0:
        raise ConfigError("acquisition", "durations and fringe step must be positive")
    an = cfg.analysis
    if an.bin_ns <= 0 or len(an.range_ns) != 2 or len(an.window_ns) != 2 or an.auto_window_ns <= 0:
        raise ConfigError("analysis", "bin, range [lo, hi], window [lo, hi] and auto window must be valid")
    if an.auto_method not in ("direct", "hbt"):
        raise ConfigError("analysis.auto_method", "expected 'direct' or 'hbt'")
    tomo = cfg.tomography
    _guard("tomography", _mle_check, tomo)
    if tomo.time_per_setting_s <= 0 or tomo.bootstrap < 0 or tomo.roundtrip_states < 0:
        raise ConfigError("tomography", "time per setting must be positive, counts non-negative")
    if tomo.target is not None:
        _guard("tomography.target", BellKind.parse, tomo.target)
    lock_geometry(cfg)
    _guard("lock", lock_models, cfg)


def _mle_check(tomo: TomographySection):
    from .tomography import MleConfig

    return MleConfig(likelihood=tomo.likelihood, restarts=tomo.restarts)


def resolve_path(cfg: ScenarioConfig, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else cfg.base_dir / p


def source_state(cfg: ScenarioConfig, coherence: float) -> np.ndarray:
    """Two-path state for a Bell label (coherence-scaled), or a density matrix from file."""
    label = cfg.source.state
    try:
        kind = BellKind.parse(label)
    except ValueError:
        return load_density_json(resolve_path(cfg, label))
    return two_path_density(bell_config(kind), coherence)


def target_state(cfg: ScenarioConfig) -> np.ndarray | None:
    label = cfg.tomography.target or cfg.source.state
    try:
        return bell_state(BellKind.parse(label))
    except ValueError:
        return None


def efficiencies(cfg: ScenarioConfig) -> co.Efficiencies:
    e = cfg.efficiencies
    return _guard("efficiencies", co.Efficiencies, e.fiber, e.filter, e.detector)


def spectral_params(cfg: ScenarioConfig) -> sp.SpectralModelParams:
    s = cfg.spectrum
    law = sp.DEFAULT_LAW
    if (s.law_a is None) != (s.law_b is None):
        raise ConfigError("spectrum.law_a", "law_a and law_b must be given together")
    if s.law_a is not None:
        law = sp.PowerLaw(float(s.law_a), float(s.law_b))
    return _guard("spectrum", sp.SpectralModelParams,
                  coupling_power_mw=s.coupling_power_mw, optical_depth=s.optical_depth, length_m=s.length_m,
                  pump_detuning_mhz=s.pump_detuning_mhz, dephasing_mhz=s.dephasing_mhz,
                  eit_window_mhz=s.eit_window_mhz, law=law,
                  group_delay_ns=None if s.group_delay_ns is None else float(s.group_delay_ns),
                  rise_time_ns=s.rise_time_ns)


def lock_geometry(cfg: ScenarioConfig) -> pl.InterferometerGeometry:
    lk = cfg.lock
    return _guard("lock", pl.InterferometerGeometry, lambda_p=lk.lambda_p_nm * 1e-9,
                  lambda_c=lk.lambda_c_nm * 1e-9, lambda_l=lk.lambda_l_nm * 1e-9, phi0=lk.phi0)


def lock_models(cfg: ScenarioConfig) -> tuple[pl.DriftModel, pl.ControllerParams]:
    lk = cfg.lock
    if lk.duration_ms <= 0:
        raise ValueError("duration_ms must be positive")
    if lk.locked:
        drift = pl.DriftModel(lk.drift_std, lk.interval_ms, cfg.seed, lk.differential_nm)
        ctrl = pl.ControllerParams(lk.kp, lk.ki, lk.limit, lk.setpoint)
    else:
        drift = pl.DriftModel(lk.unlocked_drift_std, lk.interval_ms, cfg.seed, lk.differential_nm)
        ctrl = pl.ControllerParams(0.0, 0.0, lk.limit, lk.setpoint)
    return drift, ctrl


def phase_coherence(cfg: ScenarioConfig) -> float:
    pc = cfg.source.phase_coherence
    if pc != "lock":
        return float(pc)
    drift, ctrl = lock_models(cfg)
    trace = pl.simulate_lock(drift, ctrl, cfg.lock.duration_ms, lock_geometry(cfg), cfg.lock.tolerance)
    return pl.visibility_penalty(trace)


def build_scenario(cfg: ScenarioConfig, coherence: float | None = None) -> co.ExperimentScenario:
    """Experiment scenario with the automatic calibrations applied."""
    if coherence is None:
        coherence = phase_coherence(cfg)
    src = cfg.source
    acq = cfg.acquisition
    chains = [None if d is None else AnalyzerChain.from_dict(d) for d in (acq.analyzer_s, acq.analyzer_as)]
    waveform = sp.biphoton_waveform(spectral_params(cfg))
    sc = _guard("source", co.ExperimentScenario,
                state=source_state(cfg, coherence), waveform=waveform, pair_rate=src.pair_rate,
                singles_rate=(0.0, 0.0) if src.singles_rate == "auto" else tuple(src.singles_rate),
                efficiencies=efficiencies(cfg), duty=src.duty, duration_s=acq.duration_s, seed=cfg.seed,
                leakage=0.0 if src.leakage == "auto" else float(src.leakage),
                thermal_singles=src.thermal_singles, thermal_block_ns=src.thermal_block_ns,
                max_events=acq.max_events)
    if src.singles_rate == "auto":
        sc = _guard("source.target_peak_g2", co.tune_singles_for_peak, sc, src.target_peak_g2)
    if src.leakage == "auto":
        sc = _guard("source.target_visibility", co.tune_leakage_for_visibility, sc, src.target_visibility,
                    np.deg2rad(acq.fringe_fixed_deg), tuple(cfg.analysis.window_ns))
    return sc.with_analyzers(*chains)


def output_dir(cfg: ScenarioConfig | None, override: str | None = None) -> Path:
    if override:
        return Path(override)
    if cfg is not None and cfg.output_dir:
        return resolve_path(cfg, cfg.output_dir)
    return Path(os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT))
