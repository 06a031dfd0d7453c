"""biphoton-bench command line: simulate, analyze, tomo, lock, report.

Exit codes: 0 ok, 2 config, 3 stream I/O, 4 tomography input, 5 missing artifacts.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import coincidence as co
from . import config as cf
from . import phaselock as pl
from . import report as rp
from . import spectrum as sp
from . import tomography as tm
from .quantum import BellKind, bell_state, check_density, chsh_canonical, save_density_json, state_fidelity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STREAM = 3
EXIT_TOMO = 4
EXIT_MISSING = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n")


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    return x


def _load(args) -> cf.ScenarioConfig:
    cfg = cf.load_config(args.config) if getattr(args, "config", None) else cf.default_config()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _outdir(cfg, args) -> Path:
    out = cf.output_dir(cfg, getattr(args, "out", None))
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- simulate -----------------------------------------------------------------

def _scan_angles(step_deg: float) -> np.ndarray:
    return np.deg2rad(np.arange(0.0, 180.0, step_deg))


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = _outdir(cfg, args)
    coherence = cf.phase_coherence(cfg)
    sc = cf.build_scenario(cfg, coherence)
    try:
        acq = co.acquire(sc)
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, f"acquisition: {exc}") from exc
    co.save_timetags(out / "timetags.bin", acq.stokes, acq.anti_stokes)
    if cfg.acquisition.write_csv or args.csv:
        co.save_timetags_csv(out / "timetags.csv", acq.stokes, acq.anti_stokes)
    sp.save_waveform_csv(out / "waveform.csv", sc.waveform)

    expected_pairs = sc.pair_rate * sc.duty * sc.duration_s
    summary = {
        "seed": cfg.seed,
        "duration_s": sc.duration_s,
        "duration_ns": acq.stokes.duration_ns,
        "pair_rate": sc.pair_rate,
        "duty": sc.duty,
        "singles_rate": list(sc.singles_rate),
        "leakage": sc.leakage,
        "phase_coherence": coherence,
        "generated_pairs": acq.generated_pairs,
        "expected_pairs": expected_pairs,
        "events": {"stokes": len(acq.stokes), "anti_stokes": len(acq.anti_stokes)},
        "expected_rates": sc.detected_rates(),
        "expected_peak_g2": co.expected_peak_g2(sc),
        "expected_window_g2": co.expected_window_g2(sc, tuple(cfg.analysis.window_ns)),
        "config": cfg.to_dict(),
    }
    if cfg.acquisition.fringe_scan:
        summary["fringes"] = _fringes(cfg, sc, out)
    _write_json(out / "summary.json", summary)
    print(f"wrote {len(acq.stokes)} + {len(acq.anti_stokes)} events to {out / 'timetags.bin'}")
    return EXIT_OK


def _fringes(cfg: cf.ScenarioConfig, sc: co.ExperimentScenario, out: Path) -> dict:
    acq = cfg.acquisition
    window = tuple(cfg.analysis.window_ns)
    angles = _scan_angles(acq.fringe_step_deg)
    base = replace(sc, duration_s=acq.fringe_duration_s)
    locked = co.fringe_scan(base, np.deg2rad(acq.fringe_fixed_deg), angles, window)
    unlocked_cfg = replace(cfg, lock=replace(cfg.lock, locked=False), source=replace(cfg.source, phase_coherence="lock"))
    penalty = cf.phase_coherence(unlocked_cfg)
    unlocked_state = cf.source_state(cfg, penalty)
    unlocked = co.fringe_scan(replace(base, state=unlocked_state),
                              np.deg2rad(acq.fringe_unlocked_fixed_deg), angles, window)
    with open(out / "fringes.csv", "w") as fh:
        fh.write("angle_deg,counts_locked,counts_unlocked\n")
        for a, c1, c2 in zip(np.rad2deg(angles), locked.counts, unlocked.counts):
            fh.write(f"{a:.6g},{int(c1)},{int(c2)}\n")
    doc = {
        "window_ns": list(window),
        "locked": {"fixed_deg": acq.fringe_fixed_deg, "visibility": locked.visibility, "fit_ok": locked.ok,
                   "expected_visibility": co.expected_fringe(base, np.deg2rad(acq.fringe_fixed_deg), angles,
                                                             window).visibility},
        "unlocked": {"fixed_deg": acq.fringe_unlocked_fixed_deg, "visibility": unlocked.visibility,
                     "fit_ok": unlocked.ok, "phase_coherence": penalty},
    }
    _write_json(out / "fringes.json", doc)
    return doc


# -- analyze ------------------------------------------------------------------

def _read_streams(paths: list[str], duration_ns: int | None) -> tuple[co.TimeTagStream, co.TimeTagStream]:
    merged: dict[int, np.ndarray] = {}
    for p in paths:
        loader = co.load_timetags_csv if p.endswith(".csv") else co.load_timetags
        for ch, s in loader(p).items():
            if ch in merged:
                raise ValueError(f"channel {ch} appears in more than one input")
            merged[ch] = s.times
    missing = {co.STOKES, co.ANTI_STOKES} - set(merged)
    if missing:
        raise ValueError(f"no events for channel(s) {sorted(missing)}")
    if duration_ns is None:
        duration_ns = max(int(t[-1]) + 1 for t in merged.values())
    return (co.TimeTagStream(co.STOKES, merged[co.STOKES], duration_ns),
            co.TimeTagStream(co.ANTI_STOKES, merged[co.ANTI_STOKES], duration_ns))


def _summary_duration(paths: list[str]) -> int | None:
    summary = Path(paths[0]).parent / "summary.json"
    if summary.exists():
        try:
            return int(json.loads(summary.read_text())["duration_ns"])
        except (KeyError, ValueError):
            return None
    return None


def cmd_analyze(args) -> int:
    out = _outdir(None, args)
    duration = args.duration_ns or _summary_duration(args.streams)
    try:
        s, a = _read_streams(args.streams, duration)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_STREAM, f"stream input: {exc}") from exc
    window = (0, args.window_ns[0]) if len(args.window_ns) == 1 else tuple(args.window_ns)
    try:
        hist = co.cross_correlation(s, a, args.bin_ns, tuple(args.range_ns))
        peak, tau = co.g2_peak(hist)
        g_window = co.window_g2(s, a, window)
        auto_s = co.auto_correlation(s, args.auto_window_ns, args.auto_method, seed=args.seed)
        auto_as = co.auto_correlation(a, args.auto_window_ns, args.auto_method, seed=args.seed + 1)
    except ValueError as exc:
        raise CliError(EXIT_STREAM, f"analysis: {exc}") from exc
    co.save_histogram_csv(out / "histogram.csv", hist)
    stats = {
        "events": {"stokes": len(s), "anti_stokes": len(a)},
        "duration_ns": s.duration_ns,
        "bin_ns": args.bin_ns,
        "range_ns": list(args.range_ns),
        "window_ns": list(window),
        "peak_g2": peak,
        "peak_tau_ns": tau,
        "window_g2": g_window,
        "window_coincidences": co.window_counts(s, a, window),
        "auto_g2_stokes": auto_s,
        "auto_g2_anti_stokes": auto_as,
        "auto_window_ns": args.auto_window_ns,
        "cauchy_schwarz_peak": co.cauchy_schwarz_factor(peak, auto_s, auto_as),
        "cauchy_schwarz_window": co.cauchy_schwarz_factor(g_window, auto_s, auto_as),
        "visibility_window": co.visibility_from_g2(g_window),
        "visibility_peak": co.visibility_from_g2(peak),
    }
    _write_json(out / "stats.json", stats)
    print(f"peak g2 {peak:.2f} at {tau:.1f} ns; window g2 {g_window:.2f}; "
          f"autos {auto_s:.2f}/{auto_as:.2f}; CS factor {stats['cauchy_schwarz_peak']:.0f}")
    return EXIT_OK


# -- tomo ---------------------------------------------------------------------

def _roundtrip(n_states: int, intensity: float, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    pset = tm.standard_projection_set()
    infid, physical = [], True
    for _ in range(n_states):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        res = tm.mle_reconstruct(tm.expected_counts(rho, pset, intensity), pset)
        try:
            check_density(res.rho)
        except ValueError:
            physical = False
        infid.append(1 - state_fidelity(res.rho, rho))
    return {"states": n_states, "intensity": intensity, "median_infidelity": float(np.median(infid)),
            "max_infidelity": float(np.max(infid)), "all_physical": physical}


def _fixture_report(names: list[str], out: Path) -> dict:
    doc = {}
    for name in names:
        try:
            fx = tm.load_paper_fixture(name)
        except ValueError as exc:
            raise CliError(EXIT_TOMO, f"fixture {name}: {exc}") from exc
        phys = fx.physical
        doc[fx.name] = {
            "flags": list(fx.flags),
            "min_eigenvalue": fx.diagnostics.min_eigenvalue,
            "chsh_horodecki": fx.chsh(),
            "chsh_canonical": chsh_canonical(phys),
            "published_chsh": tm.PUBLISHED_CHSH[fx.name],
            "fidelity_prob_printed": fx.fidelity_prob(),
            "fidelity_uhlmann_physical": fx.uhlmann_fidelity(),
            "purity_physical": float(np.trace(phys @ phys).real),
        }
        save_density_json(out / f"fixture_{fx.name}.json", phys)
    _write_json(out / "fixtures.json", doc)
    return doc


def cmd_tomo(args) -> int:
    if args.fixture is not None:
        cfg = cf.default_config()
        out = _outdir(cfg, args)
        names = list(tm.FIXTURE_NAMES) if args.fixture == "all" else [args.fixture]
        doc = _fixture_report(names, out)
        for name, row in doc.items():
            print(f"{name}: S = {row['chsh_horodecki']:.3f} (published {row['published_chsh']})")
        return EXIT_OK

    cfg = _load(args)
    out = _outdir(cfg, args)
    tomo = cfg.tomography
    mle_cfg = tm.MleConfig(likelihood=tomo.likelihood, restarts=tomo.restarts, seed=cfg.seed)
    if args.counts:
        try:
            counts, pset = tm.load_counts_csv(args.counts)
            pset.check_complete()
        except (OSError, ValueError) as exc:
            raise CliError(EXIT_TOMO, f"counts input: {exc}") from exc
        target = cf.target_state(cfg) if (args.config or tomo.target) else None
        if args.target:
            target = bell_state(args.target)
    else:
        pset = tm.standard_projection_set()
        sc = cf.build_scenario(cfg)
        counts = tm.scenario_counts(sc, pset, tomo.time_per_setting_s, seed=cfg.seed,
                                    window_ns=tuple(cfg.analysis.window_ns))
        tm.save_counts_csv(out / "counts.csv", counts, pset)
        target = bell_state(args.target) if args.target else cf.target_state(cfg)
    try:
        result = tm.mle_reconstruct(counts, pset, mle_cfg)
    except ValueError as exc:
        raise CliError(EXIT_TOMO, f"reconstruction: {exc}") from exc
    n_boot = tomo.bootstrap if args.bootstrap is None else args.bootstrap
    boot = tm.bootstrap(result, pset, target, n_boot, seed=cfg.seed) if n_boot > 0 else None
    doc = tm.report(result, target, boot)
    n_rt = tomo.roundtrip_states if args.roundtrip is None else args.roundtrip
    if n_rt > 0:
        doc["roundtrip"] = _roundtrip(n_rt, tomo.roundtrip_intensity, cfg.seed)
    save_density_json(out / "density.json", result.rho)
    _write_json(out / "tomo_report.json", doc)
    msg = f"purity {doc['purity']:.3f}, S {doc['chsh_horodecki']:.3f}"
    if "fidelity_prob" in doc:
        msg = f"fidelity {doc['fidelity_prob']:.4f}, " + msg
    print(msg)
    return EXIT_OK


# -- lock ---------------------------------------------------------------------

def cmd_lock(args) -> int:
    cfg = _load(args)
    if args.unlocked:
        cfg.lock.locked = False
    out = _outdir(cfg, args)
    geom = cf.lock_geometry(cfg)
    drift, ctrl = cf.lock_models(cfg)
    trace = pl.simulate_lock(drift, ctrl, cfg.lock.duration_ms, geom, cfg.lock.tolerance)
    pl.save_trace_csv(out / "trace.csv", trace)
    locked_drift = pl.DriftModel(cfg.lock.drift_std, cfg.lock.interval_ms, cfg.seed, cfg.lock.differential_nm)
    locked_ctrl = pl.ControllerParams(cfg.lock.kp, cfg.lock.ki, cfg.lock.limit)
    calib = pl.calibrate_lock_points(pl.CALIBRATION_SETPOINTS, locked_drift, locked_ctrl,
                                     min(cfg.lock.duration_ms, 1000.0), geom)
    with open(out / "lock_calibration.csv", "w") as fh:
        fh.write("phi_lock_rad,phi_measured_rad,phi_fit_rad\n")
        for row in calib.rows():
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
    doc = {
        "locked": cfg.lock.locked,
        "lock_ratio": geom.ratio,
        "steps": len(trace.t_ms),
        "residual_rms_rad": trace.residual_rms,
        "visibility_penalty": pl.visibility_penalty(trace),
        "calibration": {"setpoints": calib.setpoints, "phases": calib.phases, "slope": calib.slope,
                        "intercept": calib.intercept, "r2": calib.r2},
    }
    _write_json(out / "lock_report.json", doc)
    print(f"lock ratio {geom.ratio:.6f}; residual {trace.residual_rms:.4f} rad; "
          f"penalty {doc['visibility_penalty']:.4f}; R^2 {calib.r2:.6f}")
    return EXIT_OK


# -- report -------------------------------------------------------------------

def cmd_report(args) -> int:
    src = Path(args.artifact_dir)
    if not src.is_dir():
        raise CliError(EXIT_MISSING, f"artifact directory {src} not found")
    out = Path(args.out) if args.out else src
    out.mkdir(parents=True, exist_ok=True)
    rows, missing = rp.build(src)
    (out / "report.md").write_text(rp.to_markdown(rows, missing))
    (out / "report.csv").write_text(rp.to_csv(rows))
    failed = [r for r in rows if r.passed is False]
    print(f"{len(rows)} rows, {len(failed)} failing, {len(missing)} missing inputs -> {out / 'report.md'}")
    if missing:
        for m in missing:
            print(f"missing: {m}", file=sys.stderr)
        return EXIT_MISSING
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biphoton-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        if config_required:
            p.add_argument("config", help="scenario YAML")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory (default: config, then $%s)" % cf.OUTPUT_ENV)

    p = sub.add_parser("simulate", help="generate time tags and fringe scans")
    common(p)
    p.add_argument("--csv", action="store_true", help="also write time tags as CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="correlation statistics from time-tag files")
    p.add_argument("streams", nargs="+", help="merged binary/CSV file, or one file per channel")
    p.add_argument("--bin-ns", type=int, default=1)
    p.add_argument("--range-ns", type=int, nargs=2, default=[-100, 500], metavar=("LO", "HI"))
    p.add_argument("--window-ns", type=int, nargs="+", default=[0, 300], help="W (meaning 0..W) or LO HI")
    p.add_argument("--auto-window-ns", type=int, default=20)
    p.add_argument("--auto-method", choices=("direct", "hbt"), default="direct")
    p.add_argument("--duration-ns", type=int, default=None, help="acquisition length (default: summary.json or last tag)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tomo", help="16-setting tomography from a scenario, a counts CSV, or the fixtures")
    p.add_argument("config", nargs="?", default=None)
    p.add_argument("--counts", default=None, help="counts CSV to reconstruct")
    p.add_argument("--fixture", nargs="?", const="all", default=None, help="report on published matrices")
    p.add_argument("--bootstrap", type=int, default=None)
    p.add_argument("--roundtrip", type=int, default=None, help="random-state round-trip count")
    p.add_argument("--target", choices=[k.value for k in BellKind], default=None,
                   help="Bell state for fidelity (default: the config source state)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("lock", help="phase-lock simulation and setpoint calibration")
    common(p)
    p.add_argument("--unlocked", action="store_true", help="run with the servo off")
    p.set_defaults(func=cmd_lock)

    p = sub.add_parser("report", help="comparison tables from an artifact directory")
    p.add_argument("artifact_dir")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except cf.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
