"""Two-qubit polarization tomography from 16 product projections.

Forward model, linear inversion and a maximum-likelihood fit over
rho = T^dagger T / Tr(T^dagger T) with T lower triangular (16 real numbers),
plus the published Bell-state matrices as regression fixtures.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .coincidence import DEFAULT_WINDOW_NS, ExperimentScenario, expected_window_rate
from .optics import AnalyzerChain, analyzer_projector
from .quantum import (
    PAULI, BellKind, DensityDiagnostics, bell_state, check_density, chsh_canonical, chsh_max,
    density, density_from_dict, fidelity, nearest_physical, state_fidelity, validate_density,
)

# (qwp_deg, hwp_deg) in front of a transmitting PBS port
ANALYZER_ANGLES = {
    "H": (0.0, 0.0),
    "V": (0.0, 45.0),
    "D": (45.0, 22.5),
    "R": (0.0, 22.5),
    "L": (0.0, 67.5),
}
STANDARD_LABELS = ("HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                   "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL")


class RankDeficientError(ValueError):
    """Projection set does not span the two-qubit operator space."""


@dataclass(frozen=True)
class ProjectionSet:
    settings: tuple[tuple[AnalyzerChain, AnalyzerChain], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(self.settings))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"P{i}" for i in range(len(self.settings))))
        if len(self.labels) != len(self.settings):
            raise ValueError("one label per setting required")

    def __len__(self) -> int:
        return len(self.settings)

    @property
    def projectors(self) -> np.ndarray:
        out = []
        for s, a in self.settings:
            v = np.kron(analyzer_projector(s), analyzer_projector(a))
            out.append(np.outer(v, v.conj()))
        return np.array(out)

    def gram(self) -> np.ndarray:
        p = self.projectors
        return np.einsum("iab,jba->ij", p, p).real

    def design(self) -> np.ndarray:
        """A[i, k] = Tr(P_i G_k) / 4 with G_k the 16 Pauli products."""
        p = self.projectors
        paulis = np.array([np.kron(a, b) for a in PAULI for b in PAULI])
        return np.einsum("iab,kba->ik", p, paulis).real / 4

    def check_complete(self) -> None:
        a = self.design()
        if len(self) < 16 or np.linalg.matrix_rank(a, tol=1e-9) < 16:
            raise RankDeficientError(
                f"{len(self)} projections span rank {np.linalg.matrix_rank(a, tol=1e-9)} < 16 of the operator space"
            )


def standard_projection_set() -> ProjectionSet:
    settings = []
    for label in STANDARD_LABELS:
        s, a = (AnalyzerChain.from_angles(*ANALYZER_ANGLES[c]) for c in label)
        settings.append((s, a))
    return ProjectionSet(tuple(settings), STANDARD_LABELS)


def expected_counts(rho: np.ndarray, pset: ProjectionSet, intensity: float, background=0.0) -> np.ndarray:
    """n_i = intensity * Tr(rho P_i) + background_i."""
    rho = density(rho)
    probs = np.einsum("iab,ba->i", pset.projectors, rho).real
    return intensity * probs + np.broadcast_to(np.asarray(background, dtype=float), probs.shape)


def linear_inversion(counts, pset: ProjectionSet, background=0.0) -> np.ndarray:
    """Hermitian, unit-trace solution of the linear count equations (may be non-PSD)."""
    pset.check_complete()
    y = np.asarray(counts, dtype=float) - np.broadcast_to(np.asarray(background, dtype=float), (len(pset),))
    coeffs, *_ = np.linalg.lstsq(pset.design(), y, rcond=None)
    if not abs(coeffs[0]) > 0:
        raise ValueError("counts carry no intensity")
    paulis = [np.kron(a, b) for a in PAULI for b in PAULI]
    rho = sum(c * g for c, g in zip(coeffs / coeffs[0], paulis)) / 4
    return (rho + rho.conj().T) / 2


# -- maximum likelihood ------------------------------------------------------

_LOWER = [(i, j) for i in range(4) for j in range(i)]


def params_to_t(x: np.ndarray) -> np.ndarray:
    t = np.diag(x[:4]).astype(complex)
    for k, (i, j) in enumerate(_LOWER):
        t[i, j] = x[4 + 2 * k] + 1j * x[5 + 2 * k]
    return t


def t_to_params(t: np.ndarray) -> np.ndarray:
    x = np.empty(16)
    x[:4] = np.diag(t).real
    for k, (i, j) in enumerate(_LOWER):
        x[4 + 2 * k] = t[i, j].real
        x[5 + 2 * k] = t[i, j].imag
    return x


def _grad_params(g: np.ndarray) -> np.ndarray:
    x = np.empty(16)
    x[:4] = np.diag(g).real
    for k, (i, j) in enumerate(_LOWER):
        x[4 + 2 * k] = g[i, j].real
        x[5 + 2 * k] = g[i, j].imag
    return x


def cholesky_factor(rho_scaled: np.ndarray) -> np.ndarray:
    """Lower-triangular T with T^dagger T = rho_scaled (regularized to full rank)."""
    m = np.asarray(rho_scaled, dtype=complex)
    m = (m + m.conj().T) / 2 + 1e-10 * np.trace(m).real * np.eye(4)
    rev = np.eye(4)[::-1]
    low = np.linalg.cholesky(rev @ m @ rev)
    return rev @ low.conj().T @ rev


@dataclass(frozen=True)
class MleConfig:
    likelihood: str = "poisson"
    gtol: float = 1e-8
    xtol: float = 1e-10
    max_iter: int = 5000
    restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.likelihood not in ("poisson", "gaussian"):
            raise ValueError(f"likelihood must be 'poisson' or 'gaussian', got {self.likelihood!r}")
        if self.gtol <= 0 or self.xtol <= 0 or self.max_iter <= 0 or self.restarts < 0:
            raise ValueError("tolerances and iteration limits must be positive")


@dataclass(frozen=True)
class ReconstructionResult:
    rho: np.ndarray
    nll: float
    iterations: int
    converged: bool
    intensity: float
    seed_nll: float
    model_counts: np.ndarray


def negative_log_likelihood(x: np.ndarray, counts: np.ndarray, projectors: np.ndarray,
                            background: np.ndarray, likelihood: str = "poisson") -> tuple[float, np.ndarray]:
    """Normalized negative log-likelihood and its gradient in the 16 parameters."""
    t = params_to_t(x)
    m = t.conj().T @ t
    lam = np.einsum("iab,ba->i", projectors, m).real + background
    total = max(counts.sum(), 1.0)
    if likelihood == "poisson":
        lam = np.maximum(lam, 1e-12)
        value = float(np.sum(lam - counts * np.log(lam))) / total
        w = (1 - counts / lam) / total
    else:
        sigma2 = np.maximum(counts, 1.0)
        value = float(np.sum((lam - counts) ** 2 / (2 * sigma2))) / total
        w = (lam - counts) / sigma2 / total
    g = 2 * t @ np.einsum("i,iab->ab", w, projectors)
    return value, _grad_params(g)


def mle_reconstruct(counts, pset: ProjectionSet, config: MleConfig = MleConfig(),
                    background=0.0) -> ReconstructionResult:
    """Maximum-likelihood density matrix; multi-start from the projected linear inversion."""
    pset.check_complete()
    n = np.asarray(counts, dtype=float)
    if n.shape != (len(pset),) or np.any(n < 0) or not np.all(np.isfinite(n)):
        raise ValueError(f"need {len(pset)} non-negative counts")
    bg = np.broadcast_to(np.asarray(background, dtype=float), n.shape).copy()
    proj = pset.projectors
    try:
        seed_rho = nearest_physical(linear_inversion(n, pset, bg))
    except ValueError:
        seed_rho = np.eye(4) / 4
    seed_probs = np.einsum("iab,ba->i", proj, seed_rho).real
    scale = max(float(np.sum(np.clip(n - bg, 0, None))) / max(seed_probs.sum(), 1e-12), 1e-9)
    # optimize in units of sqrt(scale) so parameters and gradients are O(1)
    root = np.sqrt(scale)
    starts = [t_to_params(cholesky_factor(seed_rho))]
    rng = np.random.default_rng(config.seed)
    for _ in range(config.restarts):
        starts.append(rng.normal(0.0, 0.5, 16))

    def objective(y):
        value, grad = negative_log_likelihood(root * y, n, proj, bg, config.likelihood)
        return value, root * grad

    seed_nll, _ = objective(starts[0])
    best = None
    for y0 in starts:
        res = minimize(objective, y0, jac=True, method="L-BFGS-B",
                       options={"gtol": config.gtol, "ftol": config.xtol, "maxiter": config.max_iter})
        if best is None or res.fun < best.fun:
            best = res
    if best.fun > seed_nll:
        y, value, iters, ok = starts[0], seed_nll, 0, False
    else:
        y, value, iters, ok = best.x, float(best.fun), int(best.nit), bool(best.success)
    t = params_to_t(root * y)
    m = t.conj().T @ t
    intensity = float(np.trace(m).real)
    rho = m / intensity
    check_density(rho)
    model = np.einsum("iab,ba->i", proj, m).real + bg
    return ReconstructionResult(rho, value, iters, ok, intensity, seed_nll, model)


# -- error bars and reports ----------------------------------------------------

@dataclass(frozen=True)
class BootstrapSummary:
    samples: dict[str, np.ndarray]

    def interval(self, key: str, level: float = 0.95) -> tuple[float, float]:
        lo, hi = np.percentile(self.samples[key], [50 * (1 - level), 50 * (1 + level)])
        return float(lo), float(hi)

    def std(self, key: str) -> float:
        return float(np.std(self.samples[key], ddof=1))


def state_metrics(rho: np.ndarray, target: np.ndarray | None) -> dict[str, float]:
    out = {
        "purity": float(np.trace(rho @ rho).real),
        "chsh_horodecki": chsh_max(rho).s,
        "chsh_canonical": chsh_canonical(rho),
    }
    if target is not None:
        f = fidelity(rho, target)
        out.update(fidelity_prob=f.f_prob, fidelity_sqrt=f.f_sqrt)
    return out


def bootstrap(result: ReconstructionResult, pset: ProjectionSet, target: np.ndarray | None = None,
              resamples: int = 250, seed: int = 0, background=0.0,
              config: MleConfig = MleConfig(restarts=0)) -> BootstrapSummary:
    """Parametric bootstrap: Poisson resamples of the fitted model counts, refit each."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(resamples):
        fake = rng.poisson(result.model_counts)
        r = mle_reconstruct(fake, pset, config, background)
        rows.append(state_metrics(r.rho, target))
    keys = rows[0].keys() if rows else []
    return BootstrapSummary({k: np.array([row[k] for row in rows]) for k in keys})


def report(result: ReconstructionResult, target: np.ndarray | None = None,
           boot: BootstrapSummary | None = None) -> dict:
    out = state_metrics(result.rho, target)
    out.update(converged=result.converged, iterations=result.iterations, nll=result.nll,
               intensity=result.intensity)
    if boot is not None:
        out["bootstrap"] = {
            k: {"std": boot.std(k), "ci95": list(boot.interval(k))} for k in boot.samples
        }
    return out


# -- counts from a simulated acquisition -------------------------------------

def scenario_counts(scenario: ExperimentScenario, pset: ProjectionSet, time_per_setting_s: float,
                    seed: int = 0, window_ns=DEFAULT_WINDOW_NS, noiseless: bool = False) -> np.ndarray:
    """Windowed coincidences per setting: expected pair + accidental rate, Poisson sampled."""
    rates = np.array([expected_window_rate(scenario.with_analyzers(s, a), window_ns) for s, a in pset.settings])
    mean = rates * time_per_setting_s
    if noiseless:
        return mean
    return np.random.default_rng(seed).poisson(mean)


# -- counts CSV --------------------------------------------------------------

def _angles(chain: AnalyzerChain) -> tuple[float, float]:
    d = chain.to_dict()
    return (d["qwp_deg"] or 0.0, d["hwp_deg"] or 0.0)


def save_counts_csv(path: str | Path, counts, pset: ProjectionSet) -> None:
    with open(path, "w") as fh:
        fh.write("setting_id,qwp_s,hwp_s,qwp_as,hwp_as,counts\n")
        for i, ((s, a), c) in enumerate(zip(pset.settings, counts)):
            qs, hs = _angles(s)
            qa, ha = _angles(a)
            fh.write(f"{i},{qs:.10g},{hs:.10g},{qa:.10g},{ha:.10g},{float(c):.10g}\n")


def load_counts_csv(path: str | Path) -> tuple[np.ndarray, ProjectionSet]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 6:
        raise ValueError(f"{path}: expected 6 columns, got {data.shape[1]}")
    order = np.argsort(data[:, 0], kind="stable")
    data = data[order]
    settings = tuple(
        (AnalyzerChain.from_angles(qs, hs), AnalyzerChain.from_angles(qa, ha))
        for _, qs, hs, qa, ha, _ in data
    )
    counts = data[:, 5]
    if np.any(counts < 0):
        raise ValueError("counts must be non-negative")
    labels = STANDARD_LABELS if len(settings) == 16 and _matches_standard(settings) else ()
    return counts, ProjectionSet(settings, labels)


def _matches_standard(settings) -> bool:
    ref = standard_projection_set().projectors
    got = ProjectionSet(settings).projectors
    return bool(np.allclose(ref, got, atol=1e-9))


# -- published Bell-state matrices ----------------------------------------------

FIXTURE_NAMES = ("PsiPlus", "PsiMinus", "PhiPlus", "PhiMinus")
PUBLISHED_CHSH = {"PsiPlus": 2.23, "PsiMinus": 2.19, "PhiPlus": 2.3, "PhiMinus": 2.39}
PUBLISHED_CHSH_ERR = {"PsiPlus": 0.025, "PsiMinus": 0.026, "PhiPlus": 0.02, "PhiMinus": 0.026}
PUBLISHED_FIDELITY = 0.936


@dataclass(frozen=True)
class PaperFixture:
    """A printed density matrix in canonical order, with physicality flags (not repaired)."""

    name: str
    printed: np.ndarray
    diagnostics: DensityDiagnostics
    flags: tuple[str, ...] = field(default=())

    @property
    def kind(self) -> BellKind:
        return BellKind.parse(self.name)

    @property
    def hermitian(self) -> np.ndarray:
        return (self.printed + self.printed.conj().T) / 2

    @property
    def physical(self) -> np.ndarray:
        """Nearest density matrix to the Hermitian part."""
        return nearest_physical(self.hermitian)

    @property
    def target(self) -> np.ndarray:
        return bell_state(self.kind)

    def fidelity_prob(self) -> float:
        """<psi|rho|psi> on the Hermitian part of the printed matrix."""
        return fidelity(self.hermitian, self.target, strict=False).f_prob

    def chsh(self) -> float:
        return chsh_max(self.physical).s

    def uhlmann_fidelity(self) -> float:
        return state_fidelity(self.physical, density(self.target))


def _fixture_document(path: str | Path | None) -> dict:
    if path is None:
        text = resources.files("biphoton_bench").joinpath("data/published_density_matrices.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def load_paper_fixture(name: str, path: str | Path | None = None) -> PaperFixture:
    kind = BellKind.parse(name)
    doc = _fixture_document(path)
    try:
        entry = doc["states"][kind.value]
    except KeyError:
        raise ValueError(f"fixture {kind.value} missing from document") from None
    rho = density_from_dict({"basis_order": doc["basis_order"], **entry})
    diag = validate_density(rho)
    flags = []
    if not diag.is_hermitian:
        flags.append(f"non-Hermitian (residual {diag.hermiticity_residual:.3g})")
    if not diag.has_unit_trace:
        flags.append(f"trace {np.trace(rho).real:.3f}")
    if diag.min_eigenvalue < 0:
        flags.append(f"negative eigenvalue {diag.min_eigenvalue:.3g}")
    if np.any(np.diag(rho).real < 0):
        flags.append("negative population on the diagonal")
    return PaperFixture(kind.value, rho, diag, tuple(flags))


def load_paper_fixtures(path: str | Path | None = None) -> dict[str, PaperFixture]:
    return {name: load_paper_fixture(name, path) for name in FIXTURE_NAMES}
