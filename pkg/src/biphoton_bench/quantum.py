"""Two-qubit polarization algebra.

States are plain numpy arrays: a pure two-photon state is a length-4 complex
vector and a density matrix is a 4x4 complex array, both in the basis order
``BASIS_ORDER`` = (HH, HV, VH, VV). The first letter is the Stokes photon,
the second the anti-Stokes photon.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

BASIS_ORDER = ("HH", "HV", "VH", "VV")

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9


class UnphysicalStateError(ValueError):
    """Raised when a matrix fails the Hermiticity, trace or positivity checks."""


class BellKind(enum.Enum):
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"

    @classmethod
    def parse(cls, value: "BellKind | str") -> "BellKind":
        if isinstance(value, cls):
            return value
        for kind in cls:
            if value in (kind.value, kind.name):
                return kind
        raise ValueError(f"unknown Bell state {value!r}; expected one of {[k.value for k in cls]}")


def polarization(h: complex, v: complex) -> np.ndarray:
    """Normalized Jones vector with amplitudes ``(h, v)``."""
    vec = np.array([h, v], dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValueError("zero polarization vector")
    return vec / norm


def linear_polarization(theta: float) -> np.ndarray:
    """Linear polarization at angle ``theta`` (radians) from H."""
    return np.array([np.cos(theta), np.sin(theta)], dtype=complex)


def bloch_vector(a: np.ndarray) -> np.ndarray:
    """Bloch vector (<X>, <Y>, <Z>) of a single-photon Jones vector."""
    a = np.asarray(a, dtype=complex)
    return np.array([np.vdot(a, p @ a).real for p in PAULI[1:]])


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi / np.linalg.norm(psi)


def bell_state(kind: BellKind | str) -> np.ndarray:
    """Bell state in the linear basis.

    The circular-to-linear conversion follows the tomography setup:
    s+a- -> HH, s-a+ -> VV, s+a+ -> HV, s-a- -> VH. Hence
    Psi(+/-) = (HH +/- VV)/sqrt(2) and Phi(+/-) = (HV +/- VH)/sqrt(2).
    """
    kind = BellKind.parse(kind)
    r = 1 / np.sqrt(2)
    table = {
        BellKind.PSI_PLUS: (r, 0, 0, r),
        BellKind.PSI_MINUS: (r, 0, 0, -r),
        BellKind.PHI_PLUS: (0, r, r, 0),
        BellKind.PHI_MINUS: (0, r, -r, 0),
    }
    return np.array(table[kind], dtype=complex)


def density(state: np.ndarray) -> np.ndarray:
    """Return a density matrix; kets are turned into projectors, matrices are copied."""
    state = np.asarray(state, dtype=complex)
    if state.shape == (4,):
        return np.outer(state, state.conj())
    if state.shape == (4, 4):
        return state.copy()
    raise ValueError(f"expected a 4-vector or 4x4 matrix, got shape {state.shape}")


@dataclass(frozen=True)
class DensityDiagnostics:
    hermiticity_residual: float
    trace_residual: float
    min_eigenvalue: float
    purity: float

    @property
    def is_hermitian(self) -> bool:
        return self.hermiticity_residual <= HERMITIAN_TOL

    @property
    def has_unit_trace(self) -> bool:
        return self.trace_residual <= TRACE_TOL

    @property
    def is_physical(self) -> bool:
        return self.is_hermitian and self.has_unit_trace and self.min_eigenvalue >= -PSD_TOL

    def describe(self) -> str:
        return (
            f"hermiticity residual {self.hermiticity_residual:.3g}, "
            f"trace residual {self.trace_residual:.3g}, "
            f"min eigenvalue {self.min_eigenvalue:.3g}, purity {self.purity:.4f}"
        )


def validate_density(rho: np.ndarray) -> DensityDiagnostics:
    """Physicality diagnostics for any 4x4 matrix. The input is never modified."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = np.trace(rho)
    hpart = (rho + rho.conj().T) / 2
    return DensityDiagnostics(
        hermiticity_residual=herm,
        trace_residual=float(abs(tr - 1)),
        min_eigenvalue=float(np.linalg.eigvalsh(hpart).min()),
        purity=float(np.trace(rho @ rho).real),
    )


def check_density(rho: np.ndarray, *, require_psd: bool = True) -> DensityDiagnostics:
    diag = validate_density(rho)
    if not diag.is_hermitian:
        raise UnphysicalStateError(f"matrix is not Hermitian ({diag.describe()})")
    if not diag.has_unit_trace:
        raise UnphysicalStateError(f"matrix trace is not 1 ({diag.describe()})")
    if require_psd and diag.min_eigenvalue < -PSD_TOL:
        raise UnphysicalStateError(f"matrix has a negative eigenvalue ({diag.describe()})")
    return diag


def nearest_physical(rho: np.ndarray) -> np.ndarray:
    """Closest density matrix in Frobenius norm to the Hermitian part of ``rho``.

    Eigenvalues are projected onto the probability simplex (Smolin, Gambetta
    and Smith, PRL 108, 070502).
    """
    rho = np.asarray(rho, dtype=complex)
    h = (rho + rho.conj().T) / 2
    h = h / np.trace(h).real
    w, vecs = np.linalg.eigh(h)
    order = np.argsort(w)[::-1]
    w, vecs = w[order], vecs[:, order]
    lam = w.copy()
    spill = 0.0
    i = len(lam) - 1
    while i >= 0 and lam[i] + spill / (i + 1) < 0:
        spill += lam[i]
        lam[i] = 0.0
        i -= 1
    lam[: i + 1] += spill / (i + 1)
    return (vecs * lam) @ vecs.conj().T


@dataclass(frozen=True)
class Fidelity:
    f_prob: float
    f_sqrt: float


def fidelity(rho: np.ndarray, target: np.ndarray, *, strict: bool = True) -> Fidelity:
    """Overlap of ``rho`` with the pure ``target``.

    ``f_prob`` is <psi|rho|psi>, ``f_sqrt`` its square root; both are reported
    since either convention is in common use. With ``strict=False`` the trace
    check is skipped (for rounded, ingested matrices) and the quadratic form is
    evaluated on the matrix as given; Hermiticity is still required.
    """
    rho = np.asarray(rho, dtype=complex)
    if strict:
        check_density(rho, require_psd=False)
    elif not validate_density(rho).hermiticity_residual <= 1e-2:
        raise UnphysicalStateError("matrix is far from Hermitian")
    psi = normalize(target)
    f = float(np.vdot(psi, rho @ psi).real)
    return Fidelity(f_prob=f, f_sqrt=float(np.sqrt(max(f, 0.0))))


def _sqrtm_psd(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 between two density matrices."""
    # nuclear norm of sqrt(rho) sqrt(sigma); clamped, since rank-deficient inputs round above 1
    nuc = np.linalg.svd(_sqrtm_psd(density(rho)) @ _sqrtm_psd(density(sigma)), compute_uv=False).sum()
    return float(min(max(nuc**2, 0.0), 1.0))


def projection_probability(state: np.ndarray, analyzer_s: np.ndarray, analyzer_as: np.ndarray) -> float:
    """Joint detection probability behind two analyzers accepting ``analyzer_s`` and ``analyzer_as``."""
    a = np.kron(normalize(analyzer_s), normalize(analyzer_as))
    rho = density(state)
    p = float(np.vdot(a, rho @ a).real)
    return min(max(p, 0.0), 1.0)


def correlation_tensor(rho: np.ndarray) -> np.ndarray:
    """T_ij = Tr(rho sigma_i x sigma_j) for i, j in (X, Y, Z)."""
    rho = density(rho)
    return np.array(
        [[np.trace(rho @ np.kron(PAULI[i], PAULI[j])).real for j in (1, 2, 3)] for i in (1, 2, 3)]
    )


def correlation(rho: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """E(a, b) = <(a.sigma) x (b.sigma)> for Bloch directions ``a`` and ``b``."""
    op_a = sum(x * p for x, p in zip(a, PAULI[1:]))
    op_b = sum(x * p for x, p in zip(b, PAULI[1:]))
    return float(np.trace(density(rho) @ np.kron(op_a, op_b)).real)


def chsh_value(rho: np.ndarray, a, a2, b, b2) -> float:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b') evaluated directly."""
    return (
        correlation(rho, a, b)
        + correlation(rho, a, b2)
        + correlation(rho, a2, b)
        - correlation(rho, a2, b2)
    )


@dataclass(frozen=True)
class ChshResult:
    s: float
    a: np.ndarray
    a2: np.ndarray
    b: np.ndarray
    b2: np.ndarray

    @property
    def settings(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.a, self.a2, self.b, self.b2


def _unit_orthogonal(v: np.ndarray) -> np.ndarray:
    trial = np.eye(3)[np.argmin(np.abs(v))]
    w = np.cross(v, trial)
    return w / np.linalg.norm(w)


def chsh_max(rho: np.ndarray) -> ChshResult:
    """Maximal CHSH value via the Horodecki criterion, with settings that attain it.

    The analyzer settings are Bloch unit vectors. Bob's pair is built from the
    two leading eigenvectors c1, c2 of T^T T; Alice's from T c1 and T c2.
    """
    rho = density(rho)
    check_density(rho)
    t = correlation_tensor(rho)
    m, vecs = np.linalg.eigh(t.T @ t)
    order = np.argsort(m)[::-1]
    m = np.clip(m[order], 0, None)
    c1, c2 = vecs[:, order[0]], vecs[:, order[1]]
    s = 2 * np.sqrt(m[0] + m[1])
    theta = np.arctan2(np.sqrt(m[1]), np.sqrt(m[0]))
    b = np.cos(theta) * c1 + np.sin(theta) * c2
    b2 = np.cos(theta) * c1 - np.sin(theta) * c2
    ta, ta2 = t @ c1, t @ c2
    a = ta / np.linalg.norm(ta) if np.linalg.norm(ta) > 1e-14 else c1
    a2 = ta2 / np.linalg.norm(ta2) if np.linalg.norm(ta2) > 1e-14 else _unit_orthogonal(a)
    return ChshResult(s=float(s), a=a, a2=a2, b=b, b2=b2)


def linear_bloch(theta: float) -> np.ndarray:
    """Bloch direction of a linear polarizer at ``theta`` radians."""
    return np.array([np.sin(2 * theta), 0.0, np.cos(2 * theta)])


CANONICAL_CHSH_ANGLES = (0.0, np.pi / 4, np.pi / 8, -np.pi / 8)


def chsh_linear(rho: np.ndarray, angles=CANONICAL_CHSH_ANGLES) -> float:
    """CHSH value with linear polarizers at (a, a', b, b') radians."""
    a, a2, b, b2 = (linear_bloch(x) for x in angles)
    return chsh_value(rho, a, a2, b, b2)


def chsh_canonical(rho: np.ndarray) -> float:
    """|S| at the textbook 0/45/22.5/-22.5 degree settings, best of the two mirror images.

    The mirror (b -> -b) covers the Phi states, whose correlations are
    anti-symmetric in the analyzer angles.
    """
    a, a2, b, b2 = CANONICAL_CHSH_ANGLES
    return max(abs(chsh_linear(rho, (a, a2, b, b2))), abs(chsh_linear(rho, (a, a2, -b, -b2))))


# -- density-matrix JSON -----------------------------------------------------

def density_to_dict(rho: np.ndarray, basis_order=BASIS_ORDER) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {
        "basis_order": list(basis_order),
        "re": rho.real.tolist(),
        "im": rho.imag.tolist(),
    }


def density_from_dict(doc: dict) -> np.ndarray:
    """Parse a density-matrix document and reorder it to ``BASIS_ORDER``."""
    try:
        order = [str(x) for x in doc["basis_order"]]
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed density-matrix document: {exc}") from exc
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise ValueError(f"density matrix must be 4x4, got {re.shape} / {im.shape}")
    if sorted(order) != sorted(BASIS_ORDER):
        raise ValueError(f"basis_order must be a permutation of {BASIS_ORDER}, got {order}")
    perm = [order.index(label) for label in BASIS_ORDER]
    rho = re + 1j * im
    return rho[np.ix_(perm, perm)]


def save_density_json(path: str | Path, rho: np.ndarray) -> None:
    Path(path).write_text(json.dumps(density_to_dict(rho), indent=2) + "\n")


def load_density_json(path: str | Path) -> np.ndarray:
    return density_from_dict(json.loads(Path(path).read_text()))
