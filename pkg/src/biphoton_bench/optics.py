"""Jones calculus for the analyzer arms and the two-path SFWM polarization state."""
from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .quantum import H, V, BellKind, normalize

HWP = "HWP"
QWP = "QWP"
RETARDANCE = {HWP: np.pi, QWP: np.pi / 2}


class Circular(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @classmethod
    def parse(cls, value: "Circular | str") -> "Circular":
        if isinstance(value, cls):
            return value
        aliases = {"+": cls.PLUS, "sigma+": cls.PLUS, "plus": cls.PLUS,
                   "-": cls.MINUS, "sigma-": cls.MINUS, "minus": cls.MINUS}
        try:
            return aliases[str(value).strip().lower()]
        except KeyError:
            raise ValueError(f"unknown circular polarization {value!r}") from None


def circular_jones(sigma: Circular | str) -> np.ndarray:
    """Jones vector of sigma+/-; convention sigma+ = (H + iV)/sqrt(2)."""
    sign = 1 if Circular.parse(sigma) is Circular.PLUS else -1
    return (H + 1j * sign * V) / np.sqrt(2)


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def retarder(theta: float, retardance: float) -> np.ndarray:
    """Linear retarder with fast axis at ``theta``; slow axis picks up exp(-i*retardance)."""
    core = np.diag([1.0, np.exp(-1j * retardance)])
    return _rotation(-theta) @ core @ _rotation(theta)


@dataclass(frozen=True)
class Waveplate:
    kind: str
    angle: float  # fast axis, radians

    def __post_init__(self):
        if self.kind not in RETARDANCE:
            raise ValueError(f"waveplate kind must be HWP or QWP, got {self.kind!r}")
        object.__setattr__(self, "angle", float(np.mod(self.angle, np.pi)))


def jones_matrix(elem: Waveplate) -> np.ndarray:
    return retarder(elem.angle, RETARDANCE[elem.kind])


@dataclass(frozen=True)
class AnalyzerChain:
    """Waveplates in propagation order followed by one PBS output port.

    At most a QWP then a HWP, as in each detection arm of the setup.
    """

    elements: tuple[Waveplate, ...] = ()
    port: str = "H"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.port not in ("H", "V"):
            raise ValueError(f"PBS port must be 'H' (transmit) or 'V' (reflect), got {self.port!r}")
        kinds = [e.kind for e in self.elements]
        if len(kinds) > 2 or kinds not in ([], [QWP], [HWP], [QWP, HWP]):
            raise ValueError(f"analyzer arm must be [QWP][HWP] in that order, got {kinds}")

    @classmethod
    def from_angles(cls, qwp_deg: float | None = None, hwp_deg: float | None = None,
                    port: str = "H") -> "AnalyzerChain":
        elems = []
        if qwp_deg is not None:
            elems.append(Waveplate(QWP, np.deg2rad(qwp_deg)))
        if hwp_deg is not None:
            elems.append(Waveplate(HWP, np.deg2rad(hwp_deg)))
        return cls(tuple(elems), port)

    def to_dict(self) -> dict:
        out = {"qwp_deg": None, "hwp_deg": None, "port": self.port}
        for e in self.elements:
            out["qwp_deg" if e.kind == QWP else "hwp_deg"] = float(np.rad2deg(e.angle))
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "AnalyzerChain":
        unknown = set(doc) - {"qwp_deg", "hwp_deg", "port"}
        if unknown:
            raise ValueError(f"unknown analyzer keys: {sorted(unknown)}")
        return cls.from_angles(doc.get("qwp_deg"), doc.get("hwp_deg"), doc.get("port", "H"))


def linear_analyzer(theta: float) -> AnalyzerChain:
    """Analyzer accepting linear polarization at ``theta`` radians (HWP at theta/2, transmit)."""
    return AnalyzerChain((Waveplate(HWP, theta / 2),), "H")


def analyzer_projector(chain: AnalyzerChain) -> np.ndarray:
    """Polarization state accepted by the chain.

    The detection amplitude for an input |psi> is <port|J|psi>, so the accepted
    state is J^dagger |port>, with J the product of the waveplate matrices.
    """
    j = np.eye(2, dtype=complex)
    for elem in chain.elements:
        j = jones_matrix(elem) @ j
    port = H if chain.port == "H" else V
    return normalize(j.conj().T @ port)


def save_analyzers_json(path: str | Path, stokes: AnalyzerChain, anti_stokes: AnalyzerChain) -> None:
    doc = {"stokes": stokes.to_dict(), "anti_stokes": anti_stokes.to_dict()}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_analyzers_json(path: str | Path) -> tuple[AnalyzerChain, AnalyzerChain]:
    doc = json.loads(Path(path).read_text())
    return AnalyzerChain.from_dict(doc["stokes"]), AnalyzerChain.from_dict(doc["anti_stokes"])


# -- two-path source ---------------------------------------------------------

# Circular -> linear conversion performed by the extra QWPs before tomography.
_STOKES_TO_LINEAR = {Circular.PLUS: 0, Circular.MINUS: 1}      # s+ -> H, s- -> V
_ANTI_STOKES_TO_LINEAR = {Circular.MINUS: 0, Circular.PLUS: 1}  # a- -> H, a+ -> V


def pair_ket(stokes: Circular | str, anti_stokes: Circular | str) -> np.ndarray:
    """Linear-basis ket of |stokes>_s |anti_stokes>_as after circular-to-linear conversion."""
    i = _STOKES_TO_LINEAR[Circular.parse(stokes)]
    j = _ANTI_STOKES_TO_LINEAR[Circular.parse(anti_stokes)]
    ket = np.zeros(4, dtype=complex)
    ket[2 * i + j] = 1.0
    return ket


@dataclass(frozen=True)
class SfwmPathConfig:
    pump1: Circular = Circular.PLUS
    coupling1: Circular = Circular.MINUS
    pump2: Circular = Circular.MINUS
    coupling2: Circular = Circular.PLUS
    phase: float = 0.0
    weights: tuple[float, float] = field(default=(1 / np.sqrt(2), 1 / np.sqrt(2)))

    def __post_init__(self):
        for name in ("pump1", "coupling1", "pump2", "coupling2"):
            object.__setattr__(self, name, Circular.parse(getattr(self, name)))
        if not np.isfinite(self.phase):
            raise ValueError("relative phase must be finite")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (2,) or np.any(w < 0) or not np.any(w > 0):
            raise ValueError(f"path weights must be two non-negative numbers, got {self.weights}")
        w = w / np.linalg.norm(w)
        object.__setattr__(self, "weights", (float(w[0]), float(w[1])))

    @property
    def degenerate(self) -> bool:
        return (self.pump1, self.coupling1) == (self.pump2, self.coupling2)


def bell_config(kind: BellKind | str) -> SfwmPathConfig:
    """Pump/coupling assignments and lock phase producing each Bell state."""
    kind = BellKind.parse(kind)
    phase = 0.0 if kind in (BellKind.PSI_PLUS, BellKind.PHI_PLUS) else np.pi
    if kind in (BellKind.PSI_PLUS, BellKind.PSI_MINUS):
        return SfwmPathConfig(Circular.PLUS, Circular.MINUS, Circular.MINUS, Circular.PLUS, phase)
    return SfwmPathConfig(Circular.PLUS, Circular.PLUS, Circular.MINUS, Circular.MINUS, phase)


def two_path_state(cfg: SfwmPathConfig) -> np.ndarray:
    """w1|p1 c1> + w2 e^{i phase}|p2 c2>, in the linear basis, normalized."""
    if cfg.degenerate:
        warnings.warn("both SFWM paths emit the same polarization pair; no entanglement", stacklevel=2)
    w1, w2 = cfg.weights
    psi = w1 * pair_ket(cfg.pump1, cfg.coupling1) + w2 * np.exp(1j * cfg.phase) * pair_ket(cfg.pump2, cfg.coupling2)
    return normalize(psi)


def two_path_density(cfg: SfwmPathConfig, coherence: float = 1.0) -> np.ndarray:
    """Two-path state with the inter-path coherence scaled by ``coherence`` in [0, 1].

    ``coherence`` is the phase-noise penalty |<exp(i phi)>|; 0 gives the
    incoherent mixture seen without phase stabilization.
    """
    if not 0 <= coherence <= 1:
        raise ValueError(f"coherence must lie in [0, 1], got {coherence}")
    w1, w2 = cfg.weights
    k1 = pair_ket(cfg.pump1, cfg.coupling1)
    k2 = np.exp(1j * cfg.phase) * pair_ket(cfg.pump2, cfg.coupling2)
    if cfg.degenerate:
        return np.outer(k1, k1.conj())
    rho = w1**2 * np.outer(k1, k1.conj()) + w2**2 * np.outer(k2, k2.conj())
    cross = coherence * w1 * w2 * np.outer(k1, k2.conj())
    return rho + cross + cross.conj().T
