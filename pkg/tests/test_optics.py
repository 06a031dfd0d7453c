import warnings

import numpy as np
import pytest

from biphoton_bench import optics as op
from biphoton_bench.quantum import BellKind, bell_state, density


def same_up_to_phase(a, b, tol=1e-12):
    a, b = np.asarray(a), np.asarray(b)
    return abs(abs(np.vdot(a, b)) - np.linalg.norm(a) * np.linalg.norm(b)) < tol


def rot(t):
    return np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]])


def test_hwp_at_zero():
    j = op.retarder(0.0, np.pi)
    assert same_up_to_phase(j.ravel(), np.diag([1, -1]).ravel())


def test_hwp_rotates_h_to_diagonal():
    out = op.retarder(np.pi / 8, np.pi) @ np.array([1, 0])
    # rotation-formula oracle: HWP at t reflects about the fast axis, H -> angle 2t
    expect = rot(-np.pi / 8) @ np.diag([1, -1]) @ rot(np.pi / 8) @ np.array([1, 0])
    assert same_up_to_phase(out, expect)
    assert same_up_to_phase(out, np.array([1, 1]) / np.sqrt(2))


def test_qwp_makes_circular():
    out = op.retarder(np.pi / 4, np.pi / 2) @ np.array([1, 0])
    assert same_up_to_phase(out, np.array([1, 1j]) / np.sqrt(2))


def test_waveplates_are_unitary():
    for t in np.linspace(0, np.pi, 7):
        for d in (np.pi, np.pi / 2, 0.3):
            j = op.retarder(t, d)
            assert np.allclose(j.conj().T @ j, np.eye(2))


def test_analyzer_acceptance():
    assert same_up_to_phase(op.analyzer_projector(op.AnalyzerChain()), [1, 0])
    assert same_up_to_phase(op.analyzer_projector(op.AnalyzerChain(port="V")), [0, 1])
    hwp = op.AnalyzerChain.from_angles(hwp_deg=22.5)
    j = op.retarder(np.pi / 8, np.pi)
    assert same_up_to_phase(op.analyzer_projector(hwp), j.conj().T @ [1, 0])
    assert same_up_to_phase(op.analyzer_projector(hwp), np.array([1, 1]) / np.sqrt(2))
    qwp = op.AnalyzerChain.from_angles(qwp_deg=45)
    acc = op.analyzer_projector(qwp)
    assert same_up_to_phase(acc, op.retarder(np.pi / 4, np.pi / 2).conj().T @ [1, 0])
    circ = max(abs(np.vdot(acc, [1, 1j])), abs(np.vdot(acc, [1, -1j]))) / np.sqrt(2)
    assert np.isclose(circ, 1)


def test_analyzer_order_enforced():
    with pytest.raises(ValueError):
        op.AnalyzerChain((op.Waveplate(op.HWP, 0), op.Waveplate(op.QWP, 0)))
    with pytest.raises(ValueError):
        op.AnalyzerChain(port="D")


def test_linear_analyzer_accepts_theta():
    for theta in (0.0, 0.4, np.pi / 4, 1.2):
        assert same_up_to_phase(op.analyzer_projector(op.linear_analyzer(theta)),
                                [np.cos(theta), np.sin(theta)])


def test_analyzer_json_roundtrip(tmp_path):
    s, a = op.AnalyzerChain.from_angles(45, 22.5), op.AnalyzerChain.from_angles(None, 67.5, "V")
    op.save_analyzers_json(tmp_path / "a.json", s, a)
    s2, a2 = op.load_analyzers_json(tmp_path / "a.json")
    assert s2 == s and a2 == a


def test_circular_to_linear_map():
    assert np.argmax(op.pair_ket("+", "-")) == 0  # s+ a- -> HH
    assert np.argmax(op.pair_ket("-", "+")) == 3  # s- a+ -> VV


def test_bell_table_psi():
    cfg = op.SfwmPathConfig("+", "-", "-", "+", phase=0.0)
    assert same_up_to_phase(op.two_path_state(cfg), bell_state("PsiPlus"))
    cfg = op.SfwmPathConfig("+", "-", "-", "+", phase=np.pi)
    assert same_up_to_phase(op.two_path_state(cfg), bell_state("PsiMinus"))


def test_bell_table_all():
    for kind in BellKind:
        assert same_up_to_phase(op.two_path_state(op.bell_config(kind)), bell_state(kind))


def test_blocked_path_is_product():
    cfg = op.SfwmPathConfig("+", "-", "-", "+", weights=(1.0, 0.0))
    psi = op.two_path_state(cfg)
    assert same_up_to_phase(psi, op.pair_ket("+", "-"))
    m = psi.reshape(2, 2)
    tangle = 4 * abs(np.linalg.det(m)) ** 2
    assert tangle < 1e-24


def test_degenerate_paths_warn():
    with pytest.warns(UserWarning):
        op.two_path_state(op.SfwmPathConfig("+", "-", "+", "-"))


def test_coherence_interpolates():
    cfg = op.bell_config("PsiPlus")
    pure = op.two_path_density(cfg, 1.0)
    mixed = op.two_path_density(cfg, 0.0)
    assert np.allclose(pure, density(bell_state("PsiPlus")))
    assert np.allclose(mixed, np.diag([0.5, 0, 0, 0.5]))
    half = op.two_path_density(cfg, 0.5)
    assert np.isclose(half[0, 3].real, 0.25)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        op.two_path_density(cfg, 0.3)
