import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biphoton_bench import quantum as q
from conftest import random_density

SQ2 = np.sqrt(2)


def test_bell_vectors():
    assert np.allclose(q.bell_state("PsiPlus"), np.array([1, 0, 0, 1]) / SQ2)
    assert np.allclose(q.bell_state("PhiMinus"), np.array([0, 1, -1, 0]) / SQ2)
    for kind in q.BellKind:
        assert np.isclose(np.linalg.norm(q.bell_state(kind)), 1)


def test_bell_unknown_label():
    with pytest.raises(ValueError):
        q.bell_state("Psi0")


def test_fidelity_trivial_cases():
    psi = q.bell_state("PsiPlus")
    assert np.isclose(q.fidelity(q.density(psi), psi).f_prob, 1)
    for kind in q.BellKind:
        f = q.fidelity(np.eye(4) / 4, q.bell_state(kind))
        assert np.isclose(f.f_prob, 0.25)
        assert np.isclose(f.f_sqrt, 0.5)


def test_fidelity_strict_rejects_bad_trace():
    with pytest.raises(q.UnphysicalStateError):
        q.fidelity(np.eye(4) / 2, q.bell_state("PsiPlus"))


def test_printed_psi_plus_fidelity(printed_matrices):
    # hand evaluation on the raw printed entries: (HH,HH + VV,VV)/2 + Re(HH,VV)
    doc = printed_matrices["states"]["PsiPlus"]
    order = printed_matrices["basis_order"]
    hh, vv = order.index("HH"), order.index("VV")
    re = np.array(doc["re"])
    oracle = (re[hh, hh] + re[vv, vv]) / 2 + (re[hh, vv] + re[vv, hh]) / 2
    assert np.isclose(oracle, 0.811, atol=5e-4)
    rho = q.density_from_dict({"basis_order": order, "re": doc["re"], "im": doc["im"]})
    assert np.isclose(q.fidelity(rho, q.bell_state("PsiPlus"), strict=False).f_prob, oracle, atol=1e-12)


def test_chsh_limits():
    for kind in q.BellKind:
        assert np.isclose(q.chsh_max(q.density(q.bell_state(kind))).s, 2 * SQ2)
    assert np.isclose(q.chsh_max(np.eye(4) / 4).s, 0)


def test_chsh_settings_attain_maximum(rng):
    for _ in range(20):
        rho = random_density(rng, rank=2)
        res = q.chsh_max(rho)
        assert np.isclose(abs(q.chsh_value(rho, *res.settings)), res.s, atol=1e-9)


def test_chsh_eigen_oracle(rng):
    # independent oracle: brute-force Pauli traces, then singular values of T
    for _ in range(10):
        rho = random_density(rng)
        paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
        t = np.array([[np.trace(rho @ np.kron(a, b)).real for b in paulis] for a in paulis])
        sv = np.linalg.svd(t, compute_uv=False)
        assert np.isclose(q.chsh_max(rho).s, 2 * np.hypot(sv[0], sv[1]))


def test_canonical_never_exceeds_horodecki(rng):
    for kind in q.BellKind:
        assert np.isclose(q.chsh_canonical(q.density(q.bell_state(kind))), 2 * SQ2)
    for _ in range(20):
        rho = random_density(rng)
        assert q.chsh_canonical(rho) <= q.chsh_max(rho).s + 1e-12


def test_projection_probability_cos2():
    psi = q.bell_state("PsiPlus")
    for ts, ta in [(0.0, 0.0), (0.3, 1.1), (np.pi / 4, 0), (1.0, -0.4)]:
        a, b = q.linear_polarization(ts), q.linear_polarization(ta)
        brute = abs(sum(psi[2 * i + j] * a[i] * b[j] for i in range(2) for j in range(2))) ** 2
        p = q.projection_probability(psi, a, b)
        assert np.isclose(p, brute)
        assert np.isclose(p, np.cos(ts - ta) ** 2 / 2)
    assert np.isclose(q.projection_probability(psi, q.H, q.H), 0.5)
    assert np.isclose(q.projection_probability(np.eye(4) / 4, q.H, q.linear_polarization(0.7)), 0.25)


def test_diagnostics():
    d = q.validate_density(q.density(q.bell_state("PsiPlus")))
    assert d.hermiticity_residual == 0 and d.trace_residual < 1e-15
    assert abs(d.min_eigenvalue) < 1e-12 and np.isclose(d.purity, 1)
    assert np.isclose(q.validate_density(np.eye(4) / 4).purity, 0.25)


def test_printed_psi_minus_is_flagged(printed_matrices):
    doc = printed_matrices["states"]["PsiMinus"]
    rho = q.density_from_dict({"basis_order": printed_matrices["basis_order"], "re": doc["re"], "im": doc["im"]})
    assert np.min(np.diag(rho).real) == pytest.approx(-0.041)
    assert q.validate_density(rho).min_eigenvalue < 0
    with pytest.raises(q.UnphysicalStateError):
        q.check_density(rho)


def test_validate_does_not_mutate(rng):
    rho = random_density(rng)
    copy = rho.copy()
    q.validate_density(rho)
    q.nearest_physical(rho)
    assert np.array_equal(rho, copy)


def test_nearest_physical_fixes_negative_eigenvalue():
    rho = np.diag([0.6, 0.5, -0.1, 0.0]).astype(complex)
    fixed = q.nearest_physical(rho)
    assert q.validate_density(fixed).is_physical
    # simplex projection of (0.6, 0.5, -0.1, 0) is (0.55, 0.45, 0, 0)
    assert np.allclose(np.sort(np.diag(fixed).real)[::-1], [0.55, 0.45, 0, 0])


def test_density_json_roundtrip(tmp_path, rng):
    rho = random_density(rng)
    q.save_density_json(tmp_path / "rho.json", rho)
    assert np.allclose(q.load_density_json(tmp_path / "rho.json"), rho)


def test_density_permutation():
    rho = np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)  # HH, HV, VH, VV
    doc = q.density_to_dict(rho)
    perm = ["HV", "HH", "VV", "VH"]
    idx = [q.BASIS_ORDER.index(x) for x in perm]
    doc2 = {"basis_order": perm, "re": rho.real[np.ix_(idx, idx)].tolist(), "im": np.zeros((4, 4)).tolist()}
    assert np.allclose(q.density_from_dict(doc2), q.density_from_dict(doc))
    with pytest.raises(ValueError):
        q.density_from_dict({"basis_order": ["HH", "HH", "VV", "VH"], "re": doc["re"], "im": doc["im"]})


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_random_states_are_physical(seed, rank):
    rho = random_density(np.random.default_rng(seed), rank)
    d = q.check_density(rho)
    assert 0.25 - 1e-9 <= d.purity <= 1 + 1e-9
    assert q.chsh_max(rho).s <= 2 * SQ2 + 1e-9
    assert 0 <= q.state_fidelity(rho, rho) <= 1 + 1e-9
