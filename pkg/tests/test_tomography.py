import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biphoton_bench import tomography as tm
from biphoton_bench.optics import AnalyzerChain
from biphoton_bench.quantum import (
    bell_state, check_density, density, fidelity, projection_probability, state_fidelity,
)
from conftest import random_density

PSET = tm.standard_projection_set()


def test_standard_set_shape_and_conditioning():
    assert len(PSET) == 16
    sv = np.linalg.svd(PSET.gram(), compute_uv=False)
    assert sv[0] / sv[-1] < 100
    PSET.check_complete()


def test_first_four_settings_are_populations(rng):
    rho = random_density(rng)
    n = tm.expected_counts(rho, PSET, 1000.0)
    assert PSET.labels[:4] == ("HH", "HV", "VV", "VH")
    assert n[:4].sum() == pytest.approx(1000.0)


def test_incomplete_set_rejected():
    partial = tm.ProjectionSet(PSET.settings[:12])
    with pytest.raises(tm.RankDeficientError):
        partial.check_complete()
    dup = tm.ProjectionSet((PSET.settings[0],) * 16)
    with pytest.raises(tm.RankDeficientError):
        dup.check_complete()


def test_expected_counts_cases():
    # every standard setting is a product of pure states, so I/4 gives 1/4 each
    assert np.allclose(tm.expected_counts(np.eye(4) / 4, PSET, 4000.0), 1000.0)
    psi = bell_state("PsiPlus")
    hh = np.array([1, 0])
    assert tm.expected_counts(psi, PSET, 1e4)[0] == pytest.approx(1e4 * projection_probability(psi, hh, hh))
    assert tm.expected_counts(psi, PSET, 1e4)[0] == pytest.approx(5e3)
    assert np.allclose(tm.expected_counts(psi, PSET, 0.0, background=7.0), 7.0)


def test_linear_inversion_exact(rng):
    rho = random_density(rng)
    assert np.allclose(tm.linear_inversion(tm.expected_counts(rho, PSET, 1e5), PSET), rho, atol=1e-9)
    bg = rng.uniform(0, 50, 16)
    assert np.allclose(tm.linear_inversion(tm.expected_counts(rho, PSET, 1e5, bg), PSET, bg), rho, atol=1e-9)


def test_linear_inversion_noise_scaling(rng):
    rho = random_density(rng, rank=2)
    errs = []
    for _ in range(20):
        n = rng.poisson(tm.expected_counts(rho, PSET, 1e6))
        errs.append(np.linalg.norm(tm.linear_inversion(n, PSET) - rho))
    assert 1e-4 < np.mean(errs) < 1e-2


def test_linear_inversion_can_be_unphysical():
    psi = bell_state("PsiPlus")
    n = tm.expected_counts(psi, PSET, 1e4)
    n[1] = 0.0
    n[3] = 0.0
    n[0] -= 300  # push weight off the pure state; inversion loses positivity
    rho = tm.linear_inversion(n, PSET)
    assert np.linalg.eigvalsh(rho).min() < -1e-3
    res = tm.mle_reconstruct(n, PSET)
    assert np.linalg.eigvalsh(res.rho).min() > -1e-9


def test_parameter_roundtrip(rng):
    x = rng.normal(size=16)
    assert np.allclose(tm.t_to_params(tm.params_to_t(x)), x)
    t = tm.cholesky_factor(random_density(rng))
    assert np.allclose(np.triu(t, 1), 0)


def test_gradient_matches_finite_difference(rng):
    rho = random_density(rng)
    n = rng.poisson(tm.expected_counts(rho, PSET, 1e4)).astype(float)
    x = tm.t_to_params(tm.cholesky_factor(100 * rho))
    for lik in ("poisson", "gaussian"):
        _, g = tm.negative_log_likelihood(x, n, PSET.projectors, np.zeros(16), lik)
        fd = np.empty(16)
        for k in range(16):
            e = np.zeros(16)
            e[k] = 1e-5
            fp, _ = tm.negative_log_likelihood(x + e, n, PSET.projectors, np.zeros(16), lik)
            fm, _ = tm.negative_log_likelihood(x - e, n, PSET.projectors, np.zeros(16), lik)
            fd[k] = (fp - fm) / 2e-5
        assert np.allclose(g, fd, rtol=1e-4, atol=1e-8)


def test_mle_pure_state_roundtrip():
    psi = bell_state("PsiPlus")
    res = tm.mle_reconstruct(tm.expected_counts(psi, PSET, 1e6), PSET)
    assert fidelity(res.rho, psi).f_prob >= 0.999
    check_density(res.rho)


def test_mle_maximally_mixed_purity():
    rng = np.random.default_rng(4)
    n = rng.poisson(tm.expected_counts(np.eye(4) / 4, PSET, 1e5))
    res = tm.mle_reconstruct(n, PSET)
    assert 0.24 <= np.trace(res.rho @ res.rho).real <= 0.27


def test_mle_gaussian_likelihood():
    psi = bell_state("PhiMinus")
    n = np.random.default_rng(5).poisson(tm.expected_counts(psi, PSET, 1e5))
    res = tm.mle_reconstruct(n, PSET, tm.MleConfig(likelihood="gaussian"))
    assert fidelity(res.rho, psi).f_prob > 0.98
    with pytest.raises(ValueError):
        tm.MleConfig(likelihood="binomial")


def test_mle_rejects_bad_counts():
    with pytest.raises(ValueError):
        tm.mle_reconstruct(-np.ones(16), PSET)
    with pytest.raises(ValueError):
        tm.mle_reconstruct(np.ones(15), PSET)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.floats(1e2, 1e6))
def test_mle_output_always_physical(seed, rank, intensity):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, rank)
    n = rng.poisson(tm.expected_counts(rho, PSET, intensity))
    if n.sum() == 0:
        return
    res = tm.mle_reconstruct(n, PSET, tm.MleConfig(restarts=0))
    d = check_density(res.rho)
    assert abs(np.trace(res.rho).real - 1) < 1e-10 and d.min_eigenvalue > -1e-9


def test_mle_is_deterministic(rng):
    n = rng.poisson(tm.expected_counts(random_density(rng), PSET, 1e4))
    a = tm.mle_reconstruct(n, PSET, tm.MleConfig(seed=3))
    b = tm.mle_reconstruct(n, PSET, tm.MleConfig(seed=3))
    assert np.array_equal(a.rho, b.rho)


def test_noisy_roundtrip_fidelity(rng):
    rho = random_density(rng, rank=1)
    res = tm.mle_reconstruct(rng.poisson(tm.expected_counts(rho, PSET, 1e6)), PSET)
    assert state_fidelity(res.rho, rho) > 0.99


def test_bootstrap_and_report():
    psi = bell_state("PsiPlus")
    n = np.random.default_rng(6).poisson(tm.expected_counts(psi, PSET, 1e4))
    res = tm.mle_reconstruct(n, PSET)
    boot = tm.bootstrap(res, PSET, psi, resamples=20, seed=1)
    lo, hi = boot.interval("fidelity_prob")
    assert lo <= hi and boot.std("chsh_horodecki") > 0
    doc = tm.report(res, psi, boot)
    assert set(doc["bootstrap"]) >= {"fidelity_prob", "purity", "chsh_horodecki"}


def test_counts_csv_roundtrip(tmp_path):
    n = np.arange(16) * 10.0
    tm.save_counts_csv(tmp_path / "c.csv", n, PSET)
    back, pset = tm.load_counts_csv(tmp_path / "c.csv")
    assert np.array_equal(back, n)
    assert pset.labels == tm.STANDARD_LABELS
    assert np.allclose(pset.projectors, PSET.projectors)


def test_custom_projection_set():
    # over-complete set: standard plus a few extra settings
    extra = tuple(PSET.settings) + ((AnalyzerChain.from_angles(45, 22.5), AnalyzerChain.from_angles(0, 67.5)),)
    pset = tm.ProjectionSet(extra)
    rho = density(bell_state("PhiPlus"))
    assert np.allclose(tm.linear_inversion(tm.expected_counts(rho, pset, 1e5), pset), rho, atol=1e-9)


def test_fixture_phi_minus_entries():
    fx = tm.load_paper_fixture("PhiMinus")
    hv, vh = 1, 2  # canonical (HH, HV, VH, VV)
    assert fx.printed[hv, hv].real == pytest.approx(0.5)
    assert fx.printed[vh, vh].real == pytest.approx(0.409)
    assert fx.printed[hv, vh].real == pytest.approx(-0.438)


def test_fixture_flags():
    fx = tm.load_paper_fixtures()
    assert any("negative" in f for f in fx["PsiMinus"].flags)
    assert any("Hermitian" in f for f in fx["PhiPlus"].flags)
    for f in fx.values():
        assert abs(np.trace(f.printed).real - 1) <= 0.03
        check_density(f.physical)


def test_fixture_chsh_and_fidelity():
    fx = tm.load_paper_fixtures()
    for name, f in fx.items():
        s = f.chsh()
        assert s >= 2 and abs(s - tm.PUBLISHED_CHSH[name]) <= 0.2
    assert fx["PsiPlus"].fidelity_prob() == pytest.approx(0.811, abs=0.005)


def test_fixture_missing(tmp_path):
    (tmp_path / "f.json").write_text('{"basis_order": ["HH","HV","VH","VV"], "states": {}}')
    with pytest.raises(ValueError):
        tm.load_paper_fixture("PsiPlus", tmp_path / "f.json")


def test_calibrated_scenario_fidelity_bracket():
    from biphoton_bench import config as cf
    cfg = cf.default_config()
    sc = cf.build_scenario(cfg)
    n = tm.scenario_counts(sc, PSET, cfg.tomography.time_per_setting_s, seed=0)
    res = tm.mle_reconstruct(n, PSET)
    assert 0.88 <= fidelity(res.rho, bell_state("PsiPlus")).f_prob <= 0.97
