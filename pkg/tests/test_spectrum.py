import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biphoton_bench import spectrum as sp


def test_power_law_two_points():
    law = sp.calibrate_power_law([(2.0, 300.0), (0.13, 900.0)])
    b = np.log(3) / np.log(2 / 0.13)
    assert np.isclose(law.b, b, rtol=1e-12)
    assert np.isclose(law.b, 0.402, atol=1e-3)
    assert np.isclose(law.a, 300 * 2**b, rtol=1e-12)
    assert law.a == pytest.approx(396, abs=1)
    assert np.isclose(law(2.0), 300) and np.isclose(law(0.13), 900)


def test_power_law_repeated_point():
    law = sp.calibrate_power_law([(1.5, 420.0), (1.5, 420.0)])
    assert law.b == 0 and np.isclose(law.a, 420)


def test_power_law_recovers_synthetic():
    p = np.array([0.1, 0.3, 1.0, 4.0, 9.0])
    law = sp.calibrate_power_law(np.column_stack([p, 250.0 * p**-0.37]))
    assert abs(law.a - 250) < 1e-9 and abs(law.b - 0.37) < 1e-9


def test_power_law_rejects_bad_input():
    with pytest.raises(ValueError):
        sp.calibrate_power_law([(1.0, 300.0)])
    with pytest.raises(ValueError):
        sp.calibrate_power_law([(1.0, 300.0), (-2.0, 100.0)])


@pytest.mark.parametrize("power,tau", sp.ANCHORS)
def test_calibrated_coherence_time(power, tau):
    wf = sp.biphoton_waveform(sp.params_for_power(power))
    assert sp.coherence_time(wf) == pytest.approx(tau, rel=0.05)


@pytest.mark.parametrize("power,bw", [(2.0, 2.9), (0.13, 0.8)])
def test_calibrated_bandwidth(power, bw):
    wf = sp.biphoton_waveform(sp.params_for_power(power))
    assert sp.bandwidth_mhz(wf) == pytest.approx(bw, rel=0.05)


def test_window_scaling():
    # with a negligible group delay the width is set by the window alone
    grid = sp.SpectralGrid(2**17, 8e9)
    w1 = sp.fwhm_mhz(sp.spectrum(sp.SpectralModelParams(group_delay_ns=0.01, dephasing_mhz=0,
                                                        eit_window_mhz=1.0), grid))
    w2 = sp.fwhm_mhz(sp.spectrum(sp.SpectralModelParams(group_delay_ns=0.01, dephasing_mhz=0,
                                                        eit_window_mhz=2.0), grid))
    assert w1 == pytest.approx(1.0, rel=0.02)
    assert w2 / w1 == pytest.approx(2.0, rel=0.02)


def test_lorentzian_gives_exponential():
    grid = sp.SpectralGrid(2**16, 2e9)
    gamma = 2 * np.pi * 5e6  # power HWHM in rad/s
    spec = sp.BiphotonSpectrum(grid.omega, 1 / (gamma - 1j * grid.omega))
    wf = sp.waveform_from_spectrum(spec, normalize=False)
    inten = wf.intensity
    sel = (wf.tau_ns > 5) & (wf.tau_ns < 60)
    slope = np.polyfit(wf.tau_ns[sel] * 1e-9, np.log(inten[sel]), 1)[0]
    assert -1 / slope == pytest.approx(1 / (2 * gamma), rel=1e-3)
    assert inten[wf.tau_ns < -5].max() < 1e-4 * inten.max()


def test_symmetric_spectrum_gives_even_waveform():
    grid = sp.SpectralGrid(2**12, 1e9)
    spec = sp.BiphotonSpectrum(grid.omega, np.exp(-(grid.omega / 1e8) ** 2))
    wf = sp.waveform_from_spectrum(spec)
    mag = np.abs(wf.psi)
    assert np.allclose(mag[1:], mag[1:][::-1], atol=1e-12 * mag.max())


def test_parseval_model():
    spec = sp.spectrum(sp.G2_SHAPE_PARAMS)
    wf = sp.waveform_from_spectrum(spec, normalize=False)
    lhs = spec.power.sum() * spec.df
    rhs = wf.intensity.sum() * wf.dtau_ns * 1e-9
    assert abs(lhs - rhs) <= 1e-9 * lhs


@settings(max_examples=15, deadline=None)
@given(st.floats(20, 2000), st.floats(0, 3), st.floats(5, 200))
def test_parseval_property(delay, deph, window):
    grid = sp.SpectralGrid(2**15, 5e8)
    spec = sp._raw_spectrum(delay, sp.SpectralModelParams(dephasing_mhz=deph, eit_window_mhz=window), grid)
    wf = sp.waveform_from_spectrum(spec, normalize=False)
    lhs = spec.power.sum() * spec.df
    assert abs(lhs - wf.intensity.sum() * wf.dtau_ns * 1e-9) <= 1e-9 * lhs
    back = sp.spectrum_from_waveform(wf)
    assert np.allclose(back.amplitude, spec.amplitude, atol=1e-9 * np.abs(spec.amplitude).max())


def test_equivalent_width_of_exponential():
    tau0 = 150.0
    tau = np.arange(-2000, 20000, 0.5)
    psi = np.where(tau >= 0, np.exp(-tau / (2 * tau0)), 0)  # intensity exp(-tau/tau0)
    wf = sp.TemporalWaveform(tau, psi)
    assert sp.coherence_time(wf) == pytest.approx(tau0, abs=0.5)


def test_rise_time_shifts_peak():
    wf = sp.biphoton_waveform(sp.G2_SHAPE_PARAMS)
    peak = wf.tau_ns[np.argmax(wf.intensity)]
    assert 15 <= peak <= 35
    bare = sp.biphoton_waveform(sp.SpectralModelParams(group_delay_ns=300, dephasing_mhz=1.7, rise_time_ns=0))
    assert bare.tau_ns[np.argmax(bare.intensity)] < peak - 10
    assert np.isclose(wf.norm, 1)


def test_narrow_grid_is_rejected():
    with pytest.raises(ValueError, match="too narrow"):
        sp.spectrum(sp.G2_SHAPE_PARAMS, sp.SpectralGrid(2**10, 2e7))


def test_unreachable_coherence_time():
    with pytest.raises(ValueError, match="unreachable"):
        sp.biphoton_waveform(sp.params_for_power(0.13, dephasing_mhz=2.0))


def test_invalid_params():
    with pytest.raises(ValueError):
        sp.SpectralModelParams(optical_depth=-1)
    with pytest.raises(ValueError):
        sp.SpectralGrid(1000)


def test_csv_roundtrip(tmp_path):
    wf = sp.biphoton_waveform(sp.G2_SHAPE_PARAMS)
    sp.save_waveform_csv(tmp_path / "w.csv", wf)
    back = sp.load_waveform_csv(tmp_path / "w.csv")
    assert np.array_equal(back.psi, wf.psi) and np.array_equal(back.tau_ns, wf.tau_ns)
    spec = sp.spectrum(sp.G2_SHAPE_PARAMS)
    sp.save_spectrum_csv(tmp_path / "s.csv", spec)
    assert np.array_equal(sp.load_spectrum_csv(tmp_path / "s.csv").amplitude, spec.amplitude)
