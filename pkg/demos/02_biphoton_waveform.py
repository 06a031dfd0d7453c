"""From a joint spectrum to the two-photon waveform.

The spectrum stand-in is a lossy phase-matching factor times an EIT
transparency window. Its Fourier transform is the biphoton waveform. The
coupling power sets the group delay through a power law for the coherence
time, anchored at 2 mW -> 300 ns and 0.13 mW -> 900 ns.
"""
import numpy as np

from biphoton_bench import spectrum as sp

law = sp.DEFAULT_LAW
print(f"power law: tau_c = {law.a:.1f} ns * P^-{law.b:.4f}")

print("\n P (mW)  group delay (ns)  tau_c (ns)  bandwidth (MHz)  product")
for power in (0.13, 0.25, 0.5, 1.0, 2.0):
    params = sp.params_for_power(power)
    wf = sp.biphoton_waveform(params)
    tc, bw = sp.coherence_time(wf), sp.bandwidth_mhz(wf)
    print(f" {power:6.2f}  {sp.solve_group_delay(params):16.1f}  {tc:10.1f}  {bw:15.3f}  {tc * bw * 1e-3:7.3f}")

# The correlation-function shape uses stronger dephasing, which gives a fast
# decay on top of a 300 ns box, plus a 25 ns rise time.
wf = sp.biphoton_waveform(sp.G2_SHAPE_PARAMS)
inten = wf.intensity / wf.intensity.max()
print("\nshape used for g2: peak at", f"{wf.tau_ns[np.argmax(inten)]:.0f} ns;",
      f"equivalent width {sp.coherence_time(wf):.1f} ns")
for t in (0, 10, 25, 50, 100, 200, 299, 310):
    k = int(np.argmin(np.abs(wf.tau_ns - t)))
    print(f"  tau {t:4d} ns  |psi|^2 {inten[k]:.3f}  " + "#" * int(40 * inten[k]))

# Parseval holds for the raw transform.
spec = sp.spectrum(sp.G2_SHAPE_PARAMS)
raw = sp.waveform_from_spectrum(spec, normalize=False)
print("\nParseval:", spec.power.sum() * spec.df, "vs", raw.intensity.sum() * raw.dtau_ns * 1e-9)
