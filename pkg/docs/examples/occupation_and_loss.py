# Thermal photons and why the link has to be cold.
import numpy as np

from cryolink import channels, gaussian

# Mean bath occupation at a few frequencies and temperatures
for f in (5e9, 5e14):
    for t in (0.01, 0.03, 4.0, 300.0):
        print(f"{f:8.1e} Hz  {t:6.2f} K  nbar = {channels.planck_occupation(f, t):.3e}")

# A 5 GHz photon at room temperature sits in a ~1250 photon bath; in the
# mixing chamber it is essentially vacuum.

# Send one arm of a two-mode squeezed state through 1 dB of loss at
# different bath temperatures and watch the entanglement.
tmsv = gaussian.tmsv_state(1.0)
eta = 10 ** (-1 / 10)
for t in np.geomspace(0.01, 300, 7):
    nbar = channels.planck_occupation(5e9, t)
    out = channels.loss_channel(tmsv, 1, eta, nbar)
    print(f"T = {t:8.3f} K  nbar = {nbar:10.4g}  E_N = {gaussian.log_negativity(out):.4f}")

# Two losses in a row are again one loss, with an averaged bath
first = (0.9, 2 * 0.1 + 1)
second = (0.8, 2 * 5.0 + 1)
eta, mu = channels.compose_loss(first, second)
print("composed:", eta, (mu - 1) / 2, "photons")
