# Teleporting a coherent state with a lossy two-mode squeezed resource.
import numpy as np

from cryolink import channels, gaussian, protocols

for r in (0.0, 0.5, 1.0, 2.0):
    f = protocols.teleport_fidelity(gaussian.coherent_state(1 + 1j), gaussian.tmsv_state(r))
    print(f"r = {r:.1f}  F = {f:.4f}  (1/(1+exp(-2r)) = {1 / (1 + np.exp(-2 * r)):.4f})")

# Resource arm sent over a cryogenic line with increasing loss. For each loss
# there is an optimal squeezing; too much squeezing amplifies the noise.
rs = np.linspace(0, 3, 31)
for loss_db in (0.5, 1.0, 3.0):
    eta = 10 ** (-loss_db / 10)
    fid = [
        protocols.teleport_fidelity_coherent(
            protocols.teleport_added_noise(channels.loss_channel(gaussian.tmsv_state(r), 1, eta, 0.01))
        )
        for r in rs
    ]
    i = int(np.argmax(fid))
    print(f"{loss_db:3.1f} dB: best F = {fid[i]:.4f} at r = {rs[i]:.1f}")
