# A cryogenic line between two fridges, segment by segment and in the continuum limit.
import numpy as np

from cryolink import channels, gaussian

profile = channels.WaveguideProfile(
    [(0.005, 1.0, 0.01), (0.030, 1.0, 4.0), (0.005, 1.0, 0.01)],
    frequency_hz=5e9,
)
for seg, (eta, nbar) in zip(profile.segments, profile.stages()):
    print(f"{seg.length_km * 1e3:5.1f} m at {seg.temperature_k:5.2f} K: eta = {eta:.6f}, nbar = {nbar:.4g}")

eta, noise = channels.continuous_stage(profile)
print("end to end eta", eta, "added noise", noise)

# A smoothly graded line, e.g. a transition from 4 K down to the mixing chamber
graded = channels.GradedWaveguide(
    length_km=0.01,
    attenuation_db_per_km=lambda x: 1.0 + 50 * x,
    temperature_k=lambda x: 4.0 * np.exp(-x / 0.002) + 0.01,
    frequency_hz=5e9,
)
exact = channels.continuous_stage(graded)
for n in (2, 8, 32, 128):
    eta_n, mu_n = 1.0, 1.0
    for stage in graded.discretize(n).stages():
        eta_n, mu_n = channels.compose_loss((eta_n, mu_n), (stage[0], 2 * stage[1] + 1))
    noise_n = (1 - eta_n) * mu_n
    print(f"N = {n:4d}  |noise error| = {abs(noise_n - exact[1]):.3e}")

state = channels.waveguide_continuous(gaussian.tmsv_state(1.0), 1, graded)
print("log-negativity after the graded line:", gaussian.log_negativity(state))
