# Quantum illumination: closed-form error exponents and a numeric check.
import numpy as np

from cryolink import protocols

sc = protocols.IlluminationScenario(reflectivity=0.01, signal_photons=0.01, background_photons=100.0)
print("advantage (asymptotic):", protocols.qi_advantage_db(sc), "dB")

# How the advantage builds up with background noise, for each closed form
for nb in np.geomspace(0.01, 1000, 6):
    s = protocols.IlluminationScenario(0.01, 0.01, nb)
    row = [protocols.qi_advantage_db(s, form) for form in protocols.FORMS]
    print(f"n_B = {nb:8.2f}  " + "  ".join(f"{f}: {v:5.2f} dB" for f, v in zip(protocols.FORMS, row)))

# Numeric quantum Chernoff bound from truncated Fock-space density matrices.
# Takes a second or two.
sc = protocols.IlluminationScenario(0.01, 0.01, 20.0)
for p in protocols.PROTOCOLS:
    numeric = protocols.qcb_exponent_numeric(*protocols.qi_hypothesis_states(p, sc), fock_cutoff=80)
    closed = {f: protocols.qi_error_exponent(p, sc, f) for f in protocols.FORMS}
    print(p, f"numeric {numeric:.4e}", {f: f"{v:.4e}" for f, v in closed.items()})
