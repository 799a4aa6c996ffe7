# Open-air link budgets at optical and microwave wavelengths.
from cryolink import linkbudget
from cryolink.scenario import reproduce_table1

report = reproduce_table1()
print("\n".join(report.summary))

# Aperture gain of a 1 m dish
print("810 nm gain:", linkbudget.antenna_gain_db(810e-9, 1.0))
print("6 cm gain:  ", linkbudget.antenna_gain_db(0.06, 1.0))

# A satellite-like optical downlink. The ideal budget is a small net gain,
# real links lose 65-82 dB to pointing, turbulence and detectors.
sat = linkbudget.LinkGeometry(810e-9, 1000.0, 1.0, 1.0, atmosphere=linkbudget.default_atmosphere())
print(linkbudget.link_budget(sat))

# Microwave over 100 km is hopeless without huge dishes
for d in (1.0, 3.0, 10.0):
    mw = linkbudget.LinkGeometry(0.06, 100.0, d, d, atmosphere=linkbudget.default_atmosphere())
    print(f"D = {d:4.1f} m  total = {linkbudget.total_link_loss_db(mw):6.2f} dB")

# 50 ohm line into free space
gamma, loss = linkbudget.impedance_reflection(50.0, 377.0)
print(f"Gamma = {gamma:.4f}, mismatch loss {loss:.3f} dB")
