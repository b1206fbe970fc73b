"""Yield versus recombination rate.

Fast recombination freezes the spin state before any singlet-triplet
mixing happens (yield -> 1); slow recombination integrates over many
oscillation periods. One coherent trace serves every rate, because the
decay weighting is applied afterwards.
"""

import rpsim as rp

system = rp.prototype_system(theta=rp.DEFAULTS["system"]["theta_rad"])

rates = [0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0]
rows = rp.rate_sweep(system, rates, mode="reference", t_max=1.0, dt=0.001)

print("singlet yield over the 1 us window, theta = pi/2")
print()
print("   k [MHz]    yield")
for row in rows:
    print(f"  {row['k_MHz']:8.1f}   {row['yield']:.9f}")

print()
print("k = 1 MHz cross-check against the direct yield computation:")
direct = rp.singlet_yield_at(system, "reference", dt=0.001)
swept = next(r["yield"] for r in rows if r["k_MHz"] == 1.0)
print(f"  sweep {swept:.12f}  direct {direct:.12f}  gap {abs(swept - direct):.1e}")
