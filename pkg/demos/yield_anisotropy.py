"""Singlet yield versus field direction.

The axial hyperfine tensor makes the yield depend on the angle between
the static field and the tensor axis. The span max - min over angles is
the anisotropy reported by the sweep commands.
"""

import numpy as np

import rpsim as rp

system = rp.prototype_system()
thetas = np.linspace(0.0, np.pi, 33)

curve = rp.yield_curve(system, thetas, mode="reference", dt=0.001)

lo, hi = curve.yields.min(), curve.yields.max()
span = hi - lo
width = 44

print("reference solver, 33 angles, t_max = 1 us")
print()
for th, y in zip(curve.thetas, curve.yields):
    bar = "#" * int(round((y - lo) / span * width)) if span else ""
    print(f"  theta = {th:5.3f}  yield = {y:.6f}  {bar}")

print()
print(f"min yield  {lo:.9f}")
print(f"max yield  {hi:.9f}")
print(f"anisotropy {rp.anisotropy(curve):.9f}")
print()
print("mirror check: theta and pi - theta give the same yield")
for th in (0.3, 1.0):
    a = rp.singlet_yield_at(system.with_angles(th), "reference", dt=0.001)
    b = rp.singlet_yield_at(system.with_angles(np.pi - th), "reference", dt=0.001)
    print(f"  theta = {th:.1f}: |difference| = {abs(a - b):.2e}")
