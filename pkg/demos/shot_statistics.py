"""Sampling error of the measured singlet population.

Instead of reading exact expectations off the density matrix, draw a
finite number of measurement shots per time point and compare the
estimate against the exact value. The RMS error over the grid should
shrink like 1/sqrt(shots).
"""

import numpy as np

import rpsim as rp

system = rp.prototype_system(theta=np.pi / 2)
shot_list = [100, 1000, 10000]

rows = rp.shot_sweep(system, shot_list, seed=7, n=5, t_max=1.0, dt=0.01)

print("n = 5 Trotter steps, ideal gates and readout, seed = 7")
print()
print("   shots    rms error    rms * sqrt(shots)")
for row in rows:
    s, e = row["shots"], row["rms_error"]
    print(f"  {s:6d}   {e:.6f}     {e * np.sqrt(s):.4f}")

print()
print("the right-hand column is flat when the error scales as 1/sqrt(shots)")
