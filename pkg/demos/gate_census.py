"""What the compiled circuits actually look like.

One Trotter step applies all fifteen Pauli exponentials; lowering
rewrites each two-qubit rotation as basis changes around a CNOT-RZ-CNOT
core, and keeps the five native one-qubit rotations as they are.
"""

import numpy as np

import rpsim as rp

system = rp.prototype_system(theta=np.pi / 2)

print("gate totals after lowering (t = 1 us):")
print()
print("    n   total   per-step   breakdown")
for n in (1, 2, 3, 5, 10):
    census = rp.gate_count(rp.lower_to_basis(rp.compile(system, 1.0, n)))
    kinds = ", ".join(f"{k} x{v}" for k, v in sorted(census["per_kind"].items()))
    print(f"  {n:3d}   {census['total']:5d}   {census['trotter_only'] // n:8d}   {kinds}")

print()
print("count(n) = 6 + 55 n: four preparation gates, two basis-change")
print("gates before readout, and 55 gates per step at this field angle.")
print()

# the text dump of a single-step circuit, truncated
text = rp.dump_circuit(rp.lower_to_basis(rp.compile(system, 1.0, 1)))
lines = text.splitlines()
print(f"dump of the n=1 circuit ({len(lines)} lines, first 14 shown):")
for line in lines[:14]:
    print(f"  {line}")
print("  ...")
