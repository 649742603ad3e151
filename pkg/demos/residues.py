# # Poles and residues
#
# Poles sit where some partial sum s1 + ... + sj equals -k + 2 pi i m / log q.
# Each pole is labelled (j, k, m). The closed-form residue combines first-row
# translation coefficients with values of the remaining arguments. The numerical
# residue extrapolates h * f(pole + h) to h = 0 and serves as an independent check.

import math

from qmz import HyperplaneId, numeric_residue, pole_locus, residue_h1, residue_hjk

q = 0.5
period = 2 * math.pi / math.log(q)

# Which hyperplanes pass through a point? Several can at once.

print(pole_locus("sz", (0, -1, 1), q))
print(pole_locus("sz", (complex(-1, period), 0.5), q))

# Depth one at s = 0: the residue is 1 / log 2.

print("\nclosed  ", residue_h1(0, (), q))
print("numeric ", numeric_residue(HyperplaneId(1, 0), (0,), q).value)
print("1/log 2 ", 1 / math.log(2))

# Depth three on the hyperplane s1 + s2 = -1.

point = (0.3, -1.3, 2.0)
closed = residue_hjk(2, 1, point, q)
num = numeric_residue(HyperplaneId(2, 1), point, q)
print(f"\nclosed  {closed}\nnumeric {num.value}  ({num.method})")
print("relative gap", abs(closed - num.value) / abs(closed))

# Poles repeat up the imaginary axis, and each copy carries its own phase.

for m in (0, 1, 2):
    print(f"m={m}:", residue_h1(1, (3.0,), q, lattice_m=m))
