# # Translation coefficients and matrices
#
# The coefficient L_n(t) is a weighted sum over the arrangements of parts of n.
# The same number is a determinant of a Hessenberg matrix, and a signed sum over
# permutations. Here the three are computed side by side, and the matrix blocks
# they fill are then inspected.

import numpy as np

from qmz import L_n, build_block, hessenberg_det, permutation_det, rising_factorial, verify_inverse
from qmz.matrices import inverse_rounding_scales

q = 0.5
t = 0.3 + 0.7j

for n in range(2, 8):
    a = hessenberg_det(n, t, q)
    b = permutation_det(n, t, q)
    c = rising_factorial(t, n - 1) * L_n(n, t, q)
    print(f"n={n}: {a:.12g}  |perm-hess|={abs(a - b):.1e}  |sum-hess|={abs(a - c):.1e}")

# A 4 x 4 block of the translation matrix, its closed-form inverse, and the
# coefficients that carry the merged arguments.

np.set_printoptions(precision=4, suppress=True, linewidth=120)
print("\nM\n", build_block("M", 1.0, 4, q=q).II)
print("M^-1\n", build_block("M_INV", 1.0, 4, q=q).II)
print("H\n", build_block("H", 1.0, 4, q=q).II)

# How well does the closed-form inverse invert the block? The residual is exact,
# so the only error is in the float entries. It tracks the binary64 rounding
# scale, which grows quickly as q approaches 1.

for qq in (0.3, 0.6, 0.85):
    res = verify_inverse(-1.3 + 0.4j, 12, qq)
    scale, _ = inverse_rounding_scales(-1.3 + 0.4j, 12, qq)
    print(f"q={qq}: residual {res:.1e}   rounding scale {scale:.1e}")
