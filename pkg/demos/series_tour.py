# # Direct series
#
# The three models are nested sums over m1 > m2 > ... > mr > 0 (the star model
# allows equality). Each term is a product of q-power numerators over q-brackets
# [m]_q = (1 - q^m) / (1 - q). They converge when the real parts of the partial
# sums of s are large enough.

import math

from qmz import SumBudget, eval_series, in_domain, zeta

q = 0.5

# A single value, with its error estimate and the number of terms used.

r = eval_series("sz", (2,), q)
print("sz(2)      =", r.value, " err_est", r.err_est, " terms", r.terms_used)

# The shortcut returns only the complex value.

print("sz(2,1)    =", zeta((2, 1), q))
print("sz*(2,2)   =", eval_series("sz_star", (2, 2), q).value)
print("bz(3,2.5)  =", eval_series("bz", (3, 2.5), q).value)

# The star sum splits into the strict sum plus the diagonal, where both indices
# merge into one.

s = (2.0, 1.5)
star = eval_series("sz_star", s, q).value
split = eval_series("sz", s, q).value + eval_series("sz", (s[0] + s[1],), q).value
print("star - (strict + diagonal) =", abs(star - split))

# Domains differ between models: bz needs each partial sum larger by its depth.

for model in ("sz", "bz"):
    print(model, "domain contains (1.5, 0.4):", in_domain(model, (1.5, 0.4)))

# As q tends to 1 the q-analogue approaches the classical value, here pi^2/6.
# Convergence slows as q approaches 1, so the budget is raised.

budget = SumBudget(max_outer_index=100_000, tol=1e-12)
for qq in (0.9, 0.99, 0.999):
    v = eval_series("sz", (2,), qq, budget).value.real
    print(f"q={qq}: sz(2)={v:.10f}  gap to pi^2/6 = {abs(v - math.pi ** 2 / 6):.3e}")
