# # Analytic continuation
#
# Outside the convergence domain the value is rebuilt from values at shifted
# arguments. A K x K block of translation coefficients relates the function at
# s to the function with s1 merged into s2 and shifted by 0..K-1. The infinite
# remainder is summed until its terms drop below tail_tol. Depth one reduces to
# a triangular solve.

from qmz import ContinuationPlan, PoleProximityError, continue_eval, eval_series

q = 0.5

# Inside the domain the continuation agrees with the direct series.

s = (2, 1)
print("continued", continue_eval(s, q).value)
print("series   ", eval_series("sz", s, q).value)

# Outside it, only the continuation works. info reports the block size chosen
# and how much recursion was needed.

r = continue_eval((-0.5 + 0.3j, 2.2), q)
print("\nsz(-0.5+0.3i, 2.2) =", r.value)
print("K =", r.info["K"], " calls", r.info["calls"], " memo hits", r.info["memo_hits"])

# The result should not depend on K. Larger blocks carry larger coefficients,
# so rounding grows slowly with K. The smallest admissible K is the most accurate.

for K in (2, 4, 6, 8):
    v = continue_eval((-0.5, 3.2), q, ContinuationPlan(K=K)).value
    print(f"K={K}: {v.real:+.15f}")

# Points on the pole locus are refused rather than approximated.

try:
    continue_eval((0,), q)
except PoleProximityError as exc:
    print("\nrefused:", exc)
