"""
From transfer operators to an overlap bound
===========================================

The constants a(n), q_L, q_R and the boundary norms combine into a bound on
how much the ground spaces of two neighboring Y-graphs can overlap beyond
their intersection. A gap certificate needs that bound below 1/3.
"""

from gapcert.mps import bound_suite, epsilon_bound

print(" n      b_L         A_n        eps_bound   valid")
for n in range(1, 9):
    eb = epsilon_bound(n)
    s = bound_suite(n)
    print(f"{n:2d}  {s.b_L:10.6f}  {eb.A_n:10.6f}  {eb.eps:12.6f}   {eb.valid}")

# n = 1 fails because 1 - b_L < 0; n = 2 is finite but far above 1/3
print("\n1 - b_L at n = 1:", epsilon_bound(1).one_minus_b_L)
print("first decoration number with eps_bound < 1/3:",
      next(n for n in range(1, 20) if epsilon_bound(n).valid))
