"""
Transfer operators of the decorated AKLT chain
==============================================

The spin-1 AKLT chain is a bond-dimension-2 MPS. Its transfer operator E
decides how fast correlations along a decorated edge die out, and the two
hub transfer operators describe how a spin-3/2 site feeds two legs at once.
"""

import numpy as np

from gapcert.mps import (
    a_of_n,
    aklt_site_tensor,
    bulk_transfer,
    fixed_point,
    left_hub_transfer,
    q_matrices,
)

# the three MPS matrices, labelled by m = 1, 0, -1
V = aklt_site_tensor()
for m, v in zip((1, 0, -1), V.matrices):
    print(f"V_{m:+d} =\n{np.round(v.real, 4)}")

# E(B) = sum_i V_i^* B V_i is unital with a single fixed point
E = bulk_transfer()
fp = fixed_point(E)
print("\nspectrum of E:", np.round(E.spectrum().real, 6))
print("fixed point rho =\n", np.round(fp.rho.real, 6))
print("primitive:", fp.primitive, " second modulus:", round(fp.second_modulus, 6))

# a(n) = ||E^n - |1><rho||| decays like 3^-n
for n in range(1, 7):
    print(f"a({n}) = {a_of_n(E, fp.rho, n):.3e}   3^-{n} = {3.0 ** -n:.3e}")

# the left hub map sends 1 to 1 + 4/3 S.S, split into a triplet and a singlet
print("\nspec E_hub(1):", np.round(np.linalg.eigvalsh(left_hub_transfer()(np.eye(2))), 6))

# after n chain sites the hub Gram operator Q_L is already close to 1
for n in range(1, 5):
    q = q_matrices(n)
    print(f"n={n}: spec Q_L = {np.round(np.linalg.eigvalsh(q.Q_L), 8)}  q_R = {q.q_R:.8f}")
