# coding: utf-8
# # Bounds that live on the boundary
#
# For remote oblivious transfer the best switched law sits on the edge of
# the simplex, where the bounds themselves are not defined. The optimizer
# keeps a floor on every probability and lowers it step by step. A bound
# whose value keeps climbing as the floor shrinks is reported as a supremum.

# In[1]:

import math

from secomp.bounds import randomness_bounds
from secomp.builtins import build_remote_ot

m, n = 2, 2
problem, protocol = build_remote_ot(m, n)
rep = randomness_bounds(problem)

# In[2]:

target = {"r31": n * m, "r23": n + math.log2(m), "r12": n * m + math.log2(m), "rho": n * m + math.log2(m)}
for q, want in target.items():
    best = rep.best(q)
    label = "supremum" if best.supremum else "attained"
    print(f"{q}: {best.value:.4f} (closed form {want:.4f}, {label})")
    for floor, value in best.trace:
        print(f"    floor {floor:g}: {value:.5f}")
