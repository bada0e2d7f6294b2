# coding: utf-8
# # Computing AND securely between three users
#
# Alice holds a bit X, Bob holds a bit Y, and Charlie must learn Z = X AND Y
# without anyone learning anything beyond what their own view implies.
# This script builds the reference protocol, checks its security exactly,
# measures how many bits cross each link, and sets those numbers against
# the lower bounds.

# In[1]:

import math

from secomp.bounds import improved_bounds, prelim_bounds, randomness_bounds
from secomp.builtins import build_and
from secomp.protocol import rate_quadruple, transcript_distribution, verify_perfect_security

problem, protocol = build_and()
print(problem.name, "with inputs uniform on", list(problem.x), "x", list(problem.y))

# The transcript distribution is exact: every probability is a Fraction.

# In[2]:

td = transcript_distribution(protocol, problem.p_xy)
report = verify_perfect_security(protocol, problem)
print("secure:", report.secure)

# Link loads. Alice and Bob each send a uniform symbol over a three-letter
# alphabet to Charlie, and the key they share costs log 6 bits.

# In[3]:

rates = rate_quadruple(td, 1)
for name, value in zip(("r12", "r23", "r31", "rho"), (rates.r12, rates.r23, rates.r31, rates.rho)):
    print(f"{name} = {value:.4f}")
print("log 3 =", round(math.log2(3), 4), " log 6 =", round(math.log2(6), 4))

# ## How far down can the loads go?
#
# Three families of bounds, each tighter than the last. The first needs
# nothing but the input law. The second lets the distribution be switched to
# any full-support law under which the protocol stays secure. The third adds
# structural conditions of the function being computed.

# In[4]:

for rep in (prelim_bounds(problem), improved_bounds(problem, use_conditions=False), improved_bounds(problem)):
    print(rep.theorem.ljust(12), "  ".join(f"{q}={rep.value(q):.4f}" for q in ("r12", "r23", "r31")))

# The last line certifies log 3 on the Charlie links: the protocol is optimal
# there. On the Alice-Bob link a gap between 1.826 and log 6 remains.

# In[5]:

rho = randomness_bounds(problem)
print(rho.to_markdown())
