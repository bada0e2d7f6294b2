# coding: utf-8
# # Sharing is cheaper than computing
#
# A correlated multiple secret sharing scheme hands each pair of users a
# share so that Alice with her share learns X, Bob learns Y, Charlie learns
# Z, and nobody learns more. Any secure protocol yields such a scheme, so
# sharing bounds are at most protocol bounds. For AND the gap is strict.

# In[1]:

import math

from secomp.bounds import randomness_bounds
from secomp.builtins import build_and
from secomp.cmss import build_and_cmss, cmss_bounds, verify_cmss

scheme = build_and_cmss()
print("secure sharing:", verify_cmss(scheme).secure)
print({k: round(v, 4) for k, v in scheme.share_entropies().items()})

# In[2]:

sharing = cmss_bounds(scheme.secrets)
protocol = randomness_bounds(build_and()[0])
for q in ("r12", "r23", "r31"):
    print(f"{q}: sharing {sharing.value(q):.4f}   protocol {protocol.value(q):.4f}")
print("separation on r12:", round(protocol.value("r12") - math.log2(3), 4), "bits")
