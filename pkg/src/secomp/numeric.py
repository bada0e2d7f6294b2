"""Float-array information measures for inner loops of the simplex search.

Arrays are indexed ``p[x, y, z]`` (or any 2-D pair table).  Exact zeros
in the arrays are structural, so support patterns are exact.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

RI_SLACK = 1e-12


def h(p: np.ndarray) -> float:
    """Shannon entropy in bits of the flattened array."""
    q = p[p > 0]
    return float(-(q * np.log2(q)).sum())


def mi(p2: np.ndarray) -> float:
    return h(p2.sum(1)) + h(p2.sum(0)) - h(p2)


@lru_cache(maxsize=4096)
def _components(shape: tuple[int, int], packed: bytes) -> tuple[int, np.ndarray, np.ndarray]:
    support = np.unpackbits(np.frombuffer(packed, dtype=np.uint8), count=shape[0] * shape[1]).reshape(shape)
    n_u, n_v = shape
    rows, cols = np.nonzero(support)
    adj = csr_matrix((np.ones(len(rows)), (rows, cols + n_u)), shape=(n_u + n_v, n_u + n_v))
    count, labels = connected_components(adj, directed=False)
    u_lab = labels[:n_u]
    # one-hot map from left symbol to component, only for components carrying mass
    used = np.unique(labels[rows]) if len(rows) else np.array([], dtype=int)
    remap = {c: i for i, c in enumerate(used)}
    onehot = np.zeros((n_u, max(len(used), 1)))
    for u in range(n_u):
        c = u_lab[u]
        if c in remap:
            onehot[u, remap[c]] = 1.0
    return len(used), onehot, u_lab


def support_components(p2: np.ndarray) -> tuple[int, np.ndarray]:
    """Connected components of the bipartite support graph of a pair table.

    Returns the component count and a ``(|U|, k)`` one-hot matrix mapping
    each left symbol to its component (isolated zero-mass rows map nowhere).
    """
    support = p2 > 0
    packed = np.packbits(support.ravel()).tobytes()
    count, onehot, _ = _components(support.shape, packed)
    return count, onehot


def gk_entropy(p2: np.ndarray) -> float:
    """Gács–Körner common information: entropy of the component variable."""
    count, onehot = support_components(p2)
    if count <= 1:
        return 0.0
    return h(p2.sum(1) @ onehot)


def ri(p2: np.ndarray) -> float:
    """Residual information I(U;V) − H(U⊓V) of a pair table."""
    val = mi(p2) - gk_entropy(p2)
    return val if val > RI_SLACK else 0.0


def is_connected(p2: np.ndarray) -> bool:
    return support_components(p2)[0] <= 1


# pair tables and conditional entropies of a p[x, y, z] tensor

def pxy(p3: np.ndarray) -> np.ndarray:
    return p3.sum(2)


def pxz(p3: np.ndarray) -> np.ndarray:
    return p3.sum(1)


def pyz(p3: np.ndarray) -> np.ndarray:
    return p3.sum(0)


def h_xz_given_y(p3: np.ndarray) -> float:
    return h(p3) - h(p3.sum((0, 2)))


def h_yz_given_x(p3: np.ndarray) -> float:
    return h(p3) - h(p3.sum((1, 2)))


def h_xy_given_z(p3: np.ndarray) -> float:
    return h(p3) - h(p3.sum((0, 1)))


def joint_from_inputs(p_xy: np.ndarray, W: np.ndarray) -> np.ndarray:
    """p[x, y, z] = p_XY(x, y) W(z | x, y)."""
    return p_xy[:, :, None] * W


# batched variants: leading axis indexes candidates

def hb(p: np.ndarray) -> np.ndarray:
    """Entropies of each ``p[b]`` (all trailing axes flattened)."""
    q = p.reshape(p.shape[0], -1)
    pos = q > 0
    return -np.where(pos, q * np.log2(np.where(pos, q, 1.0)), 0.0).sum(1)


def rib(p2: np.ndarray) -> np.ndarray:
    """Residual information of each pair table ``p2[b]``."""
    rows, cols = p2.sum(2), p2.sum(1)
    mi_b = hb(rows) + hb(cols) - hb(p2)
    support = p2 > 0
    if (support == support[0]).all():
        count, onehot = support_components(p2[0])
        gk = hb(rows @ onehot) if count > 1 else np.zeros(len(p2))
    else:
        gk = np.array([gk_entropy(t) for t in p2])
    val = mi_b - gk
    return np.where(val > RI_SLACK, val, 0.0)
