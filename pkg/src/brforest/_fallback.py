"""Pure-numpy versions of the kernels in ``_kernels.pyx``.

Same signatures and same first-occurrence cell order, so results agree with the
compiled path to within floating-point summation noise.
"""
import numpy as np


def _relabel(keys):
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return rank[inverse.ravel()], order.size


def cmi_sum(x, y, z):
    """Joint-weighted conditional mutual information I(x; y | z) in bits, unclamped."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    z = np.asarray(z, dtype=np.int64).reshape(x.shape[0], -1)
    n = x.shape[0]
    if n == 0:
        return 0.0
    kx = int(x.max()) + 1
    ky = int(y.max()) + 1

    z_id = np.zeros(n, dtype=np.int64)
    for c in range(z.shape[1]):
        width = int(z[:, c].max()) + 1
        z_id, _ = _relabel(z_id * width + z[:, c])
    xz_id, _ = _relabel(z_id * kx + x)
    yz_id, _ = _relabel(z_id * ky + y)
    xyz_id, kxyz = _relabel(xz_id * ky + y)

    nz = np.bincount(z_id)
    nxz = np.bincount(xz_id)
    nyz = np.bincount(yz_id)
    nxyz = np.bincount(xyz_id, minlength=kxyz)
    _, rep = np.unique(xyz_id, return_index=True)

    cnt = nxyz.astype(float)
    ratio = cnt * nz[z_id[rep]] / (nxz[xz_id[rep]].astype(float) * nyz[yz_id[rep]])
    return float(np.sum(cnt * np.log2(ratio))) / n


def route(feature, threshold, left, right, X):
    """Index of the leaf reached by every row of ``X`` in a flattened tree."""
    X = np.asarray(X, dtype=float)
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    active = feature[node] >= 0
    while active.any():
        idx = rows[active]
        cur = node[idx]
        go_left = X[idx, feature[cur]] <= threshold[cur]
        node[idx] = np.where(go_left, left[cur], right[cur])
        active = feature[node] >= 0
    return node
