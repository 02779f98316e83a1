"""Hot loops of the sampled connectivity oracle.

Each kernel has a numba implementation and a numpy/scipy implementation with
identical results. The public names dispatch to one of them according to
:data:`convexcr._jit.USE_NUMBA`.
"""
import itertools

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ._jit import USE_NUMBA, njit

BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- halfspaces

@njit(cache=True)
def _halfspace_mask_nb(points, normals, offsets, eps):
    m, n = points.shape
    f = normals.shape[0]
    out = np.ones(m, dtype=np.bool_)
    for i in range(m):
        for k in range(f):
            s = 0.0
            for j in range(n):
                s += normals[k, j] * points[i, j]
            if s > offsets[k] + eps:
                out[i] = False
                break
    return out


def _halfspace_mask_np(points, normals, offsets, eps):
    return np.all(points @ normals.T <= offsets + eps, axis=1)


# ---------------------------------------------------------------- components

@njit(cache=True)
def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True)
def _union(parent, i, j):
    ri = _find(parent, i)
    rj = _find(parent, j)
    if ri != rj:
        if ri < rj:
            parent[rj] = ri
        else:
            parent[ri] = rj


@njit(cache=True)
def _close(points, i, j, thr2):
    d2 = 0.0
    for k in range(points.shape[1]):
        t = points[i, k] - points[j, k]
        d2 += t * t
    return d2 < thr2


@njit(cache=True)
def _relabel(parent):
    m = parent.shape[0]
    labels = np.empty(m, dtype=np.int64)
    remap = -np.ones(m, dtype=np.int64)
    count = 0
    for i in range(m):
        r = _find(parent, i)
        if remap[r] < 0:
            remap[r] = count
            count += 1
        labels[i] = remap[r]
    return labels, count


@njit(cache=True)
def _label_grid_nb(points, threshold, keys, deltas):
    # points hashed into cubic cells of side `threshold`; neighbours live in
    # the 3^n surrounding cells, of which only the forward half is scanned
    m = points.shape[0]
    parent = np.arange(m)
    thr2 = threshold * threshold
    order = np.argsort(keys, kind="mergesort")
    sk = keys[order]
    a = 0
    while a < m:
        b = a
        while b < m and sk[b] == sk[a]:
            b += 1
        for p in range(a, b):
            for q in range(p + 1, b):
                if _close(points, order[p], order[q], thr2):
                    _union(parent, order[p], order[q])
        for t in range(deltas.shape[0]):
            target = sk[a] + deltas[t]
            lo = np.searchsorted(sk, target)
            hi = lo
            while hi < m and sk[hi] == target:
                hi += 1
            for p in range(a, b):
                for q in range(lo, hi):
                    if _close(points, order[p], order[q], thr2):
                        _union(parent, order[p], order[q])
        a = b
    return _relabel(parent)


def _grid_keys(points, threshold):
    """Linear cell ids and forward neighbour offsets, or None on int64 overflow."""
    lo = points.min(axis=0)
    cells = np.floor((points - lo) / threshold).astype(np.int64) + 1
    sizes = cells.max(axis=0) + 2
    if np.prod(sizes.astype(float)) >= 2.0 ** 62:
        return None
    strides = np.cumprod(np.concatenate(([1], sizes[:-1]))).astype(np.int64)
    offsets = np.array(list(itertools.product((-1, 0, 1), repeat=points.shape[1])))
    deltas = offsets @ strides
    return cells @ strides, np.sort(deltas[deltas > 0])


def _label_components_nb(points, threshold):
    if points.shape[0] == 0:
        return np.empty(0, dtype=np.int64), 0
    if not threshold > 0:
        return np.arange(points.shape[0], dtype=np.int64), points.shape[0]
    grid = _grid_keys(points, threshold)
    if grid is None:
        return _label_components_np(points, threshold)
    labels, count = _label_grid_nb(points, float(threshold), *grid)
    return labels, int(count)


def _label_components_np(points, threshold):
    m = points.shape[0]
    if m == 0:
        return np.empty(0, dtype=np.int64), 0
    pairs = cKDTree(points).query_pairs(threshold, output_type="ndarray")
    if len(pairs):
        d = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1)
        pairs = pairs[d < threshold]
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(m, m))
    count, raw = connected_components(graph, directed=False)
    # relabel by first appearance so both backends agree label-for-label
    _, first = np.unique(raw, return_index=True)
    rank = np.empty(count, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(count)
    return rank[raw].astype(np.int64), int(count)


# ---------------------------------------------------------------- dispatch

def halfspace_mask(points, normals, offsets, eps=0.0):
    """Boolean mask of rows of `points` satisfying ``normals @ x <= offsets + eps``."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    normals = np.ascontiguousarray(normals, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    if USE_NUMBA:
        return _halfspace_mask_nb(points, normals, offsets, float(eps))
    return _halfspace_mask_np(points, normals, offsets, float(eps))


def label_components(points, threshold):
    """Connected components of the graph joining points closer than `threshold`.

    Returns
    -------
    labels : ndarray of int, shape (m,)
        Component index per point; components numbered by first appearance.
    count : int
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.shape[0] == 0:
        return np.empty(0, dtype=np.int64), 0
    if USE_NUMBA:
        labels, count = _label_components_nb(points, float(threshold))
        return labels, int(count)
    return _label_components_np(points, float(threshold))
