"""Brute-force reference implementations shared by the test suite.

These deliberately avoid the library's own vectorized code paths (slice
shifts, KD-trees): surfaces come from per-voxel neighbor lookups in a padded
table and distances from dense all-pairs matrices, so agreement is evidence
rather than tautology. Quadratic cost - keep masks small (<= ~1000 surface
voxels).
"""

import numpy as np


def oracle_surface(mask):
    """6-connectivity surface voxels, one padded-table lookup per voxel."""
    m = np.asarray(mask, bool)
    pad = np.zeros(tuple(s + 2 for s in m.shape), bool)
    pad[1:-1, 1:-1, 1:-1] = m
    pts = []
    for i, j, k in np.argwhere(m):
        neighbors = [
            pad[i, j + 1, k + 1],
            pad[i + 2, j + 1, k + 1],
            pad[i + 1, j, k + 1],
            pad[i + 1, j + 2, k + 1],
            pad[i + 1, j + 1, k],
            pad[i + 1, j + 1, k + 2],
        ]
        if not all(neighbors):
            pts.append((i, j, k))
    return np.array(pts, dtype=np.float64)


def oracle_hd95(a, b, spacing):
    """O(n^2) all-pairs 95th-percentile Hausdorff distance in mm."""
    sp = np.asarray(spacing, dtype=np.float64)
    sa = oracle_surface(a) * sp
    sb = oracle_surface(b) * sp
    d2 = ((sa[:, None, :] - sb[None, :, :]) ** 2).sum(-1)
    dab = np.sqrt(d2.min(axis=1))
    dba = np.sqrt(d2.min(axis=0))
    return max(np.percentile(dab, 95.0), np.percentile(dba, 95.0))


def random_blob(rng, shape):
    """Union of 1-3 random balls; guaranteed nonempty."""
    m = np.zeros(shape, bool)
    for _ in range(int(rng.integers(1, 4))):
        c = rng.integers(0, shape)
        r = int(rng.integers(1, 5))
        g = np.indices(shape)
        m |= ((g[0] - c[0]) ** 2 + (g[1] - c[1]) ** 2 + (g[2] - c[2]) ** 2) <= r * r
    if not m.any():
        m[tuple(rng.integers(0, shape))] = True
    return m
