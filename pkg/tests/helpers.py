"""Independent oracles and random-instance generators for the test suite."""

import itertools
import math
from collections import defaultdict

import numpy as np

from renyi_ib.prob import JointDistribution


def random_joint(rng, ny, nx, sparsity=0.0):
    """Dirichlet joint; with ``sparsity`` > 0 some cells are zeroed (columns kept alive)."""
    m = rng.dirichlet(np.ones(ny * nx)).reshape(ny, nx)
    if sparsity:
        mask = rng.random((ny, nx)) < sparsity
        mask[rng.integers(0, ny, size=nx), np.arange(nx)] = False
        m = np.where(mask, 0.0, m)
        m /= m.sum()
    return JointDistribution(m)


def acceptance_joints(n=50, seed=20240611):
    """The frozen instance family for the solver and bound acceptance checks."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        ny, nx = int(rng.integers(2, 5)), int(rng.integers(2, 6))
        out.append(JointDistribution(rng.dirichlet(np.ones(ny * nx)).reshape(ny, nx)))
    return out


def point_by_loops(matrix, table, alpha):
    """(H_alpha(W), I(Y;W)) with plain Python loops over the cells."""
    ny, nx = len(matrix), len(matrix[0])
    p_yw = defaultdict(float)
    p_w = defaultdict(float)
    p_y = [sum(row) for row in matrix]
    for y in range(ny):
        for x in range(nx):
            v = matrix[y][x]
            p_yw[y, table[x]] += v
            p_w[table[x]] += v
    if alpha == 1.0:
        h = -sum(v * math.log2(v) for v in p_w.values() if v > 0)
    else:
        h = math.log2(sum(v**alpha for v in p_w.values() if v > 0)) / (1 - alpha)
    i = sum(v * math.log2(v / (p_y[y] * p_w[w])) for (y, w), v in p_yw.items() if v > 0)
    return max(h, 0.0), max(i, 0.0)


def all_points_by_loops(joint, alpha, M):
    m = joint.matrix.tolist()
    return [(t, point_by_loops(m, t, alpha)) for t in itertools.product(range(M), repeat=joint.x_size)]


def two_point_envelope(points, gamma):
    """Concave envelope of the staircase of ``points`` at ``gamma``, straight from
    its definition: best convex combination of two points whose costs bracket
    ``gamma`` (a single point with cost <= gamma also counts)."""
    tol = 1e-12
    best = max((e for g, e in points if g <= gamma + tol), default=-math.inf)
    left = [(g, e) for g, e in points if g <= gamma + tol]
    right = [(g, e) for g, e in points if g > gamma + tol]
    for g1, e1 in left:
        for g2, e2 in right:
            lam = (g2 - gamma) / (g2 - g1)
            best = max(best, lam * e1 + (1 - lam) * e2)
    return best
