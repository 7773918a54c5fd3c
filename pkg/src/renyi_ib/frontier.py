"""Exact trade-off frontier by exhausting every deterministic map.

For fixed ``beta`` the Lagrangian ``beta * I(Y; W) - H_alpha(W)`` is convex
in the channel, so each supporting line of the achievable region touches it
at a 0/1 channel.  The concave hull of the deterministic points is therefore
the whole optimal trade-off curve.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .bottleneck import DeterministicMap
from .errors import InfeasibleError, ValidationError
from .prob import JointDistribution, check_order, entropy_bits, renyi_bits

ENUMERATION_CAP = 10**7
POINT_TOL = 1e-12
_CHUNK = 1 << 16


@dataclass(frozen=True)
class TradeoffPoint:
    gamma: float
    eta: float
    witness: DeterministicMap | None = None

    def __post_init__(self) -> None:
        if self.gamma < 0 or self.eta < 0:
            raise ValidationError(f"trade-off coordinates must be non-negative: ({self.gamma}, {self.eta})")

    @property
    def xy(self) -> tuple[float, float]:
        return self.gamma, self.eta


@dataclass(frozen=True)
class Envelope:
    """Piecewise-linear least concave majorant, flat after its last vertex.

    ``vertices`` start at ``(0, 0)`` and increase strictly in both
    coordinates with strictly decreasing slopes.
    """

    vertices: tuple[TradeoffPoint, ...]

    @property
    def flat_value(self) -> float:
        return self.vertices[-1].eta

    @property
    def flat_start(self) -> float:
        return self.vertices[-1].gamma

    @property
    def gammas(self) -> np.ndarray:
        return np.array([v.gamma for v in self.vertices])

    @property
    def etas(self) -> np.ndarray:
        return np.array([v.eta for v in self.vertices])

    def slopes(self) -> np.ndarray:
        return np.diff(self.etas) / np.diff(self.gammas)

    def __call__(self, gamma):
        return evaluate_envelope(self, gamma)


def map_count(x_size: int, M: int) -> int:
    return M**x_size


def _check_feasible(x_size: int, M: int) -> int:
    if x_size < 1 or M < 1:
        raise ValidationError(f"need |X| >= 1 and M >= 1, got |X|={x_size}, M={M}")
    count = map_count(x_size, M)
    if count > ENUMERATION_CAP:
        raise InfeasibleError(
            f"M^|X| = {M}^{x_size} = {count} deterministic maps exceeds the cap of {ENUMERATION_CAP}"
        )
    return count


def enumerate_deterministic(x_size: int, M: int) -> Iterator[DeterministicMap]:
    """Yield all ``M ** x_size`` maps in lexicographic order."""
    _check_feasible(x_size, M)
    for table in itertools.product(range(M), repeat=x_size):
        yield DeterministicMap(table)


def _decode(indices: np.ndarray, x_size: int, M: int) -> np.ndarray:
    # most significant digit is x = 0, so index order is lexicographic order
    powers = M ** np.arange(x_size - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers) % M


def evaluate_maps(j: JointDistribution, codes: np.ndarray, M: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(H_alpha(W), I(Y; W))`` for a batch of assignment rows."""
    codes = np.asarray(codes, dtype=np.intp)
    n = codes.shape[0]
    rows = np.arange(n)
    p_yw = np.zeros((n, j.y_size, M))
    for x in range(j.x_size):
        p_yw[rows, :, codes[:, x]] += j.matrix[:, x]
    p_w = p_yw.sum(axis=1)
    p_y = p_yw.sum(axis=2)
    gamma = renyi_bits(p_w, alpha, axis=1)
    eta = entropy_bits(p_y, axis=1) + entropy_bits(p_w, axis=1) - entropy_bits(p_yw.reshape(n, -1), axis=1)
    return gamma, np.maximum(eta, 0.0)


def _chunk_points(args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j, alpha, M, start, stop = args
    idx = np.arange(start, stop, dtype=np.int64)
    gamma, eta = evaluate_maps(j, _decode(idx, j.x_size, M), M, alpha)
    keys = np.stack([np.round(gamma / POINT_TOL), np.round(eta / POINT_TOL)], axis=1)
    _, first = np.unique(keys, axis=0, return_index=True)
    first.sort()
    return idx[first], gamma[first], eta[first]


def brute_force_points(j: JointDistribution, alpha: float, M: int, jobs: int = 1) -> list[TradeoffPoint]:
    """One trade-off point per deterministic map, duplicates collapsed.

    Points equal up to ``POINT_TOL`` are merged and keep the lexicographically
    smallest witness.  The result is sorted by ``(gamma, eta)``.
    """
    alpha = check_order(alpha)
    count = _check_feasible(j.x_size, M)
    tasks = [(j, alpha, M, s, min(s + _CHUNK, count)) for s in range(0, count, _CHUNK)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_chunk_points, tasks))
    else:
        parts = [_chunk_points(t) for t in tasks]
    idx = np.concatenate([p[0] for p in parts])
    gamma = np.concatenate([p[1] for p in parts])
    eta = np.concatenate([p[2] for p in parts])
    keys = np.stack([np.round(gamma / POINT_TOL), np.round(eta / POINT_TOL)], axis=1)
    _, first = np.unique(keys, axis=0, return_index=True)
    codes = _decode(idx[first], j.x_size, M)
    pts = [
        TradeoffPoint(float(g), float(e), DeterministicMap(tuple(c)))
        for g, e, c in zip(gamma[first], eta[first], codes.tolist())
    ]
    pts.sort(key=lambda p: (p.gamma, p.eta))
    return pts


def _witness_key(p: TradeoffPoint) -> tuple:
    return (0, p.witness.assignment) if p.witness is not None else (1, ())


def _near(a: TradeoffPoint, b: TradeoffPoint) -> bool:
    return abs(a.gamma - b.gamma) <= POINT_TOL and abs(a.eta - b.eta) <= POINT_TOL


def pareto_staircase(points: Iterable[TradeoffPoint]) -> list[TradeoffPoint]:
    """Non-dominated points, sorted with strictly increasing gamma and eta."""
    pts = sorted(points, key=lambda p: (p.gamma, -p.eta, _witness_key(p)))
    stair: list[TradeoffPoint] = []
    for p in pts:
        if stair and p.eta <= stair[-1].eta + POINT_TOL:
            continue
        if stair and p.gamma <= stair[-1].gamma + POINT_TOL:
            stair.pop()
        stair.append(p)
    return stair


def staircase_value(points: Sequence[TradeoffPoint], gamma: float) -> float:
    """Best relevance among points with cost at most ``gamma`` (no convexification)."""
    best = [p.eta for p in points if p.gamma <= gamma]
    return max(best) if best else math.nan


def upper_concave_envelope(points: Iterable[TradeoffPoint]) -> Envelope:
    """Least concave non-decreasing majorant of a point set containing ``(0, 0)``.

    Dominated points are dropped, then the upper hull is built by a monotone
    chain.  A middle point within ``POINT_TOL`` of a chord is treated as
    collinear and removed.  Each vertex keeps the lexicographically smallest
    witness among the points that coincide with it.
    """
    pts = list(points)
    if not pts:
        raise ValidationError("cannot build an envelope from an empty point set")
    if not any(p.gamma <= POINT_TOL and p.eta <= POINT_TOL for p in pts):
        raise ValidationError("point set must contain the trivial pair (0, 0)")
    stair = pareto_staircase(pts)

    hull: list[TradeoffPoint] = []
    for p in stair:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            lhs = (b.eta - a.eta) * (p.gamma - a.gamma)
            rhs = (p.eta - a.eta) * (b.gamma - a.gamma) + POINT_TOL * (p.gamma - a.gamma)
            if lhs > rhs:
                break
            hull.pop()
        hull.append(p)

    vertices = []
    for v in hull:
        ties = [p for p in pts if _near(p, v)]
        best = min(ties, key=_witness_key)
        vertices.append(TradeoffPoint(v.gamma, v.eta, best.witness))
    if vertices[0].gamma > POINT_TOL or vertices[0].eta > POINT_TOL:
        raise ValidationError("first envelope vertex is not the trivial pair (0, 0): a zero-cost point has positive relevance")
    vertices[0] = TradeoffPoint(0.0, 0.0, vertices[0].witness)
    return Envelope(tuple(vertices))


def evaluate_envelope(e: Envelope, gamma):
    """Linear interpolation between vertices, constant past ``flat_start``."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(np.isnan(g)):
        raise ValidationError(f"gamma must be non-negative, got {gamma!r}")
    out = np.interp(g, e.gammas, e.etas)
    return float(out) if out.ndim == 0 else out


def brute_force_envelope(j: JointDistribution, alpha: float, M: int, jobs: int = 1) -> Envelope:
    return upper_concave_envelope(brute_force_points(j, alpha, M, jobs=jobs))
