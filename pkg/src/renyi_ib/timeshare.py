"""Time-sharing codes that realize points of the trade-off envelope.

A block of ``n`` i.i.d. source symbols is split into at most two runs; every
position in run ``k`` is mapped symbol-wise by the ``k``-th witness map.  The
block averages of ``H_alpha(W_i)`` and ``I(Y_i; W_i)`` are then the weighted
averages of the two witnesses' points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bottleneck import DeterministicMap, induce
from .errors import ValidationError
from .frontier import POINT_TOL, Envelope, evaluate_envelope
from .prob import JointDistribution, check_order, mutual_information, renyi_entropy


@dataclass(frozen=True)
class Segment:
    map: DeterministicMap
    weight: float
    gamma: float
    eta: float


@dataclass(frozen=True)
class TimeSharePlan:
    """At most two witness maps with weights summing to one.

    ``budget`` is the requested cost; ``target_gamma`` is the cost actually
    spent, which is smaller once the budget passes the flat point.
    """

    segments: tuple[Segment, ...]
    target_gamma: float
    target_eta: float
    budget: float

    def __post_init__(self) -> None:
        if not 1 <= len(self.segments) <= 2:
            raise ValidationError("a time-sharing plan has one or two segments")
        if abs(sum(s.weight for s in self.segments) - 1.0) > 1e-12:
            raise ValidationError("segment weights must sum to 1")

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(s.weight for s in self.segments)


def plan(e: Envelope, gamma: float) -> TimeSharePlan:
    """Mix the envelope vertices around ``gamma``.

    Past the flat point the flat-point witness alone suffices; on a vertex the
    vertex witness alone; otherwise the two neighbouring vertices are mixed
    with ``lambda * gamma_1 + (1 - lambda) * gamma_2 = gamma``.
    """
    if gamma < 0 or math.isnan(gamma):
        raise ValidationError(f"gamma must be non-negative, got {gamma}")
    vs = e.vertices
    if any(v.witness is None for v in vs):
        raise ValidationError("envelope vertices need witness maps to build a code")
    target_eta = float(evaluate_envelope(e, gamma))

    def single(v) -> TimeSharePlan:
        return TimeSharePlan((Segment(v.witness, 1.0, v.gamma, v.eta),), v.gamma, v.eta, gamma)

    if gamma >= e.flat_start - POINT_TOL:
        return single(vs[-1])
    for v in vs:
        if abs(v.gamma - gamma) <= POINT_TOL:
            return single(v)
    k = int(np.searchsorted(e.gammas, gamma)) - 1
    a, b = vs[k], vs[k + 1]
    lam = (b.gamma - gamma) / (b.gamma - a.gamma)
    segs = (Segment(a.witness, lam, a.gamma, a.eta), Segment(b.witness, 1.0 - lam, b.gamma, b.eta))
    return TimeSharePlan(segs, lam * a.gamma + (1 - lam) * b.gamma, target_eta, gamma)


@dataclass(frozen=True)
class SymbolwiseCode:
    """Length-``n`` code given as consecutive runs ``(map, run_length)``."""

    runs: tuple[tuple[DeterministicMap, int], ...]

    def __post_init__(self) -> None:
        if any(length < 0 for _, length in self.runs) or self.n < 1:
            raise ValidationError("run lengths must be non-negative with a positive total")

    @property
    def n(self) -> int:
        return sum(length for _, length in self.runs)

    def per_position_map(self, i: int) -> DeterministicMap:
        """Map used at zero-based position ``i``."""
        if not 0 <= i < self.n:
            raise IndexError(i)
        for g, length in self.runs:
            if i < length:
                return g
            i -= length
        raise AssertionError("unreachable")

    @classmethod
    def from_maps(cls, maps: Sequence[DeterministicMap]) -> SymbolwiseCode:
        return cls(tuple((g, 1) for g in maps))

    def apply(self, xs: Sequence[int]) -> np.ndarray:
        """Encode a length-``n`` source block symbol by symbol."""
        xs = np.asarray(xs)
        if xs.size != self.n:
            raise ValidationError(f"block has {xs.size} symbols, code length is {self.n}")
        out = np.empty(self.n, dtype=np.intp)
        start = 0
        for g, length in self.runs:
            out[start:start + length] = g.as_array()[xs[start:start + length]]
            start += length
        return out


def realize(p: TimeSharePlan, n: int) -> SymbolwiseCode:
    """First ``round(lambda_1 * n)`` positions use segment 1, the rest segment 2."""
    if n < 1:
        raise ValidationError(f"block length must be positive, got {n}")
    if len(p.segments) == 1:
        return SymbolwiseCode(((p.segments[0].map, n),))
    n1 = min(max(math.floor(p.segments[0].weight * n + 0.5), 0), n)
    return SymbolwiseCode(((p.segments[0].map, n1), (p.segments[1].map, n - n1)))


def evaluate(c: SymbolwiseCode, j: JointDistribution, alpha: float) -> tuple[float, float]:
    """Exact block averages ``(gamma_n, eta_n)`` for an i.i.d. source."""
    alpha = check_order(alpha)
    gamma = eta = 0.0
    for g, length in c.runs:
        if length == 0:
            continue
        s = induce(j, g, alpha)
        gamma += length * s.renyi_cost
        eta += length * s.relevance
    return gamma / c.n, eta / c.n


def simulate(c: SymbolwiseCode, j: JointDistribution, alpha: float, seed: int | None = None) -> tuple[float, float]:
    """Monte Carlo plug-in estimate of ``(gamma_n, eta_n)``.

    Draws one i.i.d. block of ``(Y, X)`` pairs, encodes it, and estimates each
    run's ``H_alpha(W)`` and ``I(Y; W)`` from the run's empirical joint of
    ``(Y, W)``; runs are weighted by length.
    """
    alpha = check_order(alpha)
    rng = np.random.default_rng(seed)
    flat = rng.choice(j.matrix.size, size=c.n, p=j.matrix.ravel())
    ys, xs = np.divmod(flat, j.x_size)
    ws = c.apply(xs)
    gamma = eta = 0.0
    start = 0
    for g, length in c.runs:
        if length == 0:
            continue
        m_w = max(g.assignment) + 1
        counts = np.zeros((j.y_size, m_w))
        np.add.at(counts, (ys[start:start + length], ws[start:start + length]), 1.0)
        p_yw = counts / length
        gamma += length * renyi_entropy(p_yw.sum(axis=0), alpha)
        eta += length * mutual_information(p_yw)
        start += length
    return gamma / c.n, eta / c.n
