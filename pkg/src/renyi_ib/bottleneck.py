"""Channels ``P(W | X)`` and the quantities they induce under ``Y - X - W``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .prob import (
    NORMALIZATION_TOL,
    Distribution,
    JointDistribution,
    check_order,
    mutual_information,
    renyi_entropy,
)


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic ``|X| x M`` matrix of ``P(W = w | X = x)``."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.matrix, dtype=float)
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValidationError(f"channel must be |X| x M with M >= 1, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValidationError("channel contains non-finite entries")
        neg = np.argwhere(c < 0)
        if neg.size:
            x, w = (int(i) for i in neg[0])
            raise ValidationError(f"channel entry ({x}, {w}) is negative")
        rows = c.sum(axis=1)
        bad = np.flatnonzero(np.abs(rows - 1.0) > NORMALIZATION_TOL)
        if bad.size:
            x = int(bad[0])
            raise ValidationError(f"channel row x={x} must sum to 1 (sum={rows[x]:.6f})")
        c = c / rows[:, None]
        c.setflags(write=False)
        object.__setattr__(self, "matrix", c)

    @property
    def n_clusters(self) -> int:
        return int(self.matrix.shape[1])


@dataclass(frozen=True, order=True)
class DeterministicMap:
    """Hard assignment ``g: X -> {0, ..., M-1}`` stored as a tuple.

    Cluster indices are zero-based; text serialization shifts them to
    ``1..M``.  Ordering is lexicographic on the table.
    """

    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        a = tuple(int(w) for w in self.assignment)
        if not a:
            raise ValidationError("a deterministic map needs at least one symbol")
        if min(a) < 0:
            raise ValidationError(f"cluster indices must be non-negative, got {a}")
        object.__setattr__(self, "assignment", a)

    def __len__(self) -> int:
        return len(self.assignment)

    def __getitem__(self, x: int) -> int:
        return self.assignment[x]

    @classmethod
    def constant(cls, x_size: int) -> DeterministicMap:
        return cls((0,) * x_size)

    @classmethod
    def identity(cls, x_size: int) -> DeterministicMap:
        return cls(tuple(range(x_size)))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.intp)

    def relabel(self, perm: Sequence[int]) -> DeterministicMap:
        """Apply the cluster permutation ``w -> perm[w]``."""
        return DeterministicMap(tuple(int(perm[w]) for w in self.assignment))

    def to_string(self) -> str:
        """``'12211'`` style, 1-based; ``'-'`` separators once indices exceed 9."""
        labels = [str(w + 1) for w in self.assignment]
        return "".join(labels) if max(self.assignment) < 9 else "-".join(labels)

    @classmethod
    def from_string(cls, s: str) -> DeterministicMap:
        parts = s.split("-") if "-" in s else list(s)
        return cls(tuple(int(t) - 1 for t in parts))


def to_channel(m: DeterministicMap, M: int) -> Channel:
    """0/1 channel matrix of a deterministic map with ``M`` output symbols."""
    if M < 1:
        raise ValidationError(f"M must be positive, got {M}")
    a = m.as_array()
    if a.max() >= M:
        x = int(np.argmax(a >= M))
        raise ValidationError(f"symbol x={x} maps to cluster {a[x] + 1}, outside 1..{M}")
    c = np.zeros((a.size, M))
    c[np.arange(a.size), a] = 1.0
    return Channel(c)


@dataclass(frozen=True, eq=False)
class InducedSystem:
    """``P(W)``, ``P(Y, W)`` and the bottleneck coordinates for one channel.

    ``p_yw`` is a raw ``|Y| x M`` array because empty clusters leave zero
    columns.  Columns of ``p_y_given_w`` for empty clusters are NaN; use
    ``live`` to mask them.
    """

    joint: JointDistribution
    p_w: Distribution
    p_yw: np.ndarray
    p_y_given_w: np.ndarray
    relevance: float
    renyi_cost: float
    order: float

    @property
    def live(self) -> np.ndarray:
        return self.p_w.masses > 0

    @property
    def point(self) -> tuple[float, float]:
        """``(renyi_cost, relevance)``."""
        return self.renyi_cost, self.relevance


def induce(j: JointDistribution, c: Channel | DeterministicMap, alpha: float, M: int | None = None) -> InducedSystem:
    """Push the joint through ``c`` and evaluate ``(H_alpha(W), I(Y; W))``.

    A :class:`DeterministicMap` is accepted in place of a channel; ``M`` then
    defaults to ``max(assignment) + 1``.
    """
    alpha = check_order(alpha)
    if isinstance(c, DeterministicMap):
        c = to_channel(c, M if M is not None else max(c.assignment) + 1)
    if c.matrix.shape[0] != j.x_size:
        raise ValidationError(f"channel has {c.matrix.shape[0]} rows but |X| = {j.x_size}")
    p_yw = j.matrix @ c.matrix
    p_w = p_yw.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(p_w > 0, p_yw / p_w, np.nan)
    p_yw.setflags(write=False)
    cond.setflags(write=False)
    pw = Distribution(p_w)
    return InducedSystem(
        joint=j,
        p_w=pw,
        p_yw=p_yw,
        p_y_given_w=cond,
        relevance=mutual_information(p_yw),
        renyi_cost=renyi_entropy(pw, alpha),
        order=alpha,
    )


def objective(s: InducedSystem, beta: float) -> float:
    """Lagrangian value ``beta * I(Y; W) - H_alpha(W)``."""
    if beta < 0:
        raise ValidationError(f"beta must be non-negative, got {beta}")
    return beta * s.relevance - s.renyi_cost
