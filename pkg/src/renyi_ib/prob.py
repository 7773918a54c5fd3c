"""Finite-distribution primitives: validated containers, entropies, divergences.

Every information quantity is reported in bits.  ``0 * log 0`` is taken as 0
and, for Rényi sums with ``alpha > 0``, ``0 ** alpha`` is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import xlogy

from .errors import ValidationError

NORMALIZATION_TOL = 1e-9
LN2 = math.log(2.0)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def check_order(alpha: float) -> float:
    """Validate a Rényi order; ``alpha == 1`` selects the Shannon limit."""
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0) or math.isnan(alpha):
        raise ValidationError(f"Renyi order must lie in (0, 1], got alpha={alpha!r}")
    return alpha


def _check_masses(a: np.ndarray, what: str) -> np.ndarray:
    if a.size == 0:
        raise ValidationError(f"{what} must contain at least one entry")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what} contains non-finite entries")
    neg = np.argwhere(a < 0)
    if neg.size:
        idx = tuple(int(i) for i in neg[0])
        raise ValidationError(f"{what} has a negative entry {a[idx]!r} at index {idx}")
    total = float(a.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"{what} must sum to 1 (sum={total:.6f})")
    return a / total


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over a finite alphabet, renormalized on construction."""

    masses: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        a = np.array(self.masses, dtype=float)
        if a.ndim != 1:
            raise ValidationError(f"distribution must be 1-D, got shape {a.shape}")
        object.__setattr__(self, "masses", _frozen(_check_masses(a, "distribution")))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != a.size:
                raise ValidationError("label count does not match alphabet size")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.masses.size)

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.masses))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint pmf of a hidden variable Y (rows) and an observation X (columns).

    Every column must carry positive mass so that ``P(Y | X = x)`` is defined
    for all ``x``.
    """

    matrix: np.ndarray
    y_labels: tuple[str, ...] | None = None
    x_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValidationError(f"joint must be a 2-D |Y| x |X| matrix, got shape {m.shape}")
        m = _check_masses(m, "joint")
        empty = np.flatnonzero(m.sum(axis=0) <= 0)
        if empty.size:
            raise ValidationError(f"column x={int(empty[0])} of the joint has zero mass")
        object.__setattr__(self, "matrix", _frozen(m))
        for name, size in (("y_labels", m.shape[0]), ("x_labels", m.shape[1])):
            labels = getattr(self, name)
            if labels is None:
                continue
            labels = tuple(str(s) for s in labels)
            if len(labels) != size:
                raise ValidationError(f"{name} has {len(labels)} entries, expected {size}")
            object.__setattr__(self, name, labels)

    @property
    def y_size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def x_size(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def p_x(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    @property
    def p_y(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def p_y_given_x(self) -> np.ndarray:
        """Row ``x`` holds ``P(Y | X = x)``; shape ``(|X|, |Y|)``."""
        return (self.matrix / self.p_x).T

    def marginal_x(self) -> Distribution:
        return Distribution(self.p_x, self.x_labels)

    def marginal_y(self) -> Distribution:
        return Distribution(self.p_y, self.y_labels)


def _masses(p) -> np.ndarray:
    return p.masses if isinstance(p, Distribution) else np.asarray(p, dtype=float)


def entropy_bits(p: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shannon entropy along ``axis`` of an unchecked non-negative array."""
    return -xlogy(p, p).sum(axis=axis) / LN2


def renyi_bits(p: np.ndarray, alpha: float, axis: int = -1) -> np.ndarray:
    """Rényi entropy along ``axis`` of an unchecked array; no order validation."""
    if alpha == 1.0:
        return np.maximum(entropy_bits(p, axis=axis), 0.0)
    s = np.power(p, alpha).sum(axis=axis)
    return np.maximum(np.log2(s) / (1.0 - alpha), 0.0)


def shannon_entropy(p: Distribution | Sequence[float]) -> float:
    """Shannon entropy in bits."""
    return max(float(entropy_bits(_masses(p))), 0.0)


def renyi_entropy(p: Distribution | Sequence[float], alpha: float) -> float:
    """Rényi entropy of order ``alpha`` in bits.

    Parameters
    ----------
    p : Distribution or array_like
        Probability vector.
    alpha : float
        Order in ``(0, 1]``.  ``alpha == 1`` returns the Shannon entropy.

    Returns
    -------
    float
        ``log2(sum(p ** alpha)) / (1 - alpha)``, which lies in
        ``[0, log2(len(p))]``.
    """
    alpha = check_order(alpha)
    if alpha == 1.0:
        return shannon_entropy(p)
    return float(renyi_bits(_masses(p), alpha))


def kl_divergence(p: Distribution | Sequence[float], q: Distribution | Sequence[float]) -> float:
    """``D(p || q)`` in bits; ``inf`` when ``p`` puts mass where ``q`` has none."""
    a, b = _masses(p), _masses(q)
    if a.shape != b.shape:
        raise ValidationError(f"alphabet sizes differ: {a.shape} vs {b.shape}")
    on = a > 0
    if np.any(b[on] <= 0):
        return math.inf
    return max(float(np.sum(a[on] * (np.log2(a[on]) - np.log2(b[on])))), 0.0)


def mutual_information(j: JointDistribution | np.ndarray) -> float:
    """``I = H(rows) + H(columns) - H(joint)`` in bits for a joint pmf matrix.

    Accepts a :class:`JointDistribution` or a raw non-negative matrix summing
    to one (zero columns allowed, e.g. ``P(Y, W)`` with empty clusters).
    """
    m = j.matrix if isinstance(j, JointDistribution) else np.asarray(j, dtype=float)
    h = entropy_bits(m.sum(axis=1)) + entropy_bits(m.sum(axis=0)) - entropy_bits(m.ravel())
    return max(float(h), 0.0)
