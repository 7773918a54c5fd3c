"""Instances whose Shannon trade-off curve is known in closed form.

* ``omega``: the outer bound ``min(gamma, I(Y; X))``.
* Function of the source, ``Y = f(X)``; the curve equals ``omega`` once ``M >= |X|``.
* Block-diagonal joints with constant mass per block; the curve
  equals ``omega`` once ``M >= K``, witnessed by the block-index map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Sequence

import numpy as np

from .bottleneck import DeterministicMap
from .errors import ValidationError
from .prob import Distribution, JointDistribution


def omega(gamma: float, i_yx: float) -> float:
    """Outer bound on every trade-off curve: ``min(gamma, I(Y; X))``."""
    if gamma < 0 or i_yx < 0:
        raise ValidationError(f"omega needs non-negative arguments, got ({gamma}, {i_yx})")
    return min(gamma, i_yx)


def example1_joint(f: Callable[[int], Hashable] | Sequence[Hashable], p_x: Distribution | Sequence[float]) -> JointDistribution:
    """Joint of ``(f(X), X)``; ``Y``'s alphabet is the image of ``f`` in first-seen order."""
    px = p_x.masses if isinstance(p_x, Distribution) else Distribution(p_x).masses
    if np.any(px <= 0):
        raise ValidationError("Y = f(X) instances need a strictly positive P_X")
    image = [f(x) for x in range(px.size)] if callable(f) else list(f)
    if len(image) != px.size:
        raise ValidationError("f must assign a value to every x")
    ys = list(dict.fromkeys(image))
    m = np.zeros((len(ys), px.size))
    for x, y in enumerate(image):
        m[ys.index(y), x] = px[x]
    return JointDistribution(m, y_labels=[str(y) for y in ys])


@dataclass(frozen=True)
class BlockDiagonalSpec:
    """``K`` disjoint rectangular blocks ``X_k x Y_k``, each cell of mass ``p_k``."""

    block_x_sizes: tuple[int, ...]
    block_y_sizes: tuple[int, ...]
    p: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        xs, ys = tuple(int(s) for s in self.block_x_sizes), tuple(int(s) for s in self.block_y_sizes)
        p = tuple(Fraction(v) for v in self.p)
        if not (len(xs) == len(ys) == len(p)) or not xs:
            raise ValidationError("block sizes and masses must be non-empty and of equal length")
        if min(xs) < 1 or min(ys) < 1:
            raise ValidationError("every block needs at least one x and one y")
        if min(p) <= 0:
            raise ValidationError("block masses must be positive")
        total = sum(a * b * q for a, b, q in zip(xs, ys, p))
        if abs(float(total) - 1.0) > 1e-12:
            raise ValidationError(f"blocks must carry total mass 1 (sum={float(total):.6f})")
        object.__setattr__(self, "block_x_sizes", xs)
        object.__setattr__(self, "block_y_sizes", ys)
        object.__setattr__(self, "p", p)

    @property
    def K(self) -> int:
        return len(self.p)

    @property
    def s(self) -> tuple[Fraction, ...]:
        """Block masses ``s_k = |X_k| |Y_k| p_k``."""
        return tuple(a * b * q for a, b, q in zip(self.block_x_sizes, self.block_y_sizes, self.p))

    @classmethod
    def from_block_masses(cls, x_sizes: Sequence[int], y_sizes: Sequence[int], s: Sequence) -> BlockDiagonalSpec:
        s = [Fraction(v) for v in s]
        return cls(tuple(x_sizes), tuple(y_sizes), tuple(v / (a * b) for v, a, b in zip(s, x_sizes, y_sizes)))

    def exact_matrix(self) -> list[list[Fraction]]:
        ny, nx = sum(self.block_y_sizes), sum(self.block_x_sizes)
        m = [[Fraction(0)] * nx for _ in range(ny)]
        y0 = x0 = 0
        for a, b, q in zip(self.block_x_sizes, self.block_y_sizes, self.p):
            for y in range(y0, y0 + b):
                for x in range(x0, x0 + a):
                    m[y][x] = q
            x0 += a
            y0 += b
        return m


@dataclass(frozen=True)
class CanonicalLabels:
    """Block indices ``f1`` on X and ``f2`` on Y (zero-based)."""

    f1: tuple[int, ...]
    f2: tuple[int, ...]

    @property
    def K(self) -> int:
        return max(self.f1) + 1


def example2_joint(spec: BlockDiagonalSpec) -> tuple[JointDistribution, CanonicalLabels]:
    m = np.array([[float(v) for v in row] for row in spec.exact_matrix()])
    f1 = tuple(k for k, a in enumerate(spec.block_x_sizes) for _ in range(a))
    f2 = tuple(k for k, b in enumerate(spec.block_y_sizes) for _ in range(b))
    return JointDistribution(m), CanonicalLabels(f1, f2)


def block_information(spec: BlockDiagonalSpec) -> float:
    """``I(Y; X) = -sum_k s_k log2 s_k`` for a block-diagonal joint."""
    s = np.array([float(v) for v in spec.s])
    return float(-np.sum(s * np.log2(s)))


def canonical_map(labels: CanonicalLabels, M: int) -> DeterministicMap:
    """``g(x) = f1(x)``, i.e. ``h o f1`` with ``h`` the identity into ``1..M``."""
    if M < labels.K:
        raise ValidationError(f"the canonical map needs M >= K = {labels.K}, got M={M}")
    return DeterministicMap(labels.f1)


def example1_labels(f: Callable[[int], Hashable] | Sequence[Hashable], x_size: int) -> CanonicalLabels:
    """Labels for ``Y = f(X)``: every image value is its own block."""
    image = [f(x) for x in range(x_size)] if callable(f) else list(f)
    ys = list(dict.fromkeys(image))
    return CanonicalLabels(tuple(ys.index(y) for y in image), tuple(range(len(ys))))


def exact_cluster_masses(matrix: Sequence[Sequence[Fraction]], g: DeterministicMap, M: int) -> list[Fraction]:
    """``P_W`` in exact rational arithmetic for a map applied to a rational joint."""
    out = [Fraction(0)] * M
    for row in matrix:
        for x, v in enumerate(row):
            out[g[x]] += v
    return out


TABLE1A_SPEC = BlockDiagonalSpec((1, 2, 2), (1, 2, 1), (Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)))


def table1a() -> JointDistribution:
    """The 4 x 5 block-diagonal joint with ``H(X) = 2.25`` and ``I(Y; X) = 1.5``."""
    j, _ = example2_joint(TABLE1A_SPEC)
    return JointDistribution(
        j.matrix,
        y_labels=[str(i) for i in range(1, 5)],
        x_labels=[str(i) for i in range(1, 6)],
    )
