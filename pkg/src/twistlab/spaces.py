"""Finitely supported block sequences and the quasinorms defined on them.

A block sequence of order ``n`` assigns to finitely many coordinates ``k`` a
vector ``x(k)`` in ``C^n`` written in tuple order ``(x_{n-1}(k), ..., x_0(k))``.
Two quasinorms live on such sequences: the Luxemburg functional of the
quasi-Young function ``phi_theta_n`` and the recursive twisted-sum quasinorm
built from the maps ``Omega^m``.  Both accept a :class:`BlockVector` or a
plain array of shape ``(..., K, n)`` whose leading axes are batch axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import UsageError
from .interpolation import InterpolationCouple, _build_b, phi_theta_inverse, phi_theta_n
from .orlicz import LUXEMBURG_RTOL, ordered_sum, solve_luxemburg

__all__ = [
    "BlockVector",
    "fenchel_orlicz_norm",
    "rochberg_quasinorm",
    "complexification_norm",
    "real_imag_split",
]

ANGLE_GRID = 720
ANGLE_TOL = 1e-12
# assumed upper bound on the quasi-convexity constant of phi_theta_n, n >= 2
QUASI_CONVEXITY_CEILING = 1e4


@dataclass(frozen=True, eq=False)
class BlockVector:
    """Canonical finitely supported sequence of ``C^n`` blocks.

    ``indices`` is strictly increasing and ``blocks[i]`` is the block at
    coordinate ``indices[i]`` in tuple order.  All-zero blocks are dropped on
    construction, so two equal sequences have identical fields.
    """

    n: int
    indices: np.ndarray
    blocks: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise UsageError("block order n must be at least 1")
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        blocks = np.asarray(self.blocks, dtype=complex)
        if blocks.size == 0:
            blocks = blocks.reshape(0, n)
        if blocks.ndim != 2 or blocks.shape != (idx.size, n):
            raise UsageError(f"expected {idx.size} blocks of length {n}, got shape {blocks.shape}")
        if np.any(idx < 0):
            raise UsageError("coordinates must be nonnegative")
        if idx.size != np.unique(idx).size:
            raise UsageError("duplicate coordinates")
        order = np.argsort(idx, kind="stable")
        keep = np.any(blocks[order] != 0, axis=1)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "indices", idx[order][keep])
        object.__setattr__(self, "blocks", blocks[order][keep])

    @classmethod
    def zero(cls, n: int) -> "BlockVector":
        return cls(n, np.zeros(0, dtype=np.int64), np.zeros((0, n), dtype=complex))

    @classmethod
    def from_dense(cls, blocks) -> "BlockVector":
        """From an array of shape ``(K, n)``; row ``k`` is coordinate ``k``."""
        blocks = np.asarray(blocks, dtype=complex)
        if blocks.ndim != 2:
            raise UsageError("dense block arrays have shape (K, n)")
        return cls(blocks.shape[1], np.arange(blocks.shape[0]), blocks)

    @classmethod
    def from_components(cls, *components) -> "BlockVector":
        """From sequences ``x_{n-1}, ..., x_0`` given as equal-length arrays."""
        comps = [np.asarray(c, dtype=complex).reshape(-1) for c in components]
        if len({c.size for c in comps}) > 1:
            raise UsageError("component sequences must have equal length")
        return cls.from_dense(np.stack(comps, axis=-1))

    @property
    def support(self) -> tuple:
        return tuple(int(k) for k in self.indices)

    def component(self, j: int) -> np.ndarray:
        """The sequence ``x_j`` over the support (``0 <= j < n``)."""
        if not 0 <= j < self.n:
            raise UsageError(f"component index {j} outside 0..{self.n - 1}")
        return self.blocks[:, self.n - 1 - j]

    def dense(self, length: int | None = None) -> np.ndarray:
        size = int(self.indices[-1]) + 1 if self.indices.size else 0
        length = size if length is None else length
        if length < size:
            raise UsageError("dense length is shorter than the support")
        out = np.zeros((length, self.n), dtype=complex)
        out[self.indices] = self.blocks
        return out

    def __add__(self, other: "BlockVector") -> "BlockVector":
        if not isinstance(other, BlockVector):
            return NotImplemented
        if other.n != self.n:
            raise UsageError("cannot add block vectors of different order")
        length = max(self.dense().shape[0], other.dense().shape[0])
        return BlockVector.from_dense(self.dense(length) + other.dense(length))

    def __mul__(self, lam) -> "BlockVector":
        return BlockVector(self.n, self.indices, complex(lam) * self.blocks)

    __rmul__ = __mul__

    def __neg__(self) -> "BlockVector":
        return self * -1

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, BlockVector):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.blocks, other.blocks))

    def __repr__(self):
        return f"BlockVector(n={self.n}, support={self.support})"


def _block_array(n: int, v) -> np.ndarray:
    blocks = v.blocks if isinstance(v, BlockVector) else v
    if isinstance(v, BlockVector) and v.n != n:
        raise UsageError(f"block vector has order {v.n}, expected {n}")
    blocks = np.asarray(blocks, dtype=complex)
    if blocks.ndim < 2 or blocks.shape[-1] != n:
        raise UsageError(f"expected an array of shape (..., K, {n})")
    return blocks


def _unbatch(out, lead):
    return float(out[0]) if not lead else out.reshape(lead)


def fenchel_orlicz_norm(couple: InterpolationCouple, n: int, v, *,
                        rtol: float = LUXEMBURG_RTOL):
    """Luxemburg functional of ``phi_theta_n`` on a block sequence.

    ``phi_theta_n`` is not homogeneous, so every trial radius evaluates it
    afresh on ``x / rho``.  For ``n >= 2`` the radius search assumes the
    quasi-convexity constant is at most ``QUASI_CONVEXITY_CEILING``.
    """
    blocks = _block_array(n, v)
    lead = blocks.shape[:-2]
    flat = blocks.reshape((int(np.prod(lead, dtype=int)),) + blocks.shape[-2:])
    if flat.shape[1] == 0:
        return _unbatch(np.zeros(flat.shape[0]), lead)

    def modular(rho, rows):
        return ordered_sum(phi_theta_n(couple, flat[rows] / rho[:, None, None]))

    unit = float(phi_theta_inverse(couple, 1.0))
    scale = np.abs(flat).max(axis=(1, 2)) / unit
    # phi_theta_n is only quasi-convex for n >= 2, so the modular may cross one
    # several times; the scan finds the smallest crossing
    ceiling = None if n == 1 else QUASI_CONVEXITY_CEILING
    return _unbatch(solve_luxemburg(modular, scale, rtol=rtol, ceiling=ceiling), lead)


def rochberg_quasinorm(couple: InterpolationCouple, n: int, v):
    """``sum_l ||x_l - Omega^l(x_{l-1}, ..., x_0)||_{phi_theta}`` (``Omega^0 = 0``).

    This unrolls the recursive twisted-sum quasinorm: each level adds the
    norm of the new block minus the map applied to the blocks below it.
    """
    blocks = _block_array(n, v)
    if blocks.shape[-2] == 0:
        return _unbatch(np.zeros(int(np.prod(blocks.shape[:-2], dtype=int))), blocks.shape[:-2])
    _, norms = _build_b(couple, blocks[..., ::-1], max(n - 1, 1))
    total = norms[0]
    for term in norms[1:]:
        total = total + term
    total = np.asarray(total, dtype=float)
    return float(total) if total.ndim == 0 else total


def _golden_max(f: Callable, lo: float, hi: float, tol: float) -> tuple:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def complexification_norm(norm_fn: Callable, x, y, grid_size: int = ANGLE_GRID,
                          vectorized: bool = False) -> float:
    """``sup_s ||cos(s) x + sin(s) y||`` over ``s`` in ``[0, 2 pi)``.

    A uniform grid locates the maximum, which golden-section search then
    polishes inside the neighbouring grid cells.  With ``vectorized``,
    ``norm_fn`` is called once on all grid vectors stacked along axis 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise UsageError("x and y must have the same shape")
    s = 2.0 * np.pi * np.arange(grid_size) / grid_size
    mix = np.cos(s)[:, None] * x.reshape(1, -1) + np.sin(s)[:, None] * y.reshape(1, -1)
    if vectorized:
        values = np.asarray(norm_fn(mix), dtype=float)
    else:
        values = np.array([norm_fn(row) for row in mix], dtype=float)
    k = int(np.argmax(values))
    best = float(values[k])
    if not np.any(y):
        return best
    step = 2.0 * np.pi / grid_size

    def f(angle):
        return float(norm_fn(np.cos(angle) * x + np.sin(angle) * y))

    _, polished = _golden_max(f, s[k] - step, s[k] + step, ANGLE_TOL)
    return max(best, polished)


def real_imag_split(v: BlockVector) -> tuple:
    """Entrywise real and imaginary parts, both as block vectors."""
    return (BlockVector(v.n, v.indices, v.blocks.real),
            BlockVector(v.n, v.indices, v.blocks.imag))
