"""Scalar Orlicz functions and Luxemburg norms of finite complex sequences.

Everything here is vectorised over numpy arrays.  The two root finders,
:func:`bisect_increasing` and :func:`solve_luxemburg`, update each element
only while its own bracket is still open, so a value never depends on which
other values happened to share the batch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .estimate import ConstantEstimate
from .exceptions import ConvergenceError, DomainError, UnsupportedOperation

__all__ = [
    "OrliczFunction",
    "Delta2Profile",
    "evaluate",
    "inverse",
    "luxemburg_norm",
    "estimate_delta2",
    "estimate_quasi_additivity",
    "estimate_scaling_constant",
    "delta2_profile",
    "bisect_increasing",
    "solve_luxemburg",
    "ordered_sum",
    "modulus_luxemburg_norm",
    "as_real",
]

KINDS = ("power", "power_log", "ess_sup", "monotone_table")

INVERSE_RTOL = 1e-13
LUXEMBURG_RTOL = 1e-12
MAX_BISECTIONS = 200
# 2**1100 overflows a double, so a bracket search that gets this far is lost.
MAX_BRACKET_STEPS = 1100
# log-grid density (points per octave) and batch width of the crossing scan
SCAN_PER_OCTAVE = 64
SCAN_CHUNK = 32


def as_real(x):
    """``x`` as a real array, keeping ``np.longdouble`` and using float64 otherwise."""
    arr = np.asarray(x)
    if arr.dtype == np.longdouble:
        return arr
    return arr.astype(float, copy=False)


def ordered_sum(values):
    """Sum over the last axis strictly left to right.

    ``np.sum`` uses pairwise blocking whose rounding depends on the length of
    the axis; zero padding would then perturb the result.  A running sum does
    not have that problem.
    """
    values = np.asarray(values)
    if values.shape[-1] == 0:
        return np.zeros(values.shape[:-1], dtype=values.dtype)
    return np.cumsum(values, axis=-1)[..., -1]


def _grow_bracket(func, start, target, keep_going, factor):
    """Multiply ``start`` by ``factor`` elementwise while ``keep_going(f, s)``."""
    t = start.copy()
    f = func(t)
    active = keep_going(f, target)
    steps = 0
    while active.any():
        idx = np.flatnonzero(active)
        with np.errstate(over="ignore"):
            t[idx] *= factor
        f_idx = func(t[idx])
        if np.isnan(f_idx).any():
            raise ConvergenceError("function returned NaN while bracketing",
                                   last_point=float(t[idx][np.isnan(f_idx)][0]))
        f[idx] = f_idx
        active[idx] = keep_going(f_idx, target[idx])
        steps += 1
        if steps > MAX_BRACKET_STEPS:
            raise ConvergenceError("could not bracket the root",
                                   steps=steps, last_point=float(t[idx][0]))
    return t


def bisect_increasing(func: Callable, target, *, rtol: float | None = None,
                      max_iter: int = MAX_BISECTIONS, start=1.0):
    """Solve ``func(t) = target`` for a nondecreasing ``func`` with ``func(0)=0``.

    The bracket is grown by doubling (or halving) from ``start`` (a scalar or
    an array broadcastable to ``target``); bisection then runs until the
    relative width is below ``rtol`` or the midpoint coincides with an
    endpoint in floating point.  Zero targets map to zero.

    ``rtol`` defaults to 1e-13 for float64 targets and to full resolution
    for ``np.longdouble`` targets, whose callers want the extra digits.
    """
    target = as_real(target)
    if rtol is None:
        rtol = 0.0 if target.dtype == np.longdouble else INVERSE_RTOL
    if np.any(target < 0) or np.isnan(target).any():
        raise DomainError("bisect_increasing needs nonnegative targets")
    flat = target.reshape(-1)
    out = np.zeros_like(flat)
    rows = np.flatnonzero(flat > 0)
    if rows.size:
        s = flat[rows]
        first = np.broadcast_to(np.asarray(start, dtype=target.dtype),
                                target.shape).reshape(-1)[rows]
        if np.any(first <= 0):
            raise DomainError("bisection must start from a positive point")
        up = func(first) < s
        lo = first.copy()
        hi = first.copy()
        if up.any():
            grown = _grow_bracket(func, first[up], s[up], lambda f, t: f < t, 2.0)
            hi[up] = grown
            lo[up] = grown / 2.0
        down = ~up
        if down.any():
            shrunk = _grow_bracket(func, first[down], s[down], lambda f, t: f > t, 0.5)
            lo[down] = shrunk
            hi[down] = np.minimum(shrunk * 2.0, first[down])
        out[rows] = _bisect(func, lo, hi, s, rtol, max_iter)
    if target.ndim == 0:
        return out[0]
    return out.reshape(target.shape)


def _bisect(func, lo, hi, s, rtol, max_iter):
    active = np.ones(lo.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        a, b = lo[idx], hi[idx]
        mid = 0.5 * (a + b)
        below = func(mid) < s[idx]
        lo[idx[below]] = mid[below]
        hi[idx[~below]] = mid[~below]
        width = hi[idx] - lo[idx]
        done = (width <= rtol * hi[idx]) | (mid <= a) | (mid >= b)
        active[idx[done]] = False
    else:
        if active.any():
            k = int(np.flatnonzero(active)[0])
            raise ConvergenceError("bisection did not converge",
                                   lo=float(lo[k]), hi=float(hi[k]), iterations=max_iter)
    return 0.5 * (lo + hi)


def solve_luxemburg(modular: Callable, scale, *, rtol: float = LUXEMBURG_RTOL,
                    max_iter: int = MAX_BISECTIONS, ceiling: float | None = None):
    """Batched ``inf{rho > 0 : modular(rho) <= 1}``.

    ``modular(rho, rows)`` must return the modular of batch items ``rows`` at
    radii ``rho`` (both 1-d, same length).  ``scale`` is a per-item starting
    guess; items with ``scale == 0`` are the zero vector and get norm 0.

    Without ``ceiling`` the modular is taken to be nonincreasing in ``rho``
    and the crossing inside a doubling bracket is returned.  A quasi-convex
    modular with constant ``C`` need not be monotone, but it cannot return
    below one at radii smaller than one where it exceeds ``C``.  Passing
    ``ceiling >= C`` makes the search halve ``rho`` until the modular exceeds
    ``ceiling`` and then walk a fine log grid upwards to the first feasible
    radius, so the smallest crossing is found up to the grid resolution.
    """
    scale = np.asarray(scale, dtype=float).reshape(-1)
    out = np.zeros_like(scale)
    rows = np.flatnonzero(scale > 0)
    if rows.size == 0:
        return out

    def bracket(start, which, factor, keep):
        rho = start.copy()
        active = np.ones(rho.shape, dtype=bool)
        steps = 0
        while active.any():
            idx = np.flatnonzero(active)
            m = modular(rho[idx], which[idx])
            if np.isnan(m).any():
                raise ConvergenceError("modular returned NaN", rho=float(rho[idx][0]))
            cont = keep(m)
            active[idx[~cont]] = False
            rho[idx[cont]] *= factor
            steps += 1
            if steps > MAX_BRACKET_STEPS:
                raise ConvergenceError("could not bracket the Luxemburg radius",
                                       rho=float(rho[idx][0]), steps=steps)
        return rho

    if ceiling is None:
        lo, hi = _doubling_bracket(modular, scale[rows], rows, bracket)
    else:
        low = bracket(scale[rows], rows, 0.5, lambda m: m <= ceiling)
        lo, hi = _scan_up(modular, low, rows)
    return _bisect_radius(modular, lo, hi, rows, out, rtol, max_iter)


def _doubling_bracket(modular, rho0, rows, bracket):
    feasible = modular(rho0, rows) <= 1.0
    lo = np.empty_like(rho0)
    hi = np.empty_like(rho0)
    if feasible.any():
        # halve until the modular exceeds one
        r = bracket(rho0[feasible], rows[feasible], 0.5, lambda m: m <= 1.0)
        lo[feasible] = r
        hi[feasible] = 2.0 * r
    if (~feasible).any():
        r = bracket(rho0[~feasible], rows[~feasible], 2.0, lambda m: m > 1.0)
        hi[~feasible] = r
        lo[~feasible] = 0.5 * r
    return lo, hi


def _scan_up(modular, low, rows):
    """First feasible point of the grid ``low * 2**(j / SCAN_PER_OCTAVE)``.

    Returns the grid cell ``(lo, hi)`` around it, with the modular above one at
    ``lo`` and at most one at ``hi``.
    """
    step = 2.0 ** (1.0 / SCAN_PER_OCTAVE)
    offsets = step ** np.arange(1, SCAN_CHUNK + 1)
    base = low.copy()
    lo, hi = np.empty_like(low), np.empty_like(low)
    active = np.arange(low.size)
    calls = 0
    while active.size:
        grid = base[active, None] * offsets
        m = modular(grid.ravel(), np.repeat(rows[active], SCAN_CHUNK)).reshape(grid.shape)
        if np.isnan(m).any():
            raise ConvergenceError("modular returned NaN", rho=float(grid[np.isnan(m)][0]))
        ok = m <= 1.0
        found = ok.any(axis=1)
        j = ok.argmax(axis=1)[found]
        prev = np.concatenate([base[active, None], grid], axis=1)[found]
        hi[active[found]] = grid[found, j]
        lo[active[found]] = prev[np.arange(j.size), j]
        base[active[~found]] = grid[~found, -1]
        active = active[~found]
        calls += 1
        if calls * SCAN_CHUNK > MAX_BRACKET_STEPS * SCAN_PER_OCTAVE:
            raise ConvergenceError("could not reach a feasible Luxemburg radius",
                                   rho=float(base[active][0]), steps=calls * SCAN_CHUNK)
    return lo, hi


def _bisect_radius(modular, lo, hi, rows, out, rtol, max_iter):
    active = np.ones(lo.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        a, b = lo[idx], hi[idx]
        mid = 0.5 * (a + b)
        ok = modular(mid, rows[idx]) <= 1.0
        hi[idx[ok]] = mid[ok]
        lo[idx[~ok]] = mid[~ok]
        done = (hi[idx] - lo[idx] <= rtol * hi[idx]) | (mid <= a) | (mid >= b)
        active[idx[done]] = False
    else:
        if active.any():
            k = int(np.flatnonzero(active)[0])
            raise ConvergenceError("Luxemburg bisection did not converge",
                                   lo=float(lo[k]), hi=float(hi[k]), iterations=max_iter)
    out[rows] = 0.5 * (lo + hi)
    return out


@dataclass(frozen=True)
class OrliczFunction:
    """A scalar Young function on ``[0, inf)``.

    Build instances with :meth:`power`, :meth:`power_log`, :meth:`ess_sup` or
    :meth:`from_table`.  ``ess_sup`` stands for the ell-infinity side of a
    couple: it has no forward evaluator and its inverse is identically one.
    """

    kind: str
    p: float = 1.0
    alpha: float = 0.0
    table: tuple = field(default=(), repr=False)
    delta2: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown Orlicz kind {self.kind!r}")
        if self.kind in ("power", "power_log") and not self.p >= 1:
            raise DomainError("power kinds need p >= 1")
        if self.kind == "power_log" and not self.alpha > 0:
            raise DomainError("power_log needs alpha > 0")
        if self.kind == "monotone_table":
            t, v = np.asarray(self.table, dtype=float).T
            if t[0] != 0 or v[0] != 0:
                raise DomainError("table must start at (0, 0)")
            if np.any(np.diff(t) <= 0) or np.any(np.diff(v) < 0):
                raise DomainError("table must be increasing in t and nondecreasing in value")

    @classmethod
    def power(cls, p: float) -> "OrliczFunction":
        return cls("power", p=float(p))

    @classmethod
    def power_log(cls, p: float, alpha: float) -> "OrliczFunction":
        return cls("power_log", p=float(p), alpha=float(alpha))

    @classmethod
    def ess_sup(cls) -> "OrliczFunction":
        return cls("ess_sup", delta2=True)

    @classmethod
    def from_table(cls, t, values, delta2: bool = False) -> "OrliczFunction":
        pairs = tuple((float(a), float(b)) for a, b in zip(t, values))
        return cls("monotone_table", table=pairs, delta2=delta2)

    @property
    def nondegenerate(self) -> bool:
        if self.kind == "ess_sup":
            return False
        if self.kind == "monotone_table":
            return bool(np.all(np.asarray(self.table)[1:, 1] > 0))
        return True

    @property
    def convexity_verified(self) -> bool:
        return self.kind in ("power", "power_log")

    def __call__(self, t):
        return evaluate(self, t)

    def inverse(self, s):
        return inverse(self, s)

    def describe(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "p": self.p}
        if self.kind == "power_log":
            return {"kind": "power_log", "p": self.p, "alpha": self.alpha}
        if self.kind == "ess_sup":
            return {"kind": "ess_sup"}
        t, v = np.asarray(self.table).T
        return {"kind": "monotone_table", "t": t.tolist(), "values": v.tolist(),
                "delta2": self.delta2}


def _forward(f: OrliczFunction, t: np.ndarray) -> np.ndarray:
    if f.kind == "power":
        return t ** f.p
    if f.kind == "power_log":
        return t ** f.p * np.log1p(t) ** f.alpha
    tt, vv = np.asarray(f.table).T
    out = np.interp(t, tt, vv)
    beyond = t > tt[-1]
    if beyond.any():
        slope = (vv[-1] - vv[-2]) / (tt[-1] - tt[-2])
        out[beyond] = vv[-1] + slope * (t[beyond] - tt[-1])
    return out


def evaluate(f: OrliczFunction, t):
    """phi(t) for ``t >= 0``; scalars in, scalars out."""
    if f.kind == "ess_sup":
        raise UnsupportedOperation("the ess_sup side has no forward evaluator")
    arr = as_real(t)
    if np.any(arr < 0):
        raise DomainError("Orlicz functions are evaluated at t >= 0")
    out = _forward(f, np.atleast_1d(arr))
    return out[0] if arr.ndim == 0 else out.reshape(arr.shape)


def inverse(f: OrliczFunction, s):
    """The inverse of ``phi`` restricted to ``[0, inf)``.

    Power functions use the closed form ``s ** (1/p)``; every other
    nondegenerate kind is inverted by :func:`bisect_increasing`.  The ess_sup
    side returns one everywhere.
    """
    arr = as_real(s)
    if np.any(arr < 0):
        raise DomainError("inverse needs s >= 0")
    real = arr.dtype.type
    if f.kind == "ess_sup":
        out = np.ones_like(np.atleast_1d(arr))
    elif not f.nondegenerate:
        raise UnsupportedOperation("degenerate Orlicz functions have no inverse")
    elif f.kind == "power":
        out = np.atleast_1d(arr) ** (real(1) / real(f.p))
    else:
        out = bisect_increasing(lambda t: _forward(f, t), np.atleast_1d(arr))
    return out[0] if arr.ndim == 0 else out.reshape(arr.shape)


def luxemburg_norm(f: OrliczFunction, x, *, rtol: float = LUXEMBURG_RTOL):
    """Luxemburg norm of the finite sequence(s) along the last axis of ``x``."""
    if f.kind == "ess_sup":
        x = np.asarray(x)
        out = np.abs(x).max(axis=-1, initial=0.0) if x.ndim else abs(x)
        return float(out) if np.ndim(out) == 0 else out
    return modulus_luxemburg_norm(lambda t: _forward(f, t), inverse(f, 1.0), x, rtol=rtol)


def modulus_luxemburg_norm(phi: Callable, unit: float, x, *, rtol: float = LUXEMBURG_RTOL):
    """Luxemburg norm along the last axis of ``x`` for an elementwise modulus.

    ``phi`` acts on arrays of nonnegative reals and ``unit = phi^{-1}(1)``
    seeds the bracket.  Leading axes of ``x`` are independent batch items.
    """
    x = np.asarray(x)
    if x.ndim == 0:
        x = x.reshape(1)
    lead = x.shape[:-1]
    mods = np.abs(x).reshape(-1, x.shape[-1]).astype(float)
    if mods.shape[-1] == 0:
        out = np.zeros(mods.shape[0])
    else:
        def modular(rho, rows):
            return ordered_sum(phi(mods[rows] / rho[:, None]))

        out = solve_luxemburg(modular, mods.max(axis=-1) / unit, rtol=rtol)
    return float(out[0]) if not lead else out.reshape(lead)


def estimate_delta2(f: OrliczFunction, t_grid=None) -> ConstantEstimate:
    """Sup over a grid of ``phi(2t) / phi(t)``."""
    if t_grid is None:
        t_grid = np.logspace(-6, 6, 241)
    t = np.asarray(t_grid, dtype=float)
    base = evaluate(f, t)
    if np.any((base == 0) & (t > 0)):
        raise DomainError("phi vanishes at a positive grid point")
    ratio = evaluate(f, 2.0 * t) / base
    k = int(np.argmax(ratio))
    return ConstantEstimate("delta2", float(ratio[k]), {"t": float(t[k])}, trials=t.size)


def _log_uniform(rng, size, lo=1e-4, hi=1e4):
    return 10.0 ** rng.uniform(np.log10(lo), np.log10(hi), size)


def estimate_quasi_additivity(f: OrliczFunction, sample_count: int = 10000,
                              seed: int = 0) -> ConstantEstimate:
    """Empirical sup of ``phi(x + y) / (phi(x) + phi(y))`` over positive pairs."""
    rng = np.random.default_rng(seed)
    x = _log_uniform(rng, sample_count)
    y = _log_uniform(rng, sample_count)
    ratio = evaluate(f, x + y) / (evaluate(f, x) + evaluate(f, y))
    k = int(np.argmax(ratio))
    return ConstantEstimate("quasi_additivity", float(ratio[k]),
                            {"x": float(x[k]), "y": float(y[k])}, trials=sample_count)


def estimate_scaling_constant(f: OrliczFunction, a: float, sample_count: int = 10000,
                              seed: int = 0) -> ConstantEstimate:
    """Empirical sup of ``phi(a x) / phi(x)``."""
    if not a > 0:
        raise DomainError("scale a must be positive")
    rng = np.random.default_rng(seed)
    x = _log_uniform(rng, sample_count)
    ratio = evaluate(f, a * x) / evaluate(f, x)
    k = int(np.argmax(ratio))
    return ConstantEstimate(f"scaling[{a:g}]", float(ratio[k]), {"x": float(x[k])},
                            trials=sample_count)


@dataclass(frozen=True)
class Delta2Profile:
    M: float
    c: float
    D: dict


def delta2_profile(f: OrliczFunction, scales=(0.5, 2.0, 6.0, 24.0),
                   sample_count: int = 10000, seed: int = 0) -> Delta2Profile:
    """Bundle the doubling, quasi-additivity and scaling estimates of ``f``."""
    return Delta2Profile(
        M=estimate_delta2(f).value,
        c=estimate_quasi_additivity(f, sample_count, seed).value,
        D={a: estimate_scaling_constant(f, a, sample_count, seed).value for a in scales},
    )
