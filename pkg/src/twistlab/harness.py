"""Seeded randomized checks and constant estimators.

Every trial ``i`` draws from its own generator ``default_rng([seed, i])``, so
a run with more trials extends a run with fewer and results do not depend on
how trials are batched.  Estimators return :class:`ConstantEstimate` records
whose witnesses are plain JSON data and can be replayed with :func:`replay`.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .estimate import ConstantEstimate
from .exceptions import ConvergenceError, DomainError, UsageError
from .interpolation import (InterpolationCouple, _scalar_params, g_eval, g_jet,
                            k_constant, kalton_peck_couple, omega_n,
                            phi_theta_n, phi_theta_product)
from .jets import cauchy_coefficients, two_point_power_eval
from .orlicz import OrliczFunction, inverse, luxemburg_norm
from .spaces import fenchel_orlicz_norm, rochberg_quasinorm

__all__ = [
    "TrialConfig",
    "check_taylor_consistency",
    "estimate_quasilinearity",
    "estimate_quasiconvexity",
    "estimate_delta2_n",
    "estimate_boundary_constants",
    "check_three_lines",
    "estimate_equivalence_constants",
    "check_coordinate_bound",
    "estimate_real_complex_constant",
    "kalton_peck_oracle",
    "power_couple_oracle",
    "g_pointwise_oracle",
    "replay",
    "run_suite",
    "SUITES",
]

DENOM_FLOOR = 1e-300
ZERO_PROB = 0.1
BOUNDARY_T = np.linspace(-8.0, 8.0, 161)
DEFAULT_BETAS = tuple(2.0 ** k for k in range(11))
THREE_LINES_SLACK = 1e-9
INF_NOTE = "empirical infimum: an upper bound on the true constant"
CHECK_NOTE = "worst observed deviation"
MARGIN_NOTE = "smallest observed relative slack"


@dataclass(frozen=True)
class TrialConfig:
    """What to sample and how much of it.

    ``dims`` bounds the support size of random block vectors and
    ``magnitudes`` the log-uniform range of entry moduli.
    """

    couple: InterpolationCouple
    seed: int = 0
    trials: int = 200
    n: int = 2
    dims: tuple = (1, 8)
    magnitudes: tuple = (1e-3, 1e3)
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("trials must be at least 1")
        if self.n < 1:
            raise UsageError("n must be at least 1")
        lo, hi = self.magnitudes
        if not 0 < lo <= hi:
            raise UsageError("magnitude range must be positive")
        d0, d1 = self.dims
        if not 1 <= d0 <= d1:
            raise UsageError("dims must satisfy 1 <= low <= high")

    def but(self, **changes) -> "TrialConfig":
        return replace(self, **changes)


# -- sampling ---------------------------------------------------------------

def trial_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, i])


def _entries(rng, shape, magnitudes, real=False, zero_prob=ZERO_PROB):
    lo, hi = np.log10(magnitudes[0]), np.log10(magnitudes[1])
    mod = 10.0 ** rng.uniform(lo, hi, shape)
    if real:
        x = mod * np.where(rng.uniform(size=shape) < 0.5, -1.0, 1.0)
    else:
        x = mod * np.exp(2j * np.pi * rng.uniform(size=shape))
    x[rng.uniform(size=shape) < zero_prob] = 0
    return x


def _draw(cfg: TrialConfig, draw: Callable) -> list:
    """Call ``draw(rng)`` once per trial and stack each returned array."""
    rows = [draw(trial_rng(cfg.seed, i)) for i in range(cfg.trials)]
    if isinstance(rows[0], tuple):
        return [np.stack(col) for col in zip(*rows)]
    return [np.stack(rows)]


def _blocks(rng, cfg: TrialConfig, n: int):
    """A padded ``(dims[1], n)`` block array with random support size."""
    size = int(rng.integers(cfg.dims[0], cfg.dims[1] + 1))
    out = np.zeros((cfg.dims[1], n), dtype=complex)
    out[:size] = _entries(rng, (size, n), cfg.magnitudes)
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TWISTLAB_THREADS", "1")))
    except ValueError:
        return 1


def _batched(fn: Callable, *arrays):
    """Apply ``fn`` to chunks along axis 0, on up to TWISTLAB_THREADS threads.

    Every evaluator used here is elementwise over the batch axis, so the
    chunking does not change any value.
    """
    count = arrays[0].shape[0]
    workers = min(_threads(), count)
    if workers <= 1:
        return fn(*arrays)
    bounds = np.linspace(0, count, workers + 1).astype(int)
    parts = [tuple(a[lo:hi] for a in arrays) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda p: fn(*p), parts))
    return np.concatenate(results, axis=0)


# -- witnesses --------------------------------------------------------------

def encode(x) -> list:
    """Complex array to nested lists with ``[re, im]`` leaves."""
    x = np.asarray(x, dtype=complex)
    return np.stack([x.real, x.imag], axis=-1).tolist()


def decode(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _trim(blocks: np.ndarray, *others: np.ndarray):
    """Drop trailing rows that are zero in every given padded block array.

    At least one row is kept; with several arrays a tuple of equally long
    arrays is returned.
    """
    rows = np.any(blocks != 0, axis=-1)
    for o in others:
        rows = rows | np.any(o != 0, axis=-1)
    live = np.flatnonzero(rows)
    size = int(live[-1]) + 1 if live.size else 1
    if not others:
        return blocks[:size]
    return tuple(a[:size] for a in (blocks,) + others)


def _extremum(name, values, den, witness: Callable, *, trials, largest=True,
              note=None) -> ConstantEstimate:
    """Reduce per-trial ``values`` (ratios) with the denominator floor."""
    values = np.asarray(values, dtype=float)
    ok = np.asarray(den) > DENOM_FLOOR if den is not None else np.ones(values.shape, bool)
    skipped = int(np.count_nonzero(~ok))
    if not ok.any():
        raise DomainError(f"{name}: every trial fell below the denominator floor")
    bad = ok & ~np.isfinite(values)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise ConvergenceError(f"{name}: non-finite value", trial=k, value=float(values[k]))
    fill = -np.inf if largest else np.inf
    masked = np.where(ok, values, fill)
    k = int(np.argmax(masked) if largest else np.argmin(masked))
    if note is None:
        note = ConstantEstimate.__dataclass_fields__["note"].default if largest else INF_NOTE
    return ConstantEstimate(name, float(values[k]), witness(k), trials=int(values.size),
                            skipped=skipped, note=note)


# -- checks and estimators --------------------------------------------------

def _taylor_deviation(couple, x):
    m = x.shape[-1]
    coeffs = g_jet(couple, x).jet.coeffs[..., :m]
    xa = x[..., ::-1]
    dev = np.abs(coeffs - xa) / np.maximum(1.0, np.abs(xa))
    return dev.max(axis=-1).astype(float)


def check_taylor_consistency(cfg: TrialConfig, m: int | None = None) -> ConstantEstimate:
    """Worst ``|g_x[j] - x_j| / max(1, |x_j|)`` over ``j < m`` (default ``m = cfg.n``)."""
    m = cfg.n if m is None else m
    (x,) = _draw(cfg, lambda rng: _entries(rng, m, cfg.magnitudes))
    dev = _batched(lambda a: _taylor_deviation(cfg.couple, a), x)
    return _extremum(f"taylor_deviation[m={m}]", dev, None,
                     lambda k: {"kind": "taylor", "x": encode(x[k])},
                     trials=cfg.trials, note=CHECK_NOTE)


def _quasilinear_ratio(couple, n, x, y):
    lhs = omega_n(couple, n, x + y) - omega_n(couple, n, x) - omega_n(couple, n, y)
    num = couple.norm(lhs)
    den = rochberg_quasinorm(couple, n, x) + rochberg_quasinorm(couple, n, y)
    return np.atleast_1d(num), np.atleast_1d(den)


def estimate_quasilinearity(cfg: TrialConfig) -> ConstantEstimate:
    """``||Omega(x+y) - Omega x - Omega y|| / (||x|| + ||y||)``, domain norm twisted."""
    n = cfg.n
    x, y = _draw(cfg, lambda rng: (_blocks(rng, cfg, n), _blocks(rng, cfg, n)))
    num, den = _quasilinear_ratio(cfg.couple, n, x, y)
    ratio = num / np.where(den > DENOM_FLOOR, den, 1.0)
    return _extremum(f"Q[n={n}]", ratio, den,
                     lambda k: dict(zip(("kind", "n", "x", "y"), (
                         "quasilinear", n, *map(encode, _trim(x[k], y[k]))))),
                     trials=cfg.trials)


def _convexity_terms(couple, x, y, t):
    mix = t[..., None] * x + (1.0 - t[..., None]) * y
    num = phi_theta_n(couple, mix)
    den = t * phi_theta_n(couple, x) + (1.0 - t) * phi_theta_n(couple, y)
    return num, den


def estimate_quasiconvexity(cfg: TrialConfig) -> ConstantEstimate:
    """``phi_n(t x + (1-t) y) / (t phi_n(x) + (1-t) phi_n(y))`` over random triples."""
    n = cfg.n

    def draw(rng):
        return (_entries(rng, n, cfg.magnitudes), _entries(rng, n, cfg.magnitudes),
                rng.uniform())

    x, y, t = _draw(cfg, draw)
    num, den = _convexity_terms(cfg.couple, x, y, t)
    ratio = num / np.where(den > DENOM_FLOOR, den, 1.0)
    return _extremum(f"C[n={n}]", ratio, den,
                     lambda k: {"kind": "quasiconvex", "x": encode(x[k]),
                                "y": encode(y[k]), "t": float(t[k])},
                     trials=cfg.trials)


def estimate_delta2_n(cfg: TrialConfig) -> ConstantEstimate:
    """``phi_n(2x) / phi_n(x)``; trials with ``phi_n(x)`` under the floor are skipped."""
    n = cfg.n
    (x,) = _draw(cfg, lambda rng: _entries(rng, n, cfg.magnitudes))
    den = phi_theta_n(cfg.couple, x)
    ratio = phi_theta_n(cfg.couple, 2.0 * x) / np.where(den > DENOM_FLOOR, den, 1.0)
    return _extremum(f"M[n={n}]", ratio, den,
                     lambda k: {"kind": "delta2", "x": encode(x[k])}, trials=cfg.trials)


def _endpoint_inverse(couple, side, s):
    f = couple.phi0 if side == 0 else couple.phi1
    return inverse(f, s)


def _boundary_moduli(couple, x, t_grid):
    """``|g_x(j + i t)|`` with shape ``(B, 2, T)``."""
    gc = g_jet(couple, x)
    left = np.abs(g_eval(couple, x, 1j * t_grid, gc))
    right = np.abs(g_eval(couple, x, 1.0 + 1j * t_grid, gc))
    return np.stack([left, right], axis=-2)


def estimate_boundary_constants(cfg: TrialConfig, beta_grid=DEFAULT_BETAS,
                                t_grid=BOUNDARY_T) -> ConstantEstimate:
    """Smallest ``alpha(beta)`` over ``beta_grid``, where ``alpha(beta)`` is the
    largest ``|g_x(j + i t)| / phi_j^{-1}(beta phi_n(x))`` seen on the grid."""
    betas = np.asarray(beta_grid, dtype=float).reshape(-1)
    if betas.size == 0:
        raise UsageError("beta grid is empty")
    n = cfg.n
    t_grid = np.asarray(t_grid, dtype=float)
    (x,) = _draw(cfg, lambda rng: _entries(rng, n, cfg.magnitudes))
    phin = phi_theta_n(cfg.couple, x)
    mods = _boundary_moduli(cfg.couple, x, t_grid)
    peak = mods.max(axis=-1)                      # (B, 2)
    arg = mods.argmax(axis=-1)
    best = None
    for beta in betas:
        s = beta * phin
        den = np.stack([_endpoint_inverse(cfg.couple, 0, s),
                        _endpoint_inverse(cfg.couple, 1, s)], axis=-1)
        ratio = peak / np.where(den > DENOM_FLOOR, den, 1.0)
        ratio = np.where(den > DENOM_FLOOR, ratio, -np.inf).max(axis=-1)
        side = np.argmax(np.where(den > DENOM_FLOOR, peak / np.where(den > DENOM_FLOOR, den, 1.0),
                                  -np.inf), axis=-1)
        live = np.isfinite(ratio)  # False only when both sides hit the floor

        def witness(k, beta=beta, side=side):
            j = int(side[k])
            return {"kind": "boundary", "x": encode(x[k]), "beta": float(beta), "side": j,
                    "t": float(t_grid[arg[k, j]])}

        est = _extremum(f"alpha[n={n}]", np.where(live, ratio, 0.0),
                        np.where(live, 1.0, 0.0), witness, trials=cfg.trials)
        if best is None or est.value < best.value:
            best = est
    return best


def _three_lines(couple, n, x0, x1, t0, t_grid):
    """Relative slack of ``|h2(theta)| <= sup_boundary |h1| / |z - theta|^{n-1}``."""
    t1 = 1.0 - t0
    xc = t0[:, None] * x0 + t1[:, None] * x1
    jets = [g_jet(couple, v) for v in (x0, x1, xc)]
    h2 = (t0 * jets[0].jet[n - 1] + t1 * jets[1].jet[n - 1] - jets[2].jet[n - 1])
    h2 = np.abs(h2.astype(complex))
    z = np.concatenate([1j * t_grid, 1.0 + 1j * t_grid])
    h1 = (t0[:, None] * g_eval(couple, x0, z, jets[0])
          + t1[:, None] * g_eval(couple, x1, z, jets[1])
          - g_eval(couple, xc, z, jets[2]))
    sup = (np.abs(h1) / np.abs(z - couple.theta) ** (n - 1)).max(axis=-1)
    scale = np.maximum(sup, h2)
    return (sup * (1.0 + THREE_LINES_SLACK) - h2) / np.maximum(scale, DENOM_FLOOR), scale


def check_three_lines(cfg: TrialConfig, t_grid=BOUNDARY_T) -> ConstantEstimate:
    """Smallest relative slack in the maximum-principle bound for ``h2(theta)``.

    ``h1 = t0 g_{x0} + t1 g_{x1} - g_{t0 x0 + t1 x1}`` vanishes to order
    ``n - 1`` at ``theta``, so ``h2 = h1 / (z - theta)^{n-1}`` is analytic and
    ``h2(theta)`` is coefficient ``n - 1`` of ``h1``.  Runs at ``n >= 2``.
    """
    n = max(cfg.n, 2)
    t_grid = np.asarray(t_grid, dtype=float)

    def draw(rng):
        return (_entries(rng, n - 1, cfg.magnitudes), _entries(rng, n - 1, cfg.magnitudes),
                rng.uniform())

    x0, x1, t0 = _draw(cfg, draw)
    margin, scale = _three_lines(cfg.couple, n, x0, x1, t0, t_grid)
    # h1 vanishing identically (e.g. x0 = x1 = 0) leaves nothing to compare
    return _extremum(f"three_lines_margin[n={n}]", margin, scale,
                     lambda k: {"kind": "threelines", "n": n, "x0": encode(x0[k]),
                                "x1": encode(x1[k]), "t0": float(t0[k])},
                     trials=cfg.trials, largest=False, note=MARGIN_NOTE)


def _norm_pair(couple, n, v):
    return (np.atleast_1d(rochberg_quasinorm(couple, n, v)),
            np.atleast_1d(fenchel_orlicz_norm(couple, n, v)))


def estimate_equivalence_constants(cfg: TrialConfig) -> tuple:
    """``(L, U)``: extreme ratios rochberg / fenchel on random block vectors."""
    n = cfg.n
    (v,) = _draw(cfg, lambda rng: _blocks(rng, cfg, n))
    roch, fen = _batched(lambda a: np.stack(_norm_pair(cfg.couple, n, a), axis=-1), v).T
    ratio = roch / np.where(fen > DENOM_FLOOR, fen, 1.0)

    def witness(k):
        return {"kind": "equivalence", "n": n, "v": encode(_trim(v[k]))}

    low = _extremum(f"L[n={n}]", ratio, fen, witness, trials=cfg.trials, largest=False)
    high = _extremum(f"U[n={n}]", ratio, fen, witness, trials=cfg.trials)
    return low, high


def check_coordinate_bound(cfg: TrialConfig) -> tuple:
    """Largest entry modulus of random vectors normalised in each quasinorm.

    Returns ``(fenchel, rochberg)`` estimates.
    """
    n = cfg.n
    (v,) = _draw(cfg, lambda rng: _blocks(rng, cfg, n))
    roch, fen = _batched(lambda a: np.stack(_norm_pair(cfg.couple, n, a), axis=-1), v).T
    top = np.abs(v).max(axis=(-2, -1))
    out = []
    for label, norm in (("fenchel", fen), ("rochberg", roch)):
        value = top / np.where(norm > DENOM_FLOOR, norm, 1.0)
        out.append(_extremum(
            f"coordinate_bound[{label},n={n}]", value, norm,
            lambda k, label=label: {"kind": "coordinate", "norm": label, "n": n,
                                    "v": encode(_trim(v[k]))},
            trials=cfg.trials))
    return tuple(out)


def estimate_real_complex_constant(cfg: TrialConfig) -> ConstantEstimate:
    """``phi_n(x) / phi_n(x + i y)`` over random real ``x, y``."""
    n = cfg.n

    def draw(rng):
        return (_entries(rng, n, cfg.magnitudes, real=True).real,
                _entries(rng, n, cfg.magnitudes, real=True).real)

    x, y = _draw(cfg, draw)
    den = phi_theta_n(cfg.couple, x + 1j * y)
    ratio = phi_theta_n(cfg.couple, x.astype(complex)) / np.where(den > DENOM_FLOOR, den, 1.0)
    return _extremum(f"a[n={n}]", ratio, den,
                     lambda k: {"kind": "realcomplex", "x": x[k].tolist(), "y": y[k].tolist()},
                     trials=cfg.trials)


# -- closed-form oracles ----------------------------------------------------

def _sup_relative(diff, ref, x):
    """``max |diff| / max(|ref|_inf, |x|_inf)`` along the last axis."""
    scale = np.maximum(np.abs(ref).max(axis=-1), np.abs(x).max(axis=-1))
    return np.abs(diff).max(axis=-1) / np.where(scale > 0, scale, 1.0)


def kalton_peck_closed_form(theta: float, x):
    """``(1/theta) x_k log(|x_k| / ||x||_{1/theta})`` with ``0 log 0 = 0``."""
    x = np.asarray(x, dtype=complex)
    p = 1.0 / theta
    mod = np.abs(x)
    norm = (mod ** p).sum(axis=-1, keepdims=True) ** (1.0 / p)
    safe = np.where(mod > 0, mod, 1.0)
    return np.where(mod > 0, p * x * np.log(safe / np.where(norm > 0, norm, 1.0)), 0.0)


def kalton_peck_oracle(theta: float, cfg: TrialConfig) -> ConstantEstimate:
    """Worst sup-relative gap between ``Omega^1`` on the KP couple and the closed
    form.  The sign is ``+1``: ``Omega^1`` is the derivative of ``B^1``."""
    couple = kalton_peck_couple(theta)
    (x,) = _draw(cfg, lambda rng: _blocks(rng, cfg, 1)[:, 0])
    om = omega_n(couple, 1, x[..., None])
    dev = _sup_relative(om - kalton_peck_closed_form(theta, x), om, x)
    return _extremum(f"kalton_peck_deviation[theta={theta:g}]", dev, None,
                     lambda k: {"kind": "kaltonpeck", "theta": theta, "x": encode(_trim(x[k]))},
                     trials=cfg.trials, note=CHECK_NOTE)


def _power_of(f: OrliczFunction) -> float:
    if f.kind == "ess_sup":
        return math.inf
    if f.kind == "power":
        return f.p
    raise UsageError("power oracle needs power or ess_sup endpoints")


def power_exponent(p0: float, p1: float, theta: float) -> float:
    """``p_theta`` with ``1/p_theta = (1-theta)/p0 + theta/p1`` (``p0 = inf`` allowed)."""
    return 1.0 / ((1.0 - theta) / p0 + theta / p1)


def power_couple_oracle(p0: float, p1: float, theta: float, cfg: TrialConfig,
                        grid=None) -> ConstantEstimate:
    """Worst relative gap of the product-formula route to ``phi_theta`` against
    ``t**p_theta`` on a log grid, and of the order-1 Luxemburg norm against the
    closed-form ``ell_{p_theta}`` norm.

    ``p0 = inf`` selects the ess_sup endpoint.
    """
    phi0 = OrliczFunction.ess_sup() if math.isinf(p0) else OrliczFunction.power(p0)
    couple = InterpolationCouple(phi0, OrliczFunction.power(p1), theta)
    p = power_exponent(p0, p1, theta)
    grid = np.logspace(-3, 3, 50) if grid is None else np.asarray(grid, dtype=float)
    fdev = np.abs(phi_theta_product(couple, grid) / grid ** p - 1.0)
    (x,) = _draw(cfg, lambda rng: _blocks(rng, cfg, 1)[:, 0])
    got = fenchel_orlicz_norm(couple, 1, x[..., None])
    mod = np.abs(x)
    top = mod.max(axis=-1)
    safe = np.where(top > 0, top, 1.0)
    want = top * ((mod / safe[:, None]) ** p).sum(axis=-1) ** (1.0 / p)
    ndev = np.abs(got - want) / np.where(want > 0, want, 1.0)
    k = int(np.argmax(ndev))
    j = int(np.argmax(fdev))
    # JSON has no infinity, so the ess_sup endpoint is recorded as null
    ends = {"p0": None if math.isinf(p0) else p0, "p1": p1, "theta": theta}
    if fdev[j] >= ndev[k]:
        value, witness = float(fdev[j]), {"kind": "powers_phi", **ends, "t": float(grid[j])}
    else:
        value, witness = float(ndev[k]), {"kind": "powers_norm", **ends,
                                          "x": encode(_trim(x[k]))}
    if not np.isfinite(value):
        raise ConvergenceError("power oracle produced a non-finite deviation")
    return ConstantEstimate(f"power_deviation[p_theta={p:g}]", value, witness,
                            trials=cfg.trials + grid.size, note=CHECK_NOTE)


def g_pointwise_oracle(couple: InterpolationCouple, x, radius: float | None = None,
                       quadrature_points: int = 256) -> Callable:
    """Pointwise evaluator of ``g_x`` that never touches jet arithmetic.

    The coefficient ``g_prefix[l]`` feeding level ``l`` is read off the
    already-built lower levels by contour integration.  Returns ``f(z)`` with
    shape ``batch + (len(z),)`` for a 1-d ``z``.
    """
    xa = np.asarray(x, dtype=complex)
    if xa.ndim == 1:
        xa = xa[None]
    xa = xa[..., ::-1]
    m = xa.shape[-1]
    levels = []

    def evaluate(z, upto=None):
        z = np.asarray(z, dtype=complex)
        phi_z = couple.conformal(z)
        out = np.zeros(xa.shape[:-1] + z.shape, dtype=complex)
        for level, (a, b, sgn, k) in enumerate(levels[:upto]):
            term = two_point_power_eval(a[..., None], b[..., None], sgn[..., None], z)
            out = out + phi_z ** level / k * term
        return out

    for level in range(m):
        r = xa[..., level]
        if level:
            r = r - cauchy_coefficients(lambda z: evaluate(z, level), couple.theta, level,
                                        radius, quadrature_points)[..., level]
        a, b, sgn, _ = _scalar_params(couple, math.factorial(level + 1) * r)
        levels.append((a, b, sgn, k_constant(couple, level + 1)))
    return evaluate


# -- witness replay ---------------------------------------------------------

def _replay_boundary(couple, w):
    x = decode(w["x"])
    z = np.array([w["side"] + 1j * w["t"]])
    mod = float(np.abs(g_eval(couple, x[None], z))[0, 0])
    s = w["beta"] * float(phi_theta_n(couple, x[None])[0])
    return mod / float(_endpoint_inverse(couple, w["side"], s))


def _replay_coordinate(couple, w):
    v = decode(w["v"])
    norm = (fenchel_orlicz_norm if w["norm"] == "fenchel" else rochberg_quasinorm)(
        couple, w["n"], v)
    return float(np.abs(v).max() / norm)


def _power_witness_couple(w):
    p0 = math.inf if w["p0"] is None else w["p0"]
    phi0 = OrliczFunction.ess_sup() if w["p0"] is None else OrliczFunction.power(p0)
    couple = InterpolationCouple(phi0, OrliczFunction.power(w["p1"]), w["theta"])
    return couple, power_exponent(p0, w["p1"], w["theta"])


def _replay_powers_norm(couple, w):
    c, p = _power_witness_couple(w)
    x = decode(w["x"])
    top = np.abs(x).max()
    want = top * ((np.abs(x) / top) ** p).sum() ** (1.0 / p)
    return abs(fenchel_orlicz_norm(c, 1, x[:, None]) - want) / want


def _replay_powers_phi(couple, w):
    c, p = _power_witness_couple(w)
    t = np.array([w["t"]])
    return float(np.abs(phi_theta_product(c, t) / t ** p - 1.0)[0])


def _replay_kp(couple, w):
    x = decode(w["x"])[None]
    c = kalton_peck_couple(w["theta"])
    om = omega_n(c, 1, x[..., None])
    return float(_sup_relative(om - kalton_peck_closed_form(w["theta"], x), om, x)[0])


def _one(values):
    return float(np.asarray(values).reshape(-1)[0])


REPLAYERS = {
    "taylor": lambda c, w: _one(_taylor_deviation(c, decode(w["x"])[None])),
    "quasilinear": lambda c, w: (lambda r: _one(r[0]) / _one(r[1]))(
        _quasilinear_ratio(c, w["n"], decode(w["x"])[None], decode(w["y"])[None])),
    "quasiconvex": lambda c, w: (lambda r: _one(r[0]) / _one(r[1]))(
        _convexity_terms(c, decode(w["x"])[None], decode(w["y"])[None], np.array([w["t"]]))),
    "delta2": lambda c, w: _one(phi_theta_n(c, 2.0 * decode(w["x"])[None]))
    / _one(phi_theta_n(c, decode(w["x"])[None])),
    "boundary": _replay_boundary,
    "threelines": lambda c, w: _one(_three_lines(
        c, w["n"], decode(w["x0"])[None], decode(w["x1"])[None], np.array([w["t0"]]),
        BOUNDARY_T)[0]),
    "equivalence": lambda c, w: (lambda r: _one(r[0]) / _one(r[1]))(
        _norm_pair(c, w["n"], decode(w["v"]))),
    "coordinate": _replay_coordinate,
    "realcomplex": lambda c, w: _one(phi_theta_n(c, np.asarray(w["x"], dtype=complex)[None]))
    / _one(phi_theta_n(c, (np.asarray(w["x"]) + 1j * np.asarray(w["y"]))[None])),
    "kaltonpeck": _replay_kp,
    "powers_phi": _replay_powers_phi,
    "powers_norm": _replay_powers_norm,
}


def replay(estimate: ConstantEstimate, couple: InterpolationCouple) -> float:
    """Recompute an estimate's value from its witness alone."""
    kind = estimate.witness.get("kind")
    if kind not in REPLAYERS:
        raise UsageError(f"no replay rule for witness kind {kind!r}")
    return float(REPLAYERS[kind](couple, estimate.witness))


# -- suites -----------------------------------------------------------------

def _entry(est: ConstantEstimate, passed: bool) -> dict:
    return {"name": est.name, "value": est.value, "witness": est.witness,
            "trials": est.trials, "skipped": est.skipped, "note": est.note,
            "pass": bool(passed and est.finite)}


def _finite(est: ConstantEstimate) -> dict:
    return _entry(est, est.finite)


def _at_most(bound: float) -> Callable:
    return lambda est: _entry(est, est.value <= bound)


def _kp_like(couple: InterpolationCouple) -> bool:
    return (couple.phi0.kind == "ess_sup" and couple.phi1.kind == "power"
            and couple.phi1.p == 1.0)


def _suite_taylor(cfg):
    return [_at_most(1e-8)(check_taylor_consistency(cfg, m)) for m in range(1, cfg.n + 1)]


def _suite_quasiconvex(cfg):
    est = estimate_quasiconvexity(cfg)
    return [_at_most(1.0 + 1e-9)(est) if cfg.n == 1 else _finite(est)]


def _suite_delta2(cfg):
    est = estimate_delta2_n(cfg)
    return [_entry(est, est.value >= 1.0 - 1e-12)]


def _suite_equivalence(cfg):
    low, high = estimate_equivalence_constants(cfg)
    if cfg.n == 1:
        ok = abs(low.value - 1.0) <= 1e-9 and abs(high.value - 1.0) <= 1e-9
    else:
        ok = 0.0 < low.value <= high.value
    return [_entry(low, ok), _entry(high, ok)]


def _suite_realcomplex(cfg):
    est = estimate_real_complex_constant(cfg)
    return [_at_most(1.0 + 1e-9)(est) if cfg.n == 1 else _finite(est)]


def _suite_powers(cfg):
    c = cfg.couple
    p0, p1 = _power_of(c.phi0), _power_of(c.phi1)
    return [_at_most(1e-9)(power_couple_oracle(p0, p1, c.theta, cfg))]


SUITES = {
    "taylor": _suite_taylor,
    "quasilinear": lambda cfg: [_finite(estimate_quasilinearity(cfg))],
    "quasiconvex": _suite_quasiconvex,
    "delta2": _suite_delta2,
    "boundary": lambda cfg: [_finite(estimate_boundary_constants(cfg))],
    "threelines": lambda cfg: [_entry(e, e.value >= -1e-9) for e in [check_three_lines(cfg)]],
    "equivalence": _suite_equivalence,
    "coordinate": lambda cfg: [_finite(e) for e in check_coordinate_bound(cfg)],
    "realcomplex": _suite_realcomplex,
    "kaltonpeck": lambda cfg: [_at_most(1e-9)(kalton_peck_oracle(cfg.couple.theta, cfg))],
    "powers": _suite_powers,
}


def run_suite(name: str, cfg: TrialConfig) -> list:
    """Report entries ``{name, value, witness, trials, skipped, note, pass}``.

    ``all`` runs every suite in catalogue order, leaving out ``powers`` when
    the couple has endpoints other than powers and ess_sup.
    """
    if name == "all":
        out = []
        for key, suite in SUITES.items():
            if key == "powers":
                try:
                    _power_of(cfg.couple.phi0), _power_of(cfg.couple.phi1)
                except UsageError:
                    continue
            out.extend(suite(cfg))
        return out
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return SUITES[name](cfg)
