"""Complex interpolation of a couple of Orlicz sequence spaces at ``theta``.

Vectors of derived order ``n`` are written in descending tuple order
``(x_{n-1}, ..., x_0)`` in every public function: the last axis of an input
array holds ``x_{n-1}`` first and ``x_0`` last.  Internally the arrays are
flipped to ascending order so that index ``j`` means ``x_j``.

The analytic families are never built as functions on the strip.  Each one is
represented by its Taylor jet at ``theta`` and, where boundary values are
needed, by a pointwise evaluator of the same recursion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, UsageError
from .jets import ConformalMap, Jet, two_point_power_eval, two_point_power_jet
from .orlicz import (OrliczFunction, as_real, bisect_increasing, evaluate, inverse,
                     modulus_luxemburg_norm)

__all__ = [
    "InterpolationCouple",
    "GCoefficients",
    "kalton_peck_couple",
    "phi_theta_inverse",
    "phi_theta",
    "phi_theta_product",
    "k_constant",
    "g_jet",
    "g_eval",
    "g_boundary_eval",
    "phi_theta_n",
    "b1_jet",
    "omega_n",
    "psi_map",
]

# phi_theta is inverted to floating-point resolution; the inner inverses keep
# their own tolerance.
PHI_THETA_RTOL = 0.0


@dataclass(frozen=True)
class InterpolationCouple:
    """A couple ``(phi0, phi1)`` interpolated at ``theta``.

    ``phi0`` may be the ess_sup side (the ell-infinity endpoint), ``phi1``
    must be nondegenerate.  ``jet_order`` is an optional floor on the jet
    order used by the CLI; library calls size their jets themselves.
    """

    phi0: OrliczFunction
    phi1: OrliczFunction
    theta: float
    jet_order: int | None = None
    conformal: ConformalMap = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise DomainError("theta must lie in (0, 1)")
        if not self.phi1.nondegenerate:
            raise DomainError("phi1 must be nondegenerate")
        if not (self.phi0.nondegenerate or self.phi0.kind == "ess_sup"):
            raise DomainError("phi0 must be nondegenerate or the ess_sup side")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "conformal", ConformalMap(self.theta))

    def with_theta(self, theta: float) -> "InterpolationCouple":
        return InterpolationCouple(self.phi0, self.phi1, theta, self.jet_order)

    def endpoint_inverses(self, s):
        """``(phi0^{-1}(s), phi1^{-1}(s))``."""
        return inverse(self.phi0, s), inverse(self.phi1, s)

    def phi_theta_inverse(self, s):
        return phi_theta_inverse(self, s)

    def phi_theta(self, t):
        return phi_theta(self, t)

    def norm(self, x):
        """Luxemburg norm of ``ell_{phi_theta}`` along the last axis of ``x``."""
        return modulus_luxemburg_norm(lambda t: phi_theta(self, t),
                                      phi_theta_inverse(self, 1.0), x)

    def k(self, m: int) -> float:
        return k_constant(self, m)

    def describe(self) -> dict:
        return {"phi0": self.phi0.describe(), "phi1": self.phi1.describe(),
                "theta": self.theta, "jet_order": self.jet_order}


def kalton_peck_couple(theta: float = 0.5) -> InterpolationCouple:
    """``(ell_infinity, ell_1)`` at ``theta``; gives ``ell_{1/theta}``."""
    return InterpolationCouple(OrliczFunction.ess_sup(), OrliczFunction.power(1), theta)


def phi_theta_inverse(couple: InterpolationCouple, s):
    """``phi0^{-1}(s)^{1-theta} * phi1^{-1}(s)^theta``."""
    a, b = couple.endpoint_inverses(s)
    theta = np.asarray(a).dtype.type(couple.theta)
    return a ** (1 - theta) * b ** theta


def _closed_inverse(f: OrliczFunction) -> bool:
    return f.kind in ("power", "ess_sup")


def _power_exponent(couple: InterpolationCouple, dtype=float):
    """``p_theta`` in ``dtype`` when both endpoints are powers or ess_sup, else None.

    The exponent is formed in the working precision so that ``phi_theta`` and
    the product formula for its inverse agree to that precision.
    """
    if not (_closed_inverse(couple.phi0) and _closed_inverse(couple.phi1)):
        return None
    one, theta = dtype(1), dtype(couple.theta)
    recip = [dtype(0) if f.kind == "ess_sup" else one / dtype(f.p)
             for f in (couple.phi0, couple.phi1)]
    return one / ((one - theta) * recip[0] + theta * recip[1])


def phi_theta(couple: InterpolationCouple, t):
    """The interpolated Orlicz function.

    Couples of powers (ess_sup counting as the power infinity) give exactly
    ``t ** p_theta``; everything else goes through :func:`phi_theta_product`.
    """
    t = as_real(t)
    p = _power_exponent(couple, t.dtype.type)
    if p is None:
        return phi_theta_product(couple, t)
    if np.any(t < 0):
        raise DomainError("phi_theta is evaluated at t >= 0")
    return t ** p


def phi_theta_product(couple: InterpolationCouple, t):
    """``phi_theta`` by bisection on the product formula for its inverse.

    When exactly one endpoint needs a numerical inverse, the bisection runs
    over ``u = phi_i^{-1}(s)`` instead of ``s``: the product formula becomes
    ``u ** w_i * phi_j^{-1}(phi_i(u)) ** w_j`` and no inner bisection is needed.
    """
    t = as_real(t)
    if np.any(t < 0):
        raise DomainError("phi_theta is evaluated at t >= 0")
    start = np.where(t > 0, t, 1)
    p0, p1 = couple.phi0, couple.phi1
    if _closed_inverse(p0) == _closed_inverse(p1):
        return bisect_increasing(lambda s: phi_theta_inverse(couple, s), t,
                                 rtol=PHI_THETA_RTOL, start=start)
    side, other, w = (p0, p1, 1 - couple.theta) if _closed_inverse(p1) else \
        (p1, p0, couple.theta)
    w = t.dtype.type(w)

    def product(u):
        return u ** w * inverse(other, evaluate(side, u)) ** (1 - w)

    u = bisect_increasing(product, t, rtol=PHI_THETA_RTOL, start=start)
    return evaluate(side, u)


def k_constant(couple: InterpolationCouple, m: int, extended: bool = False):
    """``k_m = m! * phi'(theta)**(m - 1)``.

    This is the constant that makes the ``(z - theta)^{m-1}`` coefficient of
    the level-``m`` correction equal the residual it is meant to cancel.  The
    derivative is read from the conformal jet in the working precision so the
    cancellation is exact up to rounding.
    """
    if m < 1:
        raise UsageError("k_m is defined for m >= 1")
    slope = couple.conformal.jet(1, extended)[1].real
    k = math.factorial(m) * slope ** (m - 1)
    return k if extended else float(k)


def _ascending(x, extended=False):
    x = np.asarray(x, dtype=np.clongdouble if extended else complex)
    if x.ndim == 0:
        x = x.reshape(1)
    return x[..., ::-1]


def _scalar_params(couple, y, extra=None):
    """``(a, b, sgn, phi_theta(|y|))`` of the scalar family through ``y``.

    If ``extra`` (moduli) is given, ``phi_theta(extra)`` is computed in the
    same bisection call and appended to the tuple.
    """
    mod = np.abs(y)
    if extra is None:
        s = phi_theta(couple, mod)
    else:
        both = phi_theta(couple, np.concatenate([mod.ravel(), np.ravel(extra)]))
        s = both[: mod.size].reshape(mod.shape)
        extra_phi = both[mod.size:].reshape(np.shape(extra))
    a, b = couple.endpoint_inverses(s)
    sgn = np.where(mod > 0, y / np.where(mod > 0, mod, 1.0), 0.0)
    if extra is None:
        return a, b, sgn, s
    return a, b, sgn, s, extra_phi


@dataclass(frozen=True, eq=False)
class GCoefficients:
    """Jet at ``theta`` of the scalar family ``g_x`` for ``x`` in ``C^m``.

    ``levels`` records ``(a, b, sgn)`` of every scalar family entering the
    recursion so that :func:`g_eval` can evaluate the same function away
    from ``theta``.
    """

    m: int
    x: np.ndarray
    jet: Jet
    levels: tuple = field(repr=False, default=())

    def coefficient(self, j):
        return self.jet[j]


def _build_g(couple, xa, order, *, stop=None, residual_phi=False):
    """Run the scalar recursion on ascending ``xa`` (shape ``(..., m)``).

    Levels ``0..stop-1`` are folded into the jet (``stop`` defaults to ``m``).
    With ``residual_phi`` the values ``phi_theta(|x_l - g_prefix[l]|)`` for
    ``l < m`` are returned as well.
    """
    m = xa.shape[-1]
    stop = m if stop is None else stop
    theta = couple.theta
    batch = xa.shape[:-1]
    extended = xa.dtype == np.clongdouble
    total = Jet.zero(theta, order, batch, xa.dtype)
    power = Jet.constant(theta, 1, order, batch, xa.dtype)
    phi = couple.conformal.jet(order, extended)
    levels = []
    residual_terms = []
    for level in range(m):
        r = xa[..., level] - total[level] if level > 0 else xa[..., 0]
        if level >= stop:
            if residual_phi:
                residual_terms.append(phi_theta(couple, np.abs(r)))
            continue
        y = math.factorial(level + 1) * r
        if residual_phi and level > 0:
            a, b, sgn, _, rp = _scalar_params(couple, y, extra=np.abs(r))
            residual_terms.append(rp)
        else:
            a, b, sgn, s = _scalar_params(couple, y)
            if residual_phi:
                # at level 0 the scalar argument is x_0 itself
                residual_terms.append(s)
        levels.append((a, b, sgn))
        g = two_point_power_jet(a, b, sgn, theta, order)
        total = total + power * g / k_constant(couple, level + 1, extended)
        if level + 1 < stop:
            power = power * phi
    return total, tuple(levels), residual_terms


def g_jet(couple: InterpolationCouple, x, order: int | None = None,
          extended: bool = True) -> GCoefficients:
    """Jet of ``g_x`` at ``theta`` for ``x`` in tuple order (batched).

    The lower coefficients are recovered as ``prefix + (x_j - prefix)``,
    which cancels catastrophically once the prefix coefficients grow large;
    the default ``extended`` mode therefore runs the recursion in
    ``np.clongdouble``.
    """
    xa = _ascending(x, extended)
    m = xa.shape[-1]
    if m < 1:
        raise UsageError("g_x needs at least one component")
    order = m if order is None else order
    if order < m:
        raise UsageError(f"jet order {order} is below the block size {m}")
    total, levels, _ = _build_g(couple, xa, order)
    return GCoefficients(m, np.asarray(x, dtype=complex), total, levels)


def g_eval(couple: InterpolationCouple, x, z, coefficients: GCoefficients | None = None):
    """Pointwise value of ``g_x`` on the strip.

    The recursion is evaluated at the points ``z`` (any shape); the
    correction weights come from the jet path.  The result has shape
    ``batch + z.shape``.
    """
    gc = coefficients if coefficients is not None else g_jet(couple, x)
    z = np.asarray(z, dtype=complex)
    batch = gc.jet.batch_shape
    expand = (Ellipsis,) + (None,) * z.ndim
    phi_z = couple.conformal(z)
    out = np.zeros(batch + z.shape, dtype=complex)
    for level, (a, b, sgn) in enumerate(gc.levels):
        term = two_point_power_eval(a[expand], b[expand], sgn[expand], z)
        out = out + phi_z ** level / k_constant(couple, level + 1) * term
    return out


def g_boundary_eval(couple: InterpolationCouple, x, side: int, t,
                    coefficients: GCoefficients | None = None):
    """``g_x(side + i t)`` for ``side`` in {0, 1}."""
    if side not in (0, 1):
        raise DomainError("side must be 0 or 1")
    return g_eval(couple, x, side + 1j * np.asarray(t, dtype=float), coefficients)


def phi_theta_n(couple: InterpolationCouple, x, extended: bool = False):
    """The quasi-Young function of order ``n = x.shape[-1]`` (batched)."""
    xa = _ascending(x, extended)
    n = xa.shape[-1]
    if n < 1:
        raise UsageError("phi_theta_n needs n >= 1")
    if n == 1:
        total = phi_theta(couple, np.abs(xa[..., 0]))
    else:
        _, _, terms = _build_g(couple, xa, n - 1, stop=n - 1, residual_phi=True)
        total = terms[0]
        for term in terms[1:]:
            total = total + term
    return total.astype(float) if not extended else total


def _b1_jets(couple, y, order, norm=None):
    """Per-coordinate jets of ``B^1(y)``; ``y`` has shape ``(..., K)``."""
    if norm is None:
        norm = couple.norm(y) if y.shape[-1] else np.zeros(y.shape[:-1])
    norm = np.asarray(norm, dtype=float)
    safe = np.where(norm > 0, norm, 1.0)[..., None]
    a, b, sgn, _ = _scalar_params(couple, np.where(norm[..., None] > 0, y / safe, 0.0))
    jet = two_point_power_jet(a, b, sgn, couple.theta, order)
    return jet * np.broadcast_to(norm[..., None], y.shape)


def _build_b(couple, xa, order, *, levels=None):
    """Jets of ``B^n(x)`` and the residual norms ``||x_l - Omega^l(prefix)||``.

    ``xa`` is ascending with shape ``(..., K, n)``.  Only the first ``levels``
    blocks are folded in (default: all).
    """
    n = xa.shape[-1]
    levels = n if levels is None else levels
    theta = couple.theta
    batch = xa.shape[:-1]
    total = Jet.zero(theta, order, batch)
    power = Jet.constant(theta, 1.0, order, batch)
    phi = couple.conformal.jet(order)
    residual_norms = []
    for level in range(levels):
        r = xa[..., level] - total[level] if level > 0 else xa[..., 0]
        rnorm = couple.norm(r) if r.shape[-1] else np.zeros(r.shape[:-1])
        residual_norms.append(rnorm)
        fact = math.factorial(level + 1)
        g = _b1_jets(couple, fact * r, order, norm=fact * np.asarray(rnorm))
        total = total + power * g / k_constant(couple, level + 1)
        if level + 1 < levels:
            power = power * phi
    return total, residual_norms


def _blocks_array(x):
    """Accept a BlockVector-like object or an array of shape (..., K, n)."""
    blocks = getattr(x, "blocks", x)
    return np.asarray(blocks, dtype=complex)


def b1_jet(couple: InterpolationCouple, x, k: int, order: int = 2) -> Jet:
    """Jet at ``theta`` of coordinate ``k`` of ``B^1(x)`` for a finite sequence ``x``."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    return Jet(couple.theta, _b1_jets(couple, x, order).coeffs[k])


def omega_n(couple: InterpolationCouple, n: int, x):
    """``Omega^n`` of a block vector of ``n`` blocks.

    ``x`` is an array of shape ``(..., K, n)`` in tuple order (or anything
    with a ``blocks`` attribute of that shape).  Returns shape ``(..., K)``.
    """
    if n < 1:
        raise UsageError("Omega^n is defined for n >= 1")
    blocks = _blocks_array(x)
    if blocks.shape[-1] != n:
        raise UsageError(f"expected blocks of length {n}, got {blocks.shape[-1]}")
    total, _ = _build_b(couple, blocks[..., ::-1], n)
    return total[n]


def psi_map(couple: InterpolationCouple, n: int, prefix):
    """Coordinatewise ``g_{prefix(k)}[n-1; theta]`` for a prefix of ``n-1`` blocks."""
    if n < 2:
        raise UsageError("Psi needs n >= 2")
    blocks = _blocks_array(prefix)
    if blocks.shape[-1] != n - 1:
        raise UsageError(f"expected prefix blocks of length {n - 1}")
    total, _, _ = _build_g(couple, _ascending(blocks, extended=True), n - 1)
    return total[n - 1].astype(complex)
