"""Truncated Taylor series at a real centre, the strip-to-disc map, and a
contour-integral coefficient oracle.

A :class:`Jet` holds coefficients ``c[..., j]`` of ``sum_j c_j (z - center)**j``
for ``j <= order``.  Leading axes are batch axes, so one ``Jet`` can carry the
expansions of a whole vector of analytic functions at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, UsageError

__all__ = [
    "Jet",
    "jet_add",
    "jet_scale",
    "jet_mul",
    "two_point_power_jet",
    "ConformalMap",
    "conformal_jet",
    "conformal_boundary_eval",
    "cauchy_coefficient_oracle",
    "cauchy_coefficients",
]


@dataclass(frozen=True, eq=False)
class Jet:
    center: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        c = c.astype(np.clongdouble if c.dtype in (np.longdouble, np.clongdouble) else complex,
                     copy=False)
        if c.ndim == 0:
            c = c.reshape(1)
        if not np.all(np.isfinite(c)):
            raise DomainError("jet coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, center, value, order, shape=(), dtype=complex):
        c = np.zeros(tuple(shape) + (order + 1,), dtype=dtype)
        c[..., 0] = value
        return cls(center, c)

    @classmethod
    def zero(cls, center, order, shape=(), dtype=complex):
        return cls(center, np.zeros(tuple(shape) + (order + 1,), dtype=dtype))

    @property
    def order(self) -> int:
        return self.coeffs.shape[-1] - 1

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[:-1]

    def __getitem__(self, j):
        """Coefficient ``j`` (over all batch entries)."""
        return self.coeffs[..., j]

    def _check(self, other: "Jet"):
        if other.center != self.center or other.order != self.order:
            raise UsageError(
                f"jets differ: center {self.center} vs {other.center}, "
                f"order {self.order} vs {other.order}")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.center, self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[..., 0] += other
        return Jet(self.center, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.center, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return Jet(self.center, _cauchy_product(self.coeffs, other.coeffs))
        return Jet(self.center, np.asarray(other)[..., None] * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.center, self.coeffs / np.asarray(other)[..., None])

    def reciprocal(self) -> "Jet":
        a = self.coeffs
        if np.any(a[..., 0] == 0):
            raise DomainError("jet with zero constant term has no reciprocal")
        out = np.zeros_like(a)
        out[..., 0] = 1.0 / a[..., 0]
        for k in range(1, a.shape[-1]):
            acc = np.zeros(a.shape[:-1], dtype=a.dtype)
            for i in range(1, k + 1):
                acc = acc + a[..., i] * out[..., k - i]
            out[..., k] = -acc / a[..., 0]
        return Jet(self.center, out)

    def __pow__(self, k: int) -> "Jet":
        if int(k) != k or k < 0:
            raise UsageError("jets only support nonnegative integer powers")
        result = Jet.constant(self.center, 1.0, self.order, self.batch_shape,
                              self.coeffs.dtype)
        for _ in range(int(k)):
            result = result * self
        return result

    def __call__(self, z):
        """Evaluate the truncated polynomial at ``z``."""
        u = np.asarray(z) - self.center
        out = np.zeros(np.broadcast_shapes(self.batch_shape, np.shape(u)),
                       dtype=np.result_type(self.coeffs, u))
        for j in range(self.order, -1, -1):
            out = out * u + self.coeffs[..., j]
        return out

    def __repr__(self):
        return f"Jet(center={self.center!r}, order={self.order}, coeffs={self.coeffs!r})"


def _cauchy_product(a, b):
    n = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    for k in range(n):
        acc = a[..., 0] * b[..., k]
        for i in range(1, k + 1):
            acc = acc + a[..., i] * b[..., k - i]
        out[..., k] = acc
    return out


def jet_add(a: Jet, b: Jet) -> Jet:
    a._check(b)
    return a + b


def jet_scale(lam, a: Jet) -> Jet:
    return a * lam


def jet_mul(a: Jet, b: Jet) -> Jet:
    a._check(b)
    return a * b


def _factorials(order, dtype=float):
    return np.array([math.factorial(j) for j in range(order + 1)], dtype=dtype)


PI_LONG = np.longdouble("3.14159265358979323846264338327950288")


def is_extended(*arrays) -> bool:
    return any(np.asarray(a).dtype in (np.longdouble, np.clongdouble) for a in arrays)


def two_point_power_jet(a, b, s, theta: float, order: int) -> Jet:
    """Jet at ``theta`` of ``z -> s * a**(1 - z) * b**z``.

    ``a`` and ``b`` must be positive wherever ``s`` is nonzero; entries with
    ``s == 0`` give the zero jet regardless of ``a`` and ``b``.  Inputs
    broadcast, and the jet carries their common shape as batch shape.
    """
    ext = is_extended(a, b, s)
    real, cplx = (np.longdouble, np.clongdouble) if ext else (float, complex)
    a, b, s = np.broadcast_arrays(np.asarray(a, dtype=real), np.asarray(b, dtype=real),
                                  np.asarray(s, dtype=cplx))
    theta_r = real(theta)
    live = s != 0
    if np.any(live & ~((a > 0) & (b > 0))):
        raise DomainError("two-point powers need a, b > 0")
    la = np.log(np.where(live, a, 1.0))
    lb = np.log(np.where(live, b, 1.0))
    ratio = lb - la
    base = np.where(live, s * np.exp((1 - theta_r) * la + theta_r * lb), 0)
    j = np.arange(order + 1)
    coeffs = base[..., None] * ratio[..., None] ** j / _factorials(order, real)
    return Jet(theta, coeffs)


def two_point_power_eval(a, b, s, z):
    """Pointwise ``s * a**(1 - z) * b**z`` via real logarithms."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.asarray(s, dtype=complex)
    live = s != 0
    la = np.log(np.where(live, a, 1.0))
    lb = np.log(np.where(live, b, 1.0))
    return np.where(live, s * np.exp((1.0 - z) * la + z * lb), 0.0)


class ConformalMap:
    """The strip ``0 <= Re z <= 1`` onto the unit disc, sending ``theta`` to 0.

    The map is ``mu * (e^{i pi z} - e^{i pi theta}) / (e^{i pi z} - e^{-i pi theta})``
    with the unimodular ``mu = e^{-i pi theta}`` chosen so that the derivative
    at ``theta`` is real and positive; the map is then real on ``(0, 1)``.
    """

    def __init__(self, theta: float):
        if not 0 < theta < 1:
            raise DomainError("theta must lie in (0, 1)")
        self.theta = float(theta)
        self._w0 = np.exp(1j * np.pi * self.theta)
        # chi'(theta) = pi w0 / (2 sin(pi theta)), so |chi'| / chi' = conj(w0)
        self.rotation = np.conj(self._w0)
        self._jets = {}

    @property
    def derivative(self) -> float:
        """``phi'(theta) = pi / (2 sin(pi theta))``."""
        return float(np.pi / (2.0 * np.sin(np.pi * self.theta)))

    def __call__(self, z):
        w = np.exp(1j * np.pi * np.asarray(z, dtype=complex))
        return self.rotation * (w - self._w0) / (w - np.conj(self._w0))

    def boundary(self, side: int, t):
        if side not in (0, 1):
            raise DomainError("side must be 0 or 1")
        return self(side + 1j * np.asarray(t, dtype=float))

    def derivative_as(self, dtype=float):
        """The derivative at ``theta`` computed in ``dtype`` (float or longdouble)."""
        if dtype == np.longdouble:
            th = np.longdouble(self.theta)
            return np.longdouble(PI_LONG / (2 * np.sin(PI_LONG * th)))
        return self.derivative

    def jet(self, order: int, extended: bool = False) -> Jet:
        """Taylor jet at ``theta``, built from jet arithmetic on the exponential.

        With ``extended`` the arithmetic runs in ``np.clongdouble``.
        """
        key = (order, extended)
        if key not in self._jets:
            if extended:
                th = np.longdouble(self.theta)
                ipi = np.clongdouble(1j) * PI_LONG
                w0 = np.exp(ipi * th)
                fact = _factorials(order, np.longdouble)
            else:
                ipi, w0, fact = 1j * np.pi, self._w0, _factorials(order)
            j = np.arange(order + 1)
            e = Jet(self.theta, w0 * ipi ** j / fact)
            chi = (e - w0) / (e - np.conj(w0))
            # the rotation conj(w0) makes the derivative real and positive
            coeffs = np.conj(w0) * chi.coeffs
            coeffs[0] = 0
            self._jets[key] = coeffs
        return Jet(self.theta, self._jets[key].copy())

    def __repr__(self):
        return f"ConformalMap(theta={self.theta!r})"


def conformal_jet(theta: float, order: int) -> Jet:
    if order < 1:
        raise UsageError("conformal jets need order >= 1")
    return ConformalMap(theta).jet(order)


def conformal_boundary_eval(cmap: ConformalMap, side: int, t):
    return cmap.boundary(side, t)


def _default_radius(theta):
    return 0.5 * min(theta, 1.0 - theta)


def cauchy_coefficients(f, theta: float, order: int, radius: float | None = None,
                        quadrature_points: int = 256):
    """Coefficients ``0..order`` of ``f`` at ``theta`` by the trapezoid rule
    on the circle ``|z - theta| = radius``.

    ``f`` is called once with a 1-d array of nodes and may return extra
    leading axes; the node axis must be last.
    """
    r = _default_radius(theta) if radius is None else float(radius)
    if not 0 < r < min(theta, 1.0 - theta):
        raise DomainError("the contour must stay inside the open strip")
    if quadrature_points < 64:
        raise UsageError("use at least 64 quadrature points")
    k = np.arange(quadrature_points)
    nodes = theta + r * np.exp(2j * np.pi * k / quadrature_points)
    values = np.asarray(f(nodes), dtype=complex)
    # DFT of the samples divided by r**j is the j-th coefficient
    spectrum = np.fft.fft(values, axis=-1) / quadrature_points
    j = np.arange(order + 1)
    return spectrum[..., : order + 1] / r ** j


def cauchy_coefficient_oracle(f, theta: float, j: int, radius: float | None = None,
                              quadrature_points: int = 256):
    """``(1 / 2 pi i) \\oint f(z) (z - theta)^{-j-1} dz`` on a circle about ``theta``."""
    return cauchy_coefficients(f, theta, j, radius, quadrature_points)[..., j]
