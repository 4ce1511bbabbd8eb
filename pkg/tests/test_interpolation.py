import math

import numpy as np
import pytest

import oracles
from twistlab import (InterpolationCouple, OrliczFunction, b1_jet, g_boundary_eval, g_jet,
                      k_constant, kalton_peck_couple, omega_n, phi_theta, phi_theta_inverse,
                      phi_theta_n, psi_map)
from twistlab.exceptions import DomainError, UsageError
from twistlab.harness import g_pointwise_oracle
from twistlab.jets import cauchy_coefficients

KP = kalton_peck_couple(0.5)
P13 = InterpolationCouple(OrliczFunction.power(1), OrliczFunction.power(3), 0.5)
PL = InterpolationCouple(OrliczFunction.power_log(2, 1), OrliczFunction.power(2), 0.5)
LP = InterpolationCouple(OrliczFunction.power(2), OrliczFunction.power_log(2, 1), 0.3)
TL = InterpolationCouple(OrliczFunction.power_log(2, 1), OrliczFunction.power_log(3, 2), 0.6)
S = np.logspace(-6, 6, 61)


def test_couple_validation():
    with pytest.raises(DomainError):
        InterpolationCouple(OrliczFunction.power(1), OrliczFunction.power(2), 1.0)
    with pytest.raises(DomainError):
        InterpolationCouple(OrliczFunction.power(1), OrliczFunction.ess_sup(), 0.5)
    assert KP.with_theta(0.25).theta == 0.25


@pytest.mark.parametrize("theta", [0.2, 0.5, 0.9])
def test_phi_theta_inverse_closed_forms(theta):
    kp = kalton_peck_couple(theta)
    assert np.allclose(phi_theta_inverse(kp, S), S ** theta, rtol=1e-12, atol=0)
    pp = InterpolationCouple(OrliczFunction.power(1.5), OrliczFunction.power(4), theta)
    want = S ** ((1 - theta) / 1.5 + theta / 4)
    assert np.allclose(phi_theta_inverse(pp, S), want, rtol=1e-12, atol=0)
    assert phi_theta_inverse(kp, 0.0) == 0


def test_phi_theta_inverse_is_the_product_formula():
    a, b = (OrliczFunction.power_log(2, 1).inverse(S), OrliczFunction.power(2).inverse(S))
    assert np.allclose(phi_theta_inverse(PL, S), np.sqrt(a * b), rtol=1e-12, atol=0)


def test_phi_theta_examples():
    assert phi_theta(KP, 3.0) == pytest.approx(9, rel=1e-14)
    assert phi_theta(KP, 0.0) == 0
    assert phi_theta(P13, 4.0) == pytest.approx(8, rel=1e-14)
    with pytest.raises(DomainError):
        phi_theta(KP, -1.0)


@pytest.mark.parametrize("couple", [KP, P13, PL, LP, TL], ids=["kp", "p13", "pl", "lp", "tl"])
def test_phi_theta_round_trip(couple):
    assert np.max(np.abs(phi_theta(couple, phi_theta_inverse(couple, S)) / S - 1)) <= 1e-9


def test_k_constant():
    assert k_constant(KP, 1) == 1
    assert k_constant(KP, 2) == pytest.approx(math.pi, rel=1e-15)
    assert k_constant(KP, 3) == pytest.approx(6 * (math.pi / 2) ** 2, rel=1e-15)
    with pytest.raises(UsageError):
        k_constant(KP, 0)


def test_g_jet_examples():
    assert np.allclose(g_jet(KP, [1.0]).jet.coeffs, [1, 0])
    x1 = 0.7 - 0.2j
    jet = g_jet(KP, [x1, 0.0]).jet
    assert jet[0] == 0 and complex(jet[1]) == pytest.approx(x1, rel=1e-15)
    assert np.allclose(g_jet(KP, [0.5, 2.0], order=3).jet.coeffs.astype(complex), oracles.G_KP_HALF,
                       rtol=1e-13, atol=0)
    with pytest.raises(UsageError):
        g_jet(KP, [1.0, 2.0], order=1)


@pytest.mark.parametrize("couple", [KP, PL, LP], ids=["kp", "pl", "lp"])
def test_g_jet_taylor_identity(couple):
    rng = np.random.default_rng(0)
    for m in range(1, 7):
        x = 10 ** rng.uniform(-3, 3, (50, m)) * np.exp(2j * np.pi * rng.uniform(size=(50, m)))
        x[:, m // 2] *= rng.uniform(size=50) > 0.3
        got = g_jet(couple, x).jet.coeffs[:, :m].astype(complex)
        want = x[:, ::-1]
        assert np.max(np.abs(got - want) / np.maximum(1, np.abs(want))) <= 1e-8


def test_g_jet_against_pointwise_oracle():
    rng = np.random.default_rng(4)
    for couple in (KP, PL):
        for m in (1, 3, 5):
            x = 10 ** rng.uniform(-1, 1, (10, m)) * np.exp(2j * np.pi * rng.uniform(size=(10, m)))
            ref = cauchy_coefficients(g_pointwise_oracle(couple, x), 0.5, 6)
            got = g_jet(couple, x, order=6).jet.coeffs.astype(complex)
            scale = np.maximum(1, np.abs(ref).max(axis=-1, keepdims=True))
            assert np.all(np.abs(got - ref) <= 1e-7 * np.abs(ref) + 1e-9 * scale)


def test_g_boundary_examples():
    t = np.linspace(-8, 8, 33)
    # phi_theta(1) = 1 and both endpoint inverses are 1 there, so a = b = 1
    assert np.allclose(np.abs(g_boundary_eval(KP, [1.0], 0, t)), 1.0, rtol=1e-14)
    assert not np.any(g_boundary_eval(KP, [0.0], 1, t))
    assert np.allclose(np.abs(g_boundary_eval(KP, [2.0], 1, t)), 4.0, rtol=1e-14)
    with pytest.raises(DomainError):
        g_boundary_eval(KP, [1.0], 2, t)


def test_phi_theta_n_examples():
    assert phi_theta_n(KP, np.array([0, 1.0])) == pytest.approx(1, rel=1e-14)
    assert phi_theta_n(KP, np.array([3.0])) == pytest.approx(9, rel=1e-14)
    assert phi_theta_n(KP, np.array([-2j, 0])) == pytest.approx(4, rel=1e-14)
    # closed form on the KP couple: |x0|^2 + |x1 - 2 x0 log|x0||^2
    x1, x0 = 0.3 + 0.1j, -1.7
    want = abs(x0) ** 2 + abs(x1 - 2 * x0 * math.log(abs(x0))) ** 2
    assert phi_theta_n(KP, np.array([x1, x0])) == pytest.approx(want, rel=1e-12)


def test_b1_jet_examples():
    e1 = np.array([0, 1.0, 0])
    assert np.allclose(b1_jet(KP, e1, 1, 3).coeffs, [1, 0, 0, 0])
    assert not np.any(b1_jet(KP, e1, 0, 3).coeffs)
    rng = np.random.default_rng(0)
    x = rng.normal(size=6) + 1j * rng.normal(size=6)
    om = omega_n(PL, 1, x[:, None])
    for k in range(6):
        jet = b1_jet(PL, x, k)
        assert abs(jet[0] - x[k]) <= 1e-9 * abs(x[k])
        assert jet[1] == om[k]


def test_omega_examples():
    # unit vector: the log term vanishes up to the Luxemburg solver tolerance
    assert np.abs(omega_n(kalton_peck_couple(0.3), 1, np.array([[0], [1.0], [0]]))).max() <= 1e-10
    assert np.allclose(omega_n(KP, 1, np.array([[1.0], [1.0]])), -math.log(2), rtol=1e-12)
    got = omega_n(KP, 2, np.array([[0.5, 1.0], [-1.0, 2.0]]))
    assert np.allclose(got, oracles.OMEGA2_KP, rtol=1e-11, atol=0)
    assert not np.any(omega_n(KP, 3, np.zeros((4, 3))))
    with pytest.raises(UsageError):
        omega_n(KP, 0, np.zeros((2, 0)))
    with pytest.raises(UsageError):
        omega_n(KP, 2, np.zeros((2, 3)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_omega_homogeneous(n):
    rng = np.random.default_rng(n)
    x = rng.normal(size=(5, 7, n)) + 1j * rng.normal(size=(5, 7, n))
    for lam in (10.0, 1j, 0.01 * np.exp(1j * np.pi / 3), -3.3 + 0.4j):
        a, b = omega_n(PL, n, lam * x), lam * omega_n(PL, n, x)
        scale = np.maximum(np.abs(b).max(axis=-1), np.abs(lam * x).max(axis=(-2, -1)))
        assert np.all(np.abs(a - b).max(axis=-1) <= 1e-9 * scale)


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.75])
def test_omega1_is_scaled_kalton_peck(theta):
    rng = np.random.default_rng(7)
    x = rng.normal(size=(20, 9)) + 1j * rng.normal(size=(20, 9))
    p = 1 / theta
    norm = (np.abs(x) ** p).sum(axis=-1, keepdims=True) ** (1 / p)
    want = p * x * np.log(np.abs(x) / norm)
    got = omega_n(kalton_peck_couple(theta), 1, x[..., None])
    assert np.all(np.abs(got - want) <= 1e-9 * np.abs(want).max(axis=-1, keepdims=True))


def test_psi_map_examples():
    assert psi_map(KP, 2, np.array([[2.0]]))[0] == pytest.approx(2 * math.log(4), rel=1e-14)
    assert not np.any(psi_map(KP, 3, np.zeros((3, 2))))
    assert np.array_equal(psi_map(KP, 2, np.array([[1.0], [0], [0]])), [0, 0, 0])
    x0 = np.array([[0.3], [-2.0 + 1j]])
    a, b = np.ones(2), np.abs(x0[:, 0]) ** 2
    assert np.allclose(psi_map(KP, 2, x0), x0[:, 0] * np.log(b / a), rtol=1e-14)
    with pytest.raises(UsageError):
        psi_map(KP, 1, np.zeros((1, 0)))
