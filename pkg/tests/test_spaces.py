import math

import numpy as np
import pytest

import oracles
from twistlab import (BlockVector, InterpolationCouple, OrliczFunction, complexification_norm,
                      fenchel_orlicz_norm, kalton_peck_couple, omega_n, real_imag_split,
                      rochberg_quasinorm)
from twistlab.exceptions import UsageError

KP = kalton_peck_couple(0.5)
PL = InterpolationCouple(OrliczFunction.power_log(2, 1), OrliczFunction.power(2), 0.5)


def test_block_vector_canonical():
    v = BlockVector(2, [3, 0, 5], [[1, 2], [0, 0], [0, 1j]])
    assert v.support == (3, 5)
    assert np.array_equal(v.component(0), [2, 1j])
    assert np.array_equal(v.component(1), [1, 0])
    assert v == BlockVector(2, [5, 3], [[0, 1j], [1, 2]])
    assert BlockVector.from_components([0, 1], [1, 0]) == BlockVector(2, [0, 1], [[0, 1], [1, 0]])
    assert v - v == BlockVector.zero(2)
    assert (2 * v).blocks[0, 1] == 4
    assert np.array_equal(v.dense(7)[3], [1, 2])
    for bad in (lambda: BlockVector(2, [0, 0], [[1, 0], [0, 1]]),
                lambda: BlockVector(2, [-1], [[1, 0]]),
                lambda: BlockVector(2, [0], [[1, 0, 0]]),
                lambda: v.component(2),
                lambda: v + BlockVector.zero(3)):
        with pytest.raises(UsageError):
            bad()


def test_fenchel_examples():
    assert fenchel_orlicz_norm(KP, 2, BlockVector(2, [0], [[0, 1]])) == pytest.approx(1, abs=1e-12)
    assert fenchel_orlicz_norm(KP, 2, BlockVector.zero(2)) == 0
    got = fenchel_orlicz_norm(KP, 2, BlockVector(2, [0], [[1, 2]]))
    assert got == pytest.approx(oracles.KP_FENCHEL_1_2, rel=1e-11)


@pytest.mark.parametrize("theta", [0.25, 0.5, 0.75])
def test_fenchel_n1_is_lp_norm(theta):
    x = np.random.default_rng(1).normal(size=(20, 6)) * 3
    p = 1 / theta
    got = fenchel_orlicz_norm(kalton_peck_couple(theta), 1, x[..., None].astype(complex))
    assert np.allclose(got, (np.abs(x) ** p).sum(axis=-1) ** (1 / p), rtol=1e-10, atol=0)


def test_rochberg_examples():
    assert rochberg_quasinorm(KP, 2, BlockVector(2, [0], [[0, 1]])) == pytest.approx(1, abs=1e-12)
    assert rochberg_quasinorm(KP, 2, BlockVector(2, [0], [[1, 2]])) == pytest.approx(3, rel=1e-11)
    assert rochberg_quasinorm(KP, 3, BlockVector.zero(3)) == 0
    x = np.random.default_rng(2).normal(size=7) + 1j
    lux = fenchel_orlicz_norm(PL, 1, x[:, None])
    assert rochberg_quasinorm(PL, 1, x[:, None]) == pytest.approx(lux, rel=1e-10)
    # first term vanishes on (Omega^1(x), x)
    v = np.stack([omega_n(PL, 1, x[:, None]), x], axis=-1)
    assert rochberg_quasinorm(PL, 2, v) == pytest.approx(lux, rel=1e-9)


def test_norms_batch_and_blockvector_agree():
    rng = np.random.default_rng(3)
    blocks = rng.normal(size=(4, 5, 2)) + 1j * rng.normal(size=(4, 5, 2))
    for fn in (fenchel_orlicz_norm, rochberg_quasinorm):
        batch = fn(KP, 2, blocks)
        assert batch.shape == (4,)
        assert batch[2] == fn(KP, 2, BlockVector.from_dense(blocks[2]))
    with pytest.raises(UsageError):
        fenchel_orlicz_norm(KP, 3, BlockVector.zero(2))


def test_complexification_examples():
    euclid = np.linalg.norm
    x = np.array([3.0, -4.0, 1.0])
    assert complexification_norm(euclid, x, np.zeros(3)) == euclid(x)
    e1, e2 = np.eye(3)[:2]
    assert complexification_norm(euclid, e1, e2) == pytest.approx(1, abs=1e-12)
    y = np.array([0.5, 2.0, -1.0])
    l1 = lambda v: np.abs(v).sum()
    a, b = complexification_norm(l1, x, y), complexification_norm(l1, -y, x)
    assert a == pytest.approx(b, abs=1e-10)
    # l1 complexification: maximum of a piecewise-sinusoidal function, check against a fine grid
    s = np.linspace(0, 2 * np.pi, 200001)
    fine = np.abs(np.cos(s)[:, None] * x + np.sin(s)[:, None] * y).sum(axis=1).max()
    assert a >= fine - 1e-9
    vec = complexification_norm(lambda m: np.abs(m).sum(axis=-1), x, y, vectorized=True)
    assert vec == pytest.approx(a, abs=1e-12)
    with pytest.raises(UsageError):
        complexification_norm(euclid, x, y[:2])


def test_real_imag_split():
    v = BlockVector(2, [0, 4], [[1 + 2j, -3], [0.5j, 2]])
    re, im = real_imag_split(v)
    assert not np.any(re.blocks.imag) and not np.any(im.blocks.imag)
    assert np.array_equal(re.dense(5) + 1j * im.dense(5), v.dense(5))
    r, i = real_imag_split(BlockVector(1, [1], [[2.0]]))
    assert i == BlockVector.zero(1) and r.blocks[0, 0] == 2
    r, i = real_imag_split(BlockVector(1, [1], [[-3j]]))
    assert r == BlockVector.zero(1) and i.blocks[0, 0] == -3


def test_fenchel_non_monotone_modular():
    # along (0, 0, u) phi_theta_n dips back to 1 at u = 1 after exceeding it on
    # (0.93, 0.98), so the smallest feasible radius is x0 itself
    for x0 in (1.76e-3, 1.0, 3e4):
        v = np.array([[0, 0, x0]], dtype=complex)
        assert fenchel_orlicz_norm(KP, 3, v) == pytest.approx(x0, rel=1e-11)
        lam = 0.01 * np.exp(1j * np.pi / 3)
        assert fenchel_orlicz_norm(KP, 3, lam * v) == pytest.approx(abs(lam) * x0, rel=1e-11)
