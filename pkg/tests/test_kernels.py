"""The jitted kernels and their pure-numpy fallbacks must agree exactly
(same operations, same order), and outputs must stay inside the open unit
interval."""

import numpy as np
import pytest

from smokewatch import kernels


def random_net(rng, m, p, h):
    xn = rng.normal(size=(m, p))
    w1 = rng.normal(scale=0.7, size=(h, p))
    b1 = rng.normal(size=h)
    w2 = rng.normal(size=h)
    b2 = float(rng.normal())
    return w1, b1, w2, b2, xn


def test_dispatch_is_configured():
    # whichever path is active, both implementations stay importable
    assert callable(kernels.batch_forward_numpy)
    assert callable(kernels.batch_jacobian_numpy)
    assert isinstance(kernels.USING_NUMBA, bool)


def test_forward_paths_agree(rng):
    for _ in range(25):
        m = int(rng.integers(1, 12))
        p = int(rng.integers(1, 15))
        h = int(rng.integers(1, 6))
        w1, b1, w2, b2, xn = random_net(rng, m, p, h)
        a = kernels.batch_forward(w1, b1, w2, b2, xn)
        b = kernels.batch_forward_numpy(w1, b1, w2, b2, xn)
        assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


def test_jacobian_paths_agree(rng):
    for _ in range(25):
        m = int(rng.integers(1, 10))
        p = int(rng.integers(1, 12))
        h = int(rng.integers(1, 5))
        w1, b1, w2, b2, xn = random_net(rng, m, p, h)
        ja, ya = kernels.batch_jacobian(w1, b1, w2, b2, xn)
        jb, yb = kernels.batch_jacobian_numpy(w1, b1, w2, b2, xn)
        assert ja.shape == (m, h * p + h + h + 1)
        assert np.allclose(ya, yb, rtol=1e-13, atol=1e-15)
        assert np.allclose(ja, jb, rtol=1e-12, atol=1e-14)


def test_outputs_clamped_to_open_interval():
    # huge bias saturates the logistic; the clamp must keep it off 0 and 1
    w1 = np.zeros((1, 2))
    b1 = np.zeros(1)
    w2 = np.zeros(1)
    xn = np.zeros((3, 2))
    hi = kernels.batch_forward(w1, b1, w2, 1e4, xn)
    lo = kernels.batch_forward(w1, b1, w2, -1e4, xn)
    assert np.all(hi < 1.0) and np.all(hi >= kernels.OPEN_HI)
    assert np.all(lo > 0.0) and np.all(lo <= kernels.OPEN_LO)


def test_logistic_extremes_are_stable():
    w1 = np.zeros((1, 1))
    b1 = np.zeros(1)
    w2 = np.ones(1)
    xn = np.zeros((1, 1))
    for b2 in (-745.0, -60.0, 0.0, 60.0, 745.0):
        y = kernels.batch_forward(w1, b1, w2, b2, xn)
        assert np.isfinite(y).all()
        assert 0.0 < y[0] < 1.0


def test_forward_zero_weights_is_half():
    w1 = np.zeros((4, 7))
    b1 = np.zeros(4)
    w2 = np.zeros(4)
    xn = np.random.default_rng(5).normal(size=(6, 7))
    y = kernels.batch_forward(w1, b1, w2, 0.0, xn)
    assert np.all(y == 0.5)
