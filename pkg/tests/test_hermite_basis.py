import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import hermite as H
from scipy import integrate

from hermite_vortex.hermite_basis import (
    CoreParams,
    HermiteIndex,
    basis_norm_sq,
    gaussian_phi00,
    hermite_function,
    hermite_indices,
    hermite_polynomial,
    lambda_of_t,
    projection_prefactor,
    velocity_moment,
    velocity_moments,
    velocity_v00,
)

lams = st.floats(0.3, 3.0)
coords = st.floats(-3.0, 3.0)


def test_indices_are_graded():
    idx = hermite_indices(2)
    assert idx == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert all(isinstance(k, HermiteIndex) for k in idx)
    assert len(hermite_indices(4)) == 15
    with pytest.raises(ValueError):
        hermite_indices(-1)


@pytest.mark.parametrize("lam0, nu, t, expected", [(1.0, 0.0, 5.0, 1.0), (0.01, 0.01, 0.0, 0.01),
                                                   (1.0, 0.25, 3.0, 2.0)])
def test_lambda_of_t(lam0, nu, t, expected):
    assert lambda_of_t(CoreParams(lam0, nu), t) == pytest.approx(expected, rel=1e-15)


def test_core_params_validation():
    with pytest.raises(ValueError):
        CoreParams(0.0, 0.1)
    with pytest.raises(ValueError):
        CoreParams(1.0, -0.1)
    with pytest.raises(ValueError):
        lambda_of_t(CoreParams(1.0, 0.1), -1.0)


@given(st.floats(0.1, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 10.0), st.floats(0.0, 10.0))
def test_lambda_nondecreasing(lam0, nu, t1, t2):
    p = CoreParams(lam0, nu)
    lo, hi = sorted((t1, t2))
    assert lambda_of_t(p, lo) <= lambda_of_t(p, hi)


def test_phi00_values():
    assert gaussian_phi00((0.0, 0.0), 1.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert gaussian_phi00((1.0, 0.0), 1.0) == pytest.approx(math.exp(-1) / math.pi, rel=1e-15)
    with pytest.raises(ValueError):
        gaussian_phi00((0.0, 0.0), 0.0)


def test_phi00_unit_mass():
    val, _ = integrate.dblquad(lambda y, x: gaussian_phi00((x, y), 0.7), -12, 12, -12, 12,
                               epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_hermite_polynomial_examples():
    assert hermite_polynomial((0, 0), (0.3, -2.0), 1.7) == 1.0
    z, lam = (0.4, -1.1), 1.3
    assert hermite_polynomial((1, 0), z, lam) == pytest.approx(2 * z[0] / lam ** 2)
    assert hermite_polynomial((2, 0), (1.0, 0.0), 1.0) == pytest.approx(2.0)


@given(st.integers(0, 6), st.integers(0, 6), coords, coords, lams)
def test_hermite_polynomial_matches_numpy(n1, n2, z1, z2, lam):
    # physicists' polynomials with the lam^-n scaling
    expected = (H.hermval(z1 / lam, np.eye(n1 + 1)[n1]) * H.hermval(z2 / lam, np.eye(n2 + 1)[n2])
                / lam ** (n1 + n2))
    got = hermite_polynomial((n1, n2), (z1, z2), lam)
    assert got == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_hermite_function_examples():
    assert hermite_function((0, 0), (0.0, 0.0), 1.0) == pytest.approx(1 / math.pi)
    assert hermite_function((1, 0), (0.0, 0.0), 1.0) == 0.0
    assert hermite_function((1, 0), (1.0, 0.0), 1.0) == pytest.approx(-2 / math.pi * math.exp(-1))


def _fd(f, x, k, h=1e-2):
    # central difference of order k1 in x1 and k2 in x2, Richardson extrapolated
    def once(h):
        c1 = _stencil(k[0])
        c2 = _stencil(k[1])
        total = 0.0
        for i, a in c1:
            for j, b in c2:
                total += a * b * f((x[0] + i * h, x[1] + j * h))
        return total / h ** (k[0] + k[1])

    return (4 * once(h / 2) - once(h)) / 3


def _stencil(k):
    # central differences of second-order accuracy
    table = {0: [(0, 1.0)], 1: [(-1, -0.5), (1, 0.5)], 2: [(-1, 1.0), (0, -2.0), (1, 1.0)],
             3: [(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)]}
    return table[k]


@pytest.mark.parametrize("k", [k for k in hermite_indices(3)])
def test_hermite_function_is_derivative_of_phi00(k):
    lam = 1.1
    for x in [(0.3, -0.2), (1.0, 0.5), (-0.7, 1.2)]:
        expected = _fd(lambda p: gaussian_phi00(p, lam), x, k)
        assert hermite_function(k, x, lam) == pytest.approx(expected, abs=1e-5)


def test_orthogonality_relation():
    x, w = H.hermgauss(40)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    z = np.stack([X1, X2], -1)
    for n in hermite_indices(4):
        for m in hermite_indices(4):
            val = np.sum(W * hermite_polynomial(n, z, 1.0) * hermite_polynomial(m, z, 1.0))
            exp = math.pi * 2 ** (n[0] + n[1]) * math.factorial(n[0]) * math.factorial(n[1]) * (n == m)
            assert abs(val - exp) < 1e-8 * max(1.0, exp)


@given(st.integers(0, 4), st.integers(0, 4), lams)
def test_prefactor_inverts_norm(k1, k2, lam):
    # P_k phi_k = c_k int H_k phi_k = c_k (-1)^|k| int H_k^2 phi00 = 1
    k = (k1, k2)
    int_hk2_phi00 = basis_norm_sq(k, lam)
    assert projection_prefactor(k, lam) * (-1) ** (k1 + k2) * int_hk2_phi00 == pytest.approx(1.0)


def test_heat_identity():
    p = CoreParams(0.8, 0.05)
    x, t, dt, h = (0.4, -0.3), 1.5, 1e-4, 1e-3
    dphi = (gaussian_phi00(x, p.lam(t + dt)) - gaussian_phi00(x, p.lam(t - dt))) / (2 * dt)
    lam = p.lam(t)
    f = lambda q: gaussian_phi00(q, lam)
    lap = (f((x[0] + h, x[1])) + f((x[0] - h, x[1])) + f((x[0], x[1] + h)) + f((x[0], x[1] - h))
           - 4 * f(x)) / h ** 2
    assert dphi == pytest.approx(p.nu * lap, rel=1e-5)


def test_v00_examples():
    assert np.all(velocity_v00((0.0, 0.0), 1.0) == 0.0)
    assert velocity_v00((1.0, 0.0), 1.0) == pytest.approx([0.0, (1 - math.exp(-1)) / (2 * math.pi)])
    far = velocity_v00((300.0, 400.0), 1.0)
    assert np.hypot(*far) == pytest.approx(1 / (2 * math.pi * 500.0), rel=1e-14)
    # counterclockwise swirl
    assert velocity_v00((0.0, 1.0), 1.0)[0] < 0


def test_v00_series_branch_continuous():
    lam = 1.0
    for r in [9.9e-4, 1.0e-3, 1.01e-3]:
        v = velocity_v00((r, 0.0), lam)[1]
        exact = -math.expm1(-r * r) / (2 * math.pi * r)
        assert v == pytest.approx(exact, rel=1e-13)


def test_v00_divergence_and_curl():
    lam, h = 0.9, 1e-4
    f = lambda p: velocity_v00(np.array(p), lam)
    for x in [(0.5, 0.2), (-1.0, 0.7), (0.05, -1.5)]:
        d1 = (f((x[0] + h, x[1]))[0] - f((x[0] - h, x[1]))[0]) / (2 * h)
        d2 = (f((x[0], x[1] + h))[1] - f((x[0], x[1] - h))[1]) / (2 * h)
        assert abs(d1 + d2) < 1e-8
        c = ((f((x[0] + h, x[1]))[1] - f((x[0] - h, x[1]))[1])
             - (f((x[0], x[1] + h))[0] - f((x[0], x[1] - h))[0])) / (2 * h)
        assert c == pytest.approx(gaussian_phi00(x, lam), abs=1e-6)


def test_velocity_moment_zero_is_v00():
    x = np.array([[0.3, -0.4], [2.0, 1.0]])
    assert np.allclose(velocity_moment((0, 0), x, 1.2), velocity_v00(x, 1.2), atol=1e-15)


@pytest.mark.parametrize("l, x", [((1, 0), (0.0, 0.0)), ((0, 1), (2.0, 1.0)), ((1, 1), (0.4, -0.3)),
                                  ((2, 0), (0.0, 0.0)), ((1, 2), (-0.6, 0.9))])
def test_velocity_moment_finite_difference(l, x):
    lam = 1.0
    for comp in range(2):
        expected = _fd(lambda p: velocity_v00(np.array(p), lam)[comp], x, l)
        assert velocity_moment(l, x, lam)[comp] == pytest.approx(expected, abs=1e-6)


def test_velocity_moments_broadcast():
    x = np.zeros((3, 4, 2))
    x[..., 0] = np.linspace(-1, 1, 4)
    allv = velocity_moments(3, x, 0.8)
    assert allv.shape == (3, 4, 10, 2)
    for i, k in enumerate(hermite_indices(3)):
        assert np.allclose(allv[..., i, :], velocity_moment(k, x, 0.8), atol=1e-15)
