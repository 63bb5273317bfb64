import numpy as np
import pytest
from scipy import integrate

from quadref import fourier_line

from jchom.core import ConvergenceError, DegeneratePoleError
from jchom.poles import (PoleSum, causal_profile, fourier, intensity_overlap, norm2, overlap,
                         pole_sum)
from jchom.quadrature import G_WEIGHTS, K_WEIGHTS, NODES, gk_integrate


def _line(fn, pts=(0.0,)):
    edges = [-np.inf, *pts, np.inf]
    return sum(integrate.quad(fn, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
               for a, b in zip(edges[:-1], edges[1:]))


def test_partial_fractions_reproduce_rational():
    poles = [1 - 0.5j, -0.3 + 0.2j, 2 - 1j]
    ps = pole_sum(lambda x: 3 * x + 1, poles, const=0.7)
    x = np.linspace(-4, 4, 9)
    direct = 0.7 * (3 * x + 1) / np.prod([x - p for p in poles], axis=0)
    np.testing.assert_allclose(ps(x), direct, rtol=1e-12)
    assert ps.leading == pytest.approx(0.0, abs=1e-14)


def test_batched_pole_sum():
    a = np.array([1 - 0.5j, 2 - 0.1j])
    ps = pole_sum(lambda x: np.ones_like(x), [a, 0.5j], const=np.array([1.0, 2.0]))
    assert ps.poles.shape == (2, 2)
    one = pole_sum(lambda x: np.ones_like(x), [a[1], 0.5j], const=2.0)
    np.testing.assert_allclose(ps.residues[1], one.residues, rtol=1e-14)


def test_degenerate_and_real_poles_rejected():
    with pytest.raises(DegeneratePoleError):
        pole_sum(lambda x: np.ones_like(x), [1 - 1j, 1 - 1j])
    with pytest.raises(ValueError):
        pole_sum(lambda x: np.ones_like(x), [1.0 + 0j, 1 - 1j])


@pytest.mark.parametrize("tau", [-3.0, -0.5, 0.7, 4.0])
def test_fourier_matches_quadrature(tau):
    ps = pole_sum(lambda x: np.ones_like(x), [0.3 - 0.4j, -1 + 0.8j, 1.5 - 0.2j])
    assert fourier([ps], tau) == pytest.approx(fourier_line(ps, tau), abs=1e-8)


def test_overlap_with_shifts():
    a = pole_sum(lambda x: np.ones_like(x), [0.3 - 0.4j, -1 + 0.8j], shift=2.0)
    b = pole_sum(lambda x: x, [0.5 - 0.3j, 1 + 0.6j, -0.2 - 1j], shift=-1.0)

    a0, b0 = PoleSum(0.0, a.poles, a.residues), PoleSum(0.0, b.poles, b.residues)
    ref = fourier_line(lambda x: np.conj(a0(x)) * b0(x), b.shift - a.shift)
    assert overlap([a], [b]) == pytest.approx(ref, abs=1e-8)
    cross = 2 * overlap([a], [b]).real
    assert norm2([a, b]) == pytest.approx(norm2([a]) + norm2([b]) + cross, rel=1e-12)
    assert norm2([a]) == pytest.approx(_line(lambda x: abs(a(x)) ** 2, (-1, 0.3)), rel=1e-8)


def test_intensity_overlap():
    a = pole_sum(lambda x: np.ones_like(x), [0.2 - 0.3j, -0.4 - 0.7j])
    b = pole_sum(lambda x: np.ones_like(x), [1.0 - 0.5j])
    ca, pa = causal_profile(a)
    cb, pb = causal_profile(b)

    def phi(c, p, t):
        return np.sum(c * np.exp(-1j * p * t))

    ref = integrate.quad(lambda t: abs(phi(ca, pa, t)) ** 2 * abs(phi(cb, pb, t)) ** 2,
                         0, np.inf, epsabs=1e-13)[0]
    assert intensity_overlap(a, b) == pytest.approx(ref, rel=1e-9)
    # the profile is the inverse transform of the spectrum for t > 0
    t = 1.3
    direct = fourier_line(a, -t) / np.sqrt(2 * np.pi)
    assert phi(ca, pa, t) == pytest.approx(direct, abs=1e-8)
    with pytest.raises(ValueError):
        causal_profile(PoleSum(0.0, np.array([1 + 1j]), np.array([1.0])))


def test_gauss_kronrod_rule_exactness():
    # the Kronrod part integrates degree 22 exactly, the Gauss part degree 13
    for deg in (0, 5, 13, 22):
        exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
        assert np.dot(K_WEIGHTS, NODES ** deg) == pytest.approx(exact, abs=1e-14)
    assert np.dot(G_WEIGHTS, NODES ** 12) == pytest.approx(2 / 13, abs=1e-14)


def test_gk_integrate():
    val, err = gk_integrate(lambda x: np.exp(-x * x), [-10, 0, 10], epsabs=1e-13, epsrel=1e-12)
    assert val == pytest.approx(np.sqrt(np.pi), abs=1e-12)
    assert err < 1e-11
    val, _ = gk_integrate(lambda x: 1 / np.sqrt(np.abs(x) + 1e-12), [0, 1], epsabs=1e-8)
    assert val == pytest.approx(2.0, abs=1e-5)
    with pytest.raises(ConvergenceError):
        gk_integrate(lambda x: np.sin(1 / (x + 1e-9)), [0, 1], epsabs=1e-14, epsrel=1e-14,
                     limit=50, slack=1.0)
