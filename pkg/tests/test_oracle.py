import numpy as np
import pytest

from jchom.amplitudes import Pair, out_corr_term
from jchom.checks import ORACLE_SPEC, random_case
from jchom.core import ConvergenceError, JcParams, TwoPhotonInput
from jchom.correlations import g2_norm_analytic, g2_raw
from jchom.hom import hom_gamma
from jchom.oracle import QuadSpec, gl_adaptive, gl_line, quad_corr_term, quad_g2, quad_gamma
from jchom.spectrum import beam_splitter_energies


def test_quadspec_validation():
    with pytest.raises(ValueError):
        QuadSpec(0.0, 1e-8)
    with pytest.raises(ValueError):
        QuadSpec(1e-8, 1e-8, window_factor=1.0)
    s = QuadSpec(1e-8, 1e-6).loosened(0.5)
    assert (s.abs_tol, s.rel_tol) == (5e-9, 5e-7)


def test_kernel_on_known_integrals():
    val, err = gl_adaptive(lambda x: np.cos(3 * x) + 1j * x ** 5, [0.0, 1.0, 2.0],
                           QuadSpec(1e-14, 1e-13))
    assert val == pytest.approx(np.sin(6) / 3 + 64j / 6, abs=1e-12)
    val, _ = gl_line(lambda x: 1 / (x ** 2 + 0.25), [0.0], 1.0, QuadSpec(1e-13, 1e-12))
    assert val.real == pytest.approx(2 * np.pi, rel=1e-10)


def test_kernel_reports_unresolved_integrand():
    with pytest.raises(ConvergenceError):
        gl_adaptive(lambda x: np.sign(x - 1 / 3) * np.abs(x - 1 / 3) ** -0.9, [0.0, 1.0],
                    QuadSpec(1e-14, 1e-14, max_depth=8))
    with pytest.raises(ConvergenceError):
        gl_adaptive(lambda x: np.sin(1e5 * x), [0.0, 10.0],
                    QuadSpec(1e-14, 1e-14, max_panels=50))


def test_corr_term_matches_residue_path():
    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(100):
        p, inp = random_case(rng, same_ports=rng.uniform() < 0.3)
        e = inp.packet1.nu0 + inp.packet2.nu0
        nu1p = e / 2 + rng.uniform(-1, 1)
        nu2p = e - nu1p + rng.uniform(-0.2, 0.2)
        b, _ = quad_corr_term(nu1p, nu2p, inp, p)
        worst = max(worst, abs(out_corr_term(nu1p, nu2p, inp, p) - b) / abs(b))
    assert worst < 1e-8


def test_corr_term_vanishes_like_g4():
    inp = TwoPhotonInput.symmetric(0.05, 0.02)
    vals = []
    for g in (1e-2, 1e-3):
        p = JcParams(0.0, 0.3, g, 0.1)
        vals.append(abs(quad_corr_term(0.04, 0.06, inp, p)[0]))
    assert vals[0] / vals[1] == pytest.approx(1e4, rel=0.02)


def test_corr_term_error_estimate_is_honest():
    p = JcParams.from_detuning(0.5, 0.3)
    inp = TwoPhotonInput.symmetric(0.9, 0.05, 4.0)
    spec = QuadSpec(1e-10, 1e-8)
    a, err = quad_corr_term(0.8, 1.05, inp, p, spec)
    b, _ = quad_corr_term(0.8, 1.05, inp, p, spec.loosened(0.5))
    assert abs(a - b) <= err


@pytest.mark.slow
def test_gamma_oracle_at_figure_parameters():
    p = JcParams.from_detuning(2.0, 0.1)
    bs = beam_splitter_energies(p)
    for nu0 in (bs.plus1, bs.plus2 + 0.02):
        inp = TwoPhotonInput.symmetric(nu0, 0.01)
        b, _ = quad_gamma(inp, p, ORACLE_SPEC)
        assert abs(hom_gamma(inp, p).gamma - b) < 1e-5
        assert 0 <= b <= 1 + 1e-9


@pytest.mark.slow
def test_gamma_oracle_delay_evenness():
    p = JcParams.from_detuning(1.0, 0.4)
    vals = [quad_gamma(TwoPhotonInput.symmetric(0.9, 0.1, dt), p, ORACLE_SPEC)[0]
            for dt in (6.0, -6.0)]
    assert abs(vals[0] - vals[1]) < 1e-6
    assert all(0 <= v <= 1 + 1e-9 for v in vals)


@pytest.mark.slow
def test_g2_oracle_non_negative_and_close():
    # the randomized 20-point comparison runs with the acceptance suite
    rng = np.random.default_rng(17)
    for _ in range(3):
        p, inp = random_case(rng, identical=True)
        tau = rng.uniform(-3, 3) / inp.packet1.xi
        b, _ = quad_g2("11", tau, inp, p, ORACLE_SPEC)
        assert b >= 0
        assert abs(float(g2_raw("11", tau, inp, p)) - b) <= 1e-5 * g2_norm_analytic("11", inp, p)


def _tau_rule(edges, n=12, rate=0.2, m=6):
    """Even-in-tau rule: Gauss-Legendre panels on ``edges`` plus a Laguerre tail."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append((a + b) / 2 + (b - a) / 2 * x)
        weights.append((b - a) / 2 * w)
    s, v = np.polynomial.laguerre.laggauss(m)
    nodes.append(edges[-1] + s / rate)
    weights.append(v * np.exp(s) / rate)
    return np.concatenate(nodes), 2 * np.concatenate(weights)


@pytest.mark.slow
def test_g2_oracle_sum_rule():
    p = JcParams.from_detuning(1.0, 0.5)
    inp = TwoPhotonInput.symmetric(0.7, 0.2)
    tau, w = _tau_rule((0.0, 5.0, 15.0, 30.0, 60.0))
    g12 = np.array([quad_g2("12", t, inp, p, ORACLE_SPEC)[0] for t in tau])
    assert np.all(g12 >= 0)
    gamma, _ = quad_gamma(inp, p, ORACLE_SPEC)
    assert abs(np.dot(w, g12) - gamma) < 1e-4
