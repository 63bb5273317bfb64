"""Quick self-checks behind the ``check`` and ``oracle`` CLI verbs.

Each check returns ``(passed, detail)``; the runners print one line per check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .amplitudes import CorrMethod, Pair, out_corr_term
from .core import JcParams, LorentzianPacket, Ports, TwoPhotonInput
from .correlations import g2_norm_analytic, g2_norm_limit, g2_raw, g2_trace
from .hom import HomMethod, hom_gamma, hom_gamma_linear, output_probabilities
from .oracle import QuadSpec, quad_corr_term, quad_g2, quad_gamma
from .scattering import reflection_amp, transmission_amp
from .spectrum import Branch, beam_splitter_energies, jc_energy

ORACLE_SPEC = QuadSpec(1e-9, 1e-7)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _unitarity():
    rng = np.random.default_rng(1)
    n = 10_000
    wc = rng.uniform(-5, 5, n)
    delta = rng.uniform(-6, 6, n)
    worst = 0.0
    for k in range(n):
        p = JcParams(wc[k], wc[k] - delta[k], rng.uniform(0.1, 3), rng.uniform(0.01, 3))
        nu = rng.uniform(-10, 10)
        dev = abs(abs(reflection_amp(nu, p)) ** 2 + abs(transmission_amp(nu, p)) ** 2 - 1)
        worst = max(worst, dev)
    return worst < 1e-12, f"max ||r|^2+|t|^2-1| = {worst:.2e} over {n} draws"


def _paper_params():
    return [JcParams.from_detuning(d, 0.1) for d in (-2.0, 0.0, 2.0)]


def _resonance_zeros():
    worst = 0.0
    for p in _paper_params():
        for s in Branch:
            worst = max(worst, abs(reflection_amp(jc_energy(1, s, p), p)))
        worst = max(worst, abs(transmission_amp(p.omega_q, p)))
    return worst < 1e-10, f"max |r(eps1)|, |t(wq)| = {worst:.2e}"


def _beam_splitter():
    worst = 0.0
    for p in _paper_params():
        for om in beam_splitter_energies(p).as_tuple():
            worst = max(worst, abs(abs(transmission_amp(om, p)) ** 2 - 0.5))
    return worst < 1e-10, f"max ||t(Omega)|^2 - 1/2| = {worst:.2e}"


def _linear_zero():
    p = JcParams.from_detuning(2.0, 0.1)
    val = hom_gamma_linear(beam_splitter_energies(p).plus1, p)
    return val < 1e-12, f"gamma_lin(Omega1+) = {val:.2e}"


def _conservation():
    worst = 0.0
    for d, nu0, dt in ((2.0, 0.5, 0.0), (0.0, 1.0, 30.0), (-1.0, -0.3, -10.0)):
        p = JcParams.from_detuning(d, 0.1)
        inp = TwoPhotonInput.symmetric(nu0, 0.05, dt)
        probs = output_probabilities(inp, p)
        worst = max(worst, abs(sum(probs.values()) - 1))
    return worst < 1e-8, f"max |P11+P22+P12-1| = {worst:.2e}"


def _delay_evenness():
    p = JcParams.from_detuning(2.0, 0.1)
    a = hom_gamma(TwoPhotonInput.symmetric(0.5, 0.02, 40.0), p).gamma
    b = hom_gamma(TwoPhotonInput.symmetric(0.5, 0.02, -40.0), p).gamma
    return abs(a - b) < 1e-9, f"|gamma(dt) - gamma(-dt)| = {abs(a - b):.2e}"


def _sum_rule():
    p = JcParams.from_detuning(1.0, 0.5)
    inp = TwoPhotonInput.symmetric(0.7, 0.1)
    gamma = hom_gamma(inp, p).gamma
    integral = g2_trace(Pair.P12, inp, p, normalize=False).integral
    dev = abs(integral - gamma)
    return dev < 1e-4, f"|int G12 - gamma| = {dev:.2e}"


def _normalization_routes():
    p = JcParams.from_detuning(2.0, 0.1)
    inp = TwoPhotonInput.symmetric(0.5, 0.01, 300.0)
    a = g2_norm_analytic(Pair.P12, inp, p)
    b = g2_norm_limit(Pair.P12, inp, p)
    dev = abs(a - b) / a
    return dev < 1e-4, f"relative gap analytic vs limit G2_inf = {dev:.2e}"


INVARIANT_CHECKS: list[tuple[str, Callable]] = [
    ("unitarity", _unitarity),
    ("resonance zeros", _resonance_zeros),
    ("beam-splitter points", _beam_splitter),
    ("linear HOM zero", _linear_zero),
    ("probability conservation", _conservation),
    ("delay evenness", _delay_evenness),
    ("G12 sum rule", _sum_rule),
    ("G2_inf routes", _normalization_routes),
]


def random_case(rng: np.random.Generator, same_ports: bool = False, identical: bool = False):
    """A scatterer and packet pair spanning resonant and dispersive regimes."""
    kappa = rng.uniform(0.1, 1.0)
    params = JcParams.from_detuning(rng.uniform(-4, 4), kappa)
    xi1, xi2 = rng.uniform(0.1, 0.6, 2) * kappa
    e1p = jc_energy(1, Branch.PLUS, params)
    nu1, nu2 = e1p + rng.uniform(-1, 1, 2)
    if identical:
        xi2, nu2 = xi1, nu1
    inp = TwoPhotonInput(LorentzianPacket(nu1, xi1, rng.uniform(-2, 2) / xi1),
                         LorentzianPacket(nu2, xi2, 0.0),
                         Ports.SAME if same_ports else Ports.DIFFERENT)
    return params, inp


def _oracle_corr(n):
    def run():
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(n):
            p, inp = random_case(rng)
            e = inp.packet1.nu0 + inp.packet2.nu0
            nu1p = e / 2 + rng.uniform(-1, 1)
            nu2p = e - nu1p + rng.uniform(-0.2, 0.2)
            a = out_corr_term(nu1p, nu2p, inp, p)
            b, _ = quad_corr_term(nu1p, nu2p, inp, p)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
        return worst < 1e-8, f"max relative gap over {n} draws = {worst:.2e}"
    return run


def _oracle_gamma(n):
    def run():
        rng = np.random.default_rng(12)
        worst = 0.0
        for _ in range(n):
            p, inp = random_case(rng)
            a = hom_gamma(inp, p).gamma
            b, _ = quad_gamma(inp, p, ORACLE_SPEC)
            worst = max(worst, abs(a - b))
        return worst < 1e-5, f"max |gamma - oracle| over {n} draws = {worst:.2e}"
    return run


def _oracle_g2(n):
    def run():
        rng = np.random.default_rng(13)
        worst = 0.0
        for _ in range(n):
            p, inp = random_case(rng, identical=True)
            pair = Pair.P12 if rng.uniform() < 0.5 else Pair.P11
            tau = rng.uniform(-3, 3) / inp.packet1.xi
            a = float(g2_raw(pair, tau, inp, p))
            b, _ = quad_g2(pair, tau, inp, p, ORACLE_SPEC)
            worst = max(worst, abs(a - b) / g2_norm_analytic(pair, inp, p))
        return worst < 1e-5, f"max |G2 - oracle| / G2_inf over {n} points = {worst:.2e}"
    return run


def oracle_checks(slow: bool = False) -> list[tuple[str, Callable]]:
    n_corr, n_gamma, n_g2 = (100, 5, 20) if slow else (10, 1, 2)
    return [
        ("correlation term vs oracle", _oracle_corr(n_corr)),
        ("gamma vs oracle", _oracle_gamma(n_gamma)),
        ("G2 vs oracle", _oracle_g2(n_g2)),
    ]


def run_checks(checks, report: Callable[[str], None] = print) -> bool:
    ok = True
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(passed), detail, time.perf_counter() - t0)
        report(res.line())
        ok &= res.passed
    return ok
