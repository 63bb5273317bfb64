"""HOM coincidence parameter ``gamma``: exact, linear and dispersive forms.

The exact value integrates ``|A^{12}|**2`` over both output frequencies.  In
rotated coordinates ``E = nu1' + nu2'``, ``D = (nu1' - nu2')/2`` (unit Jacobian)
the inner ``D`` integral is done exactly from the pole form of the amplitude,
and the outer ``E`` integral by adaptive quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .amplitudes import CorrMethod, Pair, amplitude_in_delta, amplitude_pole_terms
from .core import (ConvergenceError, DegeneratePoleError, JcParams, Ports,
                   TwoPhotonInput)
from .poles import norm2
from .quadrature import gk_integrate
from .spectrum import Branch, beam_splitter_energies, jc_energy_shifted, resonances

#: absolute / relative tolerance of the outer energy integral
ENERGY_ABS_TOL = 1e-11
ENERGY_REL_TOL = 1e-10


class HomMethod(enum.Enum):
    EXACT_QUADRATURE = "exact_quadrature"
    EXACT_RESIDUE = "exact_residue"
    LINEAR = "linear"
    KERR_LIMIT = "kerr_limit"
    TLS_LIMIT = "tls_limit"


@dataclass(frozen=True)
class HomResult:
    gamma: float
    method: HomMethod
    abs_err: float = 0.0
    diagnostics: dict = field(default_factory=dict, compare=False)


def energy_features(inp: TwoPhotonInput, params: JcParams) -> tuple[list[float], float]:
    """Breakpoints in total energy where output densities have structure."""
    e1p, e1m, e2p, e2m = resonances(params)
    p1, p2 = inp.packets
    pts = {p1.nu0 + p2.nu0, 2 * e1p.real, 2 * e1m.real, (e1p + e1m).real,
           e2p.real, e2m.real}
    for p in inp.packets:
        pts.update({p.nu0 + e1p.real, p.nu0 + e1m.real})
    width = max(params.kappa, params.g, abs(params.delta), p1.xi, p2.xi)
    return sorted(pts), width


def energy_integral(fn, inp: TwoPhotonInput, params: JcParams, vector: bool = False,
                    epsabs: float = ENERGY_ABS_TOL, epsrel: float = ENERGY_REL_TOL,
                    limit: int = 2000, batch: bool = False, tail_fn=None):
    """``int dE fn(E)`` over the real line, returns ``(value, abs_err)``.

    Total energy is conserved by the scatterer and the input pair has a
    Lorentzian energy distribution of half-width ``h = (xi1 + xi2)/2`` around
    ``E0 = nu01 + nu02``.  Substituting ``E = E0 + h tan(theta)`` therefore
    turns every output density into a bounded integrand on a finite interval;
    the remaining structure sits at the mapped breakpoints.

    ``vector`` integrates an array-valued ``fn`` (``quad_vec``); ``batch``
    means ``fn`` accepts an array of energies and is integrated with the
    vectorized Gauss-Kronrod rule.

    With a delay between the packets the density carries a term oscillating
    like ``cos(dt E / 2)`` whose period shrinks to zero at ``theta -> pi/2``.
    A batched integral may then pass ``tail_fn``, a non-oscillating density
    with the same large-``E`` behaviour; it replaces ``fn`` on the outermost
    ``eta`` of each end and the neglected oscillation is bounded by
    integrating by parts once.
    """
    pts, _ = energy_features(inp, params)
    p1, p2 = inp.packets
    e0, h = p1.nu0 + p2.nu0, 0.5 * (p1.xi + p2.xi)
    half_pi = 0.5 * np.pi
    inner = sorted({float(np.arctan((p - e0) / h)) for p in pts} - {-half_pi, half_pi})

    def mapped(theta):
        c = np.cos(theta)
        if c == 0:
            return 0.0 * fn(e0)
        return fn(e0 + h * np.tan(theta)) * (h / (c * c))

    if batch:
        def mapped_batch(theta, f=fn):
            c = np.cos(theta)
            return f(e0 + h * np.tan(theta)) * (h / (c * c))
        if tail_fn is None or inp.dt == 0:
            return gk_integrate(mapped_batch, [-half_pi, *inner, half_pi], epsabs, epsrel)
        return _truncated_integral(mapped_batch, tail_fn, inner, abs(inp.dt) * h,
                                   epsabs, epsrel)
    if vector:
        val, err = integrate.quad_vec(mapped, -half_pi, half_pi, points=inner, epsabs=epsabs,
                                      epsrel=epsrel, limit=limit)
        return val, err
    with np.errstate(all="ignore"):
        val, err, info = integrate.quad(mapped, -half_pi, half_pi, points=inner,
                                        epsabs=epsabs, epsrel=epsrel, limit=limit,
                                        full_output=1)[:3]
    if not math.isfinite(val) or err > max(1e3 * epsabs, 1e3 * epsrel * abs(val)):
        raise ConvergenceError(
            f"energy integral did not converge (value={val!r}, err={err:.3g}, "
            f"E0={e0:.6g}, half-width={h:.3g})")
    return val, err


def _truncated_integral(mapped, tail_fn, inner, phase_rate: float, epsabs: float,
                        epsrel: float):
    """Body by Gauss-Kronrod, ends by the smooth ``tail_fn``, plus a tail bound.

    Near ``theta = pi/2 - x`` the oscillating part is ``a(x) cos(phi)`` with
    ``phi' ~ phase_rate / (2 x**2)``, so its integral over ``(0, eta)`` is at
    most ``~ 4 a(eta) eta**2 / phase_rate``.
    """
    half_pi = 0.5 * np.pi
    eta = float(np.clip(np.cbrt(epsabs * phase_rate), 1e-6, 1e-2))
    lo, hi = -half_pi + eta, half_pi - eta
    body_pts = [lo, *(t for t in inner if lo < t < hi), hi]
    body, body_err = gk_integrate(mapped, body_pts, epsabs, epsrel)

    def smooth(theta):
        return mapped(theta, tail_fn)

    try:
        ends, ends_err = gk_integrate(smooth, [-half_pi, lo], epsabs, epsrel)
        right, right_err = gk_integrate(smooth, [hi, half_pi], epsabs, epsrel)
    except ConvergenceError as exc:
        raise ConvergenceError(
            "energy integral: the uncorrelated density still oscillates at large energy "
            "(different packets in the same line with a delay interfere at every "
            f"energy); {exc}") from exc
    cut = np.array([lo, hi])
    osc = np.abs(mapped(cut) - smooth(cut)).sum()
    bound = 4 * osc * eta ** 2 / phase_rate
    return body + ends + right, body_err + ends_err + right_err + bound


def delta_norm(pair, energy: float, inp: TwoPhotonInput, params: JcParams,
               method: CorrMethod, linear: bool) -> float:
    """``int dD |A(E/2 + D, E/2 - D)|**2`` at fixed total energy."""
    try:
        terms = amplitude_pole_terms(pair, energy, inp, params, method, linear)
        return norm2(terms)
    except DegeneratePoleError:
        def dens(d):
            return abs(amplitude_in_delta(pair, energy, d, inp, params, method, linear)) ** 2
        val, _ = integrate.quad(dens, -np.inf, np.inf, limit=2000, epsabs=1e-14,
                                epsrel=1e-11)
        return val


def delta_norm_batch(pair, energies: np.ndarray, inp: TwoPhotonInput, params: JcParams,
                     linear: bool = False) -> np.ndarray:
    """:func:`delta_norm` with residues, evaluated on an array of energies at once."""
    try:
        return norm2(amplitude_pole_terms(pair, energies, inp, params, CorrMethod.RESIDUE,
                                          linear))
    except DegeneratePoleError:
        return np.array([delta_norm(pair, float(e), inp, params, CorrMethod.RESIDUE, linear)
                         for e in energies])


def pair_norm(pair, inp: TwoPhotonInput, params: JcParams,
              method: CorrMethod = CorrMethod.RESIDUE, linear: bool = False,
              epsabs: float = ENERGY_ABS_TOL,
              epsrel: float = ENERGY_REL_TOL) -> tuple[float, float]:
    """``iint |A^{ij}|**2`` and its error estimate."""
    pair = Pair.parse(pair)
    method = CorrMethod(method)
    if method is CorrMethod.RESIDUE:
        tail = None if linear else (lambda e: delta_norm_batch(pair, e, inp, params, True))
        return energy_integral(lambda e: delta_norm_batch(pair, e, inp, params, linear),
                               inp, params, epsabs=epsabs, epsrel=epsrel, batch=True,
                               tail_fn=tail)
    return energy_integral(lambda e: delta_norm(pair, e, inp, params, method, linear),
                           inp, params, epsabs=epsabs, epsrel=epsrel)


def output_probabilities(inp: TwoPhotonInput, params: JcParams,
                         method: CorrMethod = CorrMethod.RESIDUE,
                         linear: bool = False) -> dict[Pair, float]:
    """Probabilities of finding both photons in line 1, both in 2, or one in each.

    Same-line amplitudes carry the usual factor 1/2 for identical bosons.
    """
    out = {}
    for pair in Pair:
        val, _ = pair_norm(pair, inp, params, method, linear)
        out[pair] = val if pair is Pair.P12 else 0.5 * val
    return out


def hom_gamma(inp: TwoPhotonInput, params: JcParams,
              method: HomMethod = HomMethod.EXACT_RESIDUE) -> HomResult:
    """Coincidence probability of one photon in each output line."""
    method = HomMethod(method)
    if inp.ports is not Ports.DIFFERENT:
        raise ValueError("hom_gamma needs photons entering through different lines")
    if method in (HomMethod.KERR_LIMIT, HomMethod.TLS_LIMIT):
        from .limits import dispersive_kerr_params, dispersive_tls_params
        p1, p2 = inp.packets
        if p1.xi != p2.xi or inp.dt != 0:
            raise ValueError("closed-form limits assume equal widths and zero delay")
        total = p1.nu0 + p2.nu0
        if method is HomMethod.KERR_LIMIT:
            kp = dispersive_kerr_params(params)
            val = hom_gamma_kerr(total - 2 * kp.omega_bar_c, kp.U, kp.kappa, p1.xi)
        else:
            tp = dispersive_tls_params(params)
            val = hom_gamma_tls(total - 2 * tp.omega_bar_q, tp.kappa_bar, p1.xi)
        return HomResult(val, method)
    corr = CorrMethod.QUADRATURE if method is HomMethod.EXACT_QUADRATURE else CorrMethod.RESIDUE
    val, err = pair_norm(Pair.P12, inp, params, corr, linear=method is HomMethod.LINEAR)
    return HomResult(val, method, err, {"energy_abs_err": err})


def hom_gamma_linear(nu0: float, params: JcParams) -> float:
    """Sharp-packet, zero-delay coincidence probability without the T-matrix."""
    bs = beam_splitter_energies(params)
    num = 1.0
    for omega in bs.as_tuple():
        num *= (2 * nu0 - 2 * omega) ** 2
    den = 1.0
    for sigma in Branch:
        den *= abs(2 * nu0 - 2 * jc_energy_shifted(1, sigma, params)) ** 4
    return num / den


def hom_gamma_kerr(e0c: float, U: float, kappa: float, xi: float) -> float:
    """Closed form for a Kerr cavity; ``e0c`` is the pair energy minus ``2 wc_bar``."""
    if U == 0:
        raise ValueError("Kerr closed form is singular at U = 0")
    k2 = 2 * kappa
    first = (k2 ** 2 * U * (2 * e0c * xi + U * (k2 + 3 * xi))
             / (xi * (e0c ** 2 + (k2 + 3 * xi) ** 2) * (U ** 2 + 4 * xi ** 2)))
    second = ((2 * k2 ** 2 * e0c * xi - (2 * xi ** 2 + k2 * xi - k2 ** 2) * k2 * U)
              / (xi * U * (e0c ** 2 + (xi + k2) ** 2)))
    third = (4 * xi * k2 ** 2 * ((xi - k2) * U - 2 * e0c * xi)
             / (U * (U ** 2 + 4 * xi ** 2) * ((e0c - U) ** 2 + (xi + k2) ** 2)))
    return 1 - first + second + third


def hom_gamma_tls(e0q: float, kappa_bar: float, xi: float) -> float:
    """Closed form for a bare two-level scatterer; ``e0q`` is relative to ``2 wq_bar``."""
    kb = kappa_bar
    a = complex(e0q, 2 * kb + xi)
    b = complex(e0q, 2 * kb + 3 * xi)
    half = -2j * kb / a + (-2j * kb) ** 2 / (a * b)
    total = 1 + half + (2j * kb) / a.conjugate() + (2j * kb) ** 2 / (a.conjugate() * b.conjugate())
    if abs(total.imag) > 1e-12 * max(1.0, abs(total)):
        raise ArithmeticError("TLS closed form produced a non-real value")
    return total.real
