"""Outgoing two-photon amplitudes ``A^{ij}(nu1', nu2') = A^{ij,lin} + C``.

The linear part is a symmetrized product of single-photon amplitudes and packet
amplitudes.  The correlated part ``C`` is the T-matrix folded with both input
packets; after eliminating ``nu2`` through energy conservation it is a single
integral over ``nu1`` that is evaluated either by residues or by quadrature.

For correlation functions the amplitudes are also needed in *pole form*: at a
fixed total energy ``E`` each amplitude is, as a function of the relative
coordinate ``D = (nu1' - nu2')/2``, a sum of simple poles times ``exp(i s D)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from .core import (ConvergenceError, DegeneratePoleError, JcParams, LorentzianPacket,
                   Ports, TwoPhotonInput, packet_amplitude)
from .poles import PoleSum, fourier, pole_sum
from .scattering import reflection_amp, t2_energy_factor, transmission_amp
from .spectrum import resonances


class Pair(enum.Enum):
    P11 = "11"
    P22 = "22"
    P12 = "12"

    @classmethod
    def parse(cls, value) -> "Pair":
        if isinstance(value, Pair):
            return value
        return cls(str(value))


class CorrMethod(enum.Enum):
    RESIDUE = "residue"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class OutAmplitude:
    pair: Pair
    lin: complex
    corr: complex

    @property
    def total(self) -> complex:
        return self.lin + self.corr


@dataclass(frozen=True)
class LinTerm:
    """``coef * X(nu1') Y(nu2') f_a(nu1') f_b(nu2')`` with ``X, Y`` in ``{'r', 't'}``."""

    coef: float
    out1: str
    out2: str
    packet1: int
    packet2: int


_DIFFERENT = {
    Pair.P12: (("t", "t", 0, 1), ("r", "r", 1, 0)),
    Pair.P11: (("r", "t", 0, 1), ("t", "r", 1, 0)),
    Pair.P22: (("t", "r", 0, 1), ("r", "t", 1, 0)),
}
_SAME = {
    Pair.P11: (("r", "r", 0, 1), ("r", "r", 1, 0)),
    Pair.P22: (("t", "t", 0, 1), ("t", "t", 1, 0)),
    Pair.P12: (("r", "t", 0, 1), ("r", "t", 1, 0)),
}


def lin_terms(pair, inp: TwoPhotonInput) -> tuple[LinTerm, ...]:
    pair = Pair.parse(pair)
    table = _DIFFERENT if inp.ports is Ports.DIFFERENT else _SAME
    norm = inp.norm
    return tuple(LinTerm(norm, *row) for row in table[pair])


def _single(which: str, nu, params: JcParams):
    return reflection_amp(nu, params) if which == "r" else transmission_amp(nu, params)


def _lin_value(terms: Sequence[LinTerm], nu1p, nu2p, inp: TwoPhotonInput, params: JcParams):
    packets = inp.packets
    total = 0j
    for term in terms:
        total = total + (term.coef * _single(term.out1, nu1p, params)
                         * _single(term.out2, nu2p, params)
                         * packet_amplitude(nu1p, packets[term.packet1])
                         * packet_amplitude(nu2p, packets[term.packet2]))
    return total


def out_amplitude_lin(pair, nu1p, nu2p, inp: TwoPhotonInput, params: JcParams):
    """Uncorrelated part of the amplitude for photons entering different lines."""
    if inp.ports is not Ports.DIFFERENT:
        raise ValueError("out_amplitude_lin needs a different-waveguide input; "
                         "use same_side_amplitudes")
    return _lin_value(lin_terms(pair, inp), nu1p, nu2p, inp, params)


# --------------------------------------------------------------------------
# correlated part


def _corr_poles(energy: float, inp: TwoPhotonInput, params: JcParams):
    """Poles in ``nu1`` of ``f1(nu1) f2(E - nu1) / prod(nu1 - e)(E - nu1 - e)``."""
    e1p, e1m, _, _ = resonances(params)
    p1, p2 = inp.packets
    poles = [p1.pole, e1p, e1m, energy - p2.pole, energy - e1p, energy - e1m]
    # (E - nu1 - pi2) = -(nu1 - (E - pi2)); the two (E - nu1 - e) factors give +1
    return poles, -1.0


def corr_integral_residue(energy, inp: TwoPhotonInput, params: JcParams):
    """``int dnu1 f1(nu1) f2(E-nu1) / prod_a (nu1-e1a)(E-nu1-e1a)`` by residues.

    ``energy`` may be an array; the result then has the same shape.
    """
    p1, p2 = inp.packets
    poles, slope = _corr_poles(energy, inp, params)
    term = pole_sum(lambda x: np.ones_like(x), poles, const=1.0 / slope,
                    shift=inp.dt, scale=_pole_scale(energy, inp, params))
    value = fourier([term], 0.0) * p1.norm * p2.norm * np.exp(1j * np.asarray(energy) * p2.t_arr)
    return complex(value) if np.ndim(value) == 0 else value


def _pole_scale(energy, inp: TwoPhotonInput, params: JcParams):
    return np.maximum(max(1.0, params.scale, *(abs(p.nu0) for p in inp.packets)),
                      np.abs(energy))


def quadrature_window(energy: float, inp: TwoPhotonInput, params: JcParams,
                      window_factor: float = 50.0) -> tuple[float, float, list[float]]:
    """Truncation window and breakpoints for the ``nu1`` integral."""
    e1p, e1m, _, _ = resonances(params)
    p1, p2 = inp.packets
    feats = sorted({p1.nu0, e1p.real, e1m.real, energy - p2.nu0,
                    energy - e1p.real, energy - e1m.real})
    width = window_factor * max(params.kappa, params.g, abs(params.delta), p1.xi, p2.xi)
    return feats[0] - width, feats[-1] + width, feats


def corr_integral_quadrature(energy: float, inp: TwoPhotonInput, params: JcParams,
                             abs_tol: float = 1e-13, rel_tol: float = 1e-11,
                             window_factor: float = 50.0,
                             limit: int = 2000) -> tuple[complex, float]:
    """Same integral as :func:`corr_integral_residue` by adaptive quadrature.

    Integrates over a truncated window around all features and adds the
    analytic bound on the discarded tails to the error estimate.
    """
    e1p, e1m, _, _ = resonances(params)
    p1, p2 = inp.packets
    lo, hi, feats = quadrature_window(energy, inp, params, window_factor)

    def rational(x):
        return 1.0 / ((x - p1.pole) * (x - e1p) * (x - e1m)
                      * (energy - x - p2.pole) * (energy - x - e1p) * (energy - x - e1m))

    dt = inp.dt
    if dt == 0:
        val, errs = integrate.quad(rational, lo, hi, points=feats, limit=limit,
                                   epsabs=abs_tol, epsrel=rel_tol, complex_func=True)
        err = abs(errs.real) + abs(errs.imag)
    else:
        val, err = 0j, 0.0
        edges = [lo, *feats, hi]
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            parts = []
            for wt in ("cos", "sin"):
                re, e_re = integrate.quad(lambda x: rational(x).real, a, b, weight=wt,
                                          wvar=dt, limit=limit, epsabs=abs_tol,
                                          epsrel=rel_tol)
                im, e_im = integrate.quad(lambda x: rational(x).imag, a, b, weight=wt,
                                          wvar=dt, limit=limit, epsabs=abs_tol,
                                          epsrel=rel_tol)
                parts.append(complex(re, im))
                err += e_re + e_im
            val += parts[0] + 1j * parts[1]
    # every factor is at least (window half-width) away outside the window
    half = 0.5 * (hi - lo) - 0.5 * (feats[-1] - feats[0])
    tail = 2.0 / (5.0 * half ** 5)
    scale = p1.norm * p2.norm
    phase = np.exp(1j * energy * p2.t_arr)
    return complex(val) * scale * phase, (err + tail) * scale


def corr_integral(energy: float, inp: TwoPhotonInput, params: JcParams,
                  method: CorrMethod = CorrMethod.RESIDUE) -> tuple[complex, float]:
    """Returns ``(value, abs_err)``; falls back to quadrature on degenerate poles."""
    method = CorrMethod(method)
    if np.ndim(energy) > 0 and method is CorrMethod.QUADRATURE:
        pairs = [corr_integral(float(e), inp, params, method) for e in np.ravel(energy)]
        vals = np.array([v for v, _ in pairs]).reshape(np.shape(energy))
        return vals, max(err for _, err in pairs)
    if method is CorrMethod.RESIDUE:
        try:
            return corr_integral_residue(energy, inp, params), 0.0
        except DegeneratePoleError:
            if np.ndim(energy) > 0:
                return corr_integral(energy, inp, params, CorrMethod.QUADRATURE)
    val, err = corr_integral_quadrature(energy, inp, params)
    if not math.isfinite(err):
        raise ConvergenceError(f"corr integral failed at E={energy}")
    return val, err


def out_corr_term(nu1p, nu2p, inp: TwoPhotonInput, params: JcParams,
                  method: CorrMethod = CorrMethod.RESIDUE) -> complex:
    """``C(nu1', nu2') = i int dnu1 dnu2 T f1(nu1) f2(nu2)`` (independent of the ports)."""
    method = CorrMethod(method)
    energy = float(nu1p + nu2p)
    integral, _ = corr_integral(energy, inp, params, method)
    e1p, e1m, _, _ = resonances(params)
    legs = 1.0 / ((nu1p - e1p) * (nu1p - e1m) * (nu2p - e1p) * (nu2p - e1m))
    return complex(1j * t2_energy_factor(energy, params) * integral * legs)


def out_amplitude_full(pair, nu1p, nu2p, inp: TwoPhotonInput, params: JcParams,
                       method: CorrMethod = CorrMethod.RESIDUE,
                       linear: bool = False) -> OutAmplitude:
    pair = Pair.parse(pair)
    lin = complex(_lin_value(lin_terms(pair, inp), nu1p, nu2p, inp, params))
    corr = 0j if linear else inp.norm * out_corr_term(nu1p, nu2p, inp, params, method)
    return OutAmplitude(pair, lin, corr)


def same_side_amplitudes(pair, nu1p, nu2p, inp: TwoPhotonInput, params: JcParams,
                         method: CorrMethod = CorrMethod.RESIDUE,
                         linear: bool = False) -> OutAmplitude:
    """Amplitudes for both photons entering through line 1, normalized to unit norm."""
    if inp.ports is not Ports.SAME:
        raise ValueError("same_side_amplitudes needs a same-waveguide input")
    return out_amplitude_full(pair, nu1p, nu2p, inp, params, method, linear)


# --------------------------------------------------------------------------
# pole form at fixed total energy


def _factor_poles(which: str, energy: float, side: int, params: JcParams):
    """Numerator callable and poles (in D) of ``X(E/2 +/- D)``.

    ``side = +1`` for ``nu1' = E/2 + D`` and ``-1`` for ``nu2' = E/2 - D``.
    Returns ``(numerator(D), poles, slope)`` with
    ``X = numerator / (slope * prod(D - poles))``.
    """
    e1p, e1m, _, _ = resonances(params)
    half = np.asarray(energy) / 2
    col = half[..., None]
    if which == "r":
        def num(d):
            nu = col + side * d
            return (nu - params.omega_q) * (nu - params.omega_c) - params.g ** 2
    else:
        def num(d):
            nu = col + side * d
            return -1j * params.kappa * (nu - params.omega_q)
    # nu - e = side * (D - side * (e - E/2))
    poles = [side * (e1p - half), side * (e1m - half)]
    return num, poles, side * side


def _packet_poles(p: LorentzianPacket, energy: float, side: int):
    return side * (p.pole - energy / 2), float(side)


def lin_pole_terms(terms: Sequence[LinTerm], energy: float, inp: TwoPhotonInput,
                   params: JcParams) -> list[PoleSum]:
    """Pole form of the linear part at total energy ``E`` (global phase dropped).

    The dropped factor is ``exp(i E (t1 + t2)/2)``, common to every term.
    """
    packets = inp.packets
    scale = _pole_scale(energy, inp, params)
    out = []
    for term in terms:
        n1, poles1, s1 = _factor_poles(term.out1, energy, +1, params)
        n2, poles2, s2 = _factor_poles(term.out2, energy, -1, params)
        pa, pb = packets[term.packet1], packets[term.packet2]
        qa, sa = _packet_poles(pa, energy, +1)
        qb, sb = _packet_poles(pb, energy, -1)
        const = term.coef * pa.norm * pb.norm / (s1 * s2 * sa * sb)
        shift = pa.t_arr - pb.t_arr
        out.append(pole_sum(lambda d, n1=n1, n2=n2: n1(d) * n2(d),
                            [*poles1, *poles2, qa, qb], const=const, shift=shift,
                            scale=scale))
    return out


def corr_pole_term(energy: float, inp: TwoPhotonInput, params: JcParams,
                   method: CorrMethod = CorrMethod.RESIDUE) -> tuple[PoleSum, float]:
    """Pole form of ``norm * C`` at total energy ``E`` with the same phase convention."""
    e1p, e1m, _, _ = resonances(params)
    integral, err = corr_integral(energy, inp, params, method)
    p1, p2 = inp.packets
    phase = np.exp(-0.5j * energy * (p1.t_arr + p2.t_arr))
    amp = 1j * t2_energy_factor(energy, params) * integral * phase * inp.norm
    half = energy / 2
    poles = [e1p - half, e1m - half, half - e1p, half - e1m]
    term = pole_sum(lambda d: np.ones_like(d), poles, const=amp,
                    scale=_pole_scale(energy, inp, params))
    # slopes of the nu2' factors are (-1)**2
    pref = np.abs(t2_energy_factor(energy, params)) * inp.norm
    return term, err * pref


def amplitude_pole_terms(pair, energy: float, inp: TwoPhotonInput, params: JcParams,
                         method: CorrMethod = CorrMethod.RESIDUE,
                         linear: bool = False) -> list[PoleSum]:
    terms = lin_pole_terms(lin_terms(pair, inp), energy, inp, params)
    if not linear:
        terms.append(corr_pole_term(energy, inp, params, method)[0])
    return terms


def amplitude_in_delta(pair, energy: float, delta, inp: TwoPhotonInput, params: JcParams,
                       method: CorrMethod = CorrMethod.QUADRATURE, linear: bool = False):
    """Direct evaluation of the amplitude in ``(E, D)`` with the pole-form phase convention.

    Used where the pole form is unavailable (coincident poles).
    """
    pair = Pair.parse(pair)
    delta = np.asarray(delta, dtype=float)
    nu1p, nu2p = energy / 2 + delta, energy / 2 - delta
    lin = _lin_value(lin_terms(pair, inp), nu1p, nu2p, inp, params)
    p1, p2 = inp.packets
    phase = np.exp(-0.5j * energy * (p1.t_arr + p2.t_arr))
    if linear:
        return lin * phase
    integral, _ = corr_integral(energy, inp, params, method)
    e1p, e1m, _, _ = resonances(params)
    legs = 1.0 / ((nu1p - e1p) * (nu1p - e1m) * (nu2p - e1p) * (nu2p - e1m))
    corr = 1j * t2_energy_factor(energy, params) * integral * legs * inp.norm
    return (lin + corr) * phase
