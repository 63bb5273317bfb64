"""One- and two-photon scattering amplitudes of the two-waveguide JC system.

Single-photon amplitudes are the same for both input lines (``S11 = S22 = r``,
``S12 = S21 = t``), so one ``(r, t)`` pair describes the whole one-photon
S-matrix.  The connected two-photon part is returned in reduced form, with the
energy-conservation delta already resolved by ``nu2' = nu1 + nu2 - nu1'``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import JcParams
from .spectrum import resonances


@dataclass(frozen=True)
class SingleAmps:
    r: complex
    t: complex
    s_e: complex

    @classmethod
    def from_even(cls, s_e):
        return cls(r=(s_e + 1) / 2, t=(s_e - 1) / 2, s_e=s_e)


def _denominator(nu, params: JcParams):
    return (nu - params.omega_q) * (nu - params.omega_c + 1j * params.kappa) - params.g ** 2


def reflection_amp(nu, params: JcParams):
    """Amplitude to leave through the same line the photon came in."""
    nu = np.asarray(nu)
    num = (nu - params.omega_q) * (nu - params.omega_c) - params.g ** 2
    out = num / _denominator(nu, params)
    return out[()] if out.ndim == 0 else out


def transmission_amp(nu, params: JcParams):
    """Amplitude to leave through the other line."""
    nu = np.asarray(nu)
    out = -1j * params.kappa * (nu - params.omega_q) / _denominator(nu, params)
    return out[()] if out.ndim == 0 else out


def even_mode_amp(nu, params: JcParams):
    """Phase picked up by the symmetric line combination, the only one coupled."""
    e1p, e1m, _, _ = resonances(params)
    nu = np.asarray(nu)
    out = (nu - np.conj(e1p)) * (nu - np.conj(e1m)) / ((nu - e1p) * (nu - e1m))
    return out[()] if out.ndim == 0 else out


def single_amps(nu: float, params: JcParams) -> SingleAmps:
    return SingleAmps(r=reflection_amp(nu, params), t=transmission_amp(nu, params),
                      s_e=even_mode_amp(nu, params))


def transmission_probability(nu, params: JcParams):
    return np.abs(transmission_amp(nu, params)) ** 2


def t2_energy_factor(energy, params: JcParams):
    """Part of the T-matrix that depends only on the total energy ``E``.

    ``kappa**2 g**4 / pi * (E - e1+ - e1-) prod_a (E - 2 e1a) / prod_a (E - e2a)``.
    """
    e1p, e1m, e2p, e2m = resonances(params)
    energy = np.asarray(energy)
    pref = params.kappa ** 2 * params.g ** 4 / np.pi
    out = (pref * (energy - e1p - e1m) * (energy - 2 * e1p) * (energy - 2 * e1m)
           / ((energy - e2p) * (energy - e2m)))
    return out[()] if out.ndim == 0 else out


def one_photon_propagator(nu, params: JcParams):
    """``1 / prod_a (nu - e1a)``; one such factor per external photon leg."""
    e1p, e1m, _, _ = resonances(params)
    nu = np.asarray(nu)
    out = 1.0 / ((nu - e1p) * (nu - e1m))
    return out[()] if out.ndim == 0 else out


def t2_reduced(nu1p, nu1, nu2, params: JcParams):
    """Coefficient of ``delta(nu1' + nu2' - nu1 - nu2)`` in the two-photon T-matrix.

    Accepts complex arguments, which the residue evaluation relies on.
    """
    nu1p, nu1, nu2 = np.asarray(nu1p), np.asarray(nu1), np.asarray(nu2)
    energy = nu1 + nu2
    nu2p = energy - nu1p
    out = (t2_energy_factor(energy, params)
           * one_photon_propagator(nu1p, params) * one_photon_propagator(nu2p, params)
           * one_photon_propagator(nu1, params) * one_photon_propagator(nu2, params))
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out
