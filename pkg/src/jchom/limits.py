"""Dispersive-regime effective models: a Kerr cavity and a bare two-level system.

For ``|delta| >> g`` photons near the photon-like polariton see a Kerr
nonlinearity ``wc_bar b^+ b + (U/2) b^+ b^+ b b``; photons near the qubit-like
polariton see a weakly coupled two-level system of width ``kappa_bar``.  Negative
detuning is handled by swapping the polariton branches.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import JcParams
from .scattering import SingleAmps
from .spectrum import Branch, jc_energy, jc_energy_shifted

#: below this ``|delta|/g`` the dispersive expansions are unreliable
DISPERSIVE_RATIO_WARN = 5.0


class LimitModel(enum.Enum):
    KERR = "kerr"
    TLS = "tls"


class DispersiveWarning(UserWarning):
    pass


@dataclass(frozen=True)
class KerrParams:
    omega_bar_c: float
    U: float
    kappa: float


@dataclass(frozen=True)
class TlsParams:
    omega_bar_q: float
    kappa_bar: float


def _check_dispersive(params: JcParams) -> None:
    delta = params.delta
    if delta == 0:
        raise ValueError("dispersive limits need a non-zero detuning")
    if abs(delta) / params.g < DISPERSIVE_RATIO_WARN:
        warnings.warn(f"|delta|/g = {abs(delta) / params.g:.3g} is not dispersive; "
                      "limit models may be inaccurate", DispersiveWarning, stacklevel=3)


def photon_branch(params: JcParams) -> Branch:
    """Branch of the photon-like polariton (upper for positive detuning)."""
    return Branch.PLUS if params.delta > 0 else Branch.MINUS


def dispersive_kerr_params(params: JcParams, exact: bool = False) -> KerrParams:
    """Kerr cavity parameters from the leading dispersive series, or exactly.

    The exact variant reads ``wc_bar`` and ``U`` off the JC ladder of the
    photon-like branch.
    """
    _check_dispersive(params)
    g, delta = params.g, params.delta
    if exact:
        sigma = photon_branch(params)
        e1 = jc_energy(1, sigma, params)
        return KerrParams(e1, jc_energy(2, sigma, params) - 2 * e1, params.kappa)
    return KerrParams(params.omega_c + g ** 2 / delta - g ** 4 / delta ** 3,
                      -2 * g ** 4 / delta ** 3, params.kappa)


def dispersive_tls_params(params: JcParams, order: int = 2, exact: bool = False) -> TlsParams:
    """Effective two-level parameters.

    ``order=2`` keeps ``wq_bar = wq - g**2/delta``; ``order=4`` adds the
    ``+g**4/delta**3`` correction.  ``exact`` uses the shifted one-photon pole
    of the qubit-like branch.
    """
    _check_dispersive(params)
    g, delta = params.g, params.delta
    if exact:
        pole = jc_energy_shifted(1, Branch(-photon_branch(params)), params)
        return TlsParams(pole.real, -pole.imag)
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    shift = -g ** 2 / delta + (g ** 4 / delta ** 3 if order == 4 else 0.0)
    return TlsParams(params.omega_q + shift, params.kappa * g ** 2 / delta ** 2)


def tls_shift_orders(params: JcParams) -> dict[str, float]:
    """Both published orders of ``wq_bar`` and their difference."""
    lo = dispersive_tls_params(params, order=2).omega_bar_q
    hi = dispersive_tls_params(params, order=4).omega_bar_q
    return {"order2": lo, "order4": hi, "difference": hi - lo}


def kerr_t2_reduced(nu1p, nu1, nu2, kp: KerrParams):
    """Approximate T-matrix of the Kerr cavity (``nu2'`` fixed by energy conservation)."""
    nu1p, nu1, nu2 = (np.asarray(x, dtype=complex) for x in (nu1p, nu1, nu2))
    k, w, U = kp.kappa, kp.omega_bar_c, kp.U
    total = nu1 + nu2
    nu2p = total - nu1p
    legs = (nu1p - w + 1j * k) * (nu2p - w + 1j * k) * (nu1 - w + 1j * k) * (nu2 - w + 1j * k)
    val = (-k ** 2 * U / math.pi * (total - 2 * w + 2j * k)
           / (total - 2 * w - U + 2j * k) / legs)
    return val[()] if val.ndim == 0 else val


def tls_t2_reduced(nu1p, nu1, nu2, tp: TlsParams):
    """Approximate T-matrix of a bare two-level system."""
    nu1p, nu1, nu2 = (np.asarray(x, dtype=complex) for x in (nu1p, nu1, nu2))
    kb, w = tp.kappa_bar, tp.omega_bar_q
    total = nu1 + nu2
    nu2p = total - nu1p
    legs = ((nu1p - w + 1j * kb) * (nu2p - w + 1j * kb)
            * (nu1 - w + 1j * kb) * (nu2 - w + 1j * kb))
    val = kb ** 2 / math.pi * (total - 2 * w + 2j * kb) / legs
    return val[()] if val.ndim == 0 else val


def limit_single_amps(nu, which, lp) -> SingleAmps:
    """Single-photon amplitudes of the Kerr cavity or the two-level system."""
    which = LimitModel(which)
    if which is LimitModel.KERR:
        w, k = lp.omega_bar_c, lp.kappa
    else:
        w, k = lp.omega_bar_q, lp.kappa_bar
    nu = np.asarray(nu, dtype=float)
    s = (nu - w - 1j * k) / (nu - w + 1j * k)
    return SingleAmps.from_even(s[()] if s.ndim == 0 else s)
