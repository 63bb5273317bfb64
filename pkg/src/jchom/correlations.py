"""Second-order correlation functions of the scattered two-photon state.

``G_ij(tau) = (2 pi)**-1 int dE |int dD exp(i D tau) A^{ij}(E/2 + D, E/2 - D)|**2``
with ``tau = t_j - t_i`` the detection time in line ``j`` minus that in line
``i``.  The inner transform is a residue sum over the pole form of the
amplitude; the outer energy integral is adaptive.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .amplitudes import (CorrMethod, LinTerm, Pair, amplitude_in_delta, amplitude_pole_terms,
                         lin_terms)
from .core import ConvergenceError, DegeneratePoleError, JcParams, Ports, TwoPhotonInput
from .hom import energy_integral
from .quadrature import gk_integrate
from .poles import fourier, intensity_overlap, pole_sum
from .spectrum import resonances

#: energy-integral tolerances for correlation functions, relative to the packet width
G2_ABS_TOL_PER_XI = 1e-10
G2_REL_TOL = 1e-9
#: up to this many delays are integrated one by one with the batched energy rule
SMALL_TAU_BATCH = 16


@dataclass(frozen=True)
class CorrelationTrace:
    pair: Pair
    tau_grid: np.ndarray
    values: np.ndarray
    raw_values: np.ndarray
    norm_const: float
    integral: float

    def __post_init__(self):
        if np.any(self.raw_values < 0):
            raise ValueError("raw correlation values must be non-negative")


@dataclass(frozen=True)
class NumberMoments:
    n1: float
    n1_sq: float
    n1n2: float
    var_n1: float
    n1_sq_direct: float


def tau_grid(inp: TwoPhotonInput, params: JcParams, max_points: int | None = None) -> np.ndarray:
    """Uniform delay grid resolving both the packet envelope and the cavity cusp.

    The step is chosen so that ``0`` and ``+/-dt`` (where the trace has kinks)
    fall on even nodes, which keeps composite Simpson integration accurate.
    """
    xi = min(p.xi for p in inp.packets)
    kappa = params.kappa
    span = max(10 / xi, 5 / kappa, 2 * abs(inp.dt) + 5 / xi)
    step = min(1 / kappa, 1 / xi) / 20
    if inp.dt != 0:
        m = 2 * math.ceil(abs(inp.dt) / (2 * step))
        step = abs(inp.dt) / m
    n = 2 * math.ceil(span / (2 * step))
    if max_points is not None and 2 * n + 1 > max_points:
        raise ValueError(f"tau grid needs {2 * n + 1} points (> {max_points})")
    return step * np.arange(-n, n + 1)


def tail_rate(inp: TwoPhotonInput, params: JcParams) -> float:
    """Slowest exponential decay rate of ``G_ij(tau)`` at large ``|tau|``."""
    e1p, e1m, _, _ = resonances(params)
    return 2 * min(min(p.xi for p in inp.packets) / 2, abs(e1p.imag), abs(e1m.imag))


def trace_integral(raw: np.ndarray, grid: np.ndarray, rate: float) -> float:
    """Simpson integral of a sampled trace plus exponential tails beyond the grid."""
    body = integrate.simpson(raw, x=grid) if len(grid) % 2 else integrate.trapezoid(raw, grid)
    return float(body + (raw[0] + raw[-1]) / rate)


def _spectral_amplitude(pair, tau, energy, inp, params, method, linear):
    """``int dD exp(i D tau) A(E/2 + D, E/2 - D)`` for an array of delays."""
    try:
        terms = amplitude_pole_terms(pair, energy, inp, params, method, linear)
        return fourier(terms, tau)
    except DegeneratePoleError:
        out = np.empty(np.shape(tau), dtype=complex)
        for k, t in enumerate(np.ravel(tau)):
            def f(d, t=t):
                return amplitude_in_delta(pair, energy, d, inp, params, method, linear) \
                    * np.exp(1j * d * t)
            val, _ = integrate.quad(f, -np.inf, np.inf, complex_func=True, limit=4000)
            out.flat[k] = val
        return out


def _tolerances(inp: TwoPhotonInput) -> tuple[float, float]:
    xi = min(p.xi for p in inp.packets)
    return G2_ABS_TOL_PER_XI * xi, G2_REL_TOL


def g2_raw_with_error(pair, tau, inp: TwoPhotonInput, params: JcParams,
                      method: CorrMethod = CorrMethod.RESIDUE, linear: bool = False):
    """``G_ij(tau)`` and the energy-quadrature error estimate, both shaped like ``tau``."""
    pair = Pair.parse(pair)
    method = CorrMethod(method)
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    epsabs, epsrel = _tolerances(inp)

    def dens(e):
        return np.abs(_spectral_amplitude(pair, tau_arr, e, inp, params, method, linear)) ** 2

    if tau_arr.size <= SMALL_TAU_BATCH and method is CorrMethod.RESIDUE:
        def dens_batch(es, t0):
            try:
                terms = amplitude_pole_terms(pair, es, inp, params, method, linear)
                return np.abs(fourier(terms, t0)) ** 2
            except DegeneratePoleError:
                return np.array([abs(_spectral_amplitude(pair, np.array([t0]), e, inp, params,
                                                         method, linear)[0]) ** 2
                                 for e in es])
        res = [energy_integral(lambda es, t0=float(t): dens_batch(es, t0), inp, params,
                               epsabs=epsabs, epsrel=epsrel, batch=True) for t in tau_arr]
        out = np.array([v for v, _ in res])
        err = np.array([e for _, e in res])
    elif tau_arr.size == 1:
        val, e1 = energy_integral(lambda e: float(dens(e)[0]), inp, params,
                                  epsabs=epsabs, epsrel=epsrel)
        out, err = np.array([val]), np.array([e1])
    else:
        out, e_all = energy_integral(dens, inp, params, vector=True, epsabs=epsabs,
                                     epsrel=epsrel)
        if not np.all(np.isfinite(out)):
            raise ConvergenceError("correlation energy integral produced non-finite values")
        # quad_vec reports one error for the whole vector (max norm)
        err = np.full(out.shape, float(e_all))
    out = np.maximum(out / (2 * np.pi), 0.0)
    err = err / (2 * np.pi)
    if np.ndim(tau) == 0:
        return float(out[0]), float(err[0])
    return out.reshape(np.shape(tau)), err.reshape(np.shape(tau))


def g2_raw(pair, tau, inp: TwoPhotonInput, params: JcParams,
           method: CorrMethod = CorrMethod.RESIDUE, linear: bool = False):
    """Unnormalized ``G_ij(tau)``; ``tau`` may be a scalar or an array."""
    return g2_raw_with_error(pair, tau, inp, params, method, linear)[0]


def _unit_lin_terms(pair, inp: TwoPhotonInput) -> tuple[LinTerm, ...]:
    # at infinite delay the packets no longer overlap, so the same-line norm is 1
    return tuple(dataclasses.replace(t, coef=1.0) for t in lin_terms(pair, inp))


def _profile_term(which: str, packet, params: JcParams):
    """Pole form of ``X(nu) f(nu)`` with the arrival phase removed."""
    e1p, e1m, _, _ = resonances(params)
    if which == "r":
        def num(x):
            return (x - params.omega_q) * (x - params.omega_c) - params.g ** 2
    else:
        def num(x):
            return -1j * params.kappa * (x - params.omega_q)
    return pole_sum(num, [e1p, e1m, packet.pole], const=packet.norm)


def g2_norm_analytic(pair, inp: TwoPhotonInput, params: JcParams) -> float:
    """``G_ij,inf`` from independently scattered photons (product of intensities)."""
    packets = inp.packets
    total = 0.0
    for term in _unit_lin_terms(pair, inp):
        a = _profile_term(term.out1, packets[term.packet1], params)
        b = _profile_term(term.out2, packets[term.packet2], params)
        total += term.coef ** 2 * intensity_overlap(a, b)
    return total


def g2_norm_limit(pair, inp: TwoPhotonInput, params: JcParams,
                  method: CorrMethod = CorrMethod.RESIDUE, rtol: float = 1e-4,
                  start: float = 10.0, max_doublings: int = 6) -> float:
    """``lim_{dt -> inf} [G(dt) + G(-dt)]`` evaluated at ``dt = N / xi`` for growing ``N``."""
    xi = min(p.xi for p in inp.packets)
    prev = None
    n = start
    for _ in range(max_doublings):
        dt = n / xi
        shifted = inp.with_delay(dt)
        val = float(np.sum(g2_raw(pair, np.array([dt, -dt]), shifted, params, method)))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev = val
        n *= 2
    raise ConvergenceError(f"normalization limit did not stabilize (last N={n / 2:g}, "
                           f"value={prev!r})")


def g2_norm_constant(pair, inp: TwoPhotonInput, params: JcParams,
                     route: str = "analytic") -> float:
    if not inp.identical_shapes:
        raise ValueError("normalization is only defined for identical packet shapes")
    if route == "analytic":
        return g2_norm_analytic(pair, inp, params)
    if route == "limit":
        return g2_norm_limit(pair, inp, params)
    raise ValueError(f"unknown normalization route {route!r}")


def g2_normalized(pair, tau, inp: TwoPhotonInput, params: JcParams,
                  method: CorrMethod = CorrMethod.RESIDUE, route: str = "analytic"):
    return g2_raw(pair, tau, inp, params, method) / g2_norm_constant(pair, inp, params, route)


def g2_cross_asymptotic(tau, dt: float, xi: float):
    """Cross correlation at a 50/50 point for well separated, sharp packets."""
    tau = np.asarray(tau, dtype=float)
    out = xi / 8 * (np.exp(-xi * np.abs(tau - dt)) + np.exp(-xi * np.abs(tau + dt)))
    return float(out) if out.ndim == 0 else out


def g2_trace(pair, inp: TwoPhotonInput, params: JcParams, tau=None,
             method: CorrMethod = CorrMethod.RESIDUE, linear: bool = False,
             normalize: bool = True) -> CorrelationTrace:
    """``G_ij`` on a delay grid together with its normalization and time integral."""
    pair = Pair.parse(pair)
    grid = tau_grid(inp, params) if tau is None else np.asarray(tau, dtype=float)
    raw = g2_raw(pair, grid, inp, params, method, linear)
    norm = g2_norm_constant(pair, inp, params) if normalize else math.nan
    return CorrelationTrace(pair, grid, raw / norm, raw, norm,
                            trace_integral(raw, grid, tail_rate(inp, params)))


def tau_integral(pair, inp: TwoPhotonInput, params: JcParams,
                 method: CorrMethod = CorrMethod.RESIDUE, epsabs: float = 1e-9,
                 epsrel: float = 1e-8) -> float:
    """``int dtau G_ij(tau)`` by adaptive quadrature over the whole delay axis.

    The display grid of :func:`tau_grid` does not resolve the beat between
    the two polaritons, so the integral is done separately with
    ``tau = L tan(phi)``, ``L`` the slowest decay time, and the kinks at
    ``0`` and ``+-dt`` as breakpoints.
    """
    pair = Pair.parse(pair)
    scale = 1.0 / tail_rate(inp, params)
    kinks = sorted({0.0, inp.dt, -inp.dt})
    half_pi = 0.5 * math.pi

    def mapped(phi):
        c = np.cos(phi)
        return g2_raw(pair, scale * np.tan(phi), inp, params, method) * (scale / (c * c))

    edges = [-half_pi, *(math.atan(k / scale) for k in kinks), half_pi]
    val, _ = gk_integrate(mapped, edges, epsabs, epsrel)
    return val


def photon_number_moments(inp: TwoPhotonInput, params: JcParams,
                          method: CorrMethod = CorrMethod.RESIDUE) -> NumberMoments:
    """Moments of the line-1 photon number for the symmetric HOM configuration.

    ``<n1 n2>`` and ``<n1 (n1 - 1)>`` come from time-integrated correlations;
    ``<n1> = 1`` and ``<(n1 + n2)**2> = 4`` hold by symmetry.
    """
    p1, p2 = inp.packets
    if (inp.ports is not Ports.DIFFERENT or not inp.identical_shapes or inp.dt != 0
            or p1.nu0 != p2.nu0):
        raise ValueError("moment relations need identical packets in different lines "
                         "with zero delay")
    n1n2 = tau_integral(Pair.P12, inp, params, method)
    g11 = tau_integral(Pair.P11, inp, params, method)
    n1 = 1.0
    n1_sq = (4 - 2 * n1n2) / 2
    return NumberMoments(n1=n1, n1_sq=n1_sq, n1n2=n1n2, var_n1=n1_sq - n1 ** 2,
                         n1_sq_direct=g11 + n1)
