"""Brute-force reference evaluators.

Everything here is plain quadrature with a self-contained adaptive
Gauss-Legendre kernel (no QUADPACK, no residues), so agreement with the main
code path is evidence rather than tautology.  These are slow and meant for
tests and the ``oracle`` CLI verb.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .amplitudes import Pair
from .core import ConvergenceError, JcParams, Ports, TwoPhotonInput
from .scattering import reflection_amp, t2_reduced, transmission_amp
from .spectrum import resonances


@dataclass(frozen=True)
class QuadSpec:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-10
    window_factor: float = 40.0
    max_depth: int = 40
    max_panels: int = 200_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.window_factor <= 1 or self.max_depth < 1:
            raise ValueError("window_factor must exceed 1 and max_depth be positive")

    def loosened(self, factor: float = 2.0) -> "QuadSpec":
        return QuadSpec(self.abs_tol * factor, self.rel_tol * factor, self.window_factor,
                        self.max_depth, self.max_panels)


# --------------------------------------------------------------------------
# adaptive Gauss-Legendre kernel

_ORDER = 12


@lru_cache(maxsize=None)
def _rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panels(h, a: np.ndarray, b: np.ndarray):
    """Low and high order estimates plus L1 mass on each panel ``[a_k, b_k]``."""
    mid, half = (a + b) / 2, (b - a) / 2
    out = []
    for n in (_ORDER, 2 * _ORDER):
        x, w = _rule(n)
        nodes = mid[:, None] + half[:, None] * x[None, :]
        vals = np.asarray(h(nodes.ravel()), dtype=complex).reshape(nodes.shape)
        out.append(((vals * w).sum(axis=1) * half, (np.abs(vals) * w).sum(axis=1) * half))
    (lo, _), (hi, mass) = out
    return hi, np.abs(hi - lo), mass


def gl_adaptive(h, edges, spec: QuadSpec, what: str = "integral") -> tuple[complex, float]:
    """Globally adaptive composite Gauss-Legendre over consecutive ``edges``.

    ``h`` must accept a 1-D array.  The target accuracy is
    ``max(abs_tol, rel_tol * int |h|)`` which stays meaningful when the
    integral itself nearly cancels.
    """
    edges = np.unique(np.asarray(edges, dtype=float))
    a, b = edges[:-1], edges[1:]
    depth = np.zeros(a.size, dtype=int)
    val, err, mass = _panels(h, a, b)
    while True:
        tol = max(spec.abs_tol, spec.rel_tol * mass.sum())
        total_err = err.sum()
        if total_err <= tol:
            return complex(val.sum()), float(total_err)
        order = np.argsort(err)[::-1]
        cut = np.cumsum(err[order])
        n_split = int(np.searchsorted(cut, total_err - 0.5 * tol)) + 1
        pick = order[:max(1, n_split)]
        pick = pick[err[pick] > 0.1 * tol / max(1, a.size)]
        if pick.size == 0:
            pick = order[:1]
        if a.size + pick.size > spec.max_panels:
            raise ConvergenceError(
                f"{what}: more than {spec.max_panels} panels needed "
                f"(err {total_err:.3g} > tol {tol:.3g})")
        if np.any(depth[pick] >= spec.max_depth):
            k = pick[np.argmax(depth[pick])]
            raise ConvergenceError(
                f"{what}: panel [{a[k]:.6g}, {b[k]:.6g}] not resolved after "
                f"{spec.max_depth} bisections (err {total_err:.3g} > tol {tol:.3g})")
        m = (a[pick] + b[pick]) / 2
        na = np.concatenate([a[pick], m])
        nb = np.concatenate([m, b[pick]])
        nv, ne, nm = _panels(h, na, nb)
        keep = np.ones(a.size, dtype=bool)
        keep[pick] = False
        nd = np.concatenate([depth[pick] + 1, depth[pick] + 1])
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        depth = np.concatenate([depth[keep], nd])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        mass = np.concatenate([mass[keep], nm])


def gl_line(f, points, length: float, spec: QuadSpec, what: str = "integral"):
    """``int_{-inf}^{inf} f`` for a non-oscillatory, decaying integrand.

    The finite part spans the breakpoints; both tails are mapped onto
    ``[0, 1)`` with ``x = x0 +/- length * u / (1 - u)``.
    """
    pts = np.unique(np.asarray(points, dtype=float))
    lo, hi = pts[0] - length, pts[-1] + length
    core = gl_adaptive(f, [lo, *pts, hi], spec, what)

    def right(u):
        s = 1 - u
        return f(hi + length * u / s) * (length / s ** 2)

    def left(u):
        s = 1 - u
        return f(lo - length * u / s) * (length / s ** 2)

    tails = [gl_adaptive(g, [0.0, 0.5, 0.9, 0.99, 1.0], spec, what) for g in (left, right)]
    return (core[0] + tails[0][0] + tails[1][0], core[1] + tails[0][1] + tails[1][1])


# --------------------------------------------------------------------------
# physics written out directly


def _packet_shape(nu, p):
    """Lorentzian amplitude without its arrival phase."""
    return math.sqrt(p.xi / (2 * math.pi)) / (nu - p.nu0 + 0.5j * p.xi)


def _amp(which: str, nu, params):
    return reflection_amp(nu, params) if which == "r" else transmission_amp(nu, params)


def _lin_groups(pair: Pair, energy: float, inp: TwoPhotonInput, params: JcParams):
    """Linear amplitude as ``[(shift, callable(D))]`` with ``A = sum exp(i shift D) g(D)``."""
    p = inp.packets
    if inp.ports is Ports.DIFFERENT:
        rows = {Pair.P12: [("t", "t", 0, 1), ("r", "r", 1, 0)],
                Pair.P11: [("r", "t", 0, 1), ("t", "r", 1, 0)],
                Pair.P22: [("t", "r", 0, 1), ("r", "t", 1, 0)]}[pair]
    else:
        rows = {Pair.P11: [("r", "r", 0, 1), ("r", "r", 1, 0)],
                Pair.P22: [("t", "t", 0, 1), ("t", "t", 1, 0)],
                Pair.P12: [("r", "t", 0, 1), ("r", "t", 1, 0)]}[pair]
    norm = _input_norm(inp)
    groups = []
    for x1, x2, ia, ib in rows:
        pa, pb = p[ia], p[ib]
        # exp(i nu1' ta + i nu2' tb) = exp(i E (ta + tb)/2) exp(i D (ta - tb))
        phase = norm * np.exp(0.5j * energy * (pa.t_arr + pb.t_arr))

        def g(d, x1=x1, x2=x2, pa=pa, pb=pb, phase=phase):
            n1, n2 = energy / 2 + d, energy / 2 - d
            return phase * _amp(x1, n1, params) * _amp(x2, n2, params) \
                * _packet_shape(n1, pa) * _packet_shape(n2, pb)
        groups.append((pa.t_arr - pb.t_arr, g))
    return groups


def _input_norm(inp: TwoPhotonInput) -> float:
    if inp.ports is Ports.DIFFERENT:
        return 1.0
    p1, p2 = inp.packets
    # <f1|f2> by quadrature of the Lorentzian product
    spec = QuadSpec(1e-15, 1e-13)
    ov, _ = gl_line(lambda x: np.conj(_packet_shape(x, p1) * np.exp(1j * x * p1.t_arr))
                    * _packet_shape(x, p2) * np.exp(1j * x * p2.t_arr),
                    [p1.nu0, p2.nu0], 10 * max(p1.xi, p2.xi), spec, "packet overlap")
    return 1.0 / math.sqrt(1.0 + abs(ov) ** 2)


def _corr_features(energy: float, inp: TwoPhotonInput, params: JcParams):
    e1p, e1m, _, _ = resonances(params)
    p1, p2 = inp.packets
    return sorted({p1.nu0, e1p.real, e1m.real, energy - p2.nu0, energy - e1p.real,
                   energy - e1m.real})


def _scale(inp: TwoPhotonInput, params: JcParams) -> float:
    return max(params.kappa, params.g, abs(params.delta), *(p.xi for p in inp.packets))


def quad_corr_term(nu1p: float, nu2p: float, inp: TwoPhotonInput, params: JcParams,
                   spec: QuadSpec = QuadSpec()) -> tuple[complex, float]:
    """``C = i int dnu1 T(nu1', nu2'; nu1, E - nu1) f1(nu1) f2(E - nu1)``.

    The integrand falls off like ``nu1**-6``; the window is truncated at
    ``window_factor`` times the largest rate and the discarded tail is bounded
    and added to the returned error.
    """
    energy = nu1p + nu2p
    p1, p2 = inp.packets

    def h(x):
        f1 = _packet_shape(x, p1) * np.exp(1j * x * p1.t_arr)
        f2 = _packet_shape(energy - x, p2) * np.exp(1j * (energy - x) * p2.t_arr)
        return 1j * t2_reduced(nu1p, x, energy - x, params) * f1 * f2

    feats = _corr_features(energy, inp, params)
    width = spec.window_factor * _scale(inp, params)
    lo, hi = feats[0] - width, feats[-1] + width
    edges = np.unique(np.concatenate([np.linspace(lo, feats[0], 8), feats,
                                      np.linspace(feats[-1], hi, 8)]))
    val, err = gl_adaptive(h, edges, spec, f"corr term at E={energy:.6g}")
    # beyond the window |h| ~ |h(edge)| (edge/x)**6
    tail = (abs(h(np.array([lo]))[0]) + abs(h(np.array([hi]))[0])) * width / 5
    return val, err + tail


def _corr_group(energy: float, inp: TwoPhotonInput, params: JcParams, spec: QuadSpec):
    """Correlated part at total energy ``E`` as a callable of ``D``."""
    e1p, e1m, _, _ = resonances(params)
    half = energy / 2
    ref, err = quad_corr_term(half, half, inp, params, spec)
    norm = _input_norm(inp)
    ref_legs = ((half - e1p) * (half - e1m)) ** 2

    def g(d):
        n1, n2 = half + d, half - d
        return norm * ref * ref_legs / ((n1 - e1p) * (n1 - e1m) * (n2 - e1p) * (n2 - e1m))
    return g, err


def _amplitude_groups(pair: Pair, energy: float, inp: TwoPhotonInput, params: JcParams,
                      spec: QuadSpec, linear: bool):
    groups = _lin_groups(pair, energy, inp, params)
    if not linear:
        g, _ = _corr_group(energy, inp, params, spec)
        groups.append((0.0, g))
    merged: dict[float, list] = {}
    for s, g in groups:
        merged.setdefault(s, []).append(g)
    return [(s, (lambda d, fs=fs: sum(f(d) for f in fs))) for s, fs in merged.items()]


def _energy_points(inp: TwoPhotonInput, params: JcParams):
    e1p, e1m, e2p, e2m = resonances(params)
    p1, p2 = inp.packets
    pts = [p1.nu0 + p2.nu0, 2 * e1p.real, 2 * e1m.real, e2p.real, e2m.real]
    return sorted(pts)


def _delta_points(energy: float, inp: TwoPhotonInput, params: JcParams):
    e1p, e1m, _, _ = resonances(params)
    half = energy / 2
    pts = [0.0]
    for e in (e1p.real, e1m.real, *(p.nu0 for p in inp.packets)):
        pts += [e - half, half - e]
    return sorted(pts)


def quad_gamma(inp: TwoPhotonInput, params: JcParams, spec: QuadSpec = QuadSpec(),
               pair="12", linear: bool = False) -> tuple[float, float]:
    """``iint |A^{ij}|**2`` by nested quadrature in ``(E, D)`` (unit Jacobian)."""
    pair = Pair.parse(pair)
    scale = _scale(inp, params)
    inner_spec = QuadSpec(spec.abs_tol * 1e-2, spec.rel_tol * 1e-1, spec.window_factor,
                          spec.max_depth, spec.max_panels)

    def density(energy):
        groups = _amplitude_groups(pair, energy, inp, params, inner_spec, linear)

        def amp2(d):
            return np.abs(sum(np.exp(1j * s * d) * g(d) for s, g in groups)) ** 2
        val, _ = gl_line(amp2, _delta_points(energy, inp, params), scale, inner_spec,
                         f"|A|^2 over D at E={energy:.6g}")
        return val.real

    def outer(es):
        return np.array([density(e) for e in es])

    val, err = gl_line(outer, _energy_points(inp, params), 2 * scale, spec, "energy")
    return float(val.real), float(err)


def _laurent_tail(g, w: float, big: float) -> complex:
    """``int_{|x| > big} exp(i w x) g(x)`` from the expansion ``g ~ sum c_n x**-n``."""
    xs = big * np.array([1.0, 1.25, 1.6, 2.0, 3.0, 4.0])
    xs = np.concatenate([xs, -xs])
    powers = np.arange(2, 7)
    mat = xs[:, None] ** (-powers[None, :])
    coef, *_ = np.linalg.lstsq(mat.astype(complex), g(xs).astype(complex), rcond=None)
    total = 0j
    for n, c in zip(powers, coef):
        if w == 0:
            piece = (1 + (-1) ** n) * big ** (1 - n) / (n - 1)
        else:
            piece = big ** (1 - n) * (_expn(n, -1j * w * big) + (-1) ** n * _expn(n, 1j * w * big))
        total += c * piece
    return total


#: the oscillatory D-integral is done explicitly up to this multiple of the
#: largest pole distance; beyond it an asymptotic expansion is integrated exactly
TAIL_START = 8.0


def _expn(n: int, z: complex) -> complex:
    """Generalized exponential integral ``E_n(z)`` by upward recurrence from ``E_1``."""
    e = special.exp1(z)
    for k in range(1, n):
        e = (np.exp(-z) - z * e) / k
    return e


def _g2_density(pair: Pair, tau: float, inp: TwoPhotonInput, params: JcParams,
                spec: QuadSpec, linear: bool):
    """``E -> |int dD exp(i tau D) A(E/2 + D, E/2 - D)|**2``."""
    scale = _scale(inp, params)
    inner_spec = QuadSpec(spec.abs_tol * 1e-2, spec.rel_tol * 1e-1, spec.window_factor,
                          spec.max_depth, spec.max_panels)

    def density(energy):
        groups = _amplitude_groups(pair, energy, inp, params, inner_spec, linear)
        pts = _delta_points(energy, inp, params)
        big = TAIL_START * max(scale, *(abs(x) for x in pts))
        total = 0j
        for s, g in groups:
            w = tau + s
            edges = np.unique(np.concatenate([[-big], pts, [big]]))
            if w != 0:
                # one oscillation period per initial panel
                n = int(min(4000, math.ceil(abs(w) * 2 * big / (2 * math.pi))))
                edges = np.unique(np.concatenate([edges, np.linspace(-big, big, n + 1)]))
            val, _ = gl_adaptive(lambda d: np.exp(1j * w * d) * g(d), edges, inner_spec,
                                 f"Fourier over D at E={energy:.6g}")
            total += val + _laurent_tail(g, w, big)
        return abs(total) ** 2
    return density


def quad_g2(pair, tau: float, inp: TwoPhotonInput, params: JcParams,
            spec: QuadSpec = QuadSpec(), linear: bool = False) -> tuple[float, float]:
    """``G_ij(tau)`` by direct double quadrature over ``E`` and ``D``."""
    pair = Pair.parse(pair)
    scale = _scale(inp, params)
    density = _g2_density(pair, tau, inp, params, spec, linear)

    def outer(es):
        return np.array([density(e) for e in es])

    # finite energy window: far out the D-window holds too many periods to
    # resolve.  There one photon sits on its packet and the other is off by
    # ~E, so r**2 * density tends to a constant, modulated at the delay
    # frequency when the packets are delayed.
    pts = _energy_points(inp, params)
    centre = 0.5 * (pts[0] + pts[-1])
    width = spec.window_factor * scale
    lo, hi = pts[0] - width, pts[-1] + width
    edges = np.unique(np.concatenate([np.linspace(lo, pts[0], 8), pts,
                                      np.linspace(pts[-1], hi, 8)]))
    val, err = gl_adaptive(outer, edges, spec, "energy")
    for edge in (lo, hi):
        t, t_err = _fitted_tail(density, centre, edge, abs(inp.dt))
        val += t
        err += t_err
    return float(val.real) / (2 * math.pi), float(err) / (2 * math.pi)


def _fitted_tail(density, centre: float, edge: float, omega: float, n: int = 32):
    """Integral of ``density`` beyond ``edge`` from a least-squares tail model.

    ``r**2 * density`` is fitted on ``[r0, r0 + span]`` by
    ``c0 + c1/r + c2/r**2`` plus ``(a + b/r) exp(i omega r)``; each term is
    then integrated to infinity in closed form.  The error is the residual
    of the fit carried through the same integral.
    """
    sign = math.copysign(1.0, edge - centre)
    r0 = abs(edge - centre)
    span = r0 if omega == 0 else min(max(r0, 6 * math.pi / omega), 8 * r0)
    r = np.linspace(r0, r0 + span, n)
    m = np.array([density(centre + sign * x) for x in r]) * r ** 2
    cols = [np.ones_like(r), 1 / r, 1 / r ** 2]
    weights = [1 / r0, 1 / (2 * r0 ** 2), 1 / (3 * r0 ** 3)]
    if omega:
        osc = np.exp(1j * omega * r)
        cols += [osc.real, osc.imag, osc.real / r, osc.imag / r]
        # int_r0^inf exp(i omega s) s**-k ds = r0**(1 - k) E_k(-i omega r0)
        e2 = _expn(2, -1j * omega * r0) / r0
        e3 = _expn(3, -1j * omega * r0) / r0 ** 2
        weights += [e2.real, e2.imag, e3.real, e3.imag]
    basis = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(basis, m, rcond=None)
    resid = np.max(np.abs(m - basis @ coef))
    return float(np.dot(coef, weights)), 2 * resid / r0
