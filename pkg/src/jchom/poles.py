"""Exact line integrals of rational functions in partial-fraction form.

A :class:`PoleSum` stores ``sum_k c_k exp(i*shift*x) / (x - p_k)`` with all
poles off the real axis.  Fourier transforms and overlap integrals of such sums
reduce to residue sums over one half-plane, which is what this module does.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import DegeneratePoleError

TWO_PI_I = 2j * np.pi

#: relative separation below which two simple poles are treated as coincident
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class PoleSum:
    shift: float
    poles: np.ndarray
    residues: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        terms = self.residues / (x[..., None] - self.poles)
        return np.exp(1j * self.shift * x) * terms.sum(axis=-1)

    def scaled(self, factor: complex) -> "PoleSum":
        return PoleSum(self.shift, self.poles, self.residues * factor)

    @property
    def leading(self) -> complex:
        """Coefficient of the ``1/x`` tail; zero when the sum decays like ``1/x**2``."""
        lead = self.residues.sum(axis=-1)
        return complex(lead) if np.ndim(lead) == 0 else lead


def check_distinct(poles: np.ndarray, scale=None, rtol: float = DEGENERACY_RTOL) -> None:
    """Raise :class:`DegeneratePoleError` if two poles (along the last axis) coincide."""
    k = poles.shape[-1]
    if k < 2:
        return
    if scale is None:
        scale = np.maximum(1.0, np.abs(poles).max(axis=-1))
    gaps = np.abs(poles[..., :, None] - poles[..., None, :])
    gaps = np.where(np.eye(k, dtype=bool), np.inf, gaps)
    bad = gaps.min(axis=(-2, -1)) <= rtol * np.asarray(scale)
    if np.any(bad):
        flat = gaps.reshape(-1, k, k)[int(np.argmax(np.ravel(bad)))]
        row = poles.reshape(-1, k)[int(np.argmax(np.ravel(bad)))]
        i, j = np.unravel_index(np.argmin(flat), flat.shape)
        raise DegeneratePoleError(
            f"poles {row[i]:.6g} and {row[j]:.6g} coincide within {rtol:g}")


def pole_sum(numerator: Callable[[np.ndarray], np.ndarray], poles, const=1.0,
             shift: float = 0.0, scale=None) -> PoleSum:
    """Partial fractions of ``const * numerator(x) / prod_k (x - p_k)``.

    ``poles`` is a sequence of scalars or of equally shaped arrays (one batch
    entry per element); ``const`` broadcasts against the batch shape.  The
    numerator must have lower degree than the denominator.  Raises
    :class:`DegeneratePoleError` when two poles coincide.
    """
    if isinstance(poles, np.ndarray):
        p = poles.astype(complex)
    else:
        p = np.stack(np.broadcast_arrays(*[np.asarray(x, dtype=complex) for x in poles]),
                     axis=-1)
    if np.any(p.imag == 0):
        raise ValueError("poles must lie off the real axis")
    check_distinct(p, scale)
    k = p.shape[-1]
    diff = np.where(np.eye(k, dtype=bool), 1.0, p[..., :, None] - p[..., None, :])
    res = (np.asarray(const)[..., None] * np.asarray(numerator(p), dtype=complex)
           / diff.prod(axis=-1))
    return PoleSum(float(shift), p, res)


def fourier(terms: Iterable[PoleSum], tau) -> np.ndarray:
    """``int dx exp(i x tau) F(x)`` for ``F`` the sum of ``terms``.

    At a frequency where a term has a ``1/x`` tail the transform jumps; the
    midpoint value is returned there.
    """
    tau = np.asarray(tau, dtype=float)
    out = np.zeros(tau.shape, dtype=complex)
    for term in terms:
        w = tau[..., None] + term.shift
        p = term.poles
        up = p.imag > 0
        sel_pos = (w > 0) & up
        sel_neg = (w < 0) & ~up
        sel = sel_pos | sel_neg
        arg = np.where(sel, 1j * p * w, -np.inf)
        sign = np.where(sel_pos, 1.0, -1.0)
        vals = TWO_PI_I * sign * term.residues * np.exp(arg)
        mid = np.where(w == 0, 1j * np.pi * term.residues * np.where(up, 1.0, -1.0), 0.0)
        out = out + (vals + mid).sum(axis=-1)
    return out


def _pair_integral(w: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``int dx exp(i w x) / ((x - a)(x - b))`` elementwise over broadcast ``a, b``."""
    upper = w >= 0
    sign = TWO_PI_I if upper else -TWO_PI_I
    in_a = (a.imag > 0) if upper else (a.imag < 0)
    in_b = (b.imag > 0) if upper else (b.imag < 0)
    diff = a - b
    safe = np.where(diff == 0, 1.0, diff)
    ea = np.exp(np.where(in_a, 1j * w * a, -np.inf))
    eb = np.exp(np.where(in_b, 1j * w * b, -np.inf))
    # both poles enclosed: divided difference of exp(i w x); expm1 only where
    # the plain difference would cancel
    z = 1j * w * diff
    near = np.abs(z) < 0.5
    small = np.abs(z) < 1e-8
    zsafe = np.where(near & ~small, z, 1.0)
    exprel = np.where(small, 1 + z / 2, np.expm1(zsafe) / zsafe)
    both = np.where(near, eb * 1j * w * exprel, (ea - eb) / safe)
    only_a = ea / safe
    only_b = -eb / safe
    val = np.where(in_a & in_b, both,
                   np.where(in_a, only_a, np.where(in_b, only_b, 0.0)))
    return sign * val


def overlap(left: Iterable[PoleSum], right: Iterable[PoleSum]):
    """``int dx conj(L(x)) R(x)`` for real ``x`` (elementwise over a batch axis).

    Each product of a left and a right term must decay at least like ``1/x**2``,
    which always holds for pole sums.
    """
    right = list(right)
    total = 0j
    for lt in left:
        lp = np.conj(lt.poles)[..., :, None]
        lc = np.conj(lt.residues)[..., :, None]
        for rt in right:
            w = rt.shift - lt.shift
            block = _pair_integral(w, lp, rt.poles[..., None, :])
            total = total + (lc * rt.residues[..., None, :] * block).sum(axis=(-2, -1))
    return complex(total) if np.ndim(total) == 0 else total


def norm2(terms: Sequence[PoleSum]):
    """``int dx |F(x)|**2``."""
    val = np.real(overlap(terms, terms))
    return float(val) if np.ndim(val) == 0 else val


def causal_profile(term: PoleSum) -> tuple[np.ndarray, np.ndarray]:
    """Time profile ``phi(t) = (2 pi)**-1/2 int dnu exp(-i nu t) F(nu)`` for ``t > 0``.

    ``F`` must have all poles in the lower half-plane and no phase shift.
    Returns ``(amps, poles)`` such that ``phi(t) = sum amps * exp(-i poles t)``.
    """
    if term.shift != 0 or np.any(term.poles.imag >= 0):
        raise ValueError("causal profile requires lower half-plane poles and no shift")
    amps = -TWO_PI_I * term.residues / np.sqrt(2 * np.pi)
    return amps, term.poles


def intensity_overlap(a: PoleSum, b: PoleSum) -> float:
    """``int_0^inf dt |phi_a(t)|**2 |phi_b(t)|**2`` for two causal profiles."""
    ca, pa = causal_profile(a)
    cb, pb = causal_profile(b)
    # exponent of exp(-i X t) with X = pa_k - conj(pa_l) + pb_m - conj(pb_n)
    x = (pa[:, None, None, None] - np.conj(pa)[None, :, None, None]
         + pb[None, None, :, None] - np.conj(pb)[None, None, None, :])
    coef = (ca[:, None, None, None] * np.conj(ca)[None, :, None, None]
            * cb[None, None, :, None] * np.conj(cb)[None, None, None, :])
    return float((coef / (1j * x)).sum().real)
