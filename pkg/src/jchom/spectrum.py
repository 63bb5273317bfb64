"""Jaynes-Cummings ladder: polariton energies, mixing angles, 50/50 points."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from .core import JcParams


class Branch(enum.IntEnum):
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class PolaritonEnergy:
    n: int
    sigma: Branch
    value: complex


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"excitation number must be an integer >= 1, got {n!r}")


def jc_energy(n: int, sigma: Branch, params: JcParams) -> float:
    """Bare polariton energy ``n*wc - d/2 +/- sqrt((d/2)**2 + n*g**2)``."""
    _check_n(n)
    d = params.delta
    root = math.sqrt((d / 2) ** 2 + n * params.g ** 2)
    return n * params.omega_c - d / 2 + int(sigma) * root


def _shifted_root(n: int, params: JcParams) -> complex:
    # Continuous branch of sqrt(((delta - i kappa)/2)**2 + n g**2) along real delta,
    # anchored at delta -> +inf where the + branch is cavity-like.  For
    # n g**2 > kappa**2/4 the radicand stays in Re > 0 and the principal root is
    # continuous.  Otherwise the path crosses the negative real axis at delta = 0
    # and the continuous root is the one with Im < 0 throughout.
    dt = complex(params.delta, -params.kappa)
    disc = dt * dt / 4 + n * params.g ** 2
    root = cmath.sqrt(disc)
    if n * params.g ** 2 < params.kappa ** 2 / 4 and root.imag > 0:
        root = -root
    return root


def jc_energy_shifted(n: int, sigma: Branch, params: JcParams) -> complex:
    """Complex resonance energy with ``wc -> wc - i kappa``, ``delta -> delta - i kappa``."""
    _check_n(n)
    wct = complex(params.omega_c, -params.kappa)
    dt = complex(params.delta, -params.kappa)
    return n * wct - dt / 2 + int(sigma) * _shifted_root(n, params)


def polariton(n: int, sigma: Branch, params: JcParams, shifted: bool = False) -> PolaritonEnergy:
    fn = jc_energy_shifted if shifted else jc_energy
    return PolaritonEnergy(n, Branch(sigma), fn(n, sigma, params))


@lru_cache(maxsize=256)
def resonances(params: JcParams) -> tuple[complex, complex, complex, complex]:
    """``(e1+, e1-, e2+, e2-)`` with the decay shift applied."""
    return (jc_energy_shifted(1, Branch.PLUS, params),
            jc_energy_shifted(1, Branch.MINUS, params),
            jc_energy_shifted(2, Branch.PLUS, params),
            jc_energy_shifted(2, Branch.MINUS, params))


def nonlinearity(sigma: Branch, params: JcParams) -> float:
    """Two-photon anharmonicity ``U = e_2sigma - 2 e_1sigma``."""
    return jc_energy(2, sigma, params) - 2 * jc_energy(1, sigma, params)


def mixing_angle(n: int, params: JcParams) -> float:
    """Angle with ``tan(theta) = -2 g sqrt(n) / delta`` taken in ``(0, pi)``."""
    _check_n(n)
    return math.atan2(2 * params.g * math.sqrt(n), -params.delta)


@dataclass(frozen=True)
class BeamSplitterEnergies:
    """Single-photon energies with ``|t|**2 = |r|**2 = 1/2``."""

    plus1: float
    minus1: float
    plus2: float
    minus2: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.plus1, self.minus1, self.plus2, self.minus2)

    def get(self, which: int, sigma: Branch) -> float:
        if which == 1:
            return self.plus1 if sigma is Branch.PLUS else self.minus1
        if which == 2:
            return self.plus2 if sigma is Branch.PLUS else self.minus2
        raise ValueError("which must be 1 or 2")


def beam_splitter_energies(params: JcParams) -> BeamSplitterEnergies:
    wc, wq, k, g, d = params.omega_c, params.omega_q, params.kappa, params.g, params.delta
    r1 = math.sqrt((d + k) ** 2 + 4 * g * g)
    r2 = math.sqrt((d - k) ** 2 + 4 * g * g)
    return BeamSplitterEnergies(
        plus1=0.5 * (wc + wq + k + r1),
        minus1=0.5 * (wc + wq + k - r1),
        plus2=0.5 * (wc + wq - k + r2),
        minus2=0.5 * (wc + wq - k - r2),
    )
