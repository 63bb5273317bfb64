"""Model parameters, wave packets and the two-photon input state.

Frequencies are angular frequencies and times are their inverses.  The library
is scale free, so any unit works as long as it is used consistently; the CLI
defaults to measuring everything in units of the light-matter coupling ``g``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class JcError(Exception):
    """Base class for errors raised by this package."""


class ConvergenceError(JcError):
    """A numerical integral did not reach its requested tolerance."""


class DegeneratePoleError(JcError):
    """Two poles of a rational integrand coincide, so simple residues fail."""


@dataclass(frozen=True)
class JcParams:
    """Cavity, qubit, coupling and decay frequencies of the scatterer.

    ``kappa`` is the total cavity decay into both lines, ``kappa = 2*pi*g_w**2``.
    """

    omega_c: float
    omega_q: float
    g: float
    kappa: float

    def __post_init__(self):
        for name in ("omega_c", "omega_q", "g", "kappa"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.g <= 0:
            raise ValueError("g must be positive")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    @property
    def delta(self) -> float:
        return self.omega_c - self.omega_q

    @property
    def g_w(self) -> float:
        return math.sqrt(self.kappa / (2 * math.pi))

    @classmethod
    def from_detuning(cls, delta: float, kappa: float, g: float = 1.0,
                      omega_c: float = 0.0) -> "JcParams":
        return cls(omega_c=omega_c, omega_q=omega_c - delta, g=g, kappa=kappa)

    def shifted(self, offset: float) -> "JcParams":
        return JcParams(self.omega_c + offset, self.omega_q + offset, self.g, self.kappa)

    @property
    def scale(self) -> float:
        """Largest frequency scale of the scatterer, used to size windows."""
        return max(self.kappa, self.g, abs(self.delta))


@dataclass(frozen=True)
class LorentzianPacket:
    """Single-photon Lorentzian packet with carrier ``nu0``, width ``xi``.

    ``t_arr`` is the instant the packet front reaches the cavity.
    """

    nu0: float
    xi: float
    t_arr: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.nu0) and math.isfinite(self.t_arr)):
            raise ValueError("packet parameters must be finite")
        if not (self.xi > 0 and math.isfinite(self.xi)):
            raise ValueError("xi must be positive")

    @property
    def pole(self) -> complex:
        """Location of the (lower half-plane) pole of the amplitude."""
        return complex(self.nu0, -self.xi / 2)

    @property
    def norm(self) -> float:
        return math.sqrt(self.xi / (2 * math.pi))

    def shifted(self, offset: float) -> "LorentzianPacket":
        return LorentzianPacket(self.nu0 + offset, self.xi, self.t_arr)

    def delayed(self, t_arr: float) -> "LorentzianPacket":
        return LorentzianPacket(self.nu0, self.xi, t_arr)


def packet_amplitude(nu, p: LorentzianPacket, t_ref: float = 0.0):
    """Spectral amplitude of ``p`` at (real or complex) frequency ``nu``."""
    nu = np.asarray(nu)
    val = p.norm * np.exp(-1j * nu * (t_ref - p.t_arr)) / (nu - p.nu0 + 0.5j * p.xi)
    return val[()] if val.ndim == 0 else val


def packet_overlap(p1: LorentzianPacket, p2: LorentzianPacket) -> complex:
    """Closed-form ``<f1|f2> = int dnu conj(f1) f2`` for two Lorentzian packets."""
    # conj(f1) has its pole in the upper half-plane, f2 in the lower one
    a = complex(p1.nu0, p1.xi / 2)
    b = p2.pole
    w = p2.t_arr - p1.t_arr
    pref = p1.norm * p2.norm
    if w >= 0:
        return pref * 2j * math.pi * np.exp(1j * w * a) / (a - b)
    return pref * -2j * math.pi * np.exp(1j * w * b) / (b - a)


class Ports(enum.Enum):
    DIFFERENT = "different"
    SAME = "same"


@dataclass(frozen=True)
class TwoPhotonInput:
    """Ordered pair of packets and where they enter.

    ``Ports.DIFFERENT`` puts ``packet1`` in waveguide 1 and ``packet2`` in
    waveguide 2; ``Ports.SAME`` sends both through waveguide 1.
    """

    packet1: LorentzianPacket
    packet2: LorentzianPacket
    ports: Ports = Ports.DIFFERENT

    @property
    def dt(self) -> float:
        return self.packet1.t_arr - self.packet2.t_arr

    @property
    def packets(self) -> tuple[LorentzianPacket, LorentzianPacket]:
        return (self.packet1, self.packet2)

    @property
    def identical_shapes(self) -> bool:
        return (self.packet1.nu0 == self.packet2.nu0
                and self.packet1.xi == self.packet2.xi)

    @property
    def norm(self) -> float:
        """Normalization of the input state (1 for different waveguides)."""
        if self.ports is Ports.DIFFERENT:
            return 1.0
        ov = packet_overlap(self.packet1, self.packet2)
        return 1.0 / math.sqrt(1.0 + abs(ov) ** 2)

    def with_delay(self, dt: float) -> "TwoPhotonInput":
        """Same packets with ``packet1`` delayed by ``dt`` relative to ``packet2``."""
        return TwoPhotonInput(self.packet1.delayed(self.packet2.t_arr + dt),
                              self.packet2, self.ports)

    def shifted(self, offset: float) -> "TwoPhotonInput":
        return TwoPhotonInput(self.packet1.shifted(offset),
                              self.packet2.shifted(offset), self.ports)

    def swapped(self) -> "TwoPhotonInput":
        return TwoPhotonInput(self.packet2, self.packet1, self.ports)

    @classmethod
    def symmetric(cls, nu0: float, xi: float, dt: float = 0.0,
                  ports: Ports = Ports.DIFFERENT) -> "TwoPhotonInput":
        """Identical packets at ``nu0``; ``packet1`` arrives ``dt`` later."""
        return cls(LorentzianPacket(nu0, xi, dt), LorentzianPacket(nu0, xi, 0.0), ports)
