"""Gain, probe and detector value types.

The squeeze parameter ``tau`` is the canonical internal coordinate; ``G =
cosh(tau)**2`` is what users pass around.  Both are stored so that a gain built
from either side round-trips exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError

G_MAX = 1e6
TAU_MAX = math.acosh(math.sqrt(G_MAX))


def _finite(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


@dataclass(frozen=True)
class Gain:
    """Amplifier gain.  Build with :func:`gain` or :func:`gain_from_tau`."""

    G: float
    tau: float

    def __post_init__(self):
        if not (1.0 <= self.G <= G_MAX * (1 + 1e-12)):
            raise DomainError(f"gain must lie in [1, {G_MAX:g}], got {self.G!r}")
        if not (0.0 <= self.tau <= TAU_MAX * (1 + 1e-15)):
            raise DomainError(f"tau out of range: {self.tau!r}")

    @property
    def sinh2(self) -> float:
        """sinh^2(tau) = G - 1, evaluated without cancellation near G = 1."""
        return math.sinh(self.tau) ** 2

    @property
    def sech2(self) -> float:
        return 1.0 / self.G

    @property
    def tanh2(self) -> float:
        return self.sinh2 / self.G

    @property
    def is_identity(self) -> bool:
        return self.tau == 0.0


def gain(G: float) -> Gain:
    """Gain from its G value; tau = asinh(sqrt(G - 1)) keeps precision near 1."""
    G = _finite(G, "G")
    if not (1.0 <= G <= G_MAX):
        raise DomainError(f"gain must lie in [1, {G_MAX:g}], got {G!r}")
    return Gain(G=G, tau=math.asinh(math.sqrt(G - 1.0)))


def gain_from_tau(tau: float) -> Gain:
    tau = _finite(tau, "tau")
    if tau < 0.0:
        raise DomainError(f"tau must be non-negative, got {tau!r}")
    if tau > TAU_MAX:
        raise DomainError(f"tau={tau!r} exceeds the supported range (G <= {G_MAX:g})")
    return Gain(G=1.0 + math.sinh(tau) ** 2, tau=tau)


def tau_from_gain(G: Union[float, Gain]) -> float:
    if isinstance(G, Gain):
        return G.tau
    return gain(G).tau


def as_gain(g: Union[float, Gain]) -> Gain:
    return g if isinstance(g, Gain) else gain(g)


def _nu_algebraic(G: float, Gp: float) -> float:
    # (sqrt(GG') - sqrt((G-1)(G'-1)))^-1 rationalised: no cancellation anywhere
    if G == Gp:
        return 1.0
    return (math.sqrt(G * Gp) + math.sqrt((G - 1.0) * (Gp - 1.0))) / (G + Gp - 1.0)


def _nu_sech(tau: float, tau_p: float) -> float:
    return 1.0 / math.cosh(tau_p - tau)


@dataclass(frozen=True)
class GainPair:
    g: Gain
    g_prime: Gain
    nu: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "nu", nu_of_pair(self.g, self.g_prime))


def gain_pair(G: Union[float, Gain], G_prime: Union[float, Gain]) -> GainPair:
    return GainPair(as_gain(G), as_gain(G_prime))


def nu_of_pair(g: Union[float, Gain], g_prime: Union[float, Gain]) -> float:
    """Overlap parameter nu = sech(tau' - tau) of two gains, in (0, 1]."""
    g, g_prime = as_gain(g), as_gain(g_prime)
    nu = _nu_algebraic(g.G, g_prime.G)
    if __debug__:
        alt = _nu_sech(g.tau, g_prime.tau)
        assert abs(nu - alt) <= 1e-11 * alt, (nu, alt)
    return nu


def nu_of_taus(tau: float, tau_prime: float) -> float:
    return _nu_sech(tau, tau_prime)


@dataclass(frozen=True)
class DetectorSpec:
    eta_d: float = 1.0

    def __post_init__(self):
        eta = _finite(self.eta_d, "eta_d")
        if not (0.0 < eta <= 1.0):
            raise DomainError(f"quantum efficiency must lie in (0, 1], got {eta!r}")


IDEAL_DETECTOR = DetectorSpec(1.0)


# -- probes -----------------------------------------------------------------

@dataclass(frozen=True)
class NumberState:
    """Product of Fock states, one photon number per signal mode."""

    n: tuple

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        if not n:
            raise DomainError("number-state probe needs at least one mode")
        if any(v < 0 for v in n) or any(int(v) != v for v in self.n):
            raise DomainError(f"photon numbers must be non-negative integers: {self.n!r}")
        object.__setattr__(self, "n", n)


@dataclass(frozen=True)
class CoherentState:
    """Product of coherent states with per-mode mean photon numbers."""

    energies: tuple

    def __post_init__(self):
        e = tuple(_finite(v, "mode energy") for v in self.energies)
        if not e:
            raise DomainError("coherent-state probe needs at least one mode")
        if any(v < 0 for v in e):
            raise DomainError(f"mode energies must be non-negative: {self.energies!r}")
        object.__setattr__(self, "energies", e)


@dataclass(frozen=True)
class NdsTotalDistribution:
    """Number-diagonal-signal probe described by its total-photon pmf."""

    p: tuple
    M: int

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("pmf must be a non-empty vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DomainError("pmf entries must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise DomainError(f"pmf sums to {p.sum()!r}, not 1")
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"mode count must be a positive integer, got {self.M!r}")
        object.__setattr__(self, "p", tuple(p.tolist()))
        object.__setattr__(self, "M", int(self.M))

    @property
    def mean(self) -> float:
        p = np.asarray(self.p)
        return float(np.dot(np.arange(p.size), p))


ProbeSpec = Union[NumberState, CoherentState, NdsTotalDistribution]


def probe_totals(probe: ProbeSpec) -> tuple[float, int]:
    """Total mean photon number N and mode count M of a probe."""
    if isinstance(probe, NumberState):
        return float(sum(probe.n)), len(probe.n)
    if isinstance(probe, CoherentState):
        return float(math.fsum(probe.energies)), len(probe.energies)
    if isinstance(probe, NdsTotalDistribution):
        return probe.mean, probe.M
    raise DomainError(f"not a probe: {probe!r}")


def split_photons(N: int, M: int) -> tuple:
    """Spread an integer photon budget over M modes as evenly as possible."""
    if M < 1 or N < 0 or int(N) != N:
        raise DomainError(f"need integer N >= 0 and M >= 1, got N={N!r}, M={M!r}")
    q, r = divmod(int(N), int(M))
    return tuple(q + 1 if m < r else q for m in range(M))
