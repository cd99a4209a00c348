"""Fisher information and output fidelities for amplifier gain sensing.

Closed forms are given per gain G unless stated otherwise.  Two numerical
oracles, :func:`qfi_from_fidelity` and :func:`fi_of_pmf_family`, check them
by finite differences and share no code with the closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .amplifier import (
    DEFAULT_TOL,
    MAX_TERMS,
    PhotonNumberDistribution,
    added_photon_cutoff,
    thinned_mixture,
)
from .errors import ConvergenceError, DomainError, SingularityError
from .params import (
    IDEAL_DETECTOR,
    DetectorSpec,
    Gain,
    GainPair,
    NdsTotalDistribution,
    as_gain,
    gain,
    gain_from_tau,
)

PROB_FLOOR = 1e-300
DEFAULT_STEP = 1e-3
RICHARDSON_RTOL = 1e-4

GainLike = Union[float, Gain]


@dataclass(frozen=True)
class FisherValue:
    """Fisher information on G or tau, tagged with the gain it was taken at.

    ``parameter="theta"`` marks information on some other parameter; such
    values carry no gain and cannot be converted.
    """

    value: float
    parameter: str
    gain: Optional[Gain] = None

    def __post_init__(self):
        if self.parameter not in ("G", "tau", "theta"):
            raise DomainError(f"unknown parameter tag {self.parameter!r}")
        if self.parameter != "theta" and self.gain is None:
            raise DomainError("values on G or tau must record their gain")
        if self.value < 0:
            raise DomainError(f"Fisher information must be non-negative, got {self.value!r}")

    def wrt_G(self) -> "FisherValue":
        if self.parameter == "G":
            return self
        return FisherValue(self.value * _dtau_dG_sq(self.gain), "G", self.gain)

    def wrt_tau(self) -> "FisherValue":
        if self.parameter == "tau":
            return self
        return FisherValue(self.value / _dtau_dG_sq(self.gain), "tau", self.gain)

    def __float__(self) -> float:
        return float(self.value)


def _dtau_dG_sq(g: Optional[Gain]) -> float:
    if g is None:
        raise DomainError("no gain recorded; cannot convert")
    if g.is_identity:
        raise SingularityError("dtau/dG diverges at G = 1")
    return 1.0 / (4.0 * g.G * g.sinh2)


def _check_NM(N: float, M: int) -> None:
    if not (N >= 0 and math.isfinite(N)):
        raise DomainError(f"mean photon number must be finite and >= 0, got {N!r}")
    if int(M) != M or M < 1:
        raise DomainError(f"mode count must be a positive integer, got {M!r}")


def _need_above_one(g: Gain, what: str) -> None:
    if g.is_identity:
        raise SingularityError(f"{what} on G diverges at G = 1")


# -- closed forms -----------------------------------------------------------

def qfi_nds(N: float, M: int, g: GainLike, parameter: str = "G") -> FisherValue:
    """Optimal QFI, attained by every number-diagonal-signal probe."""
    g = as_gain(g)
    _check_NM(N, M)
    if parameter == "tau":
        return FisherValue(4.0 * (N + M), "tau", g)
    _need_above_one(g, "the NDS QFI")
    return FisherValue((N + M) / (g.G * g.sinh2), "G", g)


def qfi_coherent(N: float, M: int, g: GainLike) -> FisherValue:
    g = as_gain(g)
    _check_NM(N, M)
    _need_above_one(g, "the coherent-state QFI")
    G = g.G
    return FisherValue(N / (G * (2.0 * G - 1.0)) + M / (G * g.sinh2), "G", g)


def fi_homodyne(N: float, M: int, g: GainLike) -> FisherValue:
    g = as_gain(g)
    _check_NM(N, M)
    G = g.G
    return FisherValue(N / (G * (2.0 * G - 1.0)) + 2.0 * M / (2.0 * G - 1.0) ** 2, "G", g)


def fi_heterodyne(N: float, M: int, g: GainLike) -> FisherValue:
    g = as_gain(g)
    _check_NM(N, M)
    return FisherValue((N / 2.0 + M) / g.G ** 2, "G", g)


def qfi_coherent_lossy(N: float, M: int, g: GainLike,
                       det: DetectorSpec = IDEAL_DETECTOR) -> FisherValue:
    """Coherent-probe QFI when the output passes a loss of transmissivity eta_d.

    Per-mode single-mode values summed over the M modes; only the total N
    enters the photon term.
    """
    g = as_gain(g)
    _check_NM(N, M)
    _need_above_one(g, "the lossy coherent-state QFI")
    eta, gm1 = det.eta_d, g.sinh2
    photon = eta * N / (g.G * (2.0 * eta * gm1 + 1.0))
    modal = eta * M / (gm1 * (eta * gm1 + 1.0))
    return FisherValue(photon + modal, "G", g)


def fi_schmidt_counting(N: float, M: int) -> float:
    """FI on tau of the ancilla-basis plus photon-counting measurement: 4(N + M)."""
    _check_NM(N, M)
    return 4.0 * (N + M)


# -- lossy number-state QFI -------------------------------------------------

def _lossy_number_qfi_tau(n: int, g: Gain, eta: float, tol: float, max_terms: int) -> float:
    a_max, _ = added_photon_cutoff(n, g, tol, max_terms)
    a = np.arange(a_max + 1, dtype=float)
    s, c = math.sinh(g.tau), math.cosh(g.tau)
    # d/dtau and d^2/dtau^2 of log NB(n+1, sech^2 tau) at a
    dlog = 2.0 * (a - (n + 1) * s * s) / (s * c)
    d2log = -2.0 * a * (c * c + s * s) / (s * c) ** 2 - 2.0 * (n + 1) / (c * c)
    P = thinned_mixture(n, g, eta, a_max)
    dP = thinned_mixture(n, g, eta, a_max, weights=dlog)
    d2P = thinned_mixture(n, g, eta, a_max, weights=dlog * dlog + d2log)
    keep = P > PROB_FLOOR
    return float(np.sum(dP[keep] ** 2 / P[keep]) - np.sum(d2P[keep]))


def qfi_number_lossy(n: Union[int, Sequence[int]], g: GainLike,
                     det: DetectorSpec = IDEAL_DETECTOR, tol: float = DEFAULT_TOL,
                     max_terms: int = MAX_TERMS) -> FisherValue:
    """QFI on tau of Fock probes behind the amplifier and a lossy counter.

    The detected state is number-diagonal, so the QFI is the classical FI of
    the photocount pmf; its tau-derivatives are summed term by term over the
    added-photon series.  A sequence ``n`` is a multimode product probe and
    the per-mode values add.  Use ``.wrt_G()`` for the value on G.
    """
    g = as_gain(g)
    modes = [n] if np.ndim(n) == 0 else list(n)
    if not modes:
        raise DomainError("probe needs at least one mode")
    if any(int(v) != v or v < 0 for v in modes):
        raise DomainError(f"photon numbers must be non-negative integers: {n!r}")
    if g.is_identity:
        raise SingularityError("the derivative series needs tau > 0 (G > 1)")
    cache: dict[int, float] = {}
    total = 0.0
    for v in modes:
        v = int(v)
        if v not in cache:
            cache[v] = _lossy_number_qfi_tau(v, g, det.eta_d, tol, max_terms)
        total += cache[v]
    return FisherValue(max(total, 0.0), "tau", g)


# -- fidelities -------------------------------------------------------------

def fidelity_nds(p, M: int, pair: GainPair) -> float:
    """Output fidelity sum_n p_n nu^(n + M) for an NDS probe with total-photon pmf p."""
    if isinstance(p, NdsTotalDistribution):
        p, M = p.p, p.M
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise DomainError("p must be a probability vector")
    _check_NM(0.0, M)
    nu = pair.nu
    return float(np.dot(p, nu ** (np.arange(p.size) + M)))


def fidelity_coherent(N: float, M: int, pair: GainPair,
                      det: DetectorSpec = IDEAL_DETECTOR) -> float:
    """Output fidelity for a coherent-state probe of total mean photon number N.

    Each detected mode is a displaced thermal state with occupation
    eta_d (G - 1) and amplitude sqrt(eta_d G N_m).  The thermal factor is
    1 / (sqrt((n+1)(n'+1)) - sqrt(n n')), which is nu at eta_d = 1.
    """
    _check_NM(N, M)
    g, gp = pair.g, pair.g_prime
    eta = det.eta_d
    n1, n2 = eta * g.sinh2, eta * gp.sinh2
    if det.eta_d == 1.0:
        thermal = pair.nu
    elif n1 == n2:
        thermal = 1.0
    else:
        thermal = 1.0 / (math.sqrt((n1 + 1.0) * (n2 + 1.0)) - math.sqrt(n1 * n2))
    shift = eta * N * (math.sqrt(gp.G) - math.sqrt(g.G)) ** 2
    return min(thermal ** M * math.exp(-shift / (2.0 * (n1 + n2 + 1.0))), 1.0)


# -- numerical oracles ------------------------------------------------------

def _tag_gain(theta: float, parameter: str, at: Optional[GainLike]) -> Optional[Gain]:
    if at is not None:
        return as_gain(at)
    if parameter == "tau":
        return gain_from_tau(theta)
    if parameter == "G":
        return gain(theta)
    return None


def _second_difference(f, x, h):
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def qfi_from_fidelity(fidelity_curve: Callable[[float], float], theta: float,
                      step: float = DEFAULT_STEP, parameter: str = "tau",
                      at: Optional[GainLike] = None) -> FisherValue:
    """-4 x the curvature of theta' -> F(theta, theta') at theta' = theta.

    Second central differences at ``step`` and ``step / 2`` are combined by
    Richardson extrapolation.  If the two levels disagree by more than 1e-4
    relative the curve is too noisy at this step and ConvergenceError is raised.
    ``at`` tags the result with a gain; by default theta is read as G or
    tau according to ``parameter``.
    """
    if step <= 0:
        raise DomainError("step must be positive")
    coarse = _second_difference(fidelity_curve, theta, step)
    fine = _second_difference(fidelity_curve, theta, step / 2.0)
    curvature = (4.0 * fine - coarse) / 3.0
    spread = abs(fine - coarse)
    if spread > RICHARDSON_RTOL * abs(curvature) and spread > 1e-12:
        raise ConvergenceError(
            f"Richardson levels disagree at step={step:g}: {coarse!r} vs {fine!r} "
            f"(relative {spread / max(abs(curvature), 1e-300):.3g}); "
            "roundoff probably dominates, try a larger step")
    return FisherValue(max(-4.0 * curvature, 0.0), parameter, _tag_gain(theta, parameter, at))


def fi_of_pmf_family(pmf_family: Callable[[float], PhotonNumberDistribution],
                     theta: float, step: float = DEFAULT_STEP, parameter: str = "tau",
                     at: Optional[GainLike] = None) -> FisherValue:
    """sum_k (dP/dtheta)^2 / P over a family of count distributions.

    The derivative is a Richardson-extrapolated central difference.  Bins with
    P below 1e-300 are skipped.  All members must share one support.
    """
    def pmf(t):
        d = pmf_family(t)
        return d.pmf if isinstance(d, PhotonNumberDistribution) else np.asarray(d, float)

    centre = pmf(theta)
    hi, lo = pmf(theta + step), pmf(theta - step)
    hi2, lo2 = pmf(theta + step / 2.0), pmf(theta - step / 2.0)
    if any(v.shape != centre.shape for v in (hi, lo, hi2, lo2)):
        raise DomainError("pmf family members do not share a support; fix the truncation")
    d_coarse = (hi - lo) / (2.0 * step)
    d_fine = (hi2 - lo2) / step
    deriv = (4.0 * d_fine - d_coarse) / 3.0
    keep = centre > PROB_FLOOR
    value = float(np.sum(deriv[keep] ** 2 / centre[keep]))
    return FisherValue(value, parameter, _tag_gain(theta, parameter, at))
