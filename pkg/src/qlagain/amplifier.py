"""Photon-number statistics of the quantum-limited amplifier channel.

A Fock input |n> leaves the amplifier with n + a photons where the added count
a ~ NB(n + 1, 1/G).  Inefficient detection is a binomial thinning of the
amplified number state.  Everything here is expressed through pmfs and
moments; no density matrices are built.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np
from scipy import special, stats

from .errors import ConvergenceError, DomainError
from .params import (
    IDEAL_DETECTOR,
    CoherentState,
    DetectorSpec,
    Gain,
    NumberState,
    as_gain,
)

DEFAULT_TOL = 1e-12
MAX_TERMS = 200_000
_CHUNK = 256
_INT64_MAX = 2**63 - 1


@dataclass(frozen=True, eq=False)
class PhotonNumberDistribution:
    """Truncated count pmf over k = 0..k_max plus a bound on the omitted mass."""

    pmf: np.ndarray
    tail_bound: float

    @property
    def k_max(self) -> int:
        return self.pmf.size - 1

    def mean(self) -> float:
        return float(np.dot(np.arange(self.pmf.size), self.pmf))

    def moment(self, order: int) -> float:
        return float(np.dot(np.arange(self.pmf.size, dtype=float) ** order, self.pmf))


@dataclass(frozen=True)
class DisplacedThermalParams:
    mean_amplitude: float
    thermal_occupation: float


# -- negative binomial ------------------------------------------------------

def _nb_logpmf(r, log_p, log_q, k):
    """log NB(r, p) at k, with log p and log(1 - p) supplied by the caller."""
    k = np.asarray(k, dtype=float)
    if not np.isfinite(log_q):  # p == 1: point mass at zero
        return np.where(k == 0, r * log_p, -np.inf)
    return (special.gammaln(k + r) - special.gammaln(k + 1.0) - special.gammaln(r)
            + k * log_q + r * log_p)


def nb_pmf(r: int, p: float, k):
    """C(k+r-1, k) (1-p)^k p^r, evaluated in log space.

    ``k`` may be a scalar or an array.
    """
    if int(r) != r or r < 1:
        raise DomainError(f"NB shape must be a positive integer, got {r!r}")
    if not (0.0 < p <= 1.0):
        raise DomainError(f"NB success probability must lie in (0, 1], got {p!r}")
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise DomainError("counts must be non-negative")
    log_q = math.log1p(-p) if p < 1.0 else -math.inf
    out = np.exp(_nb_logpmf(float(r), math.log(p), log_q, k_arr))
    return float(out) if out.ndim == 0 else out


def nb_sf(r: int, p: float, k: int) -> float:
    """P(X > k) for X ~ NB(r, p), via the regularised incomplete beta function."""
    if p >= 1.0:
        return 0.0
    return float(special.betainc(k + 1.0, float(r), 1.0 - p))


def fock_transition_prob(n: int, a, g: Union[float, Gain]):
    """Probability that the amplifier adds ``a`` photons to the Fock state |n>."""
    g = as_gain(g)
    if n < 0:
        raise DomainError(f"photon number must be non-negative, got {n!r}")
    a_arr = np.asarray(a)
    if g.is_identity:
        out = (a_arr == 0).astype(float)
    else:
        out = np.exp(_added_logpmf(n, g, a_arr))
    return float(out) if out.ndim == 0 else out


def _added_logpmf(n: int, g: Gain, a) -> np.ndarray:
    # NB(n + 1, sech^2 tau) with log(1 - p) = log tanh^2 tau, exact near G = 1
    return _nb_logpmf(n + 1.0, -math.log(g.G), math.log(g.tanh2), a)


def added_photon_cutoff(n: int, g: Gain, tol: float = DEFAULT_TOL,
                        max_terms: int = MAX_TERMS) -> tuple[int, float]:
    """Smallest a_max whose NB(n + 1, 1/G) tail mass beyond a_max is below tol.

    Returns (a_max, certified tail mass).
    """
    if g.is_identity:
        return 0, 0.0
    r, p = n + 1, 1.0 / g.G
    a_max = int(stats.nbinom.isf(tol, r, p))
    a_max = max(a_max, 0)
    tail = nb_sf(r, p, a_max)
    while tail >= tol and a_max <= max_terms:
        a_max += max(1, a_max // 16)
        tail = nb_sf(r, p, a_max)
    while a_max > 0 and nb_sf(r, p, a_max - 1) < tol:
        a_max -= 1
        tail = nb_sf(r, p, a_max)
    if a_max > max_terms:
        raise ConvergenceError(
            f"added-photon series needs more than {max_terms} terms "
            f"(n={n}, G={g.G:g}, tol={tol:g})")
    return a_max, tail


# -- lemma ------------------------------------------------------------------

def compositions(a: int, parts: int) -> Iterator[tuple]:
    """All weak compositions of ``a`` into ``parts`` non-negative integers."""
    for bars in itertools.combinations(range(a + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(a + parts - 1 - prev - 1)
        yield tuple(out)


def lemma_identity_check(n_vec, a: int) -> tuple[int, int]:
    """Both sides of the multimode negative-binomial convolution identity.

    lhs sums prod_m C(n_m + a_m, a_m) over every composition of ``a`` into
    len(n_vec) parts by exhaustive enumeration; rhs = C(sum(n) + M - 1 + a, a).
    """
    n_vec = tuple(int(v) for v in n_vec)
    if not n_vec:
        raise DomainError("mode vector must be non-empty")
    if a < 0 or any(v < 0 for v in n_vec):
        raise DomainError("entries must be non-negative")
    lhs = 0
    for comp in compositions(int(a), len(n_vec)):
        term = 1
        for n_m, a_m in zip(n_vec, comp):
            term *= math.comb(n_m + a_m, a_m)
        lhs += term
    rhs = math.comb(sum(n_vec) + len(n_vec) - 1 + a, a)
    if lhs > _INT64_MAX or rhs > _INT64_MAX:
        raise OverflowError("combinatorial values exceed the 64-bit range")
    return lhs, rhs


# -- lossy count distribution -----------------------------------------------

def _log_binom_thin(total: np.ndarray, k: np.ndarray, eta: float) -> np.ndarray:
    """log Bin(total, eta) at k on a broadcast grid, -inf where k > total."""
    valid = k <= total
    tk = np.where(valid, total - k, 0.0)
    logc = special.gammaln(total + 1.0) - special.gammaln(k + 1.0) - special.gammaln(tk + 1.0)
    out = logc + special.xlogy(k, eta) + special.xlog1py(tk, -eta)
    return np.where(valid, out, -np.inf)


def thinned_mixture(n: int, g: Gain, eta: float, a_max: int,
                    weights: Optional[np.ndarray] = None) -> np.ndarray:
    """sum_a NB_a * c_a * Bin(n + a, eta)(k) for k = 0..n + a_max.

    ``weights`` gives the per-a factors c_a (default 1).  Rows are processed
    in chunks so the (a, k) grid never sits in memory whole.
    """
    k = np.arange(n + a_max + 1, dtype=float)
    out = np.zeros(k.size)
    for start in range(0, a_max + 1, _CHUNK):
        a = np.arange(start, min(a_max + 1, start + _CHUNK), dtype=float)
        logw = _added_logpmf(n, g, a) if not g.is_identity else np.where(a == 0, 0.0, -np.inf)
        terms = np.exp(logw[:, None] + _log_binom_thin(n + a[:, None], k[None, :], eta))
        if weights is not None:
            terms *= weights[start:start + a.size, None]
        out += terms.sum(axis=0)
    return out


def lossy_count_distribution(n: int, g: Union[float, Gain],
                             det: DetectorSpec = IDEAL_DETECTOR,
                             tol: float = DEFAULT_TOL,
                             max_terms: int = MAX_TERMS,
                             a_max: Optional[int] = None) -> PhotonNumberDistribution:
    """Photocount pmf for Fock input |n> through the amplifier and a lossy detector.

    The added-photon sum is cut where the NB(n + 1, 1/G) tail mass falls
    below ``tol``; that tail mass is the certified ``tail_bound``.  Passing
    ``a_max`` fixes the cut instead, so that a family of distributions can
    share one support.
    """
    g = as_gain(g)
    if n < 0 or int(n) != n:
        raise DomainError(f"photon number must be a non-negative integer, got {n!r}")
    if not (0.0 < tol <= 1e-6):
        raise DomainError(f"tolerance must lie in (0, 1e-6], got {tol!r}")
    n = int(n)
    if a_max is None:
        a_max, tail = added_photon_cutoff(n, g, tol, max_terms)
    else:
        tail = 0.0 if g.is_identity else nb_sf(n + 1, 1.0 / g.G, a_max)
    pmf = thinned_mixture(n, g, det.eta_d, a_max)
    return PhotonNumberDistribution(pmf=pmf, tail_bound=tail)


def displaced_thermal_params(mode_energy: float, g: Union[float, Gain],
                             det: DetectorSpec = IDEAL_DETECTOR) -> DisplacedThermalParams:
    """Coherent amplitude and thermal occupation of the detected output mode."""
    g = as_gain(g)
    if mode_energy < 0:
        raise DomainError(f"mode energy must be non-negative, got {mode_energy!r}")
    eta = det.eta_d
    return DisplacedThermalParams(
        mean_amplitude=math.sqrt(eta * g.G * mode_energy),
        thermal_occupation=eta * g.sinh2,
    )


def count_moments(probe_mode: Union[NumberState, CoherentState], g: Union[float, Gain],
                  det: DetectorSpec = IDEAL_DETECTOR) -> tuple[float, float]:
    """First and second moments of the photocount of one detected mode."""
    g = as_gain(g)
    if isinstance(probe_mode, NumberState):
        if len(probe_mode.n) != 1:
            raise DomainError("count_moments takes a single-mode probe")
        n_in = float(probe_mode.n[0])
        n_in2 = n_in ** 2
    elif isinstance(probe_mode, CoherentState):
        if len(probe_mode.energies) != 1:
            raise DomainError("count_moments takes a single-mode probe")
        n_in = probe_mode.energies[0]
        n_in2 = n_in ** 2 + n_in
    else:
        raise DomainError(f"unsupported probe for moments: {probe_mode!r}")
    G, gm1 = g.G, g.sinh2
    eta = det.eta_d
    out_mean = G * n_in + gm1
    out_second = G * G * n_in2 + 3.0 * G * gm1 * n_in + gm1 * (2.0 * G - 1.0)
    return eta * out_mean, eta * eta * out_second + eta * (1.0 - eta) * out_mean
