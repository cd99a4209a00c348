"""Energy-constrained Bures distance between M-mode amplifier channels."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fisher import fidelity_coherent, fidelity_nds
from .params import GainPair

SNAP_TOL = 1e-12


@dataclass(frozen=True)
class EcbResult:
    min_fidelity: float
    ecb_distance: float
    # ((floor N, 1 - {N}), (ceil N, {N}))
    optimal_pmf_support: tuple


def split_energy(N: float) -> tuple[int, float]:
    """Integer and fractional part of N, snapping to the nearest integer within 1e-12."""
    if not (N >= 0 and math.isfinite(N)):
        raise DomainError(f"energy budget must be finite and >= 0, got {N!r}")
    nearest = round(N)
    if abs(N - nearest) <= SNAP_TOL * max(1.0, N):
        return int(nearest), 0.0
    lo = math.floor(N)
    return int(lo), N - lo


def min_fidelity_quantum(N: float, M: int, pair: GainPair) -> EcbResult:
    """Minimum output fidelity over all probes of energy N on M modes.

    Attained by the two-point total-photon distribution on floor(N), ceil(N).
    """
    if int(M) != M or M < 1:
        raise DomainError(f"mode count must be a positive integer, got {M!r}")
    lo, frac = split_energy(N)
    nu = pair.nu
    f_min = nu ** M * ((1.0 - frac) * nu ** lo + frac * nu ** (lo + 1))
    f_min = min(f_min, 1.0)
    hi = lo + 1 if frac > 0 else lo
    return EcbResult(
        min_fidelity=f_min,
        ecb_distance=math.sqrt(max(0.0, 1.0 - f_min)),
        optimal_pmf_support=((lo, 1.0 - frac), (hi, frac)),
    )


def min_fidelity_classical(N: float, M: int, pair: GainPair) -> float:
    """Minimum output fidelity over classical (coherent-mixture) probes of energy N."""
    return fidelity_coherent(N, M, pair)


def optimal_pmf(N: float) -> np.ndarray:
    lo, frac = split_energy(N)
    p = np.zeros(lo + 2)
    p[lo] = 1.0 - frac
    p[lo + 1] = frac
    return p


def nds_fidelity_lower_bound_check(p, M: int, pair: GainPair, N: float = None,
                                   atol: float = 1e-12) -> bool:
    """Whether an NDS probe with total-photon pmf p respects the minimum fidelity.

    ``N`` defaults to the pmf mean; if given it must match that mean to 1e-9.
    """
    p = np.asarray(p, dtype=float)
    mean = float(np.dot(np.arange(p.size), p))
    if N is None:
        N = mean
    elif abs(mean - N) > 1e-9:
        raise DomainError(f"pmf mean {mean!r} does not match N = {N!r}")
    return fidelity_nds(p, M, pair) >= min_fidelity_quantum(N, M, pair).min_fidelity - atol
