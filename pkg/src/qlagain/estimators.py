"""Photon-counting gain estimator, its analytic error, and the threshold gain."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .amplifier import count_moments
from .errors import ConvergenceError, DomainError, UnsupportedProbeError
from .fisher import qfi_coherent_lossy
from .params import (
    IDEAL_DETECTOR,
    CoherentState,
    DetectorSpec,
    Gain,
    NdsTotalDistribution,
    NumberState,
    ProbeSpec,
    as_gain,
    gain,
    probe_totals,
)

GainLike = Union[float, Gain]


def g_hat(total_count, N: float, M: int, det: DetectorSpec = IDEAL_DETECTOR):
    """Unbiased gain estimate (Y / eta_d + M) / (N + M) from the total count Y.

    Not clipped to G >= 1.  Works elementwise on arrays of counts.
    """
    if N + M <= 0:
        raise DomainError("need N + M > 0")
    y = np.asarray(total_count, dtype=float)
    out = (y / det.eta_d + M) / (N + M)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MseBreakdown:
    qcrb_term: float
    probe_penalty_term: float
    inefficiency_term: float
    total: float


def _breakdown(qcrb, penalty, ineff) -> MseBreakdown:
    return MseBreakdown(qcrb, penalty, ineff, qcrb + penalty + ineff)


def _common_terms(N, M, g: Gain, det: DetectorSpec):
    if N < 0 or M < 1:
        raise DomainError(f"need N >= 0 and M >= 1, got N={N!r}, M={M!r}")
    eta, S = det.eta_d, N + M
    qcrb = g.G * g.sinh2 / S
    ineff = (1.0 - eta) / (eta * S) * (g.G - M / S)
    return qcrb, ineff


def mse_number_analytic(N: float, M: int, g: GainLike,
                        det: DetectorSpec = IDEAL_DETECTOR) -> MseBreakdown:
    """MSE of :func:`g_hat` for a multimode Fock probe with N photons in M modes."""
    qcrb, ineff = _common_terms(N, M, as_gain(g), det)
    return _breakdown(qcrb, 0.0, ineff)


def mse_coherent_analytic(N: float, M: int, g: GainLike,
                          det: DetectorSpec = IDEAL_DETECTOR) -> MseBreakdown:
    """As :func:`mse_number_analytic` plus the coherent-probe penalty G^2 N / (N+M)^2."""
    g = as_gain(g)
    qcrb, ineff = _common_terms(N, M, g, det)
    return _breakdown(qcrb, g.G ** 2 * N / (N + M) ** 2, ineff)


def mse_analytic(probe: ProbeSpec, g: GainLike, det: DetectorSpec = IDEAL_DETECTOR) -> MseBreakdown:
    N, M = probe_totals(probe)
    if isinstance(probe, NumberState):
        return mse_number_analytic(N, M, g, det)
    if isinstance(probe, CoherentState):
        return mse_coherent_analytic(N, M, g, det)
    raise UnsupportedProbeError("no analytic estimator MSE for NDS-distribution probes")


def g_hat_moments(probe: ProbeSpec, g: GainLike,
                  det: DetectorSpec = IDEAL_DETECTOR) -> tuple[float, float]:
    """Mean and variance of g_hat assembled from per-mode count moments.

    An independent route to the closed-form MSEs: no use of the breakdown
    formulas, only the Heisenberg-picture moments of each detected mode.
    """
    N, M = probe_totals(probe)
    if isinstance(probe, NumberState):
        modes = [NumberState((v,)) for v in probe.n]
    elif isinstance(probe, CoherentState):
        modes = [CoherentState((v,)) for v in probe.energies]
    else:
        raise UnsupportedProbeError("moments need a product number or coherent probe")
    mean_y = var_y = 0.0
    for mode in modes:
        m1, m2 = count_moments(mode, g, det)
        mean_y += m1
        var_y += m2 - m1 * m1
    eta, S = det.eta_d, N + M
    return (mean_y / eta + M) / S, var_y / (eta * S) ** 2


def _threshold_gap(G: float, M: int, det: DetectorSpec) -> float:
    g = gain(G)
    return (mse_number_analytic(M, M, g, det).total
            - 1.0 / qfi_coherent_lossy(M, M, g, det).value)


def threshold_gain(det: DetectorSpec, M_probe: int = 1, xtol: float = 1e-9,
                   g_lo: float = 1.0 + 1e-12, g_hi: float = 100.0,
                   g_hi_limit: float = 1e4) -> float:
    """Gain above which single-photon probes with counting beat the coherent QCRB.

    Solves MSE_1-photon(G) = 1 / K_G^coh,lossy(G) with N = M = ``M_probe`` by
    bisection.  The upper bracket doubles from ``g_hi`` up to ``g_hi_limit``.
    """
    eta = det.eta_d
    if not (0.0 < eta < 1.0):
        raise DomainError(f"threshold needs 0 < eta_d < 1, got {eta!r}")
    if int(M_probe) != M_probe or M_probe < 1:
        raise DomainError(f"mode count must be a positive integer, got {M_probe!r}")
    f_lo = _threshold_gap(g_lo, M_probe, det)
    hi = g_hi
    f_hi = _threshold_gap(hi, M_probe, det)
    while f_hi >= 0 and hi < g_hi_limit:
        hi = min(2.0 * hi, g_hi_limit)
        f_hi = _threshold_gap(hi, M_probe, det)
    if not (f_lo > 0 > f_hi):
        raise ConvergenceError(
            f"no sign change on [{g_lo!r}, {hi!r}]: gap({g_lo!r}) = {f_lo!r}, "
            f"gap({hi!r}) = {f_hi!r} (eta_d = {eta!r}, M = {M_probe})")
    lo = g_lo
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = _threshold_gap(mid, M_probe, det)
        if f_mid > 0:
            lo = mid
        elif f_mid < 0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def threshold_gap(G: GainLike, M: int, det: DetectorSpec) -> float:
    """Single-photon MSE minus the lossy coherent QCRB; negative means advantage."""
    return _threshold_gap(as_gain(G).G, M, det)
