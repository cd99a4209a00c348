"""Monte Carlo photon counting at the amplifier output.

Number probes: the amplifier adds a ~ NB(n + 1, 1/G) photons, drawn as a
gamma-Poisson mixture, and the detector keeps each photon with probability
eta_d.  Coherent probes: the detected mode is displaced thermal, sampled
through its Gaussian P-function and a Poisson count.

Trials are grouped into fixed blocks of ``BLOCK_SIZE``.  Block b of a plan
draws from a Philox stream keyed by the seed, with (plan stream, b) in the top
counter word, so a run is bit-identical however the blocks are spread over
workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, UnsupportedProbeError
from .estimators import g_hat
from .params import (
    CoherentState,
    DetectorSpec,
    Gain,
    NumberState,
    ProbeSpec,
    as_gain,
    probe_totals,
)

BLOCK_SIZE = 4096
_U64 = 2**64


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for (seed, stream); streams never overlap."""
    if not (0 <= seed < _U64) or not (0 <= stream < _U64):
        raise DomainError("seed and stream must be unsigned 64-bit integers")
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, 0, int(stream)]))


@dataclass(frozen=True)
class TrialPlan:
    probe: ProbeSpec
    g_true: Gain
    det: DetectorSpec
    trials: int
    seed: int = 0
    # distinguishes plans sharing a seed (e.g. rows of one CLI run)
    stream: int = 0

    def __post_init__(self):
        object.__setattr__(self, "g_true", as_gain(self.g_true))
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if not (0 <= self.seed < _U64):
            raise DomainError("seed must be an unsigned 64-bit integer")
        if not (0 <= self.stream < 2**32):
            raise DomainError("stream must fit in 32 bits")


@dataclass(frozen=True)
class EstimatorStats:
    trials: int
    mean_estimate: float
    bias: float
    empirical_mse: float
    stderr_mean: float
    stderr_mse: float

    @property
    def stderr_defined(self) -> bool:
        return self.trials > 1


# -- samplers ---------------------------------------------------------------

def sample_added_photons(n, g: Union[float, Gain], rng: np.random.Generator, size=None):
    """Photons added to Fock input |n>: Poisson count at a Gamma(n + 1, G - 1) rate."""
    g = as_gain(g)
    n = np.asarray(n)
    if np.any(n < 0):
        raise DomainError("photon numbers must be non-negative")
    shape = n.shape if size is None else size
    if g.is_identity:
        out = np.zeros(shape, dtype=np.int64)
    else:
        rate = rng.gamma(n + 1.0, g.sinh2, size=shape)
        out = np.asarray(rng.poisson(rate))
    return int(out) if out.ndim == 0 else out


def sample_counts_number_probe(n_vec: Sequence[int], g: Union[float, Gain],
                               det: DetectorSpec, rng: np.random.Generator,
                               size: Optional[int] = None) -> np.ndarray:
    """Per-mode photocounts for a multimode Fock probe (amplify, then thin).

    Returns shape (M,) or (size, M).
    """
    n = np.asarray(n_vec, dtype=np.int64)
    shape = n.shape if size is None else (size,) + n.shape
    a = sample_added_photons(np.broadcast_to(n, shape), g, rng)
    photons = n + a
    if det.eta_d == 1.0:
        return np.asarray(photons, dtype=np.int64)
    return rng.binomial(photons, det.eta_d)


def sample_counts_coherent_probe(energies: Sequence[float], g: Union[float, Gain],
                                 det: DetectorSpec, rng: np.random.Generator,
                                 size: Optional[int] = None) -> np.ndarray:
    """Per-mode photocounts for a multimode coherent probe.

    The complex amplitude has mean sqrt(eta_d G N_m) and independent real and
    imaginary fluctuations of variance eta_d (G - 1) / 2; the count is Poisson
    in |amplitude|^2.
    """
    g = as_gain(g)
    e = np.asarray(energies, dtype=float)
    shape = e.shape if size is None else (size,) + e.shape
    eta = det.eta_d
    mean = np.sqrt(eta * g.G * e)
    sigma = math.sqrt(eta * g.sinh2 / 2.0)
    re = mean + sigma * rng.standard_normal(shape)
    im = sigma * rng.standard_normal(shape)
    return rng.poisson(re * re + im * im)


# -- trials -----------------------------------------------------------------

def _block_estimates(plan: TrialPlan, block: int, block_size: int) -> np.ndarray:
    start = block * block_size
    count = min(block_size, plan.trials - start)
    rng = make_rng(plan.seed, (plan.stream << 32) | block)
    probe = plan.probe
    if isinstance(probe, NumberState):
        counts = sample_counts_number_probe(probe.n, plan.g_true, plan.det, rng, size=count)
    else:
        counts = sample_counts_coherent_probe(probe.energies, plan.g_true, plan.det, rng, size=count)
    N, M = probe_totals(probe)
    return g_hat(counts.sum(axis=1), N, M, plan.det)


def simulate_estimates(plan: TrialPlan, workers: int = 1,
                       block_size: int = BLOCK_SIZE) -> np.ndarray:
    """One g_hat per trial, in trial order."""
    if not isinstance(plan.probe, (NumberState, CoherentState)):
        raise UnsupportedProbeError(
            f"cannot simulate {type(plan.probe).__name__}; use a number or coherent probe")
    n_blocks = -(-plan.trials // block_size)
    blocks = range(n_blocks)
    if workers <= 1 or n_blocks == 1:
        parts = [_block_estimates(plan, b, block_size) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_estimates(plan, b, block_size), blocks))
    return np.concatenate(parts)


def summarize(estimates: np.ndarray, G_true: float) -> EstimatorStats:
    n = estimates.size
    mean = float(np.mean(estimates))
    sq = (estimates - G_true) ** 2
    mse = float(np.mean(sq))
    if n > 1:
        se_mean = float(np.std(estimates, ddof=1) / math.sqrt(n))
        se_mse = float(np.std(sq, ddof=1) / math.sqrt(n))
    else:
        se_mean = se_mse = math.nan
    return EstimatorStats(n, mean, mean - G_true, mse, se_mean, se_mse)


def run_estimator_trials(plan: TrialPlan, workers: int = 1,
                         block_size: int = BLOCK_SIZE) -> EstimatorStats:
    """Simulate ``plan.trials`` experiments and summarise the g_hat errors.

    With one trial the standard errors are NaN (``stderr_defined`` is False).
    """
    return summarize(simulate_estimates(plan, workers, block_size), plan.g_true.G)
