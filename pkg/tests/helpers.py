"""Statistical helpers and acceptance bookkeeping shared by the tests."""
import contextlib
import math
import time

import numpy as np
from scipy import stats


def pooled_chisquare(samples, pmf, min_expected=5.0):
    """Chi-square p-value of integer samples against pmf over 0..len(pmf)-1.

    Adjacent bins are merged until each expects at least ``min_expected``
    counts; mass beyond the pmf support goes into the last bin.
    """
    samples = np.asarray(samples).ravel()
    n = samples.size
    pmf = np.asarray(pmf, dtype=float)
    observed = np.bincount(np.minimum(samples, pmf.size - 1), minlength=pmf.size).astype(float)
    expected = pmf * n
    expected[-1] += max(0.0, 1.0 - pmf.sum()) * n
    obs_pooled, exp_pooled = [], []
    o = e = 0.0
    for oi, ei in zip(observed, expected):
        o += oi
        e += ei
        if e >= min_expected:
            obs_pooled.append(o)
            exp_pooled.append(e)
            o = e = 0.0
    if e > 0 or o > 0:
        obs_pooled[-1] += o
        exp_pooled[-1] += e
    obs_pooled, exp_pooled = np.array(obs_pooled), np.array(exp_pooled)
    exp_pooled *= obs_pooled.sum() / exp_pooled.sum()
    return stats.chisquare(obs_pooled, exp_pooled).pvalue


def within_stderr(samples, target, k=4.0):
    samples = np.asarray(samples, dtype=float)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    return abs(samples.mean() - target) <= k * se


def random_pmf_with_mean(rng, N):
    """Dirichlet pmf on {0..2 ceil(N)+3}, mixed with an end-point mass to hit mean N."""
    support = np.arange(2 * math.ceil(N) + 4)
    q = rng.dirichlet(np.ones(support.size))
    m = float(support @ q)
    endpoint = 0 if m > N else support[-1]
    w = (N - m) / (endpoint - m)  # weight on the point mass
    p = (1 - w) * q
    p[endpoint] += w
    return p


# -- acceptance bookkeeping ---------------------------------------------------

ACCEPTANCE_RESULTS = {}


@contextlib.contextmanager
def criterion(number, title, time_limit=None):
    """Record PASS/FAIL (and runtime) for one acceptance criterion."""
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if time_limit is not None:
            assert elapsed < time_limit, f"took {elapsed:.2f} s, limit {time_limit} s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_RESULTS[number] = ("FAIL", title, elapsed, f"{type(exc).__name__}: {exc}")
        raise
    ACCEPTANCE_RESULTS[number] = ("PASS", title, elapsed, "")
