import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_pmf_with_mean

from qlagain.bures import (
    min_fidelity_classical,
    min_fidelity_quantum,
    nds_fidelity_lower_bound_check,
    optimal_pmf,
    split_energy,
)
from qlagain.errors import DomainError
from qlagain.fisher import fidelity_nds
from qlagain.params import gain_from_tau, gain_pair


def pair_with_nu(nu, tau=0.6):
    return gain_pair(gain_from_tau(tau), gain_from_tau(tau + math.acosh(1 / nu)))


def test_examples():
    pair = pair_with_nu(0.5)
    assert min_fidelity_quantum(2, 1, pair).min_fidelity == pytest.approx(0.125, rel=1e-12)
    r = min_fidelity_quantum(1.5, 1, pair_with_nu(0.9))
    assert r.min_fidelity == pytest.approx(0.7695, rel=1e-12)
    assert r.optimal_pmf_support == ((1, 0.5), (2, 0.5))
    same = min_fidelity_quantum(3.3, 2, gain_pair(2.0, 2.0))
    assert same.min_fidelity == 1.0 and same.ecb_distance == 0.0


@given(st.floats(0.0, 40.0), st.integers(1, 10), st.floats(0.05, 0.999))
def test_result_invariants(N, M, nu):
    r = min_fidelity_quantum(N, M, pair_with_nu(nu))
    assert 0.0 < r.min_fidelity <= 1.0
    assert r.ecb_distance == pytest.approx(math.sqrt(1 - r.min_fidelity), abs=1e-15)
    (lo, w0), (hi, w1) = r.optimal_pmf_support
    assert w0 >= 0 and w1 >= 0 and w0 + w1 == pytest.approx(1.0, abs=1e-15)
    assert lo * w0 + hi * w1 == pytest.approx(N, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("N", [0, 1, 2, 5, 17])
@pytest.mark.parametrize("M", [1, 3])
def test_integer_reduction(N, M):
    pair = pair_with_nu(0.83)
    assert min_fidelity_quantum(N, M, pair).min_fidelity == pytest.approx(
        pair.nu ** (M + N), rel=1e-12)


def test_integer_snap():
    assert split_energy(3.0 + 1e-14) == (3, 0.0)
    assert split_energy(2.9999999999999) == (3, 0.0)
    assert split_energy(2.5) == (2, 0.5)
    with pytest.raises(DomainError):
        split_energy(-1.0)


@pytest.mark.parametrize("N", [1, 2, 7])
def test_continuity_across_integers(N):
    pair = pair_with_nu(0.7)
    left = min_fidelity_quantum(N - 1e-13, 2, pair).min_fidelity
    right = min_fidelity_quantum(N + 1e-13, 2, pair).min_fidelity
    exact = min_fidelity_quantum(N, 2, pair).min_fidelity
    assert left == pytest.approx(exact, abs=1e-12)
    assert right == pytest.approx(exact, abs=1e-12)


@given(st.floats(0.0, 20.0), st.floats(0.01, 5.0), st.integers(1, 5), st.floats(0.1, 0.99))
def test_monotone_in_energy_and_modes(N, dN, M, nu):
    pair = pair_with_nu(nu)
    f = min_fidelity_quantum(N, M, pair).min_fidelity
    assert min_fidelity_quantum(N + dN, M, pair).min_fidelity < f
    assert min_fidelity_quantum(N, M + 1, pair).min_fidelity < f


@pytest.mark.parametrize("N", [0.5, 2, 2.3, 7])
def test_random_pmfs_never_beat_optimum(N):
    rng = np.random.default_rng(int(N * 10))
    pair, M = pair_with_nu(0.8), 2
    f_min = min_fidelity_quantum(N, M, pair).min_fidelity
    for _ in range(500):
        p = random_pmf_with_mean(rng, N)
        assert float(np.arange(p.size) @ p) == pytest.approx(N, abs=1e-9)
        assert nds_fidelity_lower_bound_check(p, M, pair, N)
        # random pmfs spread beyond two adjacent points, so the bound is strict
        assert fidelity_nds(p, M, pair) > f_min


def test_optimal_pmf_attains_bound():
    pair = pair_with_nu(0.8)
    for N in (0.5, 2.0, 2.3, 7.0):
        p = optimal_pmf(N)
        assert fidelity_nds(p, 3, pair) == pytest.approx(
            min_fidelity_quantum(N, 3, pair).min_fidelity, rel=1e-14)
        assert nds_fidelity_lower_bound_check(p, 3, pair)


def test_truncated_poisson_strict():
    from scipy import stats
    pair = pair_with_nu(0.8)
    k = np.arange(60)
    p = stats.poisson.pmf(k, 2.3)
    p /= p.sum()
    N = float(k @ p)
    assert nds_fidelity_lower_bound_check(p, 1, pair, N)
    assert fidelity_nds(p, 1, pair) > min_fidelity_quantum(N, 1, pair).min_fidelity + 1e-3


def test_lower_bound_check_rejects_wrong_mean():
    with pytest.raises(DomainError):
        nds_fidelity_lower_bound_check([0.5, 0.5], 1, pair_with_nu(0.9), N=0.7)


GRID = list(itertools.product((1.0, 1.5, 2.0, 4.0), (1.0, 1.5, 2.0, 4.0), (0.0, 1.0, 5.5), (1, 3)))


@pytest.mark.parametrize("G,Gp,N,M", GRID)
def test_classical_not_below_quantum(G, Gp, N, M):
    pair = gain_pair(G, Gp)
    c = min_fidelity_classical(N, M, pair)
    q = min_fidelity_quantum(N, M, pair).min_fidelity
    if N == 0 or G == Gp:
        assert c == pytest.approx(q, rel=1e-14)
    else:
        assert c > q
