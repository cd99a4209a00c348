import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlagain.errors import DomainError
from qlagain.params import (
    G_MAX,
    CoherentState,
    DetectorSpec,
    NdsTotalDistribution,
    NumberState,
    gain,
    gain_from_tau,
    gain_pair,
    nu_of_pair,
    nu_of_taus,
    probe_totals,
    split_photons,
    tau_from_gain,
)

gains = st.floats(min_value=1.0, max_value=1e4, allow_nan=False)
# mpmath, 40 digits: asinh(1) and sech(acosh(sqrt(4.5)) - acosh(sqrt(2)))
TAU_AT_2 = 0.8813735870195430252326093249797923090281
NU_2_45 = 0.8856052169794492168712498847560499365233


def test_tau_at_gain_two():
    assert tau_from_gain(2.0) == pytest.approx(TAU_AT_2, rel=1e-15)


def test_identity_gain():
    g = gain(1.0)
    assert g.tau == 0.0 and g.is_identity and g.sinh2 == 0.0


@pytest.mark.parametrize("bad", [0.999, -1.0, math.nan, math.inf, G_MAX * 2])
def test_gain_rejects_out_of_range(bad):
    with pytest.raises(DomainError):
        gain(bad)


def test_gain_from_tau_rejects_negative():
    with pytest.raises(DomainError):
        gain_from_tau(-0.1)


def test_near_identity_precision():
    eps = 1e-14
    g = gain(1.0 + eps)
    assert g.tau == pytest.approx(math.sqrt(eps), rel=1e-2)
    assert gain_from_tau(1e-8).G - 1.0 == pytest.approx(1e-16, rel=1e-6)


@given(gains)
def test_tau_round_trip(G):
    assert gain_from_tau(gain(G).tau).G == pytest.approx(G, rel=1e-12)


@given(st.floats(min_value=0.0, max_value=7.0))
def test_gain_round_trip_from_tau(tau):
    assert gain(gain_from_tau(tau).G).tau == pytest.approx(tau, rel=1e-10, abs=1e-8)


def test_nu_frozen_value():
    assert nu_of_pair(2.0, 4.5) == pytest.approx(NU_2_45, rel=1e-14)
    assert nu_of_pair(2.0, 4.5) == pytest.approx(1.0 / (3.0 - math.sqrt(3.5)), rel=1e-14)


def test_nu_matches_mpmath_on_grid():
    mpmath.mp.dps = 40
    for G in (1.0, 1.01, 2.0, 7.5, 1e3, 1e6):
        for Gp in (1.0, 1.5, 3.0, 1e5):
            t, tp = mpmath.acosh(mpmath.sqrt(G)), mpmath.acosh(mpmath.sqrt(Gp))
            ref = float(mpmath.sech(tp - t))
            assert nu_of_pair(G, Gp) == pytest.approx(ref, rel=1e-12)


@given(gains, gains)
def test_nu_symmetric_and_bounded(G, Gp):
    nu = nu_of_pair(G, Gp)
    assert nu == nu_of_pair(Gp, G)
    assert 0.0 < nu <= 1.0


@given(gains)
def test_nu_is_one_on_diagonal(G):
    assert nu_of_pair(G, G) == 1.0


@given(gains, gains)
def test_nu_agrees_with_sech_of_taus(G, Gp):
    assert nu_of_pair(G, Gp) == pytest.approx(nu_of_taus(gain(G).tau, gain(Gp).tau), rel=1e-11)


def test_gain_pair_carries_nu():
    assert gain_pair(2.0, 4.5).nu == nu_of_pair(2.0, 4.5)


@pytest.mark.parametrize("eta", [0.0, -0.1, 1.01, math.nan])
def test_detector_rejects(eta):
    with pytest.raises(DomainError):
        DetectorSpec(eta)


def test_probe_validation():
    with pytest.raises(DomainError):
        NumberState((1, -1))
    with pytest.raises(DomainError):
        NumberState(())
    with pytest.raises(DomainError):
        CoherentState((1.0, -0.5))
    with pytest.raises(DomainError):
        NdsTotalDistribution((0.5, 0.6), 1)
    with pytest.raises(DomainError):
        NdsTotalDistribution((1.0,), 0)


def test_probe_totals():
    assert probe_totals(NumberState((1, 2, 3))) == (6.0, 3)
    assert probe_totals(CoherentState((0.5, 0.25))) == (0.75, 2)
    assert probe_totals(NdsTotalDistribution((0.25, 0.5, 0.25), 4)) == (1.0, 4)


@given(st.integers(0, 200), st.integers(1, 40))
def test_split_photons(N, M):
    parts = split_photons(N, M)
    assert len(parts) == M and sum(parts) == N
    assert max(parts) - min(parts) <= 1
