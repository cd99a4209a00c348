import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlagain.errors import ConvergenceError, DomainError, UnsupportedProbeError
from qlagain.estimators import (
    g_hat,
    g_hat_moments,
    mse_analytic,
    mse_coherent_analytic,
    mse_number_analytic,
    threshold_gain,
    threshold_gap,
)
from qlagain.fisher import qfi_coherent, qfi_coherent_lossy, qfi_nds
from qlagain.params import (
    CoherentState,
    DetectorSpec,
    NdsTotalDistribution,
    NumberState,
    split_photons,
)

gains = st.floats(1.0, 50.0)
etas = st.floats(0.05, 1.0)


def test_g_hat_examples():
    assert g_hat(7, 7, 3) == 1.0
    assert g_hat(26, 6, 9) == pytest.approx(35 / 15, rel=1e-15)
    assert g_hat(13, 20, 20, DetectorSpec(0.5)) == pytest.approx(1.15, rel=1e-15)
    np.testing.assert_allclose(g_hat(np.array([0, 21]), 6, 9), [0.6, 2.0])


def test_g_hat_rejects_empty_probe():
    with pytest.raises(DomainError):
        g_hat(0, 0, 0)


def test_mse_number_examples():
    assert mse_number_analytic(20, 20, 2.0).total == pytest.approx(0.05, rel=1e-14)
    assert mse_number_analytic(20, 20, 2.0, DetectorSpec(0.5)).total == pytest.approx(0.0875, rel=1e-14)
    assert mse_number_analytic(5, 3, 1.0).total == 0.0


def test_mse_coherent_examples():
    m = mse_coherent_analytic(6, 9, 2.0)
    assert m.total == pytest.approx(0.24, rel=1e-14)
    assert 1 / m.total == pytest.approx(4.1666666666666667, rel=1e-14)
    # qcrb 0.05 + penalty 4 * 20 / 40^2 = 0.05
    assert mse_coherent_analytic(20, 20, 2.0).total == pytest.approx(0.1, rel=1e-14)


@given(st.floats(0.0, 50.0), st.integers(1, 30), gains, etas)
def test_breakdown_terms(N, M, G, eta):
    det = DetectorSpec(eta)
    num, coh = mse_number_analytic(N, M, G, det), mse_coherent_analytic(N, M, G, det)
    for m in (num, coh):
        assert m.total == pytest.approx(m.qcrb_term + m.probe_penalty_term + m.inefficiency_term,
                                        rel=1e-12, abs=1e-300)
        assert min(m.qcrb_term, m.probe_penalty_term, m.inefficiency_term) >= 0.0
    assert num.probe_penalty_term == 0.0
    assert coh.inefficiency_term == num.inefficiency_term
    assert num.total <= coh.total
    if eta == 1.0:
        assert num.inefficiency_term == 0.0


@given(st.floats(0.0, 50.0), st.integers(1, 30), st.floats(1.001, 50.0))
def test_number_probe_attains_bound(N, M, G):
    assert mse_number_analytic(N, M, G).total == pytest.approx(1 / qfi_nds(N, M, G).value, rel=1e-12)


@given(st.floats(0.01, 50.0), st.integers(1, 30), st.floats(1.001, 50.0))
def test_coherent_counting_above_its_bound(N, M, G):
    assert mse_coherent_analytic(N, M, G).total > 1 / qfi_coherent(N, M, G).value


@pytest.mark.parametrize("probe", [
    NumberState((3, 0, 2)), CoherentState((1.5, 0.25, 4.0)), NumberState((20,) * 1)])
@pytest.mark.parametrize("G", [1.0, 1.5, 2.0, 4.0])
@pytest.mark.parametrize("eta", [0.5, 0.9, 1.0])
def test_moment_route_matches_closed_forms(probe, G, eta):
    det = DetectorSpec(eta)
    mean, var = g_hat_moments(probe, G, det)
    assert mean - G == pytest.approx(0.0, abs=1e-12)
    assert var == pytest.approx(mse_analytic(probe, G, det).total, rel=1e-12, abs=1e-15)


def test_mse_analytic_rejects_nds():
    with pytest.raises(UnsupportedProbeError):
        mse_analytic(NdsTotalDistribution((0.5, 0.5), 1), 2.0)


# -- threshold --------------------------------------------------------------

@pytest.mark.parametrize("eta", [0.5, 0.7, 0.9])
def test_threshold_independent_of_modes(eta):
    det = DetectorSpec(eta)
    ref = threshold_gain(det, 5)
    for M in (1, 20, 50):
        assert threshold_gain(det, M) == pytest.approx(ref, abs=1e-6)


def test_threshold_limits_and_order():
    t07 = threshold_gain(DetectorSpec(0.7))
    assert 1.0 < t07 < 100.0
    assert threshold_gain(DetectorSpec(0.999)) < 1.05
    etas = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
    vals = [threshold_gain(DetectorSpec(e)) for e in etas]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("eta", [0.3, 0.7, 0.95])
def test_threshold_separates_regions(eta):
    det = DetectorSpec(eta)
    gstar = threshold_gain(det, 20)
    assert abs(threshold_gap(gstar, 20, det)) < 1e-9
    for G in np.linspace(1.001, 8.0, 60):
        gap = threshold_gap(G, 20, det)
        if G > gstar + 1e-6:
            assert gap < 0
        elif G < gstar - 1e-6:
            assert gap > 0


def test_threshold_gap_definition():
    det, M = DetectorSpec(0.7), 4
    N = M
    expected = mse_number_analytic(N, M, 3.0, det).total - 1 / qfi_coherent_lossy(N, M, 3.0, det).value
    assert threshold_gap(3.0, M, det) == expected


def test_unit_efficiency_always_advantage():
    det = DetectorSpec(1.0)
    assert all(threshold_gap(G, 3, det) < 0 for G in (1.001, 1.5, 3.0, 50.0))
    with pytest.raises(DomainError):
        threshold_gain(det)


def test_threshold_bad_bracket_reports():
    with pytest.raises(ConvergenceError, match="no sign change"):
        threshold_gain(DetectorSpec(0.5), g_hi=1.1, g_hi_limit=1.2)


def test_threshold_rejects_bad_modes():
    with pytest.raises(DomainError):
        threshold_gain(DetectorSpec(0.5), 0)


def test_split_probe_totals_consistent():
    probe = NumberState(split_photons(20, 20))
    assert mse_analytic(probe, 2.0).total == pytest.approx(0.05, rel=1e-14)
