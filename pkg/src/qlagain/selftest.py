"""Aggregate self-checks run by ``qlagain selftest``."""
from __future__ import annotations

import itertools

from .amplifier import lemma_identity_check
from .estimators import mse_coherent_analytic, mse_number_analytic
from .fisher import (
    fidelity_coherent,
    fidelity_nds,
    qfi_coherent,
    qfi_coherent_lossy,
    qfi_from_fidelity,
    qfi_nds,
    qfi_number_lossy,
)
from .params import DetectorSpec, gain, gain_pair

GAINS = (1.1, 1.5, 2.0, 3.0, 5.0)
PHOTONS = (0, 1, 6)
MODES = (1, 9)
ETAS = (0.7, 1.0)
ORACLE_RTOL = 1e-6
REDUCTION_RTOL = 1e-12
SERIES_RTOL = 1e-8


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a)


def check_lemma(max_component: int = 3, max_modes: int = 3, max_a: int = 5) -> dict:
    cases = failures = 0
    for M in range(1, max_modes + 1):
        for n_vec in itertools.product(range(max_component + 1), repeat=M):
            for a in range(max_a + 1):
                lhs, rhs = lemma_identity_check(n_vec, a)
                cases += 1
                failures += lhs != rhs
    return {"name": "lemma_exhaustive", "passed": failures == 0,
            "cases": cases, "failures": failures}


def check_oracles(nds_offset: float = 0.0) -> dict:
    """Closed-form QFIs against -4 d^2 F from the fidelity curves."""
    worst = 0.0
    cases = 0
    for G, N, M in itertools.product(GAINS, PHOTONS, MODES):
        g = gain(G)
        p = [0.0] * N + [1.0]
        pairs = [
            (lambda Gp: fidelity_nds(p, M, gain_pair(g, Gp)),
             qfi_nds(N, M, g).value + nds_offset),
            (lambda Gp: fidelity_coherent(N, M, gain_pair(g, Gp)),
             qfi_coherent(N, M, g).value),
        ]
        for eta in ETAS:
            det = DetectorSpec(eta)
            pairs.append((lambda Gp, det=det: fidelity_coherent(N, M, gain_pair(g, Gp), det),
                          qfi_coherent_lossy(N, M, g, det).value))
        for curve, closed in pairs:
            oracle = qfi_from_fidelity(curve, G, parameter="G").value
            worst = max(worst, _rel(closed, oracle))
            cases += 1
    return {"name": "oracle_equivalence", "passed": worst <= ORACLE_RTOL,
            "cases": cases, "max_rel_error": worst, "tolerance": ORACLE_RTOL}


def check_lossless_reductions() -> dict:
    worst = 0.0
    cases = 0
    ideal = DetectorSpec(1.0)
    for G, N, M in itertools.product(GAINS, PHOTONS, MODES):
        worst = max(worst,
                    _rel(qfi_coherent_lossy(N, M, G, ideal).value, qfi_coherent(N, M, G).value),
                    _rel(mse_number_analytic(N, M, G, ideal).total, 1.0 / qfi_nds(N, M, G).value))
        m = mse_coherent_analytic(N, M, G, ideal)
        worst = max(worst, abs(m.inefficiency_term))
        cases += 3
    return {"name": "lossless_reductions", "passed": worst <= REDUCTION_RTOL,
            "cases": cases, "max_rel_error": worst, "tolerance": REDUCTION_RTOL}


def check_lossy_series() -> dict:
    """The lossy Fock-probe series at eta_d = 1 against K_tau = 4(n + 1)."""
    worst = 0.0
    cases = 0
    for n, G in itertools.product(range(6), (1.2, 2.0, 4.0)):
        k = qfi_number_lossy(n, G, DetectorSpec(1.0)).value
        worst = max(worst, _rel(k, 4.0 * (n + 1)))
        cases += 1
    return {"name": "lossy_series_unit_efficiency", "passed": worst <= SERIES_RTOL,
            "cases": cases, "max_rel_error": worst, "tolerance": SERIES_RTOL}


def run_selftest(nds_offset: float = 0.0) -> dict:
    """Run every check; ``nds_offset`` perturbs the NDS closed form (negative control)."""
    results = [check_lemma(), check_oracles(nds_offset), check_lossless_reductions(),
               check_lossy_series()]
    return {"passed": all(r["passed"] for r in results), "checks": results}
