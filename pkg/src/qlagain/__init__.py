"""Gain sensing of quantum-limited phase-insensitive amplifiers.

Precision bounds, output fidelities, estimator statistics and an exact
photon-counting simulator for the amplifier channel with lossy detection.
"""
__version__ = "0.1.0"

from .params import (  # noqa: E402
    CoherentState,
    DetectorSpec,
    Gain,
    GainPair,
    NdsTotalDistribution,
    NumberState,
    gain,
    gain_from_tau,
    gain_pair,
    nu_of_pair,
    probe_totals,
    tau_from_gain,
)
