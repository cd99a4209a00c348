"""Monte Carlo check of the gain estimator against its analytic MSE.

Runs N = M = 20 number and coherent probes at several gains and detector
efficiencies and reports bias and MSE z-scores.
"""
import argparse
import os

from qlagain import DetectorSpec
from qlagain.estimators import mse_analytic
from qlagain.montecarlo import TrialPlan, run_estimator_trials
from qlagain.params import CoherentState, NumberState, gain, split_photons


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    probes = {"number": NumberState(split_photons(20, 20)), "coherent": CoherentState((1.0,) * 20)}
    print(f"{'G':>5} {'eta':>5} {'probe':>9} {'mse':>10} {'analytic':>10} {'z_mse':>7} {'z_bias':>7}")
    stream = 0
    for G in (1.5, 2.0, 4.0):
        for eta in (0.5, 0.7, 0.9, 1.0):
            det = DetectorSpec(eta)
            for kind, probe in probes.items():
                plan = TrialPlan(probe, gain(G), det, args.trials, args.seed, stream)
                stream += 1
                s = run_estimator_trials(plan, workers=args.workers)
                target = mse_analytic(probe, G, det).total
                print(f"{G:5.2f} {eta:5.2f} {kind:>9} {s.empirical_mse:10.5f} {target:10.5f} "
                      f"{(s.empirical_mse - target) / s.stderr_mse:7.2f} {s.bias / s.stderr_mean:7.2f}")


if __name__ == "__main__":
    main()
