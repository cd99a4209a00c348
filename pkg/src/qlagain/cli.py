"""Command-line front end: curves, Monte Carlo validation, thresholds, Bures, selftest.

Every subcommand writes one table (CSV or JSON) plus a ``PATH.meta.json``
sidecar holding the run configuration, the package version and a summary.
Exit codes: 0 ok, 2 usage error, 3 numerical failure, 4 selftest failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .bures import min_fidelity_classical, min_fidelity_quantum
from .errors import ConvergenceError, DomainError, SingularityError, UnsupportedProbeError
from .estimators import mse_analytic, mse_coherent_analytic, threshold_gain
from .fisher import fi_heterodyne, fi_homodyne, qfi_coherent, qfi_nds
from .montecarlo import TrialPlan, run_estimator_trials
from .params import (
    CoherentState,
    DetectorSpec,
    NumberState,
    gain,
    gain_from_tau,
    gain_pair,
    split_photons,
    tau_from_gain,
)
from .selftest import run_selftest

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_SELFTEST = 0, 2, 3, 4
BOUNDARY = "inf-at-boundary"
NO_BRACKET = "no-bracket"
MIN_MC_TRIALS = 1000


class UsageError(Exception):
    pass


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


@dataclass
class RunConfig:
    subcommand: str
    gain_min: float = 1.01
    gain_max: float = 5.0
    steps: int = 50
    grid: str = "gain"
    gains: Optional[list] = None
    gain_prime: float = 2.0
    photons: float = 6.0
    modes: int = 9
    n_vec: Optional[list] = None
    energy_vec: Optional[list] = None
    probe: str = "both"
    eta: list = field(default_factory=lambda: [1.0])
    trials: int = 100_000
    seed: int = 0
    format: str = "csv"

    def gain_grid(self) -> list:
        if self.gains:
            return [float(g) for g in self.gains]
        if self.steps < 2:
            raise UsageError("--steps must be at least 2")
        if not (1.0 <= self.gain_min < self.gain_max):
            raise UsageError("need 1 <= --gain-min < --gain-max")
        try:
            if self.grid == "tau":
                taus = np.linspace(tau_from_gain(self.gain_min), tau_from_gain(self.gain_max), self.steps)
                # pin the end points to the requested gains
                return [self.gain_min] + [gain_from_tau(t).G for t in taus[1:-1]] + [self.gain_max]
            return [float(g) for g in np.linspace(self.gain_min, self.gain_max, self.steps)]
        except DomainError as exc:
            raise UsageError(str(exc)) from exc

    def totals(self) -> tuple:
        if self.n_vec:
            return float(sum(self.n_vec)), len(self.n_vec)
        if self.energy_vec:
            return float(sum(self.energy_vec)), len(self.energy_vec)
        if self.photons < 0 or self.modes < 1:
            raise UsageError("need --photons >= 0 and --modes >= 1")
        return float(self.photons), int(self.modes)

    def single_eta(self) -> DetectorSpec:
        if len(self.eta) != 1:
            raise UsageError("this subcommand takes a single --eta value")
        return DetectorSpec(self.eta[0])


# -- subcommands ------------------------------------------------------------

def _cell(fn):
    try:
        return fn()
    except SingularityError:
        return BOUNDARY


def cmd_qfi_curve(cfg: RunConfig) -> Table:
    N, M = cfg.totals()
    table = Table(["G", "qfi_nds", "qfi_coherent", "fi_homodyne", "fi_heterodyne",
                   "inv_mse_coherent_counting"])

    def inv_mse(G):
        mse = mse_coherent_analytic(N, M, G).total
        if mse == 0.0:
            raise SingularityError("zero MSE")
        return 1.0 / mse

    for G in cfg.gain_grid():
        table.rows.append([
            G,
            _cell(lambda: qfi_nds(N, M, G).value),
            _cell(lambda: qfi_coherent(N, M, G).value),
            fi_homodyne(N, M, G).value,
            fi_heterodyne(N, M, G).value,
            _cell(lambda: inv_mse(G)),
        ])
    table.summary["warnings"] = sum(row.count(BOUNDARY) for row in table.rows)
    return table


def _mc_probes(cfg: RunConfig) -> list:
    kinds = {"both": ["number", "coherent"]}.get(cfg.probe, [cfg.probe])
    if "nds" in kinds:
        raise UnsupportedProbeError("NDS-distribution probes cannot be simulated; "
                                    "use --probe number or coherent")
    N, M = cfg.totals()
    out = []
    for kind in kinds:
        if kind == "number":
            if cfg.n_vec:
                n = cfg.n_vec
            elif N == int(N):
                n = split_photons(int(N), M)
            else:
                raise UsageError("a number-state probe needs an integer photon count")
            out.append(("number", NumberState(tuple(n))))
        else:
            e = cfg.energy_vec or [N / M] * M
            out.append(("coherent", CoherentState(tuple(e))))
    return out


def cmd_mc_validate(cfg: RunConfig, workers: int = 1) -> Table:
    if cfg.trials < MIN_MC_TRIALS:
        raise UsageError(f"--trials must be at least {MIN_MC_TRIALS}")
    det = cfg.single_eta()
    probes = _mc_probes(cfg)
    table = Table(["G", "probe_kind", "empirical_mse", "analytic_mse", "bias",
                   "stderr_mean", "stderr_mse", "z_score_mse"])
    stream = 0
    for G in cfg.gain_grid():
        for kind, probe in probes:
            plan = TrialPlan(probe, gain(G), det, cfg.trials, cfg.seed, stream)
            stream += 1
            stats = run_estimator_trials(plan, workers=workers)
            analytic = mse_analytic(probe, G, det).total
            z = (stats.empirical_mse - analytic) / stats.stderr_mse if stats.stderr_mse else math.nan
            table.rows.append([G, kind, stats.empirical_mse, analytic, stats.bias,
                               stats.stderr_mean, stats.stderr_mse, z])
    table.summary["max_abs_z_score_mse"] = max(abs(r[-1]) for r in table.rows)
    table.summary["max_abs_bias_in_stderr"] = max(abs(r[4] / r[5]) for r in table.rows)
    return table


def cmd_threshold_curve(cfg: RunConfig) -> Table:
    if not cfg.eta:
        raise UsageError("--eta grid is empty")
    table = Table(["eta_d", "threshold_gain"])
    flagged = 0
    for eta in cfg.eta:
        if not (0.0 < eta < 1.0):
            raise UsageError(f"threshold curve needs 0 < eta_d < 1, got {eta!r}")
        try:
            table.rows.append([eta, threshold_gain(DetectorSpec(eta), cfg.modes)])
        except ConvergenceError:
            flagged += 1
            table.rows.append([eta, NO_BRACKET])
    values = [(e, g) for e, g in table.rows if g != NO_BRACKET]
    ordered = sorted(values)
    table.summary["warnings"] = flagged
    table.summary["monotone_decreasing_in_eta"] = all(
        b[1] < a[1] for a, b in zip(ordered, ordered[1:]))
    return table


def cmd_bures(cfg: RunConfig) -> Table:
    N, M = cfg.totals()
    table = Table(["G", "G_prime", "nu", "min_fidelity_quantum", "ecb_distance",
                   "min_fidelity_classical"])
    violations = 0
    for G in cfg.gain_grid():
        pair = gain_pair(G, cfg.gain_prime)
        q = min_fidelity_quantum(N, M, pair)
        c = min_fidelity_classical(N, M, pair)
        violations += c < q.min_fidelity - 1e-15
        table.rows.append([G, cfg.gain_prime, pair.nu, q.min_fidelity, q.ecb_distance, c])
    table.summary["classical_below_quantum_rows"] = violations
    return table


# -- output -----------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return format(float(value), ".12g")


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, str):
        return value
    value = float(value)
    return value if math.isfinite(value) else str(value)


def render_json(table: Table) -> str:
    data = {col: [_json_value(row[i]) for row in table.rows]
            for i, col in enumerate(table.columns)}
    return json.dumps({"columns": table.columns, "data": data}, indent=1) + "\n"


def metadata(cfg: RunConfig, summary: dict) -> dict:
    return {"artifact": "qlagain", "version": __version__,
            "config": asdict(cfg), "summary": summary}


def emit(text: str, meta: dict, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stderr.write(json.dumps(meta, sort_keys=True) + "\n")
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)
    with open(out + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
        fh.write("\n")


# -- argument parsing -------------------------------------------------------

def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _ints(text: str) -> list:
    vals = _floats(text)
    if any(v != int(v) or v < 0 for v in vals):
        raise argparse.ArgumentTypeError(f"expected non-negative integers: {text!r}")
    return [int(v) for v in vals]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gain-min", type=float, default=1.01)
    common.add_argument("--gain-max", type=float, default=5.0)
    common.add_argument("--steps", type=int, default=50)
    common.add_argument("--grid", choices=["gain", "tau"], default="gain",
                        help="linear spacing in G or in tau")
    common.add_argument("--gain", dest="gains", type=_floats, default=None,
                        help="explicit comma-separated gains (overrides the grid)")
    common.add_argument("--photons", "-N", type=float, default=6.0)
    common.add_argument("--modes", "-M", type=int, default=9)
    common.add_argument("--n-vec", type=_ints, default=None)
    common.add_argument("--energy-vec", type=_floats, default=None)
    common.add_argument("--eta", type=_floats, default=[1.0],
                        help="detector efficiency (comma-separated list for threshold-curve)")
    common.add_argument("--trials", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    parser = argparse.ArgumentParser(prog="qlagain", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("qfi-curve", parents=[common], help="Fisher information curves vs G")
    mc = sub.add_parser("mc-validate", parents=[common], help="Monte Carlo estimator check")
    mc.add_argument("--probe", choices=["number", "coherent", "both", "nds"], default="both")
    mc.add_argument("--workers", type=int, default=1)
    sub.add_parser("threshold-curve", parents=[common], help="threshold gain vs eta_d")
    b = sub.add_parser("bures", parents=[common], help="energy-constrained Bures distance")
    b.add_argument("--gain-prime", type=float, default=2.0)
    st = sub.add_parser("selftest", parents=[common], help="run the built-in checks")
    st.add_argument("--perturb-nds", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


_CONFIG_KEYS = {f for f in RunConfig.__dataclass_fields__}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(ns).items() if k in _CONFIG_KEYS and v is not None}
    return RunConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if cfg.subcommand == "selftest":
            report = run_selftest(nds_offset=ns.perturb_nds)
            text = json.dumps(report, indent=1) + "\n"
            emit(text, metadata(cfg, {"passed": report["passed"]}), ns.out)
            return EXIT_OK if report["passed"] else EXIT_SELFTEST
        if cfg.subcommand == "qfi-curve":
            table = cmd_qfi_curve(cfg)
        elif cfg.subcommand == "mc-validate":
            if ns.workers < 1:
                raise UsageError("--workers must be positive")
            table = cmd_mc_validate(cfg, workers=ns.workers)
        elif cfg.subcommand == "threshold-curve":
            table = cmd_threshold_curve(cfg)
        else:
            table = cmd_bures(cfg)
    except (UsageError, DomainError, UnsupportedProbeError) as exc:
        parser.error(str(exc))  # exits with status 2
    except (ConvergenceError, SingularityError, FloatingPointError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    text = render_csv(table) if cfg.format == "csv" else render_json(table)
    emit(text, metadata(cfg, table.summary), ns.out)
    if table.summary.get("classical_below_quantum_rows"):
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
