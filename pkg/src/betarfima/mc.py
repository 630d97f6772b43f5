"""Monte Carlo experiment runner.

A design is a list of scenarios (true parameters, model shape, sample sizes,
replicate count, base seed) plus the set of long-memory test statistics and
nominal levels to track.  Each replicate simulates a sample with seed
``base_seed + replicate``, fits the free model (and, when the LR or score
statistic is requested, the d = 0 restricted model) and records point
estimates and test p-values.  Replicates whose fits do not converge are
excluded from every aggregate and reported in a failure count.

Replicates are independent and can run in a process pool; results are
reduced in replicate order, so the report is identical for any worker count.
The environment variable ``BETARFIMA_WORKERS`` sets the default pool size.
"""

import configparser
import csv
import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import chi2, norm

from .estimation import FitOptions, fit
from .inference import TestUnavailableError, rao_score_test
from .model import ModelSpec, ParamVector
from .simulate import SimConfig, simulate

__all__ = [
    "McScenario",
    "McDesign",
    "McReport",
    "EstimateCell",
    "RejectionCell",
    "FailureCell",
    "run_design",
    "summarize",
    "write_report_csv",
    "read_report_csv",
    "load_design_file",
]

KNOWN_STATISTICS = ("LR", "z", "score")


@dataclass(frozen=True)
class McScenario:
    """One experiment cell: a true model, sample sizes and replication plan.

    ``spec`` is the model the replicates are FITTED with (its truncation is
    the estimation truncation).  Samples are generated from an effectively
    untruncated process: the generating cutoff defaults to
    max(1000, spec.m) with the burn-in one step longer, so the emitted
    series carries the model's full memory while fits still truncate at
    spec.m.  Both can be overridden.
    """

    name: str
    spec: ModelSpec
    truth: ParamVector
    sample_sizes: tuple
    replicates: int
    base_seed: int
    burn_in: Optional[int] = None
    sim_truncation: Optional[int] = None

    def __post_init__(self):
        if self.replicates < 2:
            raise ValueError("need at least 2 replicates")
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        sim_m = self.sim_truncation or max(1000, self.spec.m)
        burn = self.burn_in if self.burn_in is not None else sim_m + 1
        if burn <= sim_m:
            raise ValueError("burn_in must exceed the generating truncation")
        object.__setattr__(self, "sim_truncation", sim_m)
        object.__setattr__(self, "burn_in", burn)


@dataclass(frozen=True)
class McDesign:
    scenarios: tuple
    statistics: tuple = ("LR", "z")
    levels: tuple = (0.01, 0.05, 0.10)

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        object.__setattr__(self, "statistics", tuple(self.statistics))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        unknown = set(self.statistics) - set(KNOWN_STATISTICS)
        if unknown:
            raise ValueError(f"unknown statistics {sorted(unknown)}")


@dataclass(frozen=True)
class EstimateCell:
    scenario: str
    n: int
    parameter: str
    truth: float
    mean: float
    rb_pct: Optional[float]  # None when the true value is zero
    var: float
    mse: float


@dataclass(frozen=True)
class RejectionCell:
    scenario: str
    n: int
    statistic: str
    level: float
    rate: float


@dataclass(frozen=True)
class FailureCell:
    scenario: str
    n: int
    n_failed: int
    n_replicates: int


@dataclass(frozen=True)
class McReport:
    estimates: tuple
    rejections: tuple
    failures: tuple


def _replicate(scenario: McScenario, n: int, rep: int, statistics: tuple):
    """Simulate, fit and test one replicate; returns (estimates, p_values) or None."""
    generating_spec = dataclasses.replace(scenario.spec, m=scenario.sim_truncation)
    sample = simulate(
        SimConfig(
            spec=generating_spec,
            params=scenario.truth,
            n=n,
            seed=scenario.base_seed + rep,
            burn_in=scenario.burn_in,
        )
    )
    free = fit(scenario.spec, sample)
    if not free.converged:
        return None

    restricted = None
    if "LR" in statistics or "score" in statistics:
        restricted = fit(scenario.spec, sample, FitOptions(fix_d_at_zero=True))
        if not restricted.converged:
            return None
        if free.loglik < restricted.loglik:
            # free search ended in a worse basin; restart it from the
            # restricted optimum so the nested ordering holds
            nudged = ParamVector.from_array(
                restricted.params_hat.to_array(), scenario.spec
            )
            nudged = ParamVector(
                nu=nudged.nu, d=0.001, alpha=nudged.alpha,
                beta=nudged.beta, phi=nudged.phi, theta=nudged.theta,
            )
            retry = fit(scenario.spec, sample, start=nudged)
            if retry.converged and retry.loglik > free.loglik:
                free = retry
            if free.loglik < restricted.loglik - 1e-6:
                return None

    p_values = {}
    for stat in statistics:
        if stat == "z":
            if free.std_errors is None or not np.isfinite(free.std_errors[1]):
                return None
            z = free.params_hat.d / free.std_errors[1]
            p_values["z"] = float(2.0 * norm.sf(abs(z)))
        elif stat == "LR":
            lr = max(0.0, 2.0 * (free.loglik - restricted.loglik))
            p_values["LR"] = float(chi2.sf(lr, 1))
        elif stat == "score":
            try:
                rep_t = rao_score_test(scenario.spec, sample, restricted)
            except TestUnavailableError:
                return None
            p_values["score"] = rep_t.p_value

    return free.params_hat.to_array(), p_values


def _default_workers():
    env = os.environ.get("BETARFIMA_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def run_design(design: McDesign, workers: Optional[int] = None) -> McReport:
    """Run every scenario of the design and aggregate the results."""
    workers = workers if workers is not None else _default_workers()
    estimates, rejections, failures = [], [], []

    for scenario in design.scenarios:
        names = scenario.spec.param_names()
        truth_vec = scenario.truth.to_array()
        for n in scenario.sample_sizes:
            jobs = [(scenario, n, rep, design.statistics) for rep in range(scenario.replicates)]
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(_replicate_star, jobs, chunksize=4))
            else:
                results = [_replicate_star(job) for job in jobs]

            kept = [res for res in results if res is not None]
            n_failed = len(results) - len(kept)
            failures.append(
                FailureCell(scenario.name, n, n_failed, scenario.replicates)
            )
            if not kept:
                continue

            draws = np.array([est for est, _ in kept])
            mean = draws.mean(axis=0)
            var = draws.var(axis=0)  # population variance: MSE = var + bias^2
            bias = mean - truth_vec
            mse = var + bias**2
            for j, pname in enumerate(names):
                rb = None if truth_vec[j] == 0.0 else float(100.0 * bias[j] / truth_vec[j])
                estimates.append(
                    EstimateCell(
                        scenario=scenario.name, n=n, parameter=pname,
                        truth=float(truth_vec[j]), mean=float(mean[j]),
                        rb_pct=rb, var=float(var[j]), mse=float(mse[j]),
                    )
                )
            for stat in design.statistics:
                pvals = np.array([pv[stat] for _, pv in kept])
                for level in design.levels:
                    rejections.append(
                        RejectionCell(
                            scenario=scenario.name, n=n, statistic=stat,
                            level=level, rate=float(np.mean(pvals < level)),
                        )
                    )

    return McReport(
        estimates=tuple(estimates),
        rejections=tuple(rejections),
        failures=tuple(failures),
    )


def _replicate_star(job):
    scenario, n, rep, statistics = job
    try:
        return _replicate(scenario, n, rep, statistics)
    except Exception:
        return None


def summarize(report: McReport) -> str:
    """Human-readable tables: Mean / RB% / Var / MSE rows, parameter columns."""
    blocks = []
    seen = []
    for cell in report.estimates:
        key = (cell.scenario, cell.n)
        if key not in seen:
            seen.append(key)
    for scenario, n in seen:
        cells = [c for c in report.estimates if c.scenario == scenario and c.n == n]
        fail = next(
            (f for f in report.failures if f.scenario == scenario and f.n == n), None
        )
        header = f"Scenario {scenario} (n = {n}"
        if fail is not None:
            header += f", replicates = {fail.n_replicates}, failures = {fail.n_failed}"
        header += ")"
        names = [c.parameter for c in cells]
        lines = [header, "      " + "".join(f"{name:>12}" for name in names)]
        for label, getter in (
            ("Mean", lambda c: c.mean),
            ("RB%", lambda c: c.rb_pct),
            ("Var", lambda c: c.var),
            ("MSE", lambda c: c.mse),
        ):
            row = f"{label:<6}"
            for c in cells:
                value = getter(c)
                row += f"{value:>12.4f}" if value is not None else f"{'--':>12}"
            lines.append(row)

        rej = [
            r for r in report.rejections if r.scenario == scenario and r.n == n
        ]
        if rej:
            lines.append("Rejection rates for the d = 0 test:")
            for r in rej:
                lines.append(
                    f"  {r.statistic:<6} at {100 * r.level:>5.1f}%: {100 * r.rate:6.2f}%"
                )
        blocks.append("\n".join(lines))
    if not blocks:
        return "(empty design)"
    return "\n\n".join(blocks)


# ---------------------------------------------------------------------------
# CSV serialization (round-trips exactly: floats are written with repr)


def _fmt(value):
    return "" if value is None else repr(value)


def write_report_csv(report: McReport, out_dir):
    """Write estimates.csv, rejections.csv and failures.csv into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "estimates.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "n", "parameter", "truth", "mean", "rb_pct", "var", "mse"])
        for c in report.estimates:
            writer.writerow(
                [c.scenario, c.n, c.parameter, repr(c.truth), repr(c.mean),
                 _fmt(c.rb_pct), repr(c.var), repr(c.mse)]
            )
    with open(out / "rejections.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "n", "statistic", "level", "rate"])
        for c in report.rejections:
            writer.writerow([c.scenario, c.n, c.statistic, repr(c.level), repr(c.rate)])
    with open(out / "failures.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "n", "n_failed", "n_replicates"])
        for c in report.failures:
            writer.writerow([c.scenario, c.n, c.n_failed, c.n_replicates])


def read_report_csv(out_dir) -> McReport:
    """Parse a report previously written by :func:`write_report_csv`."""
    out = Path(out_dir)
    estimates, rejections, failures = [], [], []
    with open(out / "estimates.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            estimates.append(
                EstimateCell(
                    scenario=row["scenario"], n=int(row["n"]),
                    parameter=row["parameter"], truth=float(row["truth"]),
                    mean=float(row["mean"]),
                    rb_pct=None if row["rb_pct"] == "" else float(row["rb_pct"]),
                    var=float(row["var"]), mse=float(row["mse"]),
                )
            )
    with open(out / "rejections.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            rejections.append(
                RejectionCell(
                    scenario=row["scenario"], n=int(row["n"]),
                    statistic=row["statistic"], level=float(row["level"]),
                    rate=float(row["rate"]),
                )
            )
    with open(out / "failures.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            failures.append(
                FailureCell(
                    scenario=row["scenario"], n=int(row["n"]),
                    n_failed=int(row["n_failed"]),
                    n_replicates=int(row["n_replicates"]),
                )
            )
    return McReport(tuple(estimates), tuple(rejections), tuple(failures))


# ---------------------------------------------------------------------------
# Design files: INI-style sections, one [scenario:<name>] block per scenario


def _parse_floats(text):
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def load_design_file(path) -> McDesign:
    """Read a design from an INI file.

    Expected layout::

        [design]
        statistics = LR, z
        levels = 0.01, 0.05, 0.10

        [scenario:example]
        p = 1
        q = 1
        m = 100
        link = logit
        nu = 40
        d = 0.15
        alpha = 0.05
        phi = 0.2
        theta = -0.3
        sample_sizes = 500, 1000
        replicates = 100
        base_seed = 20240101
        burn_in = 500
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)

    statistics = ("LR", "z")
    levels = (0.01, 0.05, 0.10)
    if parser.has_section("design"):
        section = parser["design"]
        if "statistics" in section:
            statistics = tuple(
                tok.strip() for tok in section["statistics"].split(",") if tok.strip()
            )
        if "levels" in section:
            levels = _parse_floats(section["levels"])

    scenarios = []
    for section_name in parser.sections():
        if not section_name.startswith("scenario:"):
            continue
        section = parser[section_name]
        p = section.getint("p", 0)
        q = section.getint("q", 0)
        spec = ModelSpec(
            p=p, q=q, n_covariates=0,
            link=section.get("link", "logit"),
            m=section.getint("m", 100),
        )
        truth = ParamVector(
            nu=section.getfloat("nu"),
            d=section.getfloat("d", 0.0),
            alpha=section.getfloat("alpha", 0.0),
            phi=_parse_floats(section.get("phi", "")) if p else (),
            theta=_parse_floats(section.get("theta", "")) if q else (),
        )
        scenarios.append(
            McScenario(
                name=section_name.split(":", 1)[1],
                spec=spec,
                truth=truth,
                sample_sizes=_parse_floats(section["sample_sizes"]),
                replicates=section.getint("replicates"),
                base_seed=section.getint("base_seed"),
                burn_in=section.getint("burn_in", fallback=None),
                sim_truncation=section.getint("sim_truncation", fallback=None),
            )
        )
    return McDesign(scenarios=tuple(scenarios), statistics=statistics, levels=levels)
