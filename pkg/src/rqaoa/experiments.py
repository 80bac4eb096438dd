"""Experiment rows, verification checks and the complete-graph sweep.

Everything here returns plain data; :mod:`rqaoa.cli` does the printing.
"""

from __future__ import annotations

import csv
import io
import math
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic
from .ising import IsingModel, brute_force_max, complete_model
from .recursive import RqaoaConfig, RqaoaSolution, run_rqaoa
from .simulator import (
    SIM_CAP,
    OptimizerConfig,
    ParameterSchedule,
    QAOACircuit,
    correlation,
    optimize_schedule,
)

ROW_FIELDS = (
    "n",
    "vertices",
    "algorithm",
    "level",
    "value",
    "optimum",
    "ratio",
    "bound_1_minus_1_over_8n2",
    "bound_satisfied",
)
SWEEP_FIELDS = ("n", "vertices", "qaoa1_ratio", "rqaoa1_ratio", "bound_1_minus_1_over_8n2")
CHECK_FIELDS = ("check", "n", "value", "limit", "status", "detail")
TRACE_FIELDS = ("round", "eliminated", "surviving", "sign", "correlation", "active_before", "active_after")

CHECKS = ("rqaoa-exact", "qaoa-bound", "g-positivity", "oracle-agreement", "beta-stationarity")

ORACLE_TOL = 1e-9
STATIONARITY_TOL = 1e-6
REDUCED_TOL = 1e-12
ORACLE_GRID = 21
ORACLE_MAX_N = 8
STATIONARITY_SAMPLES = 100
STATIONARITY_SEED = 20240601
FD_STEP = 1e-6
STATEVECTOR_EXACT_MAX = 12


def fmt(x) -> str:
    """Round-trip text for numbers; empty string for missing values."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def ratio_bound(n: int) -> float:
    return 1.0 - 1.0 / (8.0 * n * n)


@dataclass(frozen=True)
class ExperimentRow:
    n: int | None
    vertices: int
    algorithm: str
    level: int
    value: float
    optimum: float | None
    ratio: float | None
    bound: float | None
    bound_satisfied: bool | None
    wall_time: float

    def __post_init__(self):
        if self.ratio is not None and self.ratio > 1 + 1e-9:
            raise ValueError(f"ratio {self.ratio} exceeds 1")

    def cells(self, timing: bool = False) -> list[str]:
        out = [
            fmt(self.n),
            fmt(self.vertices),
            self.algorithm,
            fmt(self.level),
            fmt(self.value),
            fmt(self.optimum),
            fmt(self.ratio),
            fmt(self.bound),
            fmt(self.bound_satisfied),
        ]
        if timing:
            out.append(fmt(self.wall_time))
        return out


def make_row(
    model: IsingModel,
    algorithm: str,
    level: int,
    value: float,
    optimum: float | None,
    complete: int | None,
    wall_time: float,
) -> ExperimentRow:
    n = complete // 2 if complete is not None and complete % 2 == 0 else None
    ratio = value / optimum if optimum else None
    bound = ratio_bound(n) if n is not None else None
    satisfied = None if bound is None or ratio is None else ratio < bound
    return ExperimentRow(
        n, model.n_vertices, algorithm, level, value, optimum, ratio, bound, satisfied, wall_time
    )


def known_optimum(model: IsingModel, complete: int | None, cap: int = 20, threads: int = 1):
    if complete is not None:
        return float(analytic.maxcut_optimum(complete))
    if len(model.active_vertices) <= cap:
        return brute_force_max(model, threads=threads)[1]
    return None


def qaoa_experiment(
    model: IsingModel,
    level: int,
    optimizer: OptimizerConfig,
    complete: int | None = None,
    threads: int = 1,
) -> ExperimentRow:
    start = time.perf_counter()
    report = optimize_schedule(model, level, optimizer)
    optimum = known_optimum(model, complete, threads=threads)
    return make_row(
        model, "qaoa", level, report.best_value, optimum, complete, time.perf_counter() - start
    )


def rqaoa_experiment(
    model: IsingModel, config: RqaoaConfig, complete: int | None = None
) -> tuple[ExperimentRow, RqaoaSolution]:
    start = time.perf_counter()
    optimum = float(analytic.maxcut_optimum(complete)) if complete is not None else None
    sol = run_rqaoa(model, config, optimum=optimum)
    row = make_row(
        model, "rqaoa", config.level, sol.value, sol.optimum, complete, time.perf_counter() - start
    )
    return row, sol


def trace_rows(sol: RqaoaSolution) -> list[list[str]]:
    return [
        [
            fmt(t.index),
            fmt(t.pair[0]),
            fmt(t.pair[1]),
            fmt(t.sign),
            fmt(t.correlation),
            fmt(t.active_before),
            fmt(t.active_after),
        ]
        for t in sol.traces
    ]


# -- verification checks----------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    check: str
    n: int
    value: float | None
    limit: float | None
    status: str  # PASS, FAIL or SKIP
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "FAIL"

    def cells(self) -> list[str]:
        return [self.check, fmt(self.n), fmt(self.value), fmt(self.limit), self.status, self.detail]


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def check_rqaoa_exact(n: int, threshold: int = 4) -> CheckResult:
    """Level-1 RQAOA on ``K_2n`` reaches the cut ``n^2``.

    Statevector correlations up to 12 vertices, the closed form beyond.
    """
    m = 2 * n
    source = "statevector" if m <= STATEVECTOR_EXACT_MAX else "analytic"
    config = RqaoaConfig(level=1, threshold=threshold, correlation_source=source)
    sol = run_rqaoa(complete_model(m), config, optimum=float(n * n))
    ok = abs(sol.ratio - 1.0) <= 1e-9 and round(sol.value) == n * n
    return CheckResult(
        "rqaoa-exact", n, sol.value, float(n * n), _status(ok), f"ratio={fmt(sol.ratio)} via {source}"
    )


def check_qaoa_bound(n: int) -> CheckResult:
    """Closed-form level-1 QAOA ratio stays below the stated bounds."""
    ratio = analytic.qaoa1_ratio(n)
    if n >= 4:
        inner = 1.0 - 1.0 / (2 * n * (4 * n - 1))
        ok = ratio < inner < ratio_bound(n)
        return CheckResult(
            "qaoa-bound", n, ratio, ratio_bound(n), _status(ok), f"intermediate={fmt(inner)}"
        )
    return CheckResult("qaoa-bound", n, ratio, 1.0, _status(ratio < 1.0), "n<4: ratio<1 only")


def check_g_positivity(n: int, grid_step: float = 1e-4) -> CheckResult:
    rep = analytic.verify_g_positivity(n, grid_step)
    ok = rep.passed and rep.bound_ok is not False
    crit = min((gc for _, gc in rep.critical_points), default=None)
    detail = f"argmin={fmt(rep.argmin)} critical_min={fmt(crit)}"
    if rep.bound is not None:
        detail += f" critical_bound={fmt(rep.bound)} bound_ok={fmt(rep.bound_ok)}"
    return CheckResult("g-positivity", n, rep.min_value, 0.0, _status(ok), detail)


def oracle_deviation(n: int, grid: int = ORACLE_GRID) -> float:
    """Max |closed-form <C_01> - simulated <C_01>| over a grid on K_2n."""
    model = complete_model(2 * n)
    circuit = QAOACircuit(model)
    worst = 0.0
    for g in np.linspace(0.0, 2 * math.pi, grid):
        for b in np.linspace(0.0, math.pi, grid):
            state = circuit.state(ParameterSchedule((g,), (b,)))
            simulated = 0.5 * (1.0 - correlation(state, 0, 1))
            worst = max(worst, abs(analytic.expected_edge_cost(n, g, b) - simulated))
    return worst


def check_oracle_agreement(n: int) -> CheckResult:
    if n > ORACLE_MAX_N or 2 * n > SIM_CAP:
        return CheckResult(
            "oracle-agreement", n, None, ORACLE_TOL, "SKIP", f"K_{2 * n} above simulation limit"
        )
    dev = oracle_deviation(n)
    return CheckResult("oracle-agreement", n, dev, ORACLE_TOL, _status(dev <= ORACLE_TOL))


def stationarity_errors(n: int, samples: int = STATIONARITY_SAMPLES, seed: int = STATIONARITY_SEED):
    """(max |df/dbeta| at beta*, max |f_reduced - f(beta*)|) over random gammas."""
    rng = np.random.default_rng(seed + n)
    gammas = rng.uniform(0.01, math.pi / 2 - 0.01, samples)
    worst_grad = worst_gap = 0.0
    for g in gammas:
        b = analytic.optimal_beta(n, g)
        grad = (analytic.edge_objective(n, g, b + FD_STEP) - analytic.edge_objective(n, g, b - FD_STEP)) / (
            2 * FD_STEP
        )
        worst_grad = max(worst_grad, abs(grad))
        worst_gap = max(worst_gap, abs(analytic.f_reduced(n, g) - analytic.edge_objective(n, g, b)))
    return worst_grad, worst_gap


def check_beta_stationarity(n: int) -> CheckResult:
    grad, gap = stationarity_errors(n)
    ok = grad <= STATIONARITY_TOL and gap <= REDUCED_TOL
    return CheckResult(
        "beta-stationarity", n, grad, STATIONARITY_TOL, _status(ok), f"reduced_gap={fmt(gap)}"
    )


CHECK_FUNCS: dict[str, Callable[[int], CheckResult]] = {
    "rqaoa-exact": check_rqaoa_exact,
    "qaoa-bound": check_qaoa_bound,
    "g-positivity": check_g_positivity,
    "oracle-agreement": check_oracle_agreement,
    "beta-stationarity": check_beta_stationarity,
}


def run_checks(check: str, ns: Iterable[int], threads: int = 1) -> list[CheckResult]:
    func = CHECK_FUNCS[check]
    ns = list(ns)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, ns))
    return [func(n) for n in ns]


# -- sweep -------------------------------------------------------------------------


def sweep(n_values: Iterable[int], threshold: int = 8, threads: int = 1) -> list[list[str]]:
    """QAOA_1 (closed form) vs RQAOA_1 (closed-form correlations) on K_2n."""

    def one(n: int) -> list[str]:
        config = RqaoaConfig(level=1, threshold=min(threshold, 2 * n), correlation_source="auto")
        sol = run_rqaoa(complete_model(2 * n), config, optimum=float(n * n))
        return [fmt(n), fmt(2 * n), fmt(analytic.qaoa1_ratio(n)), fmt(sol.ratio), fmt(ratio_bound(n))]

    n_values = list(n_values)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, n_values))
    return [one(n) for n in n_values]


def write_csv(fh, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()
