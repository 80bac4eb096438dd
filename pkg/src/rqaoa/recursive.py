"""Recursive QAOA: optimise, round the strongest correlation, contract, repeat.

Each round runs level-p QAOA on the current model, measures ``<Z_i Z_j>``
on every coupled pair, fixes ``x_k = sgn(M_kl) x_l`` for the pair with the
largest ``|M_kl|`` and eliminates ``k``. Once the number of coupled
vertices drops to the threshold the residual model is solved exactly and
the eliminations are replayed backwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .analytic import GammaProfile, complete_graph_profile
from .errors import (
    ConfigError,
    DegenerateCorrelationError,
    NothingToContractError,
)
from .ising import (
    BRUTE_FORCE_CAP,
    ConstraintRecord,
    ConstraintStack,
    IsingModel,
    SpinAssignment,
    brute_force_max,
    contract,
    energy,
    reconstruct,
)
from .simulator import (
    OptimizerConfig,
    ParameterSchedule,
    QAOACircuit,
    correlations,
    optimize_schedule,
)

SOURCES = ("statevector", "analytic", "auto")
TIE_BREAKS = ("lexicographic", "seeded_random")
# |M| values closer than this are treated as tied
SELECTION_TIE_TOL = 1e-9
UNIFORM_TOL = 1e-12


@dataclass(frozen=True)
class RqaoaConfig:
    level: int = 1
    threshold: int = 8
    correlation_source: str = "auto"
    tie_break: str = "lexicographic"
    seed: int = 0
    degenerate_tolerance: float = 1e-12
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    # skip optimisation and evaluate correlations at this schedule (tests, what-if runs)
    fixed_schedule: ParameterSchedule | None = None
    brute_force_cap: int = BRUTE_FORCE_CAP
    # original models with at most this many coupled vertices get an exact optimum
    optimum_cap: int = 20
    threads: int = 1

    def __post_init__(self):
        if self.level < 1:
            raise ConfigError(f"level must be >= 1, got {self.level}")
        if self.threshold < 2:
            raise ConfigError(f"threshold must be >= 2, got {self.threshold}")
        if self.threshold > self.brute_force_cap:
            raise ConfigError(
                f"threshold {self.threshold} exceeds the brute-force cap {self.brute_force_cap}"
            )
        if self.correlation_source not in SOURCES:
            raise ConfigError(f"correlation_source must be one of {SOURCES}")
        if self.tie_break not in TIE_BREAKS:
            raise ConfigError(f"tie_break must be one of {TIE_BREAKS}")
        if not self.degenerate_tolerance > 0:
            raise ConfigError("degenerate_tolerance must be positive")
        if self.fixed_schedule is not None and self.fixed_schedule.level != self.level:
            raise ConfigError("fixed_schedule level differs from config level")


@dataclass(frozen=True)
class RoundTrace:
    index: int
    pair: tuple[int, int]  # (eliminated, surviving)
    correlation: float
    sign: int
    active_before: int
    active_after: int
    schedule: ParameterSchedule
    value: float
    provider: str
    max_abs_correlation: float

    def describe(self) -> str:
        k, l = self.pair
        return (
            f"round {self.index}: x{k} = {'+' if self.sign > 0 else '-'}x{l} "
            f"M={self.correlation!r} F={self.value!r} "
            f"active {self.active_before}->{self.active_after} via {self.provider}"
        )


@dataclass(frozen=True)
class RqaoaSolution:
    assignment: SpinAssignment
    value: float
    optimum: float | None
    ratio: float | None
    traces: tuple[RoundTrace, ...]
    stack: ConstraintStack
    residual: IsingModel


def is_uniform_complete(model: IsingModel) -> tuple[tuple[int, ...], float] | None:
    """Active vertex set and common coupling if the couplings form a uniform clique."""
    active = model.active_vertices
    m = len(active)
    if m < 2 or len(model.couplings) != m * (m - 1) // 2:
        return None
    values = list(model.couplings.values())
    w = values[0]
    if any(abs(v - w) > UNIFORM_TOL for v in values):
        return None
    return active, w


@lru_cache(maxsize=None)
def _profile(m: int) -> GammaProfile:
    return complete_graph_profile(m)


def _analytic_correlations(model: IsingModel, config: RqaoaConfig):
    """Correlations on a uniform antiferromagnetic clique without simulation.

    Couplings ``J = -w/2`` are the unit MAX-CUT instance with gamma scaled
    by ``w``, so the unit-weight optimum is reused with ``gamma / w``.
    """
    if config.level != 1 or config.fixed_schedule is not None:
        return None
    found = is_uniform_complete(model)
    if found is None or found[1] >= 0:
        return None
    active, J = found
    w = -2.0 * J
    prof = _profile(len(active))
    m_val = -2.0 * prof.f_value
    corr = {pair: m_val for pair in model.couplings}
    value = model.offset + len(model.couplings) * w * prof.f_value
    schedule = ParameterSchedule((prof.gamma / w,), (prof.beta_star,))
    return corr, schedule, value


def _statevector_correlations(model: IsingModel, config: RqaoaConfig):
    sub = model.active_submodel()
    circuit = QAOACircuit(sub)
    if config.fixed_schedule is not None:
        schedule = config.fixed_schedule
    else:
        schedule = optimize_schedule(sub, config.level, config.optimizer).best_schedule
    value = circuit.value(schedule)
    corr = correlations(circuit.state(schedule), sub.couplings)
    return corr, schedule, value


def round_correlations(model: IsingModel, config: RqaoaConfig):
    """Return ``(correlations, schedule, value, provider)`` for one round."""
    source = config.correlation_source
    if source in ("analytic", "auto"):
        got = _analytic_correlations(model, config)
        if got is not None:
            return (*got, "analytic")
        if source == "analytic":
            raise ConfigError(
                "analytic correlations need level 1 and a uniform antiferromagnetic clique"
            )
    return (*_statevector_correlations(model, config), "statevector")


def rqaoa_round(
    model: IsingModel,
    config: RqaoaConfig,
    rng: np.random.Generator | None = None,
    index: int = 0,
) -> tuple[IsingModel, ConstraintRecord, RoundTrace]:
    """One elimination: pick the pair with the largest ``|<Z_i Z_j>|``.

    Near-ties are broken by the smallest pair (or a seeded random choice);
    the higher-index vertex of the pair is eliminated.
    """
    if not model.couplings:
        raise NothingToContractError("model has no couplings left to contract")
    corr, schedule, value, provider = round_correlations(model, config)
    pairs = sorted(corr)
    mags = np.array([abs(corr[p]) for p in pairs])
    top = float(mags.max())
    if top < config.degenerate_tolerance:
        raise DegenerateCorrelationError(
            f"all correlations below {config.degenerate_tolerance:g} (max |M| = {top:g})"
        )
    tied = [p for p, m in zip(pairs, mags) if m >= top - SELECTION_TIE_TOL]
    if config.tie_break == "seeded_random" and len(tied) > 1:
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        i, j = tied[int(rng.integers(len(tied)))]
    else:
        i, j = tied[0]
    m_kl = corr[(i, j)]
    sign = 1 if m_kl > 0 else -1
    k, l = (j, i) if j > i else (i, j)
    before = len(model.active_vertices)
    reduced, record = contract(model, k, l, sign)
    trace = RoundTrace(
        index=index,
        pair=(k, l),
        correlation=m_kl,
        sign=sign,
        active_before=before,
        active_after=len(reduced.active_vertices),
        schedule=schedule,
        value=value,
        provider=provider,
        max_abs_correlation=top,
    )
    return reduced, record, trace


def run_rqaoa(
    model: IsingModel, config: RqaoaConfig | None = None, optimum: float | None = None
) -> RqaoaSolution:
    """Full recursive run on ``model``.

    ``optimum`` may be supplied when it is known in closed form; otherwise
    it is computed by brute force when the model is small enough
    (``config.optimum_cap``) and left as ``None`` beyond that.
    """
    config = config or RqaoaConfig()
    rng = np.random.default_rng(config.seed)
    stack = ConstraintStack()
    traces: list[RoundTrace] = []
    current = model
    while len(current.active_vertices) > config.threshold:
        current, record, trace = rqaoa_round(current, config, rng=rng, index=len(traces))
        stack = stack.push(record)
        traces.append(trace)

    base, residual_value = brute_force_max(current, cap=config.brute_force_cap, threads=config.threads)
    assignment = reconstruct(stack, base)
    value = energy(model, assignment)
    if not math.isclose(value, residual_value, rel_tol=1e-9, abs_tol=1e-9):
        raise RuntimeError(
            f"offset bookkeeping broke: residual optimum {residual_value!r} "
            f"but original energy {value!r}"
        )

    if optimum is None and len(model.active_vertices) <= config.optimum_cap:
        optimum = brute_force_max(model, cap=config.optimum_cap, threads=config.threads)[1]
    ratio = value / optimum if optimum else None
    return RqaoaSolution(assignment, value, optimum, ratio, tuple(traces), stack, current)
