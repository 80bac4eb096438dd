"""Dense statevector simulation of the level-p QAOA circuit.

Basis convention: register position ``q`` is bit ``q`` of the amplitude
index (little endian); bit 0 means spin +1 and bit 1 means spin -1, so
``Z_q`` has eigenvalue ``1 - 2*bit``.

The phase layer applies ``exp(-i gamma sum J_ij Z_i Z_j)``. The model
offset is left out: it only contributes a global phase.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import ConfigError, RegistrationError, SizeLimitError
from .ising import IsingModel
from .search import golden_section_max

SIM_CAP = 24
NORM_TOL = 1e-10


@dataclass(frozen=True)
class ParameterSchedule:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        gammas = tuple(float(g) for g in np.atleast_1d(self.gammas))
        betas = tuple(float(b) for b in np.atleast_1d(self.betas))
        if len(gammas) != len(betas) or not gammas:
            raise ConfigError(
                f"need equally many gammas and betas (>= 1), got {len(gammas)} and {len(betas)}"
            )
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "betas", betas)

    @property
    def level(self) -> int:
        return len(self.gammas)

    @classmethod
    def from_vector(cls, theta: Sequence[float]) -> ParameterSchedule:
        theta = np.asarray(theta, dtype=float)
        p = len(theta) // 2
        return cls(tuple(theta[:p]), tuple(theta[p:]))

    def as_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas)


@dataclass(frozen=True)
class Statevector:
    """Normalised amplitudes plus the vertex id held by each register position."""

    amplitudes: np.ndarray
    qubit_order: tuple[int, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        order = tuple(int(v) for v in self.qubit_order)
        n = len(order)
        if not 1 <= n <= SIM_CAP:
            raise SizeLimitError(f"register of {n} qubits outside 1..{SIM_CAP}")
        if amps.shape != (2**n,):
            raise RegistrationError(f"expected {2**n} amplitudes for {n} qubits, got {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (|psi|^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubit_order", order)

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_order)

    def position(self, vertex: int) -> int:
        try:
            return self.qubit_order.index(vertex)
        except ValueError:
            raise RegistrationError(f"vertex {vertex} is not in the register") from None

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


def _check_size(n: int) -> None:
    if not 1 <= n <= SIM_CAP:
        raise SizeLimitError(f"{n} qubits outside the simulator range 1..{SIM_CAP}")


def z_eigenvalues(n: int, q: int) -> np.ndarray:
    """Eigenvalue of ``Z_q`` on each of the ``2**n`` basis states."""
    idx = np.arange(2**n, dtype=np.int64)
    return (1 - 2 * ((idx >> q) & 1)).astype(np.int8)


def coupling_diagonal(model: IsingModel, order: Sequence[int]) -> np.ndarray:
    """``sum J_ij z_i z_j`` on every basis state of the register ``order``."""
    n = len(order)
    pos = {v: k for k, v in enumerate(order)}
    idx = np.arange(2**n, dtype=np.int64)
    diag = np.zeros(2**n)
    for (i, j), J in model.couplings.items():
        parity = ((idx >> pos[i]) ^ (idx >> pos[j])) & 1
        diag += J * (1 - 2 * parity)
    return diag


def _check_register(state: Statevector, model: IsingModel) -> None:
    if tuple(state.qubit_order) != tuple(model.vertices):
        raise RegistrationError(
            f"register {state.qubit_order} does not match model vertices {model.vertices}"
        )


def plus_state(n: int, qubit_order: Sequence[int] | None = None) -> Statevector:
    _check_size(n)
    order = tuple(range(n)) if qubit_order is None else tuple(qubit_order)
    if len(order) != n:
        raise RegistrationError("qubit_order length differs from n")
    return Statevector(np.full(2**n, 2.0 ** (-n / 2), dtype=complex), order)


def basis_state(assignment: Mapping[int, int], order: Sequence[int]) -> Statevector:
    """Computational basis state encoding a spin assignment."""
    index = sum(1 << q for q, v in enumerate(order) if assignment[v] == -1)
    amps = np.zeros(2 ** len(order), dtype=complex)
    amps[index] = 1.0
    return Statevector(amps, tuple(order))


def _mix_inplace(psi: np.ndarray, n: int, beta) -> None:
    """exp(-i beta X) on every qubit; ``psi`` may carry a leading batch axis
    with ``beta`` then broadcast per batch row."""
    beta = np.asarray(beta, dtype=float)
    batch = psi.shape[:-1]
    c = np.cos(beta).reshape(batch + (1, 1, 1))
    s = -1j * np.sin(beta).reshape(batch + (1, 1, 1))
    for q in range(n):
        view = psi.reshape(batch + (2 ** (n - q - 1), 2, 2**q))
        a = view[..., 0:1, :].copy()
        b = view[..., 1:2, :]
        view[..., 0:1, :] = c * a + s * b
        view[..., 1:2, :] = s * a + c * b


def apply_phase_layer(state: Statevector, model: IsingModel, gamma: float) -> Statevector:
    _check_register(state, model)
    diag = coupling_diagonal(model, state.qubit_order)
    return Statevector(state.amplitudes * np.exp(-1j * gamma * diag), state.qubit_order)


def apply_mixer_layer(state: Statevector, beta: float) -> Statevector:
    """Apply ``exp(-i beta X)`` to every qubit."""
    psi = np.array(state.amplitudes, dtype=complex)
    _mix_inplace(psi, state.n_qubits, beta)
    return Statevector(psi, state.qubit_order)


class QAOACircuit:
    """Precomputed diagonal for repeated QAOA evaluations on one model.

    Used by the optimizer; the public layer functions above are the
    reference path.
    """

    def __init__(self, model: IsingModel):
        self.model = model
        self.order = tuple(model.vertices)
        self.n = len(self.order)
        _check_size(self.n)
        self.diag = coupling_diagonal(model, self.order)
        self.evaluations = 0

    def amplitudes(self, schedule: ParameterSchedule) -> np.ndarray:
        psi = np.full(2**self.n, 2.0 ** (-self.n / 2), dtype=complex)
        for gamma, beta in zip(schedule.gammas, schedule.betas):
            psi *= np.exp(-1j * gamma * self.diag)
            _mix_inplace(psi, self.n, beta)
        return psi

    def values_over_betas(self, gamma: float, betas: np.ndarray) -> np.ndarray:
        """Level-1 expectation at one gamma for a batch of betas."""
        self.evaluations += len(betas)
        phased = 2.0 ** (-self.n / 2) * np.exp(-1j * gamma * self.diag)
        psi = np.repeat(phased[None, :], len(betas), axis=0)
        _mix_inplace(psi, self.n, betas)
        return self.model.offset + (np.abs(psi) ** 2) @ self.diag

    def state(self, schedule: ParameterSchedule) -> Statevector:
        return Statevector(self.amplitudes(schedule), self.order)

    def value(self, schedule: ParameterSchedule) -> float:
        self.evaluations += 1
        probs = np.abs(self.amplitudes(schedule)) ** 2
        return self.model.offset + float(probs @ self.diag)


def qaoa_state(model: IsingModel, schedule: ParameterSchedule) -> Statevector:
    """|psi_p> = prod_k exp(-i beta_k H_B) exp(-i gamma_k H) |+>^n."""
    _check_size(model.n_vertices)
    state = plus_state(model.n_vertices, model.vertices)
    for gamma, beta in zip(schedule.gammas, schedule.betas):
        state = apply_phase_layer(state, model, gamma)
        state = apply_mixer_layer(state, beta)
    return state


def expectation_energy(state: Statevector, model: IsingModel, partitions: int = 1) -> float:
    """``offset + sum J_ij <Z_i Z_j>``.

    ``partitions`` splits the amplitude array into contiguous blocks whose
    partial sums are added in block order.
    """
    _check_register(state, model)
    probs = state.probabilities()
    diag = coupling_diagonal(model, state.qubit_order)
    if partitions <= 1:
        return model.offset + float(probs @ diag)
    parts = [float(p @ d) for p, d in zip(np.array_split(probs, partitions), np.array_split(diag, partitions))]
    return model.offset + math.fsum(parts)


def correlation(state: Statevector, i: int, j: int) -> float:
    """<Z_i Z_j> in ``state``."""
    if i == j:
        raise RegistrationError("correlation needs two distinct vertices")
    qi, qj = state.position(i), state.position(j)
    idx = np.arange(2**state.n_qubits, dtype=np.int64)
    parity = ((idx >> qi) ^ (idx >> qj)) & 1
    return float(state.probabilities() @ (1 - 2 * parity))


def correlations(state: Statevector, pairs: Iterable[tuple[int, int]]) -> dict[tuple[int, int], float]:
    probs = state.probabilities()
    idx = np.arange(2**state.n_qubits, dtype=np.int64)
    out = {}
    for i, j in pairs:
        qi, qj = state.position(i), state.position(j)
        parity = ((idx >> qi) ^ (idx >> qj)) & 1
        out[(i, j)] = float(probs @ (1 - 2 * parity))
    return out


# --------------------------------------------------------------------------
# parameter optimisation
# --------------------------------------------------------------------------

GAMMA_PERIOD = 2 * math.pi
BETA_PERIOD = math.pi


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`optimize_schedule`.

    ``grid`` points per axis are used at level 1; ``multistart`` random
    starts (plus one warm start from the level-1 optimum) at higher levels.
    """

    grid: int = 64
    tol: float = 1e-9
    max_sweeps: int = 400
    multistart: int = 8
    seed: int = 0
    max_iter: int = 20000

    def __post_init__(self):
        if self.grid < 2:
            raise ConfigError("grid resolution must be at least 2")
        if self.tol <= 0:
            raise ConfigError("tolerance must be positive")


@dataclass(frozen=True)
class OptimizationReport:
    best_schedule: ParameterSchedule
    best_value: float
    evaluations: int
    strategy: str = field(default="")


def _grid_then_golden(circuit: QAOACircuit, config: OptimizerConfig) -> tuple[ParameterSchedule, float]:
    R = config.grid
    gammas = GAMMA_PERIOD * np.arange(R) / R
    betas = BETA_PERIOD * np.arange(R) / R
    table = np.array([circuit.values_over_betas(g, betas) for g in gammas])
    kg, kb = np.unravel_index(int(np.argmax(table)), table.shape)
    best_g, best_b, best_val = float(gammas[kg]), float(betas[kb]), float(table[kg, kb])

    hg, hb = GAMMA_PERIOD / R, BETA_PERIOD / R
    g, b, val = best_g, best_b, best_val
    for _ in range(config.max_sweeps):
        g_new, v_g = golden_section_max(
            lambda t: circuit.value(ParameterSchedule((t,), (b,))), g - hg, g + hg, config.tol
        )
        if v_g <= val:
            g_new, v_g = g, val
        b_new, v_b = golden_section_max(
            lambda t: circuit.value(ParameterSchedule((g_new,), (t,))), b - hb, b + hb, config.tol
        )
        if v_b <= v_g:
            b_new, v_b = b, v_g
        moved = max(abs(g_new - g), abs(b_new - b))
        g, b, val = g_new, b_new, v_b
        # moves below tol, or no strict gain: flat to machine precision
        if moved < config.tol or v_b <= best_val:
            break
        best_val = v_b
    return ParameterSchedule((g,), (b,)), val


def _multistart_simplex(
    circuit: QAOACircuit, p: int, config: OptimizerConfig
) -> tuple[ParameterSchedule, float]:
    level1, _ = _grid_then_golden(circuit, config)
    warm = ParameterSchedule(level1.gammas + (0.0,) * (p - 1), level1.betas + (0.0,) * (p - 1))
    rng = np.random.default_rng(config.seed)
    starts = [warm.as_vector()]
    for _ in range(config.multistart):
        starts.append(
            np.concatenate(
                [rng.uniform(0, GAMMA_PERIOD, p), rng.uniform(0, BETA_PERIOD, p)]
            )
        )

    def negative(theta):
        return -circuit.value(ParameterSchedule.from_vector(theta))

    best_theta, best_val = starts[0], -negative(starts[0])
    for theta0 in starts:
        res = minimize(
            negative,
            theta0,
            method="Nelder-Mead",
            options={
                "xatol": config.tol,
                "fatol": 1e-14,
                "maxiter": config.max_iter,
                "maxfev": config.max_iter,
                "adaptive": True,
            },
        )
        if -res.fun > best_val:
            best_theta, best_val = res.x, float(-res.fun)
    return ParameterSchedule.from_vector(best_theta), best_val


def optimize_schedule(
    model: IsingModel, p: int, config: OptimizerConfig | None = None
) -> OptimizationReport:
    """Maximise the QAOA expectation ``<H>`` over a level-``p`` schedule.

    Level 1: exhaustive grid over gamma in [0, 2pi) x beta in [0, pi) then
    alternating golden-section refinement. Level >= 2: Nelder-Mead from a
    warm start (level-1 optimum padded with identity layers) and
    ``config.multistart`` seeded random starts.
    """
    config = config or OptimizerConfig()
    if p < 1:
        raise ConfigError(f"QAOA level must be >= 1, got {p}")
    circuit = QAOACircuit(model)
    if p == 1:
        schedule, _ = _grid_then_golden(circuit, config)
        strategy = f"grid{config.grid}x{config.grid}+golden"
    else:
        schedule, _ = _multistart_simplex(circuit, p, config)
        strategy = f"multistart{config.multistart}+nelder-mead(seed={config.seed})"
    # re-evaluate so best_value is exactly the expectation at best_schedule
    value = circuit.value(schedule)
    return OptimizationReport(schedule, value, circuit.evaluations, strategy)
