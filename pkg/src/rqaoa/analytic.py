"""Closed-form level-1 QAOA on unit-weight complete graphs.

For the complete graph on ``2n`` vertices every edge has the same
expected cut value

    <C_ij>(gamma, beta) = 1/2 + f(gamma, beta)
    f = 1/2 sin(4b) sin(g) cos(g)^d - 1/4 sin(2b)^2 (1 - cos(2g)^d),  d = 2n - 2

with ``C_ij = (1 - Z_i Z_j)/2``. Maximising over beta in closed form leaves a
one-dimensional function of gamma (:func:`f_reduced`), and the bound on its
maximum reduces to positivity of a polynomial ``g(t)`` on ``[0, 1]``
(:func:`g_function`).

Most functions here accept numpy arrays for the angle arguments. The
``_d``-suffixed helpers take the exponent directly so the same formulas
serve complete graphs with any vertex count ``m`` (``d = m - 2``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularPointError
from .search import golden_section_max

SCAN_STEP = 1e-3
REFINE_TOL = 1e-10
BISECTION_STEPS = 60


@dataclass(frozen=True)
class CompleteParams:
    """Half vertex count ``n`` of ``K_2n`` and the exponent ``d = 2n - 2``."""

    n: int

    def __post_init__(self):
        _check_n(self.n)

    @property
    def d(self) -> int:
        return 2 * self.n - 2

    @property
    def vertices(self) -> int:
        return 2 * self.n

    @property
    def edges(self) -> int:
        return self.n * (2 * self.n - 1)


@dataclass(frozen=True)
class GammaProfile:
    gamma: float
    beta_star: float
    f_value: float
    x_value: float


def _check_n(n) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n!r}")


# -- exponent-level helpers ------------------------------------------------


def _terms_d(d: int, gamma):
    """``(A, D)`` with ``A = sin g cos^d g`` and ``D = 1 - cos^d 2g``."""
    gamma = np.asarray(gamma, dtype=float)
    c = np.cos(gamma)
    c2 = c * c
    A = np.sin(gamma) * c**d
    D = 1.0 - (2.0 * c2 - 1.0) ** d
    return A, D


def edge_objective_d(d: int, gamma, beta):
    A, D = _terms_d(d, gamma)
    beta = np.asarray(beta, dtype=float)
    out = 0.5 * np.sin(4 * beta) * A - 0.25 * np.sin(2 * beta) ** 2 * D
    return out if out.ndim else float(out)


def f_reduced_d(d: int, gamma):
    gamma = np.asarray(gamma, dtype=float)
    c2 = np.cos(gamma) ** 2
    D = 1.0 - (2.0 * c2 - 1.0) ** d
    s2c2d = (1.0 - c2) * c2**d
    root = np.sqrt(D * D + 16.0 * s2c2d)
    # (root - D)/8 rewritten to avoid cancellation when s2c2d << D^2
    denom = root + D
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(denom > 0, 2.0 * s2c2d / np.where(denom > 0, denom, 1.0), 0.0)
    return out if out.ndim else float(out)


def beta_star_d(d: int, gamma: float) -> float:
    """Stationary maximiser in beta; ``4 beta = atan2(4A, D)``."""
    A, D = _terms_d(d, gamma)
    A, D = float(A), float(D)
    if A == 0.0 and D == 0.0:
        raise SingularPointError(f"beta* undefined at gamma={gamma!r} (A = D = 0)")
    return 0.25 * math.atan2(4.0 * A, D)


def maximize_reduced_d(d: int, step: float = SCAN_STEP, tol: float = REFINE_TOL) -> GammaProfile:
    """Scan ``[0, pi/2]`` at ``step`` then refine by golden section.

    ``f_reduced_d`` depends on gamma only through ``cos^2 gamma``, so this
    interval covers every value it takes.
    """
    n_pts = int(math.ceil((math.pi / 2) / step))
    grid = np.linspace(0.0, math.pi / 2, n_pts + 1)
    values = f_reduced_d(d, grid)
    k = int(np.argmax(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_pts)]
    gamma, f_val = golden_section_max(lambda g: f_reduced_d(d, g), lo, hi, tol)
    if f_val < values[k]:
        gamma, f_val = float(grid[k]), float(values[k])
    beta = beta_star_d(d, gamma)
    A, D = _terms_d(d, gamma)
    x = math.inf if float(D) == 0.0 else 4.0 * float(A) / float(D)
    return GammaProfile(float(gamma), beta, float(f_val), x)


def complete_graph_profile(m: int) -> GammaProfile:
    """Optimal level-1 angles for unit-weight MAX-CUT on ``K_m`` (``m >= 2``)."""
    if m < 2:
        raise DomainError(f"complete graph needs m >= 2, got {m}")
    return maximize_reduced_d(m - 2)


# -- public API in terms of n (graph K_2n) ---------------------------------


def edge_objective(n: int, gamma, beta):
    """f(gamma, beta) = <C_ij> - 1/2."""
    _check_n(n)
    return edge_objective_d(2 * n - 2, gamma, beta)


def expected_edge_cost(n: int, gamma, beta):
    _check_n(n)
    return 0.5 + edge_objective_d(2 * n - 2, gamma, beta)


def edge_correlation(n: int, gamma, beta):
    """<Z_i Z_j> = 1 - 2 <C_ij>, i.e. ``-2 f``."""
    _check_n(n)
    return -2.0 * edge_objective_d(2 * n - 2, gamma, beta)


def arctan_argument(n: int, gamma: float) -> float:
    """x(gamma) = 4 sin g cos^d g / (1 - cos^d 2g)."""
    _check_n(n)
    A, D = _terms_d(2 * n - 2, gamma)
    if float(D) == 0.0:
        raise SingularPointError(f"x(gamma) is singular at gamma={gamma!r}")
    return 4.0 * float(A) / float(D)


def optimal_beta(n: int, gamma: float) -> float:
    """arctan(x(gamma)) / 4, the maximising beta at fixed gamma.

    Raises :class:`SingularPointError` where ``1 - cos^d 2g`` vanishes
    (gamma a multiple of pi/2); there ``f`` is identically zero in beta.
    """
    return 0.25 * math.atan(arctan_argument(n, gamma))


def f_reduced(n: int, gamma):
    """max over beta of f: (sqrt(D^2 + 16 s^2 c^(2d)) - D) / 8."""
    _check_n(n)
    return f_reduced_d(2 * n - 2, gamma)


def maximize_f(n: int) -> GammaProfile:
    _check_n(n)
    return maximize_reduced_d(2 * n - 2)


def qaoa1_ratio(n: int) -> float:
    """Level-1 QAOA approximation ratio on ``K_2n``: (2n-1)(1/2 + f*)/n."""
    f_star = maximize_f(n).f_value
    return (2 * n - 1) * (0.5 + f_star) / n


def maxcut_optimum(m: int) -> int:
    """Maximum cut of the unit-weight complete graph ``K_m`` (balanced split)."""
    if m < 2:
        raise DomainError(f"complete graph needs m >= 2, got {m}")
    return (m // 2) * (m - m // 2)


# -- positivity certificate ------------------------------------------------


def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)) or np.any(np.isnan(t)):
        raise DomainError("t must lie in [0, 1]")
    return t


def g_function(n: int, t):
    """g(t) = 4/(4n-1)^2 + (1 - (2t-1)^d)/(4n-1) - (1-t) t^d."""
    _check_n(n)
    t = _check_t(t)
    d = 2 * n - 2
    a = 1.0 / (4 * n - 1)
    out = 4 * a * a + a * (1.0 - (2 * t - 1) ** d) - (1 - t) * t**d
    return out if out.ndim else float(out)


def g_derivative(n: int, t):
    _check_n(n)
    t = _check_t(t)
    k = 2 * n - 3
    out = -(4 * n - 4) / (4 * n - 1) * (2 * t - 1) ** k + t**k * (-(2 * n - 2) + (2 * n - 1) * t)
    return out if out.ndim else float(out)


def critical_value_bound(n: int) -> float:
    """(4n-13) / (4(n-1)(4n-1)^2), the lower bound on g at critical points."""
    return (4 * n - 13) / (4 * (n - 1) * (4 * n - 1) ** 2)


@dataclass(frozen=True)
class GPositivityReport:
    n: int
    min_value: float
    argmin: float
    critical_points: tuple[tuple[float, float], ...]
    bound: float | None
    bound_ok: bool | None

    @property
    def passed(self) -> bool:
        return self.min_value > 0


def _bisect_root(n: int, lo: float, hi: float, steps: int = BISECTION_STEPS) -> float:
    f_lo = g_derivative(n, lo)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        f_mid = g_derivative(n, mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_points(n: int, grid_step: float = 1e-4) -> list[float]:
    """Interior zeros of g' bracketed by sign changes on a uniform grid."""
    _check_n(n)
    m = int(round(1.0 / grid_step))
    t = np.linspace(0.0, 1.0, m + 1)
    dg = g_derivative(n, t)
    roots = []
    for k in range(m):
        a, b = dg[k], dg[k + 1]
        if a == 0.0 and 0 < k:
            roots.append(float(t[k]))
        elif a * b < 0:
            roots.append(_bisect_root(n, float(t[k]), float(t[k + 1])))
    return roots


def verify_g_positivity(n: int, grid_step: float = 1e-4) -> GPositivityReport:
    """Numerically certify ``min_{[0,1]} g > 0`` for one ``n``.

    The minimum is taken over the grid, the endpoints and every located
    critical point. For ``n >= 4`` it also checks that each critical value
    exceeds :func:`critical_value_bound`. A non-positive minimum produces a
    failing report, not an exception.
    """
    _check_n(n)
    if grid_step > 1e-3:
        raise DomainError("grid_step must be <= 1e-3")
    m = int(round(1.0 / grid_step))
    t = np.linspace(0.0, 1.0, m + 1)
    g = g_function(n, t)
    k = int(np.argmin(g))
    min_val, argmin = float(g[k]), float(t[k])
    crit = tuple((tc, float(g_function(n, tc))) for tc in critical_points(n, grid_step))
    for tc, gc in crit:
        if gc < min_val:
            min_val, argmin = gc, tc
    if n >= 4:
        bound = critical_value_bound(n)
        bound_ok = all(gc > bound for _, gc in crit)
    else:
        bound, bound_ok = None, None
    return GPositivityReport(n, min_val, argmin, crit, bound, bound_ok)
