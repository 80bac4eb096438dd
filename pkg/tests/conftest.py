import itertools

import numpy as np
import pytest

from rqaoa.ising import IsingModel, energy, maxcut_model

ACCEPTANCE_LINES: list[str] = []


def exhaustive_max(model: IsingModel):
    """Full 2^n enumeration with no symmetry reduction (independent oracle)."""
    best_val, best_x = -np.inf, None
    for spins in itertools.product((1, -1), repeat=model.n_vertices):
        x = dict(zip(model.vertices, spins))
        e = energy(model, x)
        if e > best_val:
            best_val, best_x = e, x
    return best_x, best_val


def all_maximizers(model: IsingModel, tol=1e-9):
    vals = []
    for spins in itertools.product((1, -1), repeat=model.n_vertices):
        x = dict(zip(model.vertices, spins))
        vals.append((energy(model, x), spins))
    top = max(v for v, _ in vals)
    return top, [s for v, s in vals if v >= top - tol]


def cut_value(edges, x):
    return sum(w * (1 - x[i] * x[j]) / 2 for i, j, w in edges)


def random_weighted_model(rng, n_vertices, density=0.6, dyadic=False):
    edges = []
    for i in range(n_vertices):
        for j in range(i + 1, n_vertices):
            if rng.random() < density:
                w = rng.integers(-16, 17) / 8 if dyadic else rng.normal()
                if w != 0:
                    edges.append((i, j, float(w)))
    if not edges:
        edges.append((0, 1, 1.0))
    return maxcut_model(edges), edges


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
