"""Weighted Ising models, MAX-CUT encoding, exhaustive search and contraction.

An :class:`IsingModel` represents the energy function

    E(x) = offset + sum_{i<j} J_ij x_i x_j,      x_i in {-1, +1}

Larger energy is better throughout: a MAX-CUT instance is encoded so that
``E(x)`` equals the weighted cut value of ``x``.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Iterator, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EdgeListParseError,
    IncompleteAssignmentError,
    InconsistentStackError,
    InvalidContractionError,
    InvalidSizeError,
    MalformedEdgeError,
    SizeLimitError,
)

ZERO_TOL = 1e-12
BRUTE_FORCE_CAP = 26
# relative tolerance used to decide that two energies tie
TIE_TOL = 1e-9

Pair = tuple[int, int]


def canonical_pair(i: int, j: int) -> Pair:
    return (i, j) if i < j else (j, i)


class SpinAssignment(Mapping):
    """Immutable map from vertex id to a spin in {-1, +1}."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[int, int] | Iterable[tuple[int, int]]):
        items = dict(values)
        for v, s in items.items():
            if s not in (-1, 1):
                raise ValueError(f"spin of vertex {v} must be +1 or -1, got {s!r}")
        self._values = {int(v): int(items[v]) for v in sorted(items)}

    @classmethod
    def from_sequence(cls, vertices: Iterable[int], spins: Iterable[int]) -> SpinAssignment:
        return cls(zip(vertices, (int(s) for s in spins)))

    def __getitem__(self, v: int) -> int:
        return self._values[v]

    def __iter__(self) -> Iterator[int]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __neg__(self) -> SpinAssignment:
        return SpinAssignment({v: -s for v, s in self._values.items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{v}:{'+' if s > 0 else '-'}" for v, s in self._values.items())
        return f"SpinAssignment({{{body}}})"

    def __eq__(self, other) -> bool:
        if isinstance(other, Mapping):
            return dict(self._values) == dict(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._values.items()))

    def spins(self, order: Iterable[int]) -> np.ndarray:
        return np.array([self._values[v] for v in order], dtype=np.int8)

    def to_string(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self._values.values())


@dataclass(frozen=True)
class IsingModel:
    """Pairwise Ising energy over a fixed vertex set.

    Coupling keys are canonicalised to ``(small, large)``; duplicate keys
    (in either orientation) are merged additively and merged values with
    magnitude below ``ZERO_TOL`` are dropped. Vertices stay in the model
    even when all their couplings vanish.
    """

    vertices: tuple[int, ...]
    couplings: Mapping[Pair, float] = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        verts = tuple(sorted(set(int(v) for v in self.vertices)))
        if any(v < 0 for v in verts):
            raise MalformedEdgeError("vertex ids must be non-negative integers")
        vset = set(verts)
        merged: dict[Pair, float] = {}
        items = self.couplings.items() if isinstance(self.couplings, Mapping) else self.couplings
        for (i, j), value in items:
            i, j = int(i), int(j)
            if i == j:
                raise MalformedEdgeError(f"self-coupling on vertex {i}")
            if i not in vset or j not in vset:
                raise MalformedEdgeError(f"coupling ({i}, {j}) references an unknown vertex")
            key = canonical_pair(i, j)
            merged[key] = merged.get(key, 0.0) + float(value)
        clean = {k: merged[k] for k in sorted(merged) if abs(merged[k]) >= ZERO_TOL}
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "couplings", clean)
        object.__setattr__(self, "offset", float(self.offset))

    __hash__ = None  # type: ignore[assignment]

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def active_vertices(self) -> tuple[int, ...]:
        """Vertices that take part in at least one coupling."""
        touched = {v for pair in self.couplings for v in pair}
        return tuple(v for v in self.vertices if v in touched)

    @property
    def isolated_vertices(self) -> tuple[int, ...]:
        touched = {v for pair in self.couplings for v in pair}
        return tuple(v for v in self.vertices if v not in touched)

    def coupling(self, i: int, j: int) -> float:
        return self.couplings.get(canonical_pair(i, j), 0.0)

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = [j if i == v else i for (i, j) in self.couplings if v in (i, j)]
        return tuple(sorted(out))

    def active_submodel(self) -> IsingModel:
        """Same energy function with isolated vertices removed."""
        return IsingModel(self.active_vertices, self.couplings, self.offset)

    def coupling_arrays(self, order: Iterable[int] | None = None):
        """Return ``(rows, cols, values)`` with rows/cols as positions in ``order``."""
        order = tuple(self.vertices if order is None else order)
        pos = {v: k for k, v in enumerate(order)}
        rows = np.array([pos[i] for i, _ in self.couplings], dtype=np.int64)
        cols = np.array([pos[j] for _, j in self.couplings], dtype=np.int64)
        vals = np.array(list(self.couplings.values()), dtype=float)
        return rows, cols, vals

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "couplings": [[i, j, J] for (i, j), J in self.couplings.items()],
            "offset": self.offset,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> IsingModel:
        couplings = [((int(i), int(j)), float(J)) for i, j, J in data["couplings"]]
        return cls(tuple(data["vertices"]), couplings, float(data.get("offset", 0.0)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> IsingModel:
        return cls.from_dict(json.loads(text))


def maxcut_model(edges: Iterable[tuple]) -> IsingModel:
    """Encode weighted MAX-CUT as an Ising model.

    Each edge ``(i, j)`` or ``(i, j, w)`` contributes ``w/2 (1 - x_i x_j)``:
    ``w/2`` to the offset and ``-w/2`` to ``J_ij``. Repeated pairs add up.
    """
    vertices: set[int] = set()
    couplings: list[tuple[Pair, float]] = []
    offset = 0.0
    for edge in edges:
        if len(edge) == 2:
            i, j = edge
            w = 1.0
        elif len(edge) == 3:
            i, j, w = edge
        else:
            raise MalformedEdgeError(f"edge must be (i, j) or (i, j, w), got {edge!r}")
        i, j, w = int(i), int(j), float(w)
        if i == j:
            raise MalformedEdgeError(f"self-loop on vertex {i}")
        if i < 0 or j < 0:
            raise MalformedEdgeError(f"negative vertex id in edge ({i}, {j})")
        vertices.update((i, j))
        couplings.append(((i, j), -w / 2))
        offset += w / 2
    return IsingModel(tuple(vertices), couplings, offset)


def complete_model(m: int) -> IsingModel:
    """Unit-weight MAX-CUT model on the complete graph with ``m`` vertices."""
    if m < 2:
        raise InvalidSizeError(f"complete graph needs at least 2 vertices, got {m}")
    return maxcut_model((i, j) for i in range(m) for j in range(i + 1, m))


def energy(model: IsingModel, x: Mapping[int, int]) -> float:
    missing = [v for v in model.vertices if v not in x]
    if missing:
        raise IncompleteAssignmentError(f"assignment is missing vertices {missing}")
    total = model.offset
    for (i, j), J in model.couplings.items():
        total += J * x[i] * x[j]
    return total


def energies(model: IsingModel, spins: np.ndarray, order: Iterable[int] | None = None) -> np.ndarray:
    """Vectorised energy of each row of ``spins`` (columns follow ``order``)."""
    spins = np.asarray(spins, dtype=float)
    rows, cols, vals = model.coupling_arrays(order)
    out = np.full(spins.shape[0], model.offset)
    for r, c, J in zip(rows, cols, vals):
        out += J * spins[:, r] * spins[:, c]
    return out


def _spin_table(width: int) -> np.ndarray:
    """All ``2**width`` spin rows, first column most significant, +1 first."""
    idx = np.arange(2**width, dtype=np.int64)[:, None]
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)[None, :]
    return (1 - 2 * ((idx >> shifts) & 1)).astype(float)


class _Enumerator:
    """Block enumeration of energies with the first active spin pinned to +1.

    Free spins are indexed so that integer order equals lexicographic order
    (first free vertex is the most significant bit, bit 0 means spin +1).
    The free set is split into a high block (iterated in batches) and a low
    block whose spin table is materialised once; cross terms are a matmul.
    """

    LOW_MAX = 14
    CHUNK_ROWS = 1 << 20

    def __init__(self, model: IsingModel):
        act = model.active_vertices
        self.vertices = act
        self.free = act[1:]
        r = len(self.free)
        self.n_low = min(r, self.LOW_MAX)
        self.n_high = r - self.n_low
        high = act[: 1 + self.n_high]
        low = act[1 + self.n_high :]
        hpos = {v: k for k, v in enumerate(high)}
        lpos = {v: k for k, v in enumerate(low)}
        self.J_hh = np.zeros((len(high), len(high)))
        self.J_ll = np.zeros((len(low), len(low)))
        self.J_hl = np.zeros((len(high), len(low)))
        for (i, j), J in model.couplings.items():
            if i in hpos and j in hpos:
                self.J_hh[hpos[i], hpos[j]] = J
            elif i in lpos and j in lpos:
                self.J_ll[lpos[i], lpos[j]] = J
            elif i in hpos:
                self.J_hl[hpos[i], lpos[j]] = J
            else:
                self.J_hl[hpos[j], lpos[i]] = J
        self.offset = model.offset
        self.low_spins = _spin_table(self.n_low)
        self.e_low = np.einsum("ki,ij,kj->k", self.low_spins, self.J_ll, self.low_spins)
        self.batch = max(1, self.CHUNK_ROWS >> self.n_low)
        self.n_high_configs = 2**self.n_high

    def chunks(self) -> list[tuple[int, int]]:
        return [
            (s, min(s + self.batch, self.n_high_configs))
            for s in range(0, self.n_high_configs, self.batch)
        ]

    def block(self, start: int, stop: int) -> np.ndarray:
        """Energies for high configs ``start..stop`` as a flat array."""
        idx = np.arange(start, stop, dtype=np.int64)[:, None]
        shifts = np.arange(self.n_high - 1, -1, -1, dtype=np.int64)[None, :]
        free = 1 - 2 * ((idx >> shifts) & 1)
        hs = np.hstack([np.ones((stop - start, 1)), free]).astype(float)
        e_high = np.einsum("ki,ij,kj->k", hs, self.J_hh, hs)
        cross = (hs @ self.J_hl) @ self.low_spins.T
        return (self.offset + e_high[:, None] + self.e_low[None, :] + cross).ravel()

    def decode(self, index: int) -> SpinAssignment:
        r = len(self.free)
        bits = [(index >> (r - 1 - k)) & 1 for k in range(r)]
        spins = [1] + [1 - 2 * b for b in bits]
        return SpinAssignment(zip(self.vertices, spins))


def brute_force_max(
    model: IsingModel, cap: int = BRUTE_FORCE_CAP, threads: int = 1
) -> tuple[SpinAssignment, float]:
    """Exact maximiser by exhaustive enumeration.

    Only vertices with at least one coupling are enumerated; the first of
    them is fixed to +1 (global spin-flip symmetry) and isolated vertices
    are set to +1. Among maximisers the lexicographically smallest
    assignment (with +1 < -1) is returned, so the result does not depend on
    ``threads``.
    """
    act = model.active_vertices
    if len(act) > cap:
        raise SizeLimitError(f"{len(act)} coupled vertices exceeds brute-force cap {cap}")
    isolated = {v: 1 for v in model.isolated_vertices}
    if not act:
        return SpinAssignment(isolated), model.offset

    en = _Enumerator(model)
    chunks = en.chunks()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            maxima = list(pool.map(lambda c: float(en.block(*c).max()), chunks))
    else:
        maxima = [float(en.block(*c).max()) for c in chunks]
    best = max(maxima)
    cutoff = best - TIE_TOL * max(1.0, abs(best))

    for (start, stop), cmax in zip(chunks, maxima):
        if cmax < cutoff:
            continue
        e = en.block(start, stop)
        k = int(np.flatnonzero(e >= cutoff)[0])
        index = start * (1 << en.n_low) + k
        x = en.decode(index)
        values = dict(x)
        values.update(isolated)
        return SpinAssignment(values), float(e[k])
    raise AssertionError("unreachable: maximum not found on second pass")


@dataclass(frozen=True)
class ConstraintRecord:
    """``x[eliminated] = sign * x[surviving]``."""

    eliminated: int
    surviving: int
    sign: int

    def __post_init__(self):
        if self.eliminated == self.surviving:
            raise InvalidContractionError("eliminated and surviving vertex coincide")
        if self.sign not in (-1, 1):
            raise InvalidContractionError(f"sign must be +1 or -1, got {self.sign!r}")


@dataclass(frozen=True)
class ConstraintStack:
    records: tuple[ConstraintRecord, ...] = ()

    def __post_init__(self):
        records = tuple(self.records)
        eliminated: set[int] = set()
        for rec in records:
            if rec.eliminated in eliminated:
                raise InconsistentStackError(f"vertex {rec.eliminated} eliminated twice")
            if rec.surviving in eliminated:
                raise InconsistentStackError(
                    f"vertex {rec.surviving} survives a constraint after being eliminated"
                )
            # a vertex that anchored earlier constraints may itself be eliminated
            # later; reverse-order replay assigns it before its dependants
            eliminated.add(rec.eliminated)
        object.__setattr__(self, "records", records)

    def push(self, record: ConstraintRecord) -> ConstraintStack:
        return ConstraintStack(self.records + (record,))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def contract(
    model: IsingModel, k: int, l: int, sign: int
) -> tuple[IsingModel, ConstraintRecord]:
    """Eliminate vertex ``k`` by imposing ``x_k = sign * x_l``.

    Couplings ``(i, k)`` move to ``(i, l)`` scaled by ``sign`` and merge with
    any existing ``J_il``; ``J_kl`` itself becomes the constant ``sign * J_kl``.
    """
    if k == l:
        raise InvalidContractionError("cannot contract a vertex onto itself")
    if k not in model.vertices or l not in model.vertices:
        raise InvalidContractionError(f"vertices ({k}, {l}) not both in the model")
    record = ConstraintRecord(eliminated=k, surviving=l, sign=sign)

    offset = model.offset
    couplings: list[tuple[Pair, float]] = []
    for (i, j), J in model.couplings.items():
        if k not in (i, j):
            couplings.append(((i, j), J))
            continue
        other = j if i == k else i
        if other == l:
            offset += sign * J
        else:
            couplings.append(((other, l), sign * J))
    vertices = tuple(v for v in model.vertices if v != k)
    return IsingModel(vertices, couplings, offset), record


def reconstruct(stack: ConstraintStack, base: Mapping[int, int]) -> SpinAssignment:
    """Undo eliminations in reverse order, setting each eliminated spin."""
    values = dict(base)
    for rec in reversed(stack.records):
        if rec.surviving not in values:
            raise InconsistentStackError(
                f"surviving vertex {rec.surviving} is unassigned when restoring {rec.eliminated}"
            )
        values[rec.eliminated] = rec.sign * values[rec.surviving]
    return SpinAssignment(values)


def parse_edge_list(text: str) -> IsingModel:
    """Parse ``i j [w]`` lines into a MAX-CUT model.

    ``#`` starts a comment; blank lines are ignored; ``w`` defaults to 1.
    """
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise EdgeListParseError(lineno, f"expected 'i j [w]', got {raw.strip()!r}")
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"vertex ids must be integers: {raw.strip()!r}") from None
        try:
            w = float(tokens[2]) if len(tokens) == 3 else 1.0
        except ValueError:
            raise EdgeListParseError(lineno, f"weight is not a number: {tokens[2]!r}") from None
        if not math.isfinite(w):
            raise EdgeListParseError(lineno, f"weight must be finite: {tokens[2]!r}")
        if i == j:
            raise EdgeListParseError(lineno, f"self-loop on vertex {i}")
        if i < 0 or j < 0:
            raise EdgeListParseError(lineno, "vertex ids must be non-negative")
        edges.append((i, j, w))
    if not edges:
        raise EdgeListParseError(0, "no edges found")
    return maxcut_model(edges)


def serialize_model(model: IsingModel) -> str:
    """Write a MAX-CUT model back to edge-list text (canonical order).

    Only models that an edge list can express are accepted: no isolated
    vertices and ``offset == -sum(J)``. Use :meth:`IsingModel.to_json`
    for contracted models.
    """
    if model.isolated_vertices:
        raise ValueError("edge lists cannot express isolated vertices; use JSON")
    expected = -sum(model.couplings.values())
    if abs(model.offset - expected) > 1e-9 * max(1.0, abs(expected)):
        raise ValueError("offset is not the MAX-CUT offset of these couplings; use JSON")
    lines = [f"{i} {j} {-2.0 * J!r}" for (i, j), J in model.couplings.items()]
    return "\n".join(lines) + "\n"


def read_model(path: str) -> IsingModel:
    """Load an edge list, or a JSON model when the file ends in ``.json``."""
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        return IsingModel.from_json(text)
    return parse_edge_list(text)
