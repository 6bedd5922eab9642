"""Benchmark problems over permutations: TSP, QAP and largest common subgraph.

Every instance exposes a compiled cost kernel (``kernel``) and the array
tuple it reads (``data``), so the search loops and the exhaustive
landscape scans can run without calling back into Python.  Instances
are also plain callables returning the cost of a permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numba as nb
import numpy as np

from .permutation import as_permutation, random_permutation


def _check_length(p, n):
    q = as_permutation(p)
    if q.size != n:
        raise ValueError(f"permutation length {q.size} does not match instance size {n}")
    return q


@dataclass(frozen=True)
class CompiledObjective:
    """A jitted ``kernel(p, data) -> float`` bundled with its data."""

    kernel: Callable
    data: tuple
    n: int
    sense: str = "minimize"
    name: str = "objective"

    def __call__(self, p) -> float:
        return float(self.kernel(_check_length(p, self.n), self.data))


# ---------------------------------------------------------------------------
# TSP
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TspInstance:
    d: np.ndarray
    sense: str = field(default="minimize", init=False)

    def __post_init__(self):
        d = np.ascontiguousarray(self.d, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
            raise ValueError("TSP needs a square matrix of size >= 2")
        if np.any(np.diag(d) != 0) or np.any(d < 0):
            raise ValueError("TSP costs must be non-negative with a zero diagonal")
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    @property
    def kernel(self):
        return _tsp_cost

    @property
    def data(self) -> tuple:
        return (self.d,)

    def cost(self, p) -> float:
        return float(_tsp_cost(_check_length(p, self.n), self.data))

    __call__ = cost


def tsp_cost(inst: TspInstance, p) -> float:
    return inst.cost(p)


def tsp_random_instance(n: int, rng: np.random.Generator, lo: int = 1, hi: int = 1000) -> TspInstance:
    """Symmetric matrix, zero diagonal, off-diagonal integers uniform in [lo, hi]."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if hi < lo:
        raise ValueError("hi must be >= lo")
    iu = np.triu_indices(n, 1)
    d = np.zeros((n, n), dtype=np.float64)
    d[iu] = rng.integers(lo, hi + 1, size=iu[0].size)
    d += d.T
    return TspInstance(d)


def tsp_circle_instance(n: int = 10, radius: float = 10.0, rounded: bool = False) -> tuple[TspInstance, np.ndarray]:
    """Cities evenly spaced on a circle, with the 2n optimal tours.

    City ``i`` sits at angle ``2*pi*i/n``; the optima are the rotations of
    the identity and of its reverse.  With ``rounded`` each Euclidean edge
    cost is rounded to the nearest integer (the TSPLIB convention), which
    is the instance the fitness distance correlation table is built on.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    ang = 2.0 * np.pi * np.arange(n) / n
    xy = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    d = np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(d, 0.0)
    if rounded:
        d = np.floor(d + 0.5)
    base = np.arange(n)
    optima = [np.roll(base, -s) for s in range(n)] + [np.roll(base[::-1], -s) for s in range(n)]
    optima = np.unique(np.array(optima, dtype=np.int64), axis=0)
    return TspInstance(d), optima


# ---------------------------------------------------------------------------
# QAP
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QapInstance:
    """Square QAP: minimise ``sum_{i != j} C[i,j] * D[p[i], p[j]]``."""

    C: np.ndarray
    D: np.ndarray
    sense: str = field(default="minimize", init=False)

    def __post_init__(self):
        C = np.ascontiguousarray(self.C, dtype=np.int64)
        D = np.ascontiguousarray(self.D, dtype=np.int64)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape != D.shape:
            raise ValueError("QAP needs square cost and distance matrices of equal size")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def kernel(self):
        return _qap_cost

    @property
    def data(self) -> tuple:
        return (self.C, self.D)

    def cost(self, p) -> int:
        return int(_qap_cost(_check_length(p, self.n), self.data))

    __call__ = cost


def qap_cost(inst: QapInstance, p) -> int:
    return inst.cost(p)


def qap_random_instance(n: int, rng: np.random.Generator, lo: int = 1, hi: int = 50) -> QapInstance:
    if n < 2:
        raise ValueError("n must be >= 2")
    if hi < lo:
        raise ValueError("hi must be >= lo")
    C = rng.integers(lo, hi + 1, size=(n, n))
    D = rng.integers(lo, hi + 1, size=(n, n))
    np.fill_diagonal(C, 0)
    np.fill_diagonal(D, 0)
    return QapInstance(C, D)


def qap_planted_instance(n: int, rng: np.random.Generator) -> tuple[QapInstance, np.ndarray]:
    """QAP whose optimum is a hidden random permutation.

    With ``m = n(n-1)`` the pairs ``(u, m+1-u)`` are shuffled; costs take
    the first components row by row and the planted permutation places
    the matching second components in ``D``, so large costs always meet
    small distances.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    p = random_permutation(n, rng)
    m = n * (n - 1)
    first = np.arange(1, m + 1, dtype=np.int64)
    pairs = np.column_stack([first, m + 1 - first])
    pairs = pairs[rng.permutation(m)]
    C = np.zeros((n, n), dtype=np.int64)
    D = np.zeros((n, n), dtype=np.int64)
    t = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            u, v = pairs[t]
            C[i, j] = u
            D[p[i], p[j]] = v
            t += 1
    return QapInstance(C, D), p


def planted_optimum_cost(n: int) -> int:
    m = n * (n - 1)
    return sum(u * (m + 1 - u) for u in range(1, m + 1))


# ---------------------------------------------------------------------------
# graphs and LCS
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Graph:
    v: int
    edges: np.ndarray
    adj: np.ndarray

    @classmethod
    def from_edges(cls, v: int, edges) -> "Graph":
        if v < 1:
            raise ValueError("a graph needs at least one vertex")
        e = np.array(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= v):
            raise ValueError("edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        if np.unique(e, axis=0).shape[0] != e.shape[0]:
            raise ValueError("duplicate edges are not allowed")
        adj = np.zeros((v, v), dtype=np.bool_)
        adj[e[:, 0], e[:, 1]] = True
        adj[e[:, 1], e[:, 0]] = True
        return cls(v, e, adj)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def same_as(self, other: "Graph") -> bool:
        return self.v == other.v and bool(np.array_equal(self.adj, other.adj))


@dataclass(frozen=True, eq=False)
class LcsInstance:
    """Largest common subgraph of ``g1`` (edge list) and ``g2`` (adjacency matrix).

    Position ``u`` of a permutation maps vertex ``u`` of ``g1`` to vertex
    ``p[u]`` of ``g2``.  The cost to minimise is the number of ``g1`` edges
    not preserved by the mapping.
    """

    g1: Graph
    g2: Graph
    sense: str = field(default="minimize", init=False)

    def __post_init__(self):
        if self.g1.v > self.g2.v:
            raise ValueError("g1 must not have more vertexes than g2")

    @property
    def n(self) -> int:
        return self.g2.v

    @property
    def total_edges(self) -> int:
        return self.g1.edge_count

    @property
    def kernel(self):
        return _lcs_cost

    @property
    def data(self) -> tuple:
        return (self.g1.edges, self.g2.adj)

    def fitness(self, p) -> int:
        return int(_lcs_fitness(_check_length(p, self.n), self.data))

    def cost(self, p) -> int:
        return int(_lcs_cost(_check_length(p, self.n), self.data))

    __call__ = cost

    def fitness_objective(self) -> CompiledObjective:
        return CompiledObjective(_lcs_fitness, self.data, self.n, "maximize", "lcs-fitness")


def lcs_fitness(inst: LcsInstance, p) -> int:
    return inst.fitness(p)


def lcs_cost(inst: LcsInstance, p) -> int:
    return inst.cost(p)


def random_graph(v: int, density: float, rng: np.random.Generator) -> Graph:
    if v < 1:
        raise ValueError("v must be >= 1")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    iu = np.triu_indices(v, 1)
    keep = rng.random(iu[0].size) < density
    return Graph.from_edges(v, np.column_stack([iu[0][keep], iu[1][keep]]))


def relabel(g: Graph, sigma) -> Graph:
    s = _check_length(sigma, g.v)
    return Graph.from_edges(g.v, s[g.edges])


def relabel_random(g: Graph, rng: np.random.Generator) -> tuple[Graph, np.ndarray]:
    """Isomorphic copy with vertex ``u`` renamed ``sigma[u]``, and ``sigma``."""
    sigma = random_permutation(g.v, rng)
    return relabel(g, sigma), sigma


def generalized_petersen(n: int, k: int) -> Graph:
    """G(n, k) with outer vertex u_i at index i and inner vertex v_i at n+i."""
    if n < 3 or not 1 <= k < n / 2:
        raise ValueError("generalized Petersen graph needs n >= 3 and 1 <= k < n/2")
    edges = []
    for i in range(n):
        edges.append((i, n + i))
        edges.append((i, (i + 1) % n))
        edges.append((n + i, n + (i + k) % n))
    return Graph.from_edges(2 * n, edges)


def petersen_graph() -> Graph:
    return generalized_petersen(5, 2)


def isomorphic_lcs_instance(g: Graph, rng: np.random.Generator | None) -> tuple[LcsInstance, np.ndarray]:
    """Pair ``g`` with a random relabelling of itself; returns the optimal mapping.

    With ``rng=None`` the second graph is ``g`` itself and the identity is returned.
    """
    if rng is None:
        return LcsInstance(g, g), np.arange(g.v, dtype=np.int64)
    g2, sigma = relabel_random(g, rng)
    return LcsInstance(g, g2), sigma


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@nb.njit(cache=True)
def _tsp_cost(p, data):
    d = data[0]
    n = p.size
    total = d[p[n - 1], p[0]]
    for i in range(n - 1):
        total += d[p[i], p[i + 1]]
    return total


@nb.njit(cache=True)
def _qap_cost(p, data):
    C = data[0]
    D = data[1]
    n = p.size
    total = 0
    for i in range(n):
        pi = p[i]
        for j in range(n):
            if i != j:
                total += C[i, j] * D[pi, p[j]]
    return float(total)


@nb.njit(cache=True)
def _lcs_fitness(p, data):
    edges = data[0]
    adj = data[1]
    c = 0
    for t in range(edges.shape[0]):
        if adj[p[edges[t, 0]], p[edges[t, 1]]]:
            c += 1
    return float(c)


@nb.njit(cache=True)
def _lcs_cost(p, data):
    return float(data[0].shape[0]) - _lcs_fitness(p, data)


# ---------------------------------------------------------------------------
# problem specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """Parsed generator spec such as ``qap-random:n=50`` or ``lcs-gpetersen:25,2``."""

    name: str
    params: dict[str, Any]

    @property
    def randomized(self) -> bool:
        return self.name in ("tsp-random", "qap-random", "qap-planted", "lcs-random", "lcs-gpetersen")

    @property
    def text(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in self.params.items())


_DEFAULTS: dict[str, dict[str, Any]] = {
    "tsp-random": {"n": 100, "lo": 1, "hi": 1000},
    "tsp-circle": {"n": 10, "radius": 10.0, "rounded": 0},
    "qap-random": {"n": 50, "lo": 1, "hi": 50},
    "qap-planted": {"n": 10},
    "lcs-random": {"v": 50, "density": 0.5},
    "lcs-gpetersen": {"n": 25, "k": 2},
    "lcs-petersen": {},
}


def parse_problem(spec: str) -> ProblemSpec:
    name, _, rest = spec.strip().lower().partition(":")
    if name not in _DEFAULTS:
        raise ValueError(f"unknown problem {spec!r}; expected one of {sorted(_DEFAULTS)}")
    defaults = _DEFAULTS[name]
    params = dict(defaults)
    positional = list(defaults)
    if rest:
        for pos, item in enumerate(rest.split(",")):
            key, eq, val = item.partition("=")
            if not eq:
                if pos >= len(positional):
                    raise ValueError(f"too many parameters in {spec!r}")
                key, val = positional[pos], key
            key = key.strip()
            if key not in defaults:
                raise ValueError(f"unknown parameter {key!r} for {name}")
            kind = type(defaults[key])
            try:
                params[key] = kind(float(val)) if kind is int else kind(val)
            except ValueError:
                raise ValueError(f"bad value {val!r} for {key}") from None
    return ProblemSpec(name, params)


def make_problem(spec: ProblemSpec | str, rng: np.random.Generator | None = None) -> tuple[Any, dict[str, Any]]:
    """Build the instance named by ``spec``; returns ``(instance, extras)``.

    ``extras`` carries known optima: ``planted`` (QAP), ``mapping`` (LCS)
    or ``optima`` (circle TSP).
    """
    if isinstance(spec, str):
        spec = parse_problem(spec)
    if spec.randomized and rng is None:
        raise ValueError(f"{spec.name} is randomized and needs a seeded generator")
    p = spec.params
    if spec.name == "tsp-random":
        return tsp_random_instance(p["n"], rng, p["lo"], p["hi"]), {}
    if spec.name == "tsp-circle":
        inst, optima = tsp_circle_instance(p["n"], p["radius"], bool(p["rounded"]))
        return inst, {"optima": optima}
    if spec.name == "qap-random":
        return qap_random_instance(p["n"], rng, p["lo"], p["hi"]), {}
    if spec.name == "qap-planted":
        inst, planted = qap_planted_instance(p["n"], rng)
        return inst, {"planted": planted}
    if spec.name == "lcs-random":
        g = random_graph(p["v"], p["density"], rng)
        inst, mapping = isomorphic_lcs_instance(g, rng)
        return inst, {"mapping": mapping}
    if spec.name == "lcs-gpetersen":
        inst, mapping = isomorphic_lcs_instance(generalized_petersen(p["n"], p["k"]), rng)
        return inst, {"mapping": mapping}
    inst, mapping = isomorphic_lcs_instance(petersen_graph(), None)
    return inst, {"mapping": mapping}


# ---------------------------------------------------------------------------
# plain-text instance files
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def _matrix_lines(m: np.ndarray) -> list[str]:
    return [" ".join(_fmt(x) for x in row) for row in m]


def format_instance(inst, extras: dict[str, Any] | None = None, comments: list[str] | None = None) -> str:
    """Serialise an instance (and any known optima) to the text format.

    Layout: optional ``#`` comment lines, a ``<TYPE> <dimension>`` line,
    then the body.  TSP: one matrix.  QAP: ``C`` rows then ``D`` rows.
    GRAPH: ``<edge count>`` then one ``u v`` line per edge.  LCS: two
    GRAPH blocks.  Trailing ``planted``/``mapping``/``optimum`` lines hold
    permutations.
    """
    extras = extras or {}
    lines = [f"# {c}" for c in (comments or [])]
    if isinstance(inst, TspInstance):
        lines.append(f"TSP {inst.n}")
        lines += _matrix_lines(inst.d)
    elif isinstance(inst, QapInstance):
        lines.append(f"QAP {inst.n}")
        lines += _matrix_lines(inst.C)
        lines += _matrix_lines(inst.D)
    elif isinstance(inst, Graph):
        lines += _graph_lines(inst)
    elif isinstance(inst, LcsInstance):
        lines.append(f"LCS {inst.n}")
        lines += _graph_lines(inst.g1)
        lines += _graph_lines(inst.g2)
    else:
        raise TypeError(f"cannot serialise {type(inst).__name__}")
    if "planted" in extras:
        lines.append("planted " + " ".join(map(str, extras["planted"])))
    if "mapping" in extras:
        lines.append("mapping " + " ".join(map(str, extras["mapping"])))
    for opt in extras.get("optima", []):
        lines.append("optimum " + " ".join(map(str, opt)))
    return "\n".join(lines) + "\n"


def _graph_lines(g: Graph) -> list[str]:
    return [f"GRAPH {g.v}", str(g.edge_count)] + [f"{u} {v}" for u, v in g.edges]


def parse_instance(text: str):
    """Inverse of :func:`format_instance`; returns ``(instance, extras)``."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty instance file")
    pos = 0

    def take_matrix(n, dtype):
        nonlocal pos
        m = np.array([[dtype(x) for x in r] for r in rows[pos:pos + n]], dtype=dtype)
        if m.shape != (n, n):
            raise ValueError("malformed matrix block")
        pos += n
        return m

    def take_graph():
        nonlocal pos
        tag, v = rows[pos]
        if tag.upper() != "GRAPH":
            raise ValueError("expected a GRAPH block")
        count = int(rows[pos + 1][0])
        edges = [(int(a), int(b)) for a, b in rows[pos + 2:pos + 2 + count]]
        pos += 2 + count
        return Graph.from_edges(int(v), edges)

    kind = rows[0][0].upper()
    if kind == "TSP":
        pos = 1
        inst = TspInstance(take_matrix(int(rows[0][1]), float))
    elif kind == "QAP":
        pos = 1
        n = int(rows[0][1])
        C = take_matrix(n, int)
        inst = QapInstance(C, take_matrix(n, int))
    elif kind == "GRAPH":
        inst = take_graph()
    elif kind == "LCS":
        pos = 1
        g1 = take_graph()
        inst = LcsInstance(g1, take_graph())
    else:
        raise ValueError(f"unknown instance type {kind!r}")
    extras: dict[str, Any] = {}
    optima = []
    for r in rows[pos:]:
        perm = np.array([int(x) for x in r[1:]], dtype=np.int64)
        if r[0] in ("planted", "mapping"):
            extras[r[0]] = perm
        elif r[0] == "optimum":
            optima.append(perm)
        else:
            raise ValueError(f"unexpected line {' '.join(r)!r}")
    if optima:
        extras["optima"] = np.array(optima)
    return inst, extras


def write_instance(path: str | Path, inst, extras=None, comments=None) -> None:
    Path(path).write_text(format_instance(inst, extras, comments), encoding="utf-8")


def read_instance(path: str | Path):
    return parse_instance(Path(path).read_text(encoding="utf-8"))
