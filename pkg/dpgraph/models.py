"""
Domain types shared by the release mechanisms.

Graph and DistanceMatrix are immutable after construction; the numpy arrays
they expose are flagged read-only so they can be shared between workers.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from dpgraph.exceptions import GraphValidationError, PrivacyParameterError

Edge = Tuple[int, int]

UNREACHABLE = math.inf


def normalize_edge(u: int, v: int) -> Edge:
    """Return the unordered pair (u, v) with the smaller id first"""
    return (u, v) if u < v else (v, u)


class Graph:
    """
    Undirected weighted graph on vertices 0..n-1.

    Args:
        n (int): Vertex count
        edges (iterable): Unordered vertex pairs
        weights (sequence): Nonnegative weight per edge, aligned with ``edges``
        require_connected (bool): Reject graphs with more than one component.
            Only induced subgraphs (forests left after removing an FVS) turn
            this off.
    """

    def __init__(self, n: int, edges: Iterable[Sequence[int]], weights: Optional[Sequence[float]] = None,
                 *, require_connected: bool = True):
        if int(n) != n or n < 1:
            raise GraphValidationError(f"Vertex count must be a positive integer, got {n}")
        self._n = int(n)

        normalized: List[Edge] = []
        index: Dict[Edge, int] = {}
        for raw in edges:
            u, v = int(raw[0]), int(raw[1])
            if u == v:
                raise GraphValidationError(f"Self-loop on vertex {u}")
            if not (0 <= u < self._n and 0 <= v < self._n):
                raise GraphValidationError(f"Edge ({u}, {v}) references a vertex outside 0..{self._n - 1}")
            edge = normalize_edge(u, v)
            if edge in index:
                raise GraphValidationError(f"Duplicate edge {edge}")
            index[edge] = len(normalized)
            normalized.append(edge)

        if weights is None:
            weight_array = np.ones(len(normalized), dtype=np.float64)
        else:
            weight_array = np.array(weights, dtype=np.float64).reshape(-1)
            if weight_array.shape[0] != len(normalized):
                raise GraphValidationError(
                    f"Got {weight_array.shape[0]} weights for {len(normalized)} edges"
                )
        if not np.all(np.isfinite(weight_array)):
            raise GraphValidationError("Edge weights must be finite")
        if np.any(weight_array < 0):
            raise GraphValidationError("Edge weights must be nonnegative")
        weight_array.setflags(write=False)

        self._edges: Tuple[Edge, ...] = tuple(normalized)
        self._edge_index = index
        self._weights = weight_array

        if require_connected and not self.is_connected():
            raise GraphValidationError(f"Graph with {self._n} vertices and {self.m} edges is not connected")

    @classmethod
    def from_weighted_edges(cls, n: int, triples: Iterable[Tuple[int, int, float]], **kwargs) -> "Graph":
        """Build a graph from (u, v, w) triples"""
        triples = list(triples)
        return cls(n, [(u, v) for u, v, _ in triples], [w for _, _, w in triples], **kwargs)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def has_edge(self, u: int, v: int) -> bool:
        return normalize_edge(u, v) in self._edge_index

    def edge_id(self, u: int, v: int) -> int:
        try:
            return self._edge_index[normalize_edge(u, v)]
        except KeyError:
            raise GraphValidationError(f"No edge ({u}, {v}) in graph") from None

    def weight(self, u: int, v: int) -> float:
        return float(self._weights[self.edge_id(u, v)])

    @cached_property
    def adjacency(self) -> Tuple[Tuple[Tuple[int, float], ...], ...]:
        """Per-vertex (neighbor, weight) lists sorted by neighbor id"""
        adj: List[List[Tuple[int, float]]] = [[] for _ in range(self._n)]
        for (u, v), w in zip(self._edges, self._weights.tolist()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        return tuple(tuple(sorted(row)) for row in adj)

    def neighbors(self, v: int) -> List[int]:
        return [u for u, _ in self.adjacency[v]]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def to_networkx(self) -> nx.Graph:
        """networkx view of the graph with a ``weight`` edge attribute"""
        nxg = nx.Graph()
        nxg.add_nodes_from(range(self._n))
        nxg.add_weighted_edges_from(
            (u, v, w) for (u, v), w in zip(self._edges, self._weights.tolist())
        )
        return nxg

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def with_weights(self, weights: Sequence[float]) -> "Graph":
        """Same topology, new weights"""
        return Graph(self._n, self._edges, weights, require_connected=False)

    def __repr__(self):
        return f"Graph(n={self._n}, m={self.m})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self._n == other._n and self._edges == other._edges
                and np.array_equal(self._weights, other._weights))

    def __hash__(self):
        return hash((self._n, self._edges))


@dataclass(frozen=True)
class Path:
    """Ordered vertex sequence; consecutive vertices must be adjacent in the graph it is evaluated on"""
    vertices: Tuple[int, ...]

    def __post_init__(self):
        if not self.vertices:
            raise GraphValidationError("A path needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphValidationError(f"Path repeats a vertex: {list(self.vertices)}")

    @property
    def edges(self) -> List[Edge]:
        return [normalize_edge(a, b) for a, b in zip(self.vertices, self.vertices[1:])]

    @property
    def link_length(self) -> int:
        return len(self.vertices) - 1

    def weight(self, g: Graph) -> float:
        """Total weight of the path under g's weights"""
        return float(sum(g.weight(u, v) for u, v in zip(self.vertices, self.vertices[1:])))

    def __len__(self):
        return len(self.vertices)


class DistanceMatrix:
    """
    Symmetric n x n distance matrix with zero diagonal.

    ``allow_unreachable`` admits ``UNREACHABLE`` (inf) entries, which only the
    forest release produces for vertex pairs in different components.
    ``clamped_count`` records how many released values were raised to 0.
    """

    def __init__(self, values: np.ndarray, *, clamped_count: int = 0, allow_unreachable: bool = False):
        values = np.array(values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise GraphValidationError(f"Distance matrix must be square, got shape {values.shape}")
        if np.any(np.isnan(values)):
            raise GraphValidationError("Distance matrix contains NaN")
        if not allow_unreachable and not np.all(np.isfinite(values)):
            raise GraphValidationError("Distance matrix contains unreachable entries")
        if np.any(np.diag(values) != 0):
            raise GraphValidationError("Distance matrix diagonal must be zero")
        if not np.array_equal(values, values.T):
            raise GraphValidationError("Distance matrix must be symmetric")
        values.setflags(write=False)
        self._values = values
        self._clamped_count = int(clamped_count)

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def clamped_count(self) -> int:
        return self._clamped_count

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __getitem__(self, pair: Tuple[int, int]) -> float:
        u, v = pair
        return float(self._values[u, v])

    def is_reachable(self, u: int, v: int) -> bool:
        return bool(np.isfinite(self._values[u, v]))

    def upper_triangle(self) -> np.ndarray:
        """Values of the distinct unordered pairs u < v"""
        iu = np.triu_indices(self.n, k=1)
        return self._values[iu]

    def abs_errors(self, exact: "DistanceMatrix") -> np.ndarray:
        """|d_hat - d| over distinct unordered pairs"""
        if exact.n != self.n:
            raise GraphValidationError(f"Cannot compare {self.n}x{self.n} with {exact.n}x{exact.n}")
        return np.abs(self.upper_triangle() - exact.upper_triangle())

    def __repr__(self):
        return f"DistanceMatrix(n={self.n}, clamped_count={self.clamped_count})"


@dataclass(frozen=True)
class PrivacyBudget:
    """(epsilon, delta) privacy parameters plus gamma, the failure probability of the utility bounds"""
    epsilon: float
    delta: float
    gamma: float

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise PrivacyParameterError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise PrivacyParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.gamma < 1:
            raise PrivacyParameterError(f"gamma must lie in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class NoiseParams:
    """Location (mu) and scale (sigma) of the two Laplace families a mechanism draws from"""
    mu0: float
    sigma0: float
    mu1: float
    sigma1: float
    epsilon_prime: float

    def __post_init__(self):
        if not (self.sigma0 > 0 and self.sigma1 > 0):
            raise PrivacyParameterError(f"Noise scales must be positive, got {self.sigma0}, {self.sigma1}")
        if self.mu0 < 0 or self.mu1 < 0:
            raise PrivacyParameterError(f"Noise shifts must be nonnegative, got {self.mu0}, {self.mu1}")


@dataclass(frozen=True)
class SyntheticGraph:
    """
    Published graph G' = (V, E0 u E1, w').

    ``base`` carries the noisy (clamped) weights; ``shortcut_edges`` is E1, every
    unordered pair inside ``shortcut_vertices``.
    """
    base: Graph
    shortcut_vertices: Tuple[int, ...]
    shortcut_edges: FrozenSet[Edge]
    clamped_count: int = 0
    params: Optional[NoiseParams] = None

    @property
    def original_edges(self) -> List[Edge]:
        """E0, the edges of the input graph that are not shortcuts"""
        return [e for e in self.base.edges if e not in self.shortcut_edges]


@dataclass(frozen=True)
class FvsDecomposition:
    """Feedback vertex set S, the induced forest on V minus S, and the edge partition around S"""
    s: Tuple[int, ...]
    forest: Graph
    forest_vertices: Tuple[int, ...]
    cross_edges: Tuple[Edge, ...]
    s_edges: Tuple[Edge, ...]

    @property
    def k(self) -> int:
        return len(self.s)


@dataclass
class TreeRecord:
    """
    One released partial-path sum of the tree decomposition.

    ``sign`` is -1 for segments that climb toward the root and +1 for
    segments that descend, so root distances are signed sums of records.
    """
    segment: Path
    sign: int = 1
    noisy_sum: float = 0.0


@dataclass
class TreeDecomposition:
    """
    Centroid decomposition of one tree component.

    ``chains[v]`` lists the record indices whose signed sums add up to the
    root-to-v distance, two records per recursion level;
    ``participation[e]`` counts the records whose segment uses e.
    """
    root: int
    released: List[TreeRecord] = field(default_factory=list)
    participation: Dict[Edge, int] = field(default_factory=dict)
    chains: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    @property
    def max_participation(self) -> int:
        return max(self.participation.values(), default=0)

    @property
    def depth(self) -> int:
        """Recursion levels of the deepest centroid"""
        return max((len(c) // 2 for c in self.chains.values()), default=0)


