import json
import logging
import math
from itertools import combinations
from typing import Iterable, List, Tuple

import numpy as np

from dpgraph.exceptions import GraphValidationError
from dpgraph.models import DistanceMatrix, Edge, Graph, NoiseParams, PrivacyBudget, SyntheticGraph
from dpgraph.services.graph_service import GraphService
from dpgraph.services.noise_service import NoiseService

logger = logging.getLogger(__name__)


class ShortcutReleaseService:
    """
    Private synthetic-graph release with sqrt(n) shortcut vertices, plus the
    two linear-error baselines it is compared against.
    """

    @staticmethod
    def shortcut_count(n: int) -> int:
        """ceil(sqrt(n)) shortcut vertices"""
        return math.isqrt(n - 1) + 1 if n > 0 else 0

    @staticmethod
    def sample_shortcut_vertices(g: Graph, rng: np.random.Generator) -> Tuple[int, ...]:
        """
        Sample ceil(sqrt(n)) distinct vertices uniformly without replacement.

        Returns:
            tuple: Sorted vertex ids
        """
        if g.n < 4:
            raise GraphValidationError(f"Shortcut sampling needs n >= 4, got n={g.n}")
        count = ShortcutReleaseService.shortcut_count(g.n)
        picked = rng.choice(g.n, size=count, replace=False)
        return tuple(sorted(int(v) for v in picked))

    @staticmethod
    def _clamp(weights: np.ndarray) -> Tuple[np.ndarray, int]:
        negative = weights < 0
        count = int(np.count_nonzero(negative))
        if count:
            weights = np.where(negative, 0.0, weights)
        return weights, count

    @staticmethod
    def release_synthetic_graph(g: Graph, budget: PrivacyBudget, rng: np.random.Generator,
                                shifted: bool = True) -> SyntheticGraph:
        """
        Build the private synthetic graph G' = (V, E0 u E1, w').

        Steps:
            1. Sample the shortcut set V1 and connect every pair (E1).
            2. Each shortcut edge gets its exact distance in g plus Lap(mu1, sigma1).
            3. Each remaining original edge (E0 = E minus E1) gets w(e) + Lap(mu0, sigma0).
            4. Negative weights are clamped to 0 and counted.

        Draw order is fixed: the V1 sample, then E1 in lexicographic pair
        order, then E0 in the input's edge order.

        Args:
            g (Graph): Connected input graph with n >= 4
            budget (PrivacyBudget): Privacy parameters
            rng (Generator): Random stream
            shifted (bool): False draws centered noise (mu0 = mu1 = 0) for comparison runs

        Returns:
            SyntheticGraph: The publishable graph
        """
        params = NoiseService.alg1_noise_params(g.n, budget)
        if not shifted:
            params = NoiseParams(mu0=0.0, sigma0=params.sigma0, mu1=0.0, sigma1=params.sigma1,
                                 epsilon_prime=params.epsilon_prime)

        v1 = ShortcutReleaseService.sample_shortcut_vertices(g, rng)
        e1: List[Edge] = list(combinations(v1, 2))

        exact = GraphService.distances_from(g, v1)
        position = {v: i for i, v in enumerate(v1)}
        e1_exact = np.array([exact[position[u], v] for u, v in e1], dtype=np.float64)
        e1_weights = e1_exact + NoiseService.sample_laplace_many(params.mu1, params.sigma1, len(e1), rng)

        shortcut_set = frozenset(e1)
        e0_ids = [i for i, e in enumerate(g.edges) if e not in shortcut_set]
        e0: List[Edge] = [g.edges[i] for i in e0_ids]
        e0_weights = g.weights[e0_ids] + NoiseService.sample_laplace_many(params.mu0, params.sigma0, len(e0), rng)

        weights, clamped = ShortcutReleaseService._clamp(np.concatenate([e0_weights, e1_weights]))
        if clamped:
            logger.warning(f"Clamped {clamped} negative synthetic weights to 0 (n={g.n})")

        base = Graph(g.n, e0 + e1, weights)
        logger.debug(f"Synthetic graph: |V1|={len(v1)}, |E0|={len(e0)}, |E1|={len(e1)}, shifted={shifted}")
        return SyntheticGraph(base=base, shortcut_vertices=v1, shortcut_edges=shortcut_set,
                              clamped_count=clamped, params=params)

    @staticmethod
    def answer_all_pairs(sg: SyntheticGraph) -> DistanceMatrix:
        """Released distances: exact APSP over the noisy weights of the synthetic graph"""
        return GraphService.apsp_exact(sg.base, clamped_count=sg.clamped_count)

    @staticmethod
    def true_weight_topology(g: Graph, sg: SyntheticGraph) -> Graph:
        """
        The synthetic topology E0 u E1 carrying true weights: original edges
        keep w(e), shortcut edges carry the exact distance in g.
        """
        v1 = sg.shortcut_vertices
        exact = GraphService.distances_from(g, v1)
        position = {v: i for i, v in enumerate(v1)}
        weights = []
        for u, v in sg.base.edges:
            if (u, v) in sg.shortcut_edges:
                weights.append(exact[position[u], v])
            else:
                weights.append(g.weight(u, v))
        return Graph(g.n, sg.base.edges, weights)

    @staticmethod
    def canonical_noisy_weight(g: Graph, sg: SyntheticGraph, u: int, v: int, true_topology: Graph = None) -> float:
        """
        Noisy weight d(P^{V1}_{u,v}, w') of the canonical path found with true weights.

        The released distance never exceeds this value.
        """
        if true_topology is None:
            true_topology = ShortcutReleaseService.true_weight_topology(g, sg)
        path = GraphService.canonical_path(true_topology, sg.shortcut_vertices, u, v)
        return path.weight(sg.base)

    @staticmethod
    def baseline_edge_laplace(g: Graph, epsilon: float, rng: np.random.Generator) -> DistanceMatrix:
        """
        Add centered Lap(1/eps) noise to every edge, clamp negatives to 0,
        and answer with exact APSP on the noisy graph.
        """
        noise = NoiseService.sample_laplace_many(0.0, 1 / epsilon, g.m, rng)
        weights, clamped = ShortcutReleaseService._clamp(g.weights + noise)
        return GraphService.apsp_exact(g.with_weights(weights), clamped_count=clamped)

    @staticmethod
    def output_perturbation_scale(n: int, budget: PrivacyBudget) -> float:
        """Per-pair Laplace scale sqrt(8 K ln(1/delta)) / eps with K = n(n-1)/2 sensitivity-1 queries"""
        pairs = n * (n - 1) // 2
        return 1 / NoiseService.compose_advanced(budget.epsilon, max(pairs, 1), budget.delta)

    @staticmethod
    def baseline_output_perturbation(g: Graph, budget: PrivacyBudget, rng: np.random.Generator) -> DistanceMatrix:
        """
        Exact APSP with centered Laplace noise on each of the n(n-1)/2 pair
        distances; the matrix is mirrored, negatives clamped to 0, and the
        diagonal kept at 0.
        """
        exact = GraphService.apsp_exact(g).values
        scale = ShortcutReleaseService.output_perturbation_scale(g.n, budget)
        iu = np.triu_indices(g.n, k=1)
        noisy_upper = exact[iu] + NoiseService.sample_laplace_many(0.0, scale, len(iu[0]), rng)
        noisy_upper, clamped = ShortcutReleaseService._clamp(noisy_upper)

        released = np.zeros((g.n, g.n))
        released[iu] = noisy_upper
        released = released + released.T
        return DistanceMatrix(released, clamped_count=clamped)

    @staticmethod
    def write_synthetic_graph(sg: SyntheticGraph, path: str) -> Tuple[str, str]:
        """
        Publish the synthetic graph: edge list at ``path`` and a JSON sidecar
        ``path + '.meta.json'`` with the shortcut vertices, clamped count and
        noise parameters.
        """
        GraphService.write_edge_list(sg.base, path)
        meta_path = f"{path}.meta.json"
        meta = {
            'shortcut_vertices': list(sg.shortcut_vertices),
            'clamped_count': sg.clamped_count,
            'noise_params': None if sg.params is None else {
                'mu0': sg.params.mu0, 'sigma0': sg.params.sigma0,
                'mu1': sg.params.mu1, 'sigma1': sg.params.sigma1,
                'epsilon_prime': sg.params.epsilon_prime,
            },
        }
        with open(meta_path, 'w') as f:
            json.dump(meta, f, indent=2)
        logger.info(f"Published synthetic graph to {path} (sidecar {meta_path})")
        return path, meta_path

    @staticmethod
    def read_synthetic_graph(path: str) -> SyntheticGraph:
        """Read a graph published by write_synthetic_graph"""
        base = GraphService.read_edge_list(path)
        meta_path = f"{path}.meta.json"
        try:
            with open(meta_path, 'r') as f:
                meta = json.load(f)
        except (OSError, ValueError) as e:
            raise GraphValidationError(f"Cannot read sidecar {meta_path}: {str(e)}") from e

        v1 = tuple(sorted(int(v) for v in meta.get('shortcut_vertices', [])))
        shortcuts = frozenset(combinations(v1, 2))
        missing = [e for e in shortcuts if not base.has_edge(*e)]
        if missing:
            raise GraphValidationError(f"{path}: shortcut edges {missing[:3]} missing from edge list")
        params = meta.get('noise_params')
        return SyntheticGraph(
            base=base,
            shortcut_vertices=v1,
            shortcut_edges=shortcuts,
            clamped_count=int(meta.get('clamped_count', 0)),
            params=NoiseParams(**params) if params else None,
        )

    @staticmethod
    def long_path_hits(path_vertices: Iterable[int], shortcut_vertices: Iterable[int]) -> int:
        """Number of shortcut vertices on a path"""
        members = set(shortcut_vertices)
        return sum(1 for v in path_vertices if v in members)
