import logging
from itertools import combinations

import numpy as np

from dpgraph.exceptions import GraphValidationError
from dpgraph.models import Graph, normalize_edge

logger = logging.getLogger(__name__)

# Middle vertices per stage of a multi-stage graph
STAGE_WIDTH = 9


class GeneratorService:
    """Deterministic graph families for experiments and tests; every generator is a pure function of its arguments"""

    @staticmethod
    def _check_weight_bounds(weight_low, weight_high):
        if not (0 <= weight_low < weight_high):
            raise GraphValidationError(
                f"Weight bounds must satisfy 0 <= low < high, got ({weight_low}, {weight_high})"
            )

    @staticmethod
    def gen_multi_stage(stages: int, weight_low: float, weight_high: float, seed: int) -> Graph:
        """
        Chain of stages, each a start vertex, 9 middle vertices, and an end vertex.

        The end of stage i is the start of stage i+1, so n = 10 * stages + 1
        and m = 18 * stages. Stage i starts at vertex 10*i.

        Args:
            stages (int): Number of stages, at least 1
            weight_low (float): Lower bound of the uniform weight distribution
            weight_high (float): Upper bound of the uniform weight distribution
            seed (int): Random seed

        Returns:
            Graph: The multi-stage graph
        """
        if stages < 1:
            raise GraphValidationError(f"A multi-stage graph needs at least one stage, got {stages}")
        GeneratorService._check_weight_bounds(weight_low, weight_high)

        step = STAGE_WIDTH + 1
        edges = []
        for stage in range(stages):
            start = step * stage
            end = start + step
            for mid in range(start + 1, end):
                edges.append((start, mid))
                edges.append((mid, end))

        rng = np.random.default_rng(seed)
        weights = rng.uniform(weight_low, weight_high, size=len(edges))
        return Graph(step * stages + 1, edges, weights)

    @staticmethod
    def stages_for_size(n_target: int) -> int:
        """Stage count whose multi-stage graph has the vertex count closest to n_target"""
        return max(1, int(round((n_target - 1) / (STAGE_WIDTH + 1))))

    @staticmethod
    def gen_random_tree(n: int, weight_low: float, weight_high: float, seed: int) -> Graph:
        """Uniform random attachment tree: vertex v attaches to a uniform vertex among 0..v-1"""
        if n < 1:
            raise GraphValidationError(f"A tree needs at least one vertex, got {n}")
        GeneratorService._check_weight_bounds(weight_low, weight_high)

        rng = np.random.default_rng(seed)
        edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
        weights = rng.uniform(weight_low, weight_high, size=len(edges))
        return Graph(n, edges, weights)

    @staticmethod
    def gen_connected_random(n: int, extra_edges: int, weight_low: float, weight_high: float,
                             seed: int) -> Graph:
        """
        Random attachment tree plus ``extra_edges`` chords chosen uniformly among the missing pairs.

        Raises:
            GraphValidationError: If n < 2 or the chords do not fit in a simple graph
        """
        if n < 2:
            raise GraphValidationError(f"gen_connected_random needs n >= 2, got {n}")
        capacity = n * (n - 1) // 2 - (n - 1)
        if not 0 <= extra_edges <= capacity:
            raise GraphValidationError(
                f"extra_edges={extra_edges} exceeds the {capacity} pairs available for n={n}"
            )
        GeneratorService._check_weight_bounds(weight_low, weight_high)

        rng = np.random.default_rng(seed)
        tree_edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
        present = {normalize_edge(u, v) for u, v in tree_edges}
        chords = []
        if extra_edges:
            candidates = [pair for pair in combinations(range(n), 2) if pair not in present]
            picked = rng.choice(len(candidates), size=extra_edges, replace=False)
            chords = [candidates[i] for i in sorted(int(i) for i in picked)]

        edges = tree_edges + chords
        weights = rng.uniform(weight_low, weight_high, size=len(edges))
        return Graph(n, edges, weights)

    @staticmethod
    def generate(family: str, n_target: int, weight_low: float, weight_high: float, seed: int,
                 extra_edges: int = 0) -> Graph:
        """Dispatch by family name; multi-stage graphs round n_target to 10 * stages + 1"""
        if family == 'multi_stage':
            g = GeneratorService.gen_multi_stage(
                GeneratorService.stages_for_size(n_target), weight_low, weight_high, seed
            )
        elif family == 'tree':
            g = GeneratorService.gen_random_tree(n_target, weight_low, weight_high, seed)
        elif family == 'connected_random':
            g = GeneratorService.gen_connected_random(n_target, extra_edges, weight_low, weight_high, seed)
        else:
            raise GraphValidationError(f"Unknown graph family '{family}'")
        logger.debug(f"Generated {family} graph n={g.n}, m={g.m} (target {n_target}, seed {seed})")
        return g


GRAPH_FAMILIES = ('multi_stage', 'tree', 'connected_random')
