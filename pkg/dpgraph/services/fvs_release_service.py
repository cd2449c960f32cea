"""
Private all-pairs distances for graphs with a small feedback vertex set S.

The budget is split three ways (eps' = eps / 3) between the forest release on
V minus S, the noisy exact distances between S vertices, and the noisy weights
of the edges that join S to the forest. The remaining entries are assembled by
post-processing: minima over paths that enter S through a cross edge or pass
through S.
"""
import logging
from itertools import combinations
from typing import Tuple

import numpy as np

from dpgraph.models import DistanceMatrix, FvsDecomposition, Graph, PrivacyBudget
from dpgraph.services.fvs_service import FvsService
from dpgraph.services.graph_service import GraphService
from dpgraph.services.noise_service import NoiseService
from dpgraph.services.tree_release_service import TreeReleaseService

logger = logging.getLogger(__name__)


class FvsReleaseService:
    """Feedback-vertex-set release and its combination steps"""

    @staticmethod
    def noisy_s_distances(g: Graph, s: Tuple[int, ...], sigma1: float, rng: np.random.Generator) -> np.ndarray:
        """
        k x k matrix of exact distances in g between S vertices plus Lap(0, sigma1),
        drawn once per unordered pair in lexicographic order.
        """
        k = len(s)
        released = np.zeros((k, k))
        if k < 2:
            return released
        exact = GraphService.distances_from(g, s)
        pairs = list(combinations(range(k), 2))
        noise = NoiseService.sample_laplace_many(0.0, sigma1, len(pairs), rng)
        for (i, j), z in zip(pairs, noise.tolist()):
            released[i, j] = released[j, i] = exact[i, s[j]] + z
        return released

    @staticmethod
    def forest_to_s_via_cross_edges(forest_d: np.ndarray, decomposition: FvsDecomposition,
                                    noisy_cross: np.ndarray) -> np.ndarray:
        """
        Estimates d_hat(u, v) for u outside S and v in S through the last cross edge:
        min over p adjacent to v of d_hat_forest(u, p) + w'(p, v).

        Unreachable forest entries are inf and drop out of the minimum.

        Returns:
            np.ndarray: |V minus S| x k matrix (inf where v has no cross edge into u's component)
        """
        forest_index = {v: i for i, v in enumerate(decomposition.forest_vertices)}
        s_index = {v: j for j, v in enumerate(decomposition.s)}
        estimates = np.full((len(decomposition.forest_vertices), decomposition.k), np.inf)
        for (a, b), w in zip(decomposition.cross_edges, noisy_cross.tolist()):
            p, v = (a, b) if b in s_index else (b, a)
            col = s_index[v]
            estimates[:, col] = np.minimum(estimates[:, col], forest_d[:, forest_index[p]] + w)
        return estimates

    @staticmethod
    def refine_through_s(forest_to_s: np.ndarray, s_d: np.ndarray) -> np.ndarray:
        """
        min(previous, min over p in S of d_hat(u, p) + d_hat(p, v)) for u outside S, v in S.

        Reads a snapshot of the previous estimates, so the result does not
        depend on the order of p.
        """
        previous = forest_to_s
        refined = previous.copy()
        for p in range(s_d.shape[0]):
            refined = np.minimum(refined, previous[:, [p]] + s_d[[p], :])
        return refined

    @staticmethod
    def combine_forest_pairs(forest_d: np.ndarray, forest_to_s: np.ndarray) -> np.ndarray:
        """min(forest estimate, min over p in S of d_hat(u, p) + d_hat(p, v)) for u, v outside S"""
        combined = forest_d.copy()
        for p in range(forest_to_s.shape[1]):
            column = forest_to_s[:, p]
            combined = np.minimum(combined, column[:, None] + column[None, :])
        return combined

    @staticmethod
    def fvs_private_apsp_with_diagnostics(g: Graph, budget: PrivacyBudget,
                                          rng: np.random.Generator) -> Tuple[DistanceMatrix, FvsDecomposition]:
        """
        Release all-pairs distances through a feedback vertex set.

        Steps:
            1. S from compute_fvs_2approx.
            2. Forest release on V minus S with eps / 3.
            3. Exact S-pair distances in g + Lap(0, sigma1).
            4. Cross edges + Lap(0, sigma0); forest-to-S estimates through the last cross edge.
            5. Forest-to-S estimates refined through S.
            6. Forest pairs refined through S.

        Draw order: the forest release, then S pairs, then cross edges in edge order.

        Args:
            g (Graph): Connected input graph
            budget (PrivacyBudget): Privacy parameters
            rng (Generator): Random stream

        Returns:
            tuple: (DistanceMatrix, FvsDecomposition)
        """
        decomposition = FvsService.decompose(g)
        s, k = decomposition.s, decomposition.k
        if k * k >= g.n:
            logger.warning(f"FVS size {k} >= sqrt(n) for n={g.n}; the shortcut mechanism has the better bound here")

        params = NoiseService.alg2_noise_params(k, budget)
        forest_release = TreeReleaseService.private_tree_apsp(
            decomposition.forest, params.epsilon_prime, budget.gamma, rng
        )
        forest_d = np.array(forest_release.values)

        s_d = FvsReleaseService.noisy_s_distances(g, s, params.sigma1, rng)

        cross_exact = np.array([g.weight(u, v) for u, v in decomposition.cross_edges], dtype=np.float64)
        noisy_cross = cross_exact + NoiseService.sample_laplace_many(
            0.0, params.sigma0, len(decomposition.cross_edges), rng
        )

        forest_to_s = FvsReleaseService.forest_to_s_via_cross_edges(forest_d, decomposition, noisy_cross)
        forest_to_s = FvsReleaseService.refine_through_s(forest_to_s, s_d)
        forest_pairs = FvsReleaseService.combine_forest_pairs(forest_d, forest_to_s)

        released = np.zeros((g.n, g.n))
        fv = np.array(decomposition.forest_vertices, dtype=np.int64)
        sv = np.array(s, dtype=np.int64)
        released[np.ix_(fv, fv)] = forest_pairs
        if k:
            released[np.ix_(fv, sv)] = forest_to_s
            released[np.ix_(sv, fv)] = forest_to_s.T
            released[np.ix_(sv, sv)] = s_d

        # One value per unordered pair, taken from the upper triangle
        upper = np.triu(released, k=1)
        released = upper + upper.T
        negative = released < 0
        clamped = int(np.count_nonzero(np.triu(negative, k=1)))
        released = np.where(negative, 0.0, released)
        np.fill_diagonal(released, 0.0)

        logger.debug(f"FVS release n={g.n}, k={k}, cross edges={len(decomposition.cross_edges)}, clamped={clamped}")
        return DistanceMatrix(released, clamped_count=clamped), decomposition

    @staticmethod
    def fvs_private_apsp(g: Graph, budget: PrivacyBudget, rng: np.random.Generator) -> DistanceMatrix:
        """Released distance matrix of fvs_private_apsp_with_diagnostics"""
        released, _ = FvsReleaseService.fvs_private_apsp_with_diagnostics(g, budget, rng)
        return released
