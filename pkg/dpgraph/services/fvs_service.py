import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx

from dpgraph.config import Config
from dpgraph.exceptions import GraphValidationError
from dpgraph.models import FvsDecomposition, Graph
from dpgraph.services.graph_service import GraphService

logger = logging.getLogger(__name__)


class FvsService:
    """Feedback vertex sets: the 2-approximation used by the release, an exact oracle, and the edge partition"""

    @staticmethod
    def _is_forest_without(nxg: nx.Graph, removed: Iterable[int]) -> bool:
        removed = set(removed)
        keep = [v for v in nxg.nodes if v not in removed]
        if not keep:
            return True
        return nx.is_forest(nxg.subgraph(keep))

    @staticmethod
    def _prune_low_degree(adj: Dict[int, Set[int]]):
        """Repeatedly drop vertices of degree <= 1; they lie on no cycle"""
        queue = [v for v, nbrs in adj.items() if len(nbrs) <= 1]
        while queue:
            v = queue.pop()
            if v not in adj:
                continue
            for u in adj.pop(v):
                adj[u].discard(v)
                if len(adj[u]) <= 1:
                    queue.append(u)

    @staticmethod
    def compute_fvs_2approx(g: Graph) -> Tuple[int, ...]:
        """
        Local-ratio 2-approximation of a minimum feedback vertex set.

        Each round prunes vertices of degree <= 1, lowers every weight w(v)
        by gamma * (d(v) - 1) with gamma = min w(v) / (d(v) - 1), and moves
        the vertices that reach weight 0 into the solution. A final reverse
        pass drops every vertex the rest of the solution makes redundant.
        Weights are exact fractions, so ties are decided by vertex id.

        Args:
            g (Graph): Input graph (a tree gives the empty set)

        Returns:
            tuple: Sorted vertex ids whose removal leaves a forest
        """
        adj = {v: set(g.neighbors(v)) for v in range(g.n)}
        weight = {v: Fraction(1) for v in range(g.n)}
        chosen: List[int] = []

        while True:
            FvsService._prune_low_degree(adj)
            if not adj:
                break
            gamma = min(weight[v] / (len(nbrs) - 1) for v, nbrs in adj.items())
            for v, nbrs in adj.items():
                weight[v] -= gamma * (len(nbrs) - 1)
            for v in sorted(v for v in adj if weight[v] == 0):
                chosen.append(v)
                for u in adj.pop(v):
                    adj[u].discard(v)

        nxg = g.to_networkx()
        solution = list(chosen)
        for v in reversed(chosen):
            rest = [x for x in solution if x != v]
            if FvsService._is_forest_without(nxg, rest):
                solution = rest

        logger.debug(f"FVS 2-approximation on n={g.n}: {len(chosen)} candidates, {len(solution)} kept")
        return tuple(sorted(solution))

    @staticmethod
    def brute_force_min_fvs(g: Graph, max_n: Optional[int] = None) -> Tuple[int, ...]:
        """
        Exact minimum feedback vertex set by exhaustive search over subsets in
        increasing size, lexicographic order within a size.

        Raises:
            GraphValidationError: If g has more vertices than the search allows
        """
        limit = Config.BRUTE_FORCE_FVS_MAX_N if max_n is None else max_n
        if g.n > limit:
            raise GraphValidationError(f"Brute-force FVS is limited to n <= {limit}, got n={g.n}")

        nxg = g.to_networkx()
        for size in range(g.n + 1):
            for subset in combinations(range(g.n), size):
                if FvsService._is_forest_without(nxg, subset):
                    return subset
        return tuple(range(g.n))

    @staticmethod
    def decompose(g: Graph, s: Optional[Iterable[int]] = None) -> FvsDecomposition:
        """
        Split g around a feedback vertex set.

        Args:
            g (Graph): Input graph
            s (iterable): FVS to use; computed with compute_fvs_2approx when omitted

        Returns:
            FvsDecomposition: S, the relabelled forest on V minus S, and the edges touching S

        Raises:
            GraphValidationError: If removing s does not leave a forest
        """
        s = FvsService.compute_fvs_2approx(g) if s is None else tuple(sorted(set(int(v) for v in s)))
        members = set(s)
        keep = [v for v in range(g.n) if v not in members]
        if not keep:
            raise GraphValidationError("Feedback vertex set covers every vertex")

        forest, forest_vertices = GraphService.induced_subgraph(g, keep)
        if not GraphService.is_forest(forest):
            raise GraphValidationError(f"Removing {list(s)} leaves a cycle")

        cross_edges = tuple(e for e in g.edges if (e[0] in members) != (e[1] in members))
        s_edges = tuple(e for e in g.edges if e[0] in members and e[1] in members)
        return FvsDecomposition(s=s, forest=forest, forest_vertices=forest_vertices,
                                cross_edges=cross_edges, s_edges=s_edges)
