import heapq
import logging
import os
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from dpgraph.exceptions import GraphValidationError, MissingShortcutError
from dpgraph.models import DistanceMatrix, Graph, Path

logger = logging.getLogger(__name__)


class GraphService:
    """Exact shortest-path computations, canonical paths, and edge-list I/O"""

    @staticmethod
    def to_csgraph(g: Graph):
        """
        Sparse adjacency for scipy's csgraph routines.

        Built from a dense matrix with ``null_value=inf`` so zero-weight edges
        (clamped noisy weights) stay explicit edges.
        """
        dense = np.full((g.n, g.n), np.inf)
        if g.m:
            us = np.fromiter((u for u, _ in g.edges), dtype=np.int64, count=g.m)
            vs = np.fromiter((v for _, v in g.edges), dtype=np.int64, count=g.m)
            dense[us, vs] = g.weights
            dense[vs, us] = g.weights
        return csgraph_from_dense(dense, null_value=np.inf)

    @staticmethod
    def distances_from(g: Graph, sources: Sequence[int]) -> np.ndarray:
        """
        Exact distances from each source to every vertex (one label-setting search per source)

        Args:
            g (Graph): Input graph
            sources (sequence): Source vertex ids

        Returns:
            np.ndarray: len(sources) x n array; unreachable vertices are inf
        """
        sources = [int(s) for s in sources]
        if not sources:
            return np.zeros((0, g.n))
        result = dijkstra(GraphService.to_csgraph(g), directed=False, indices=sources)
        return np.atleast_2d(result)

    @staticmethod
    def apsp_exact(g: Graph, *, clamped_count: int = 0) -> DistanceMatrix:
        """
        Exact all-pairs shortest-path distances.

        ``clamped_count`` is carried onto the result when g holds released
        weights that were clamped to 0.

        Each row comes from its own Dijkstra run, so d(u,v) and d(v,u) can
        differ in the last bit; the upper triangle is mirrored to keep the
        matrix exactly symmetric.
        """
        dist = GraphService.distances_from(g, range(g.n))
        upper = np.triu(dist, k=1)
        dist = upper + upper.T
        return DistanceMatrix(dist, clamped_count=clamped_count, allow_unreachable=not g.is_connected())

    @staticmethod
    def shortest_path(g: Graph, u: int, v: int) -> Path:
        """
        One shortest path from u to v.

        Ties between equal-weight predecessors go to the smallest vertex id,
        decided while the target is still unsettled, so the result is
        deterministic.
        """
        if u == v:
            return Path((u,))

        dist = [np.inf] * g.n
        pred: List[Optional[int]] = [None] * g.n
        settled = [False] * g.n
        dist[u] = 0.0
        heap = [(0.0, u)]
        while heap:
            d, x = heapq.heappop(heap)
            if settled[x]:
                continue
            settled[x] = True
            if x == v:
                break
            for y, w in g.adjacency[x]:
                if settled[y]:
                    continue
                nd = d + w
                if nd < dist[y]:
                    dist[y] = nd
                    pred[y] = x
                    heapq.heappush(heap, (nd, y))
                elif nd == dist[y] and pred[y] is not None and x < pred[y]:
                    pred[y] = x

        if not np.isfinite(dist[v]):
            raise GraphValidationError(f"Vertex {v} is not reachable from {u}")

        vertices = [v]
        while vertices[-1] != u:
            vertices.append(pred[vertices[-1]])
        return Path(tuple(reversed(vertices)))

    @staticmethod
    def canonical_path(g: Graph, v1: Iterable[int], u: int, v: int) -> Path:
        """
        Canonical shortest path with respect to the vertex set v1.

        The shortest path is returned unchanged when it holds at most one
        member of v1. Otherwise the part between p and q (the members closest
        to u and to v) is replaced by the single shortcut edge (p, q).

        Args:
            g (Graph): Augmented topology with an edge between every pair in v1
            v1 (iterable): Shortcut vertex set
            u (int): Start vertex
            v (int): End vertex

        Returns:
            Path: The canonical path

        Raises:
            MissingShortcutError: If (p, q) is not an edge of g
        """
        members = set(int(x) for x in v1)
        path = GraphService.shortest_path(g, u, v)
        positions = [i for i, x in enumerate(path.vertices) if x in members]
        if len(positions) <= 1:
            return path

        first, last = positions[0], positions[-1]
        p, q = path.vertices[first], path.vertices[last]
        if not g.has_edge(p, q):
            raise MissingShortcutError(p, q)
        return Path(path.vertices[:first + 1] + path.vertices[last:])

    @staticmethod
    def is_forest(g_sub: Graph) -> bool:
        """True iff the (possibly disconnected) graph has no cycle"""
        return nx.is_forest(g_sub.to_networkx())

    @staticmethod
    def induced_subgraph(g: Graph, keep: Iterable[int]) -> Tuple[Graph, Tuple[int, ...]]:
        """
        Subgraph induced by ``keep``, relabelled to 0..len(keep)-1.

        Returns:
            tuple: (subgraph, old_ids) where old_ids[i] is the original id of new vertex i
        """
        old_ids = tuple(sorted(set(int(x) for x in keep)))
        if not old_ids:
            raise GraphValidationError("Induced subgraph needs at least one vertex")
        new_id = {old: i for i, old in enumerate(old_ids)}
        edges, weights = [], []
        for (a, b), w in zip(g.edges, g.weights.tolist()):
            if a in new_id and b in new_id:
                edges.append((new_id[a], new_id[b]))
                weights.append(w)
        return Graph(len(old_ids), edges, weights, require_connected=False), old_ids

    @staticmethod
    def read_edge_list(path: str) -> Graph:
        """
        Read a graph in edge-list format.

        First line ``n m``, then m lines ``u v w``. Blank lines and lines
        starting with ``#`` are ignored.

        Raises:
            GraphValidationError: Malformed lines, self-loops, duplicates,
                negative weights, or a disconnected graph
        """
        try:
            with open(path, 'r') as f:
                lines = [(i + 1, line.strip()) for i, line in enumerate(f)]
        except OSError as e:
            raise GraphValidationError(f"Cannot read edge list {path}: {str(e)}") from e

        lines = [(no, line) for no, line in lines if line and not line.startswith('#')]
        if not lines:
            raise GraphValidationError(f"{path}: empty edge list")

        header_no, header = lines[0]
        try:
            n, m = (int(tok) for tok in header.split())
        except ValueError:
            raise GraphValidationError(f"{path}:{header_no}: expected header 'n m', got '{header}'") from None

        body = lines[1:]
        if len(body) != m:
            raise GraphValidationError(f"{path}: header announces {m} edges, found {len(body)}")

        edges, weights = [], []
        for no, line in body:
            parts = line.split()
            if len(parts) != 3:
                raise GraphValidationError(f"{path}:{no}: expected 'u v w', got '{line}'")
            try:
                edges.append((int(parts[0]), int(parts[1])))
                weights.append(float(parts[2]))
            except ValueError:
                raise GraphValidationError(f"{path}:{no}: cannot parse '{line}'") from None

        try:
            g = Graph(n, edges, weights)
        except GraphValidationError as e:
            raise GraphValidationError(f"{path}: {str(e)}") from e
        logger.info(f"Read graph with n={g.n}, m={g.m} from {path}")
        return g

    @staticmethod
    def write_edge_list(g: Graph, path: str) -> str:
        """Write g in edge-list format with 17-significant-digit weights"""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w') as f:
            f.write(f"{g.n} {g.m}\n")
            for (u, v), w in zip(g.edges, g.weights.tolist()):
                f.write(f"{u} {v} {w:.17g}\n")
        logger.info(f"Wrote graph with n={g.n}, m={g.m} to {path}")
        return path
