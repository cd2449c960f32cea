"""
Pure epsilon-DP distance release on trees and forests.

Each tree component is rooted at its smallest vertex id and split by
recursive centroid decomposition. Every component of the recursion releases
the path from its anchor (the parent centroid, or the root at the top level)
to its centroid as two noisy sums, split at the path's highest vertex: the
climb toward the root counts negatively and the descent positively. The noisy
root distance of v is the signed sum of the records on the chain of centroids
that ends at v, and

    d_hat(u, v) = r_hat(u) + r_hat(v) - 2 r_hat(lca(u, v)).

Components at one recursion level are disjoint, so an edge lies on at most
one record per level and at most depth <= floor(log2 n) + 1 records overall.
"""
import logging
from collections import deque
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from dpgraph.exceptions import GraphValidationError, PrivacyParameterError
from dpgraph.models import UNREACHABLE, DistanceMatrix, Graph, Path, TreeDecomposition, TreeRecord
from dpgraph.services.graph_service import GraphService
from dpgraph.services.noise_service import NoiseService

logger = logging.getLogger(__name__)


class LcaIndex:
    """Binary-lifting lowest-common-ancestor table for one rooted tree component"""

    def __init__(self, g: Graph, root: int, vertices: Sequence[int]):
        self.root = root
        self.depth = np.zeros(g.n, dtype=np.int64)
        parent = np.full(g.n, root, dtype=np.int64)

        seen = {root}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    self.depth[y] = self.depth[x] + 1
                    queue.append(y)

        levels = max(1, int(len(vertices)).bit_length())
        self.up = np.empty((levels, g.n), dtype=np.int64)
        self.up[0] = parent
        for j in range(1, levels):
            self.up[j] = self.up[j - 1][self.up[j - 1]]

    def lca_many(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Lowest common ancestors of the pairs (us[i], vs[i])"""
        us = np.array(us, dtype=np.int64)
        vs = np.array(vs, dtype=np.int64)
        swap = self.depth[us] < self.depth[vs]
        us[swap], vs[swap] = vs[swap], us[swap].copy()

        diff = self.depth[us] - self.depth[vs]
        for j in range(self.up.shape[0]):
            lift = ((diff >> j) & 1).astype(bool)
            us[lift] = self.up[j][us[lift]]

        for j in range(self.up.shape[0] - 1, -1, -1):
            differ = self.up[j][us] != self.up[j][vs]
            us[differ] = self.up[j][us[differ]]
            vs[differ] = self.up[j][vs[differ]]
        return np.where(us == vs, us, self.up[0][us])


class TreeReleaseService:
    """Private all-pairs distances on forests"""

    @staticmethod
    def _components(g: Graph) -> List[List[int]]:
        seen: Set[int] = set()
        components = []
        for start in range(g.n):
            if start in seen:
                continue
            comp = []
            seen.add(start)
            queue = deque([start])
            while queue:
                x = queue.popleft()
                comp.append(x)
                for y in g.neighbors(x):
                    if y not in seen:
                        seen.add(y)
                        queue.append(y)
            components.append(sorted(comp))
        return components

    @staticmethod
    def _depths(g: Graph, root: int) -> Dict[int, int]:
        depth = {root: 0}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in g.neighbors(x):
                if y not in depth:
                    depth[y] = depth[x] + 1
                    queue.append(y)
        return depth

    @staticmethod
    def _find_centroid(g: Graph, members: Set[int]) -> int:
        """Smallest-id vertex whose removal leaves pieces of at most |members| / 2 vertices"""
        start = min(members)
        order, parent = [], {start: None}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in g.neighbors(x):
                if y in members and y not in parent:
                    parent[y] = x
                    queue.append(y)

        size = {x: 1 for x in order}
        heaviest = {x: 0 for x in order}
        for x in reversed(order):
            p = parent[x]
            if p is not None:
                size[p] += size[x]
                heaviest[p] = max(heaviest[p], size[x])

        total = len(members)
        centroids = [x for x in order if max(heaviest[x], total - size[x]) * 2 <= total]
        return min(centroids)

    @staticmethod
    def _path_within(g: Graph, allowed: Set[int], source: int, target: int) -> Path:
        """The unique tree path from source to target inside ``allowed``"""
        if source == target:
            return Path((source,))
        parent = {source: None}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            if x == target:
                break
            for y in g.neighbors(x):
                if y in allowed and y not in parent:
                    parent[y] = x
                    queue.append(y)
        vertices = [target]
        while vertices[-1] != source:
            vertices.append(parent[vertices[-1]])
        return Path(tuple(reversed(vertices)))

    @staticmethod
    def decompose(t: Graph, component: Sequence[int]) -> TreeDecomposition:
        """
        Centroid decomposition of one tree component, rooted at its smallest id.

        The records carry segments only; noisy sums are filled in by the release.
        """
        root = min(component)
        depth = TreeReleaseService._depths(t, root)
        decomposition = TreeDecomposition(root=root)
        # (members, anchor, chain of record indices leading to the anchor)
        stack: List[Tuple[Set[int], int, Tuple[int, ...]]] = [(set(component), root, ())]
        while stack:
            members, anchor, chain = stack.pop()
            centroid = TreeReleaseService._find_centroid(t, members)
            segment = TreeReleaseService._path_within(t, members | {anchor}, anchor, centroid)

            # Split at the highest vertex: climb from the anchor, then descend to the centroid
            turn = min(range(len(segment)), key=lambda i: depth[segment.vertices[i]])
            up = TreeRecord(segment=Path(segment.vertices[:turn + 1]), sign=-1)
            down = TreeRecord(segment=Path(segment.vertices[turn:]), sign=1)

            record_id = len(decomposition.released)
            decomposition.released.extend([up, down])
            for e in segment.edges:
                decomposition.participation[e] = decomposition.participation.get(e, 0) + 1
            own_chain = chain + (record_id, record_id + 1)
            decomposition.chains[centroid] = own_chain

            rest = members - {centroid}
            pieces = []
            for y in t.neighbors(centroid):
                if y in rest:
                    piece, queue = {y}, deque([y])
                    while queue:
                        x = queue.popleft()
                        for z in t.neighbors(x):
                            if z in rest and z not in piece:
                                piece.add(z)
                                queue.append(z)
                    pieces.append(piece)
            # Reverse so pieces are processed in neighbor order; keeps record ids deterministic
            for piece in reversed(pieces):
                stack.append((piece, centroid, own_chain))

        for e in t.edges:
            if e[0] in decomposition.chains:
                decomposition.participation.setdefault(e, 0)
        return decomposition

    @staticmethod
    def release_records(t: Graph, decomposition: TreeDecomposition, epsilon: float,
                        rng: Optional[np.random.Generator], noiseless: bool = False) -> float:
        """
        Fill in noisy sums for every record: exact segment weight + Lap(0, L/eps),
        L being the largest edge participation. Zero-length segments release 0.

        Returns:
            float: The Laplace scale used (0 when there is nothing to perturb)
        """
        max_participation = decomposition.max_participation
        scale = max_participation / epsilon if max_participation else 0.0
        with_edges = [r for r in decomposition.released if r.segment.link_length > 0]
        exact = np.array([r.segment.weight(t) for r in with_edges], dtype=np.float64)
        if noiseless or not with_edges:
            noisy = exact
        else:
            noisy = exact + NoiseService.sample_laplace_many(0.0, scale, len(with_edges), rng)
        for record, value in zip(with_edges, noisy.tolist()):
            record.noisy_sum = value
        return scale

    @staticmethod
    def private_tree_apsp(t: Graph, epsilon: float, gamma: float, rng: np.random.Generator,
                          *, _noiseless: bool = False) -> DistanceMatrix:
        """
        epsilon-DP all-pairs distances on a forest.

        Args:
            t (Graph): Forest (may be disconnected)
            epsilon (float): Privacy parameter
            gamma (float): Failure probability used for the logged error scale
            rng (Generator): Random stream; records draw in component, then record order
            _noiseless (bool): Skip the noise (decomposition checks only)

        Returns:
            DistanceMatrix: Released distances; pairs in different components are UNREACHABLE

        Raises:
            GraphValidationError: If t has a cycle
        """
        if not epsilon > 0:
            raise PrivacyParameterError(f"epsilon must be positive, got {epsilon}")
        if not GraphService.is_forest(t):
            raise GraphValidationError(f"Tree release needs a forest, got a cyclic graph with n={t.n}, m={t.m}")

        released = np.full((t.n, t.n), UNREACHABLE)
        for component in TreeReleaseService._components(t):
            decomposition = TreeReleaseService.decompose(t, component)
            scale = TreeReleaseService.release_records(t, decomposition, epsilon, rng, noiseless=_noiseless)
            logger.debug(f"Tree component of {len(component)} vertices: {len(decomposition.released)} records, "
                         f"L={decomposition.max_participation}, scale={scale:.4g}")

            root_estimate = np.zeros(t.n)
            for v, chain in decomposition.chains.items():
                root_estimate[v] = sum(decomposition.released[i].sign * decomposition.released[i].noisy_sum
                                       for i in chain)

            vertices = np.array(component, dtype=np.int64)
            us, vs = np.meshgrid(vertices, vertices, indexing='ij')
            lca = LcaIndex(t, decomposition.root, component).lca_many(us.ravel(), vs.ravel()).reshape(us.shape)
            block = root_estimate[us] + root_estimate[vs] - 2 * root_estimate[lca]
            released[np.ix_(vertices, vertices)] = block

        clamped = int(np.count_nonzero(np.triu(released < 0, k=1)))
        released = np.where(released < 0, 0.0, released)
        np.fill_diagonal(released, 0.0)
        logger.debug(f"Tree release n={t.n}: error scale {NoiseService.tree_error_scale(t.n, epsilon, gamma):.4g}")
        return DistanceMatrix(released, clamped_count=clamped, allow_unreachable=True)
