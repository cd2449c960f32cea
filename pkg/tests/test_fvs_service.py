import unittest
from itertools import combinations

import numpy as np

from dpgraph.exceptions import GraphValidationError
from dpgraph.models import Graph
from dpgraph.services.fvs_service import FvsService
from dpgraph.services.generator_service import GeneratorService
from dpgraph.services.graph_service import GraphService


def complete_graph(n):
    return Graph(n, list(combinations(range(n), 2)))


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def two_triangles():
    return Graph(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])


def leaves_forest(g, s):
    keep = [v for v in range(g.n) if v not in set(s)]
    if not keep:
        return True
    sub, _ = GraphService.induced_subgraph(g, keep)
    return GraphService.is_forest(sub)


class TestApproximateFvs(unittest.TestCase):
    def test_tree_needs_nothing(self):
        self.assertEqual(FvsService.compute_fvs_2approx(GeneratorService.gen_random_tree(30, 1, 2, seed=1)), ())

    def test_triangle(self):
        self.assertEqual(FvsService.compute_fvs_2approx(complete_graph(3)), (0,))

    def test_k4(self):
        self.assertEqual(FvsService.compute_fvs_2approx(complete_graph(4)), (0, 1))

    def test_cycle(self):
        self.assertEqual(FvsService.compute_fvs_2approx(cycle_graph(5)), (0,))

    def test_tree_with_chords(self):
        g = GeneratorService.gen_connected_random(60, 5, 1.0, 2.0, seed=3)
        s = FvsService.compute_fvs_2approx(g)
        self.assertTrue(1 <= len(s) <= 10)
        self.assertTrue(leaves_forest(g, s))

    def test_valid_and_within_factor_two(self):
        rng = np.random.default_rng(21)
        for trial in range(100):
            n = int(rng.integers(4, 13))
            capacity = n * (n - 1) // 2 - (n - 1)
            extra = int(rng.integers(0, min(capacity, 10) + 1))
            g = GeneratorService.gen_connected_random(n, extra, 1.0, 2.0, seed=trial)

            approx = FvsService.compute_fvs_2approx(g)
            optimum = FvsService.brute_force_min_fvs(g)
            self.assertTrue(leaves_forest(g, approx), f"trial {trial}: {approx} leaves a cycle")
            self.assertLessEqual(len(approx), 2 * len(optimum), f"trial {trial}")


class TestExactFvs(unittest.TestCase):
    def test_tree(self):
        self.assertEqual(FvsService.brute_force_min_fvs(GeneratorService.gen_random_tree(12, 1, 2, seed=0)), ())

    def test_triangle(self):
        self.assertEqual(len(FvsService.brute_force_min_fvs(complete_graph(3))), 1)

    def test_two_triangles(self):
        self.assertEqual(FvsService.brute_force_min_fvs(two_triangles()), (0, 3))

    def test_k5(self):
        self.assertEqual(FvsService.brute_force_min_fvs(complete_graph(5)), (0, 1, 2))

    def test_size_guard(self):
        with self.assertRaises(GraphValidationError):
            FvsService.brute_force_min_fvs(cycle_graph(21))
        with self.assertRaises(GraphValidationError):
            FvsService.brute_force_min_fvs(cycle_graph(8), max_n=6)


class TestDecomposition(unittest.TestCase):
    def test_edge_partition(self):
        g = GeneratorService.gen_connected_random(40, 6, 1.0, 5.0, seed=5)
        decomposition = FvsService.decompose(g)
        s = set(decomposition.s)

        self.assertTrue(GraphService.is_forest(decomposition.forest))
        self.assertEqual(len(decomposition.forest_vertices), g.n - decomposition.k)
        self.assertFalse(s & set(decomposition.forest_vertices))

        forest_edges = {(decomposition.forest_vertices[a], decomposition.forest_vertices[b])
                        for a, b in decomposition.forest.edges}
        parts = [forest_edges, set(decomposition.cross_edges), set(decomposition.s_edges)]
        self.assertEqual(sum(len(p) for p in parts), g.m)
        self.assertEqual(set().union(*parts), set(g.edges))
        self.assertTrue(all((a in s) != (b in s) for a, b in decomposition.cross_edges))
        self.assertTrue(all(a in s and b in s for a, b in decomposition.s_edges))

    def test_forest_keeps_weights(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)], [1.0, 2.0, 3.0, 4.0])
        decomposition = FvsService.decompose(g, s=[0])
        self.assertEqual(decomposition.forest_vertices, (1, 2, 3))
        self.assertEqual(list(decomposition.forest.weights), [2.0, 4.0])
        self.assertEqual(decomposition.cross_edges, ((0, 1), (0, 2)))
        self.assertEqual(decomposition.s_edges, ())

    def test_tree_has_empty_fvs(self):
        g = GeneratorService.gen_random_tree(15, 1.0, 2.0, seed=2)
        decomposition = FvsService.decompose(g)
        self.assertEqual(decomposition.k, 0)
        self.assertEqual(decomposition.forest, g)

    def test_invalid_set_rejected(self):
        with self.assertRaises(GraphValidationError):
            FvsService.decompose(complete_graph(4), s=[0])
        with self.assertRaises(GraphValidationError):
            FvsService.decompose(complete_graph(3), s=[0, 1, 2])


if __name__ == '__main__':
    unittest.main()
