import unittest

import numpy as np
import pytest

from dpgraph.exceptions import GraphValidationError, PrivacyParameterError
from dpgraph.models import (DistanceMatrix, Graph, NoiseParams, Path, PrivacyBudget, UNREACHABLE,
                            normalize_edge)


class TestGraph(unittest.TestCase):
    def test_edges_are_normalized(self):
        g = Graph(3, [(1, 0), (2, 1)], [1.0, 2.0])
        self.assertEqual(g.edges, ((0, 1), (1, 2)))
        self.assertEqual(g.weight(1, 0), 1.0)
        self.assertTrue(g.has_edge(2, 1))
        self.assertFalse(g.has_edge(0, 2))
        self.assertEqual(normalize_edge(5, 2), (2, 5))

    def test_rejects_self_loop(self):
        with self.assertRaises(GraphValidationError):
            Graph(2, [(0, 0), (0, 1)])

    def test_rejects_duplicate_edge(self):
        with self.assertRaises(GraphValidationError):
            Graph(2, [(0, 1), (1, 0)])

    def test_rejects_negative_and_non_finite_weights(self):
        with self.assertRaises(GraphValidationError):
            Graph(2, [(0, 1)], [-1.0])
        with self.assertRaises(GraphValidationError):
            Graph(2, [(0, 1)], [float('inf')])

    def test_rejects_vertex_out_of_range(self):
        with self.assertRaises(GraphValidationError):
            Graph(2, [(0, 2)])

    def test_rejects_disconnected_unless_allowed(self):
        with self.assertRaises(GraphValidationError):
            Graph(4, [(0, 1), (2, 3)])
        forest = Graph(4, [(0, 1), (2, 3)], require_connected=False)
        self.assertFalse(forest.is_connected())

    def test_weights_are_read_only(self):
        g = Graph(2, [(0, 1)], [3.0])
        with self.assertRaises(ValueError):
            g.weights[0] = 1.0

    def test_adjacency_sorted_by_neighbor(self):
        g = Graph(4, [(0, 3), (0, 1), (0, 2)], [3.0, 1.0, 2.0])
        self.assertEqual(g.neighbors(0), [1, 2, 3])
        self.assertEqual(g.degree(0), 3)

    def test_with_weights_keeps_topology(self):
        g = Graph(3, [(0, 1), (1, 2)], [1.0, 1.0])
        h = g.with_weights([5.0, 6.0])
        self.assertEqual(h.edges, g.edges)
        self.assertEqual(h.weight(1, 2), 6.0)
        self.assertNotEqual(g, h)


class TestPath(unittest.TestCase):
    def test_weight_and_link_length(self):
        g = Graph(3, [(0, 1), (1, 2)], [1.5, 2.5])
        path = Path((0, 1, 2))
        self.assertEqual(path.link_length, 2)
        self.assertEqual(path.weight(g), 4.0)
        self.assertEqual(path.edges, [(0, 1), (1, 2)])

    def test_rejects_repeated_vertex(self):
        with self.assertRaises(GraphValidationError):
            Path((0, 1, 0))


class TestDistanceMatrix(unittest.TestCase):
    def test_rejects_asymmetric(self):
        with self.assertRaises(GraphValidationError):
            DistanceMatrix([[0.0, 1.0], [2.0, 0.0]])

    def test_rejects_nonzero_diagonal(self):
        with self.assertRaises(GraphValidationError):
            DistanceMatrix([[1.0, 1.0], [1.0, 0.0]])

    def test_unreachable_needs_opt_in(self):
        values = [[0.0, UNREACHABLE], [UNREACHABLE, 0.0]]
        with self.assertRaises(GraphValidationError):
            DistanceMatrix(values)
        dm = DistanceMatrix(values, allow_unreachable=True)
        self.assertFalse(dm.is_reachable(0, 1))

    def test_abs_errors_over_pairs(self):
        exact = DistanceMatrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        released = DistanceMatrix([[0, 1.5, 2], [1.5, 0, 0.25], [2, 0.25, 0]])
        np.testing.assert_allclose(released.abs_errors(exact), [0.5, 0.0, 0.75])

    def test_clamped_count_is_read_only(self):
        dm = DistanceMatrix([[0.0, 1.0], [1.0, 0.0]], clamped_count=2)
        self.assertEqual(dm.clamped_count, 2)
        with self.assertRaises(AttributeError):
            dm.clamped_count = 0


class TestPrivacyParameters(unittest.TestCase):
    def test_budget_validation(self):
        PrivacyBudget(epsilon=1.0, delta=0.01, gamma=0.01)
        for eps, delta, gamma in [(0.0, 0.01, 0.01), (1.0, 0.0, 0.01), (1.0, 1.0, 0.01), (1.0, 0.01, 1.5)]:
            with pytest.raises(PrivacyParameterError):
                PrivacyBudget(epsilon=eps, delta=delta, gamma=gamma)

    def test_noise_params_need_positive_scales(self):
        with self.assertRaises(PrivacyParameterError):
            NoiseParams(mu0=0.0, sigma0=0.0, mu1=0.0, sigma1=1.0, epsilon_prime=1.0)


if __name__ == '__main__':
    unittest.main()
