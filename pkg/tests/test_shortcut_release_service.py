import math
import os
import tempfile
import unittest
from dataclasses import replace

import numpy as np

from dpgraph.exceptions import GraphValidationError
from dpgraph.models import Graph, PrivacyBudget
from dpgraph.services.generator_service import GeneratorService
from dpgraph.services.graph_service import GraphService
from dpgraph.services.noise_service import NoiseService
from dpgraph.services.shortcut_release_service import ShortcutReleaseService

BUDGET = PrivacyBudget(epsilon=1.0, delta=0.01, gamma=0.01)


class TestShortcutSampling(unittest.TestCase):
    def test_shortcut_counts(self):
        self.assertEqual(ShortcutReleaseService.shortcut_count(100), 10)
        self.assertEqual(ShortcutReleaseService.shortcut_count(101), 11)
        self.assertEqual(ShortcutReleaseService.shortcut_count(4), 2)

    def test_sample_is_sorted_and_distinct(self):
        g = GeneratorService.gen_random_tree(101, 1.0, 2.0, seed=0)
        v1 = ShortcutReleaseService.sample_shortcut_vertices(g, np.random.default_rng(1))
        self.assertEqual(len(v1), 11)
        self.assertEqual(list(v1), sorted(set(v1)))

    def test_small_graph_rejected(self):
        with self.assertRaises(GraphValidationError):
            ShortcutReleaseService.sample_shortcut_vertices(Graph(3, [(0, 1), (1, 2)]), np.random.default_rng(0))

    def test_long_segment_is_hit(self):
        n, gamma = 2500, 0.01
        g = Graph(n, [(i, i + 1) for i in range(n - 1)])
        length = math.ceil(math.sqrt(n) * math.log(n ** 2 / gamma))
        self.assertEqual(length, 1013)
        segment = range(700, 700 + length)

        rng = np.random.default_rng(12)
        misses = 0
        for _ in range(200):
            v1 = ShortcutReleaseService.sample_shortcut_vertices(g, rng)
            if ShortcutReleaseService.long_path_hits(segment, v1) == 0:
                misses += 1
        self.assertEqual(misses, 0)

    def test_long_shortest_path_holds_two_shortcut_vertices(self):
        n, gamma = 2500, 0.01
        g = Graph(n, [(i, i + 1) for i in range(n - 1)])
        edges = math.floor(2 * math.sqrt(n) * math.log(n ** 2 / gamma)) + 1
        path = GraphService.shortest_path(g, 300, 300 + edges)
        self.assertEqual(path.link_length, edges)

        rng = np.random.default_rng(13)
        draws = 200
        short = sum(
            ShortcutReleaseService.long_path_hits(path.vertices, ShortcutReleaseService.sample_shortcut_vertices(g, rng)) < 2
            for _ in range(draws)
        )
        # Allowed failure rate 2 gamma / n^2 is far below one draw in 200
        self.assertLessEqual(short / draws, 2 * gamma / n ** 2)


class TestSyntheticGraph(unittest.TestCase):
    def setUp(self):
        self.g = GeneratorService.gen_multi_stage(10, 2000, 3000, seed=4)

    def release(self, seed, **kwargs):
        return ShortcutReleaseService.release_synthetic_graph(self.g, BUDGET, NoiseService.substream(seed, 0), **kwargs)

    def test_edge_partition(self):
        sg = self.release(1)
        v1 = sg.shortcut_vertices
        self.assertEqual(len(sg.shortcut_edges), len(v1) * (len(v1) - 1) // 2)
        self.assertTrue(all(sg.base.has_edge(*e) for e in sg.shortcut_edges))
        self.assertFalse(set(sg.original_edges) & sg.shortcut_edges)
        self.assertEqual(set(sg.base.edges), set(self.g.edges) | sg.shortcut_edges)
        self.assertTrue(np.all(sg.base.weights >= 0))

    def test_same_seed_same_graph(self):
        a, b = self.release(3), self.release(3)
        self.assertEqual(a.base, b.base)
        self.assertEqual(a.shortcut_vertices, b.shortcut_vertices)
        self.assertNotEqual(a.base, self.release(4).base)

    def test_shortcut_weights_stay_above_truth(self):
        sg = self.release(5)
        exact = GraphService.apsp_exact(self.g)
        below = [e for e in sg.shortcut_edges if sg.base.weight(*e) < exact[e]]
        self.assertEqual(below, [])

    def test_clamping_is_rare_with_shifted_noise(self):
        g = GeneratorService.gen_connected_random(100, 50, 1.0, 10.0, seed=2)
        clean = sum(
            ShortcutReleaseService.release_synthetic_graph(g, BUDGET, NoiseService.substream(8, rep)).clamped_count == 0
            for rep in range(20)
        )
        self.assertGreaterEqual(clean, 19)

    def test_centered_variant(self):
        sg = self.release(6, shifted=False)
        self.assertEqual((sg.params.mu0, sg.params.mu1), (0.0, 0.0))
        shifted = self.release(6)
        self.assertEqual(sg.params.sigma1, shifted.params.sigma1)
        self.assertGreater(shifted.params.mu1, 0)


class TestReleasedDistances(unittest.TestCase):
    def setUp(self):
        self.g = GeneratorService.gen_multi_stage(10, 2000, 3000, seed=9)
        self.exact = GraphService.apsp_exact(self.g)

    def test_zero_diagonal_and_symmetry(self):
        sg = ShortcutReleaseService.release_synthetic_graph(self.g, BUDGET, NoiseService.substream(1, 1))
        released = ShortcutReleaseService.answer_all_pairs(sg).values
        self.assertTrue(np.all(np.diag(released) == 0))
        self.assertTrue(np.array_equal(released, released.T))

    def test_never_above_canonical_path(self):
        sg = ShortcutReleaseService.release_synthetic_graph(self.g, BUDGET, NoiseService.substream(1, 2))
        released = ShortcutReleaseService.answer_all_pairs(sg)
        topology = ShortcutReleaseService.true_weight_topology(self.g, sg)
        for u, v in [(0, 100), (3, 57), (12, 88), (40, 41), (5, 95)]:
            bound = ShortcutReleaseService.canonical_noisy_weight(self.g, sg, u, v, true_topology=topology)
            self.assertLessEqual(released[u, v], bound * (1 + 1e-12))

    def test_released_distances_bound_truth_from_below(self):
        failures = 0
        for rep in range(20):
            sg = ShortcutReleaseService.release_synthetic_graph(self.g, BUDGET, NoiseService.substream(2, rep))
            released = ShortcutReleaseService.answer_all_pairs(sg).values
            if np.any(released < self.exact.values * (1 - 1e-12)):
                failures += 1
        self.assertLessEqual(failures, 2)

    def test_clamped_count_carried_to_released_matrix(self):
        sg = ShortcutReleaseService.release_synthetic_graph(self.g, BUDGET, NoiseService.substream(1, 3))
        released = ShortcutReleaseService.answer_all_pairs(replace(sg, clamped_count=4))
        self.assertEqual(released.clamped_count, 4)


class TestBaselines(unittest.TestCase):
    def setUp(self):
        self.g = GeneratorService.gen_connected_random(40, 20, 1.0, 10.0, seed=3)
        self.exact = GraphService.apsp_exact(self.g).values

    def test_edge_baseline_without_noise(self):
        released = ShortcutReleaseService.baseline_edge_laplace(self.g, 1e9, np.random.default_rng(0))
        np.testing.assert_allclose(released.values, self.exact, atol=1e-3)

    def test_edge_baseline_counts_clamped_weights(self):
        epsilon = 0.01
        noise = NoiseService.sample_laplace_many(0.0, 1 / epsilon, self.g.m, np.random.default_rng(5))
        expected = int(np.count_nonzero(self.g.weights + noise < 0))
        self.assertGreater(expected, 0)

        released = ShortcutReleaseService.baseline_edge_laplace(self.g, epsilon, np.random.default_rng(5))
        self.assertEqual(released.clamped_count, expected)

    def test_edge_baseline_is_deterministic(self):
        a = ShortcutReleaseService.baseline_edge_laplace(self.g, 1.0, np.random.default_rng(7))
        b = ShortcutReleaseService.baseline_edge_laplace(self.g, 1.0, np.random.default_rng(7))
        np.testing.assert_array_equal(a.values, b.values)

    def test_output_perturbation_scale(self):
        scale = ShortcutReleaseService.output_perturbation_scale(100, BUDGET)
        self.assertAlmostEqual(scale, 427.1, delta=0.1)
        self.assertAlmostEqual(scale, math.sqrt(8 * 4950 * math.log(100)), delta=1e-9)

    def test_output_perturbation_matrix(self):
        released = ShortcutReleaseService.baseline_output_perturbation(self.g, BUDGET, np.random.default_rng(1)).values
        self.assertTrue(np.all(np.diag(released) == 0))
        self.assertTrue(np.array_equal(released, released.T))
        self.assertTrue(np.all(released >= 0))


class TestPublishedGraph(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def test_write_then_read(self):
        g = GeneratorService.gen_multi_stage(3, 1.0, 5.0, seed=1)
        sg = ShortcutReleaseService.release_synthetic_graph(g, BUDGET, np.random.default_rng(3))
        path, meta_path = ShortcutReleaseService.write_synthetic_graph(sg, os.path.join(self.tmp.name, 'sg.txt'))
        self.assertTrue(os.path.exists(meta_path))

        loaded = ShortcutReleaseService.read_synthetic_graph(path)
        self.assertEqual(loaded.base, sg.base)
        self.assertEqual(loaded.shortcut_vertices, sg.shortcut_vertices)
        self.assertEqual(loaded.shortcut_edges, sg.shortcut_edges)
        self.assertEqual(loaded.clamped_count, sg.clamped_count)
        self.assertEqual(loaded.params, sg.params)

    def test_missing_sidecar(self):
        g = GeneratorService.gen_multi_stage(1, 1.0, 5.0, seed=1)
        path = GraphService.write_edge_list(g, os.path.join(self.tmp.name, 'plain.txt'))
        with self.assertRaises(GraphValidationError):
            ShortcutReleaseService.read_synthetic_graph(path)


if __name__ == '__main__':
    unittest.main()
