import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Tuple

import numpy as np

from benchmark.data.error_record import ErrorRecord
from benchmark.data.experiment_config import MECHANISMS, ExperimentConfig
from benchmark.utils.metrics import calculate_errors
from benchmark.utils.results_io import emit_csv
from benchmark.utils.visualization import emit_plot
from dpgraph.exceptions import DpGraphError
from dpgraph.models import DistanceMatrix, Graph, PrivacyBudget
from dpgraph.services.fvs_release_service import FvsReleaseService
from dpgraph.services.generator_service import GeneratorService
from dpgraph.services.graph_service import GraphService
from dpgraph.services.noise_service import NoiseService
from dpgraph.services.shortcut_release_service import ShortcutReleaseService
from dpgraph.services.tree_release_service import TreeReleaseService

logger = logging.getLogger(__name__)


def run_mechanism(name: str, g: Graph, budget: PrivacyBudget, rng: np.random.Generator) -> DistanceMatrix:
    """Released distance matrix of the named mechanism"""
    if name == 'alg1':
        return ShortcutReleaseService.answer_all_pairs(
            ShortcutReleaseService.release_synthetic_graph(g, budget, rng)
        )
    if name == 'alg1_centered':
        return ShortcutReleaseService.answer_all_pairs(
            ShortcutReleaseService.release_synthetic_graph(g, budget, rng, shifted=False)
        )
    if name == 'alg2':
        return FvsReleaseService.fvs_private_apsp(g, budget, rng)
    if name == 'edge_baseline':
        return ShortcutReleaseService.baseline_edge_laplace(g, budget.epsilon, rng)
    if name == 'output_baseline':
        return ShortcutReleaseService.baseline_output_perturbation(g, budget, rng)
    if name == 'tree':
        return TreeReleaseService.private_tree_apsp(g, budget.epsilon, budget.gamma, rng)
    raise DpGraphError(f"Unknown mechanism '{name}'")


def _run_grid_point(cfg: ExperimentConfig, panel_index: int, size_index: int, rep: int) -> List[ErrorRecord]:
    """
    One generated graph and every (mechanism, epsilon) run on it.

    Module level so worker processes can unpickle it.
    """
    low, high = cfg.weight_ranges[panel_index]
    graph_seed = NoiseService.derive_seed(cfg.master_seed, panel_index, size_index, rep)
    g = GeneratorService.generate(cfg.family, cfg.sizes[size_index], low, high, graph_seed,
                                  extra_edges=cfg.extra_edges)
    exact = GraphService.apsp_exact(g)

    records = []
    for mechanism in cfg.mechanisms:
        # Keyed by the global mechanism index so listing order does not change the streams
        mechanism_key = MECHANISMS.index(mechanism)
        for eps_index, epsilon in enumerate(cfg.epsilons):
            rng = NoiseService.substream(cfg.master_seed, panel_index, size_index, rep, mechanism_key, eps_index)
            started = time.perf_counter()
            released = run_mechanism(mechanism, g, cfg.budget(epsilon), rng)
            elapsed_ms = (time.perf_counter() - started) * 1000.0

            max_error, mean_error = calculate_errors(released, exact)
            records.append(ErrorRecord(
                mechanism=mechanism,
                n=g.n,
                epsilon=float(epsilon),
                rep=rep,
                max_abs_error=max_error,
                mean_abs_error=mean_error,
                runtime_ms=elapsed_ms if cfg.record_timing else 0.0,
                clamped_count=released.clamped_count,
            ))
    return records


def _run_grid_point_args(args: Tuple[ExperimentConfig, int, int, int]) -> List[ErrorRecord]:
    return _run_grid_point(*args)


class ExperimentService:
    """Runs experiment grids and writes their CSV and plot artifacts"""

    @staticmethod
    def panel_title(cfg: ExperimentConfig, panel_index: int) -> str:
        low, high = cfg.weight_ranges[panel_index]
        return f"{cfg.family}, w ~ Unif({low:g}, {high:g})"

    @staticmethod
    def run_experiment(cfg: ExperimentConfig, panel_index: int = 0) -> List[ErrorRecord]:
        """
        Run every size x mechanism x epsilon x repetition of one weight-range panel

        The result depends only on cfg: graph seeds and noise streams are
        derived from (master_seed, panel, size, repetition, mechanism, epsilon)
        and records are sorted before they are returned.

        Args:
            cfg (ExperimentConfig): Experiment grid
            panel_index (int): Index into cfg.weight_ranges

        Returns:
            list: ErrorRecords sorted by mechanism, epsilon, n, repetition
        """
        cfg.validate()
        tasks = [(cfg, panel_index, size_index, rep)
                 for size_index in range(len(cfg.sizes))
                 for rep in range(cfg.repetitions)]
        logger.info(f"Running panel '{ExperimentService.panel_title(cfg, panel_index)}': "
                    f"{len(tasks)} graphs x {len(cfg.mechanisms)} mechanisms x {len(cfg.epsilons)} epsilons")

        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
                batches = list(executor.map(_run_grid_point_args, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
        else:
            batches = [_run_grid_point(*task) for task in tasks]

        records = [record for batch in batches for record in batch]
        records.sort(key=ErrorRecord.sort_key)
        return records

    @staticmethod
    def run_grid(cfg: ExperimentConfig) -> Dict[str, Any]:
        """
        Run every panel, write one CSV per panel and a single multi-panel plot

        Returns:
            dict: {'status': 'success', 'csv_files', 'plot_file', 'record_count'}
                  or {'status': 'error', 'message'}
        """
        output_dir = cfg.resolved_output_dir()
        try:
            panels = {}
            csv_files = []
            for panel_index, (low, high) in enumerate(cfg.weight_ranges):
                records = ExperimentService.run_experiment(cfg, panel_index)
                csv_path = os.path.join(output_dir, f"errors_{cfg.family}_w{low:g}-{high:g}.csv")
                csv_files.append(emit_csv(records, csv_path))
                panels[ExperimentService.panel_title(cfg, panel_index)] = records

            plot_file = emit_plot(panels, os.path.join(output_dir, f"errors_{cfg.family}.svg"))
        except (DpGraphError, OSError) as e:
            logger.error(f"Experiment failed: {str(e)}")
            return {'status': 'error', 'message': str(e)}

        record_count = sum(len(r) for r in panels.values())
        logger.info(f"Experiment finished: {record_count} records in {output_dir}")
        return {
            'status': 'success',
            'csv_files': csv_files,
            'plot_file': plot_file,
            'record_count': record_count,
        }
