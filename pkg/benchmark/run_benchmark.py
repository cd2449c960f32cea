#!/usr/bin/env python3
import argparse
import logging
import math
import os
import sys
from typing import List, Optional

# Add the project root to the path so we can import dpgraph modules
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from benchmark.data.experiment_config import load_config  # noqa: E402
from benchmark.services.experiment_service import ExperimentService  # noqa: E402
from benchmark.utils.results_io import write_distance_matrix  # noqa: E402
from dpgraph.config import Config  # noqa: E402
from dpgraph.exceptions import DpGraphError  # noqa: E402
from dpgraph.models import PrivacyBudget  # noqa: E402
from dpgraph.services.fvs_release_service import FvsReleaseService  # noqa: E402
from dpgraph.services.fvs_service import FvsService  # noqa: E402
from dpgraph.services.generator_service import GRAPH_FAMILIES, GeneratorService  # noqa: E402
from dpgraph.services.graph_service import GraphService  # noqa: E402
from dpgraph.services.noise_service import NoiseService  # noqa: E402
from dpgraph.services.shortcut_release_service import ShortcutReleaseService  # noqa: E402

logger = logging.getLogger(__name__)


def parse_arguments(argv: Optional[List[str]] = None):
    """Parse command line arguments"""
    parser = argparse.ArgumentParser(description='Private all-pairs distance release: experiments and one-off releases')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='Run an experiment grid from a config file')
    run.add_argument('config', type=str, help='Experiment config file (key = value lines)')

    release = subparsers.add_parser('release', help='Release private distances for one graph')
    release.add_argument('graph', type=str, help='Input graph in edge-list format')
    release.add_argument('--mechanism', choices=['alg1', 'alg2'], required=True,
                         help='alg1 publishes a synthetic graph, alg2 a distance matrix')
    release.add_argument('--epsilon', type=float, required=True)
    release.add_argument('--delta', type=float, default=0.01)
    release.add_argument('--gamma', type=float, default=0.01)
    release.add_argument('--seed', type=int, default=Config.DEFAULT_MASTER_SEED)
    release.add_argument('--out', type=str, required=True, help='Output file')
    release.add_argument('--distances', type=str,
                         help='Also write the released distance matrix here (alg1 only)')

    fvs = subparsers.add_parser('fvs', help='Print the feedback vertex set diagnostic for a graph')
    fvs.add_argument('graph', type=str, help='Input graph in edge-list format')

    generate = subparsers.add_parser('generate', help='Write a generated graph in edge-list format')
    generate.add_argument('--family', choices=GRAPH_FAMILIES, default='multi_stage')
    generate.add_argument('--n', type=int, required=True, help='Target vertex count')
    generate.add_argument('--low', type=float, default=2000.0, help='Lower weight bound')
    generate.add_argument('--high', type=float, default=3000.0, help='Upper weight bound')
    generate.add_argument('--extra-edges', type=int, default=0, help='Chords for connected_random')
    generate.add_argument('--seed', type=int, default=Config.DEFAULT_MASTER_SEED)
    generate.add_argument('--out', type=str, required=True, help='Output file')

    return parser.parse_args(argv)


def _output_path(path: str) -> str:
    """Relative output paths land in DPGRAPH_OUTPUT_DIR when it is set"""
    override = Config.output_dir_override()
    if override and not os.path.isabs(path):
        return os.path.join(override, path)
    return path


def command_run(args) -> int:
    cfg = load_config(args.config)
    result = ExperimentService.run_grid(cfg)
    if result['status'] != 'success':
        logger.error(f"Run failed: {result.get('message', 'Unknown error')}")
        return 1

    print("\nExperiment Summary:")
    print(f"Records: {result['record_count']}")
    for path in result['csv_files']:
        print(f"CSV: {path}")
    print(f"Plot: {result['plot_file']}")
    return 0


def command_release(args) -> int:
    g = GraphService.read_edge_list(args.graph)
    budget = PrivacyBudget(epsilon=args.epsilon, delta=args.delta, gamma=args.gamma)
    rng = NoiseService.substream(args.seed)
    out = _output_path(args.out)

    if args.mechanism == 'alg1':
        sg = ShortcutReleaseService.release_synthetic_graph(g, budget, rng)
        graph_path, meta_path = ShortcutReleaseService.write_synthetic_graph(sg, out)
        print(f"Synthetic graph: {graph_path} (metadata {meta_path})")
        if args.distances:
            write_distance_matrix(ShortcutReleaseService.answer_all_pairs(sg), _output_path(args.distances))
            print(f"Distances: {_output_path(args.distances)}")
    else:
        released, decomposition = FvsReleaseService.fvs_private_apsp_with_diagnostics(g, budget, rng)
        write_distance_matrix(released, out)
        print(f"Distances: {out} (FVS size {decomposition.k}, clamped {released.clamped_count})")
    return 0


def command_fvs(args) -> int:
    g = GraphService.read_edge_list(args.graph)
    decomposition = FvsService.decompose(g)
    k = decomposition.k
    print(f"n: {g.n}")
    print(f"m: {g.m}")
    print(f"FVS size: {k}")
    print(f"FVS: {' '.join(str(v) for v in decomposition.s)}")
    print(f"Forest: {len(decomposition.forest_vertices)} vertices, {decomposition.forest.m} edges")
    print(f"Cross edges: {len(decomposition.cross_edges)}")
    print(f"Edges inside FVS: {len(decomposition.s_edges)}")
    if k >= math.sqrt(g.n):
        print(f"Note: FVS size {k} >= sqrt(n) = {math.sqrt(g.n):.1f}; alg1 has the better error bound")
    return 0


def command_generate(args) -> int:
    g = GeneratorService.generate(args.family, args.n, args.low, args.high, args.seed,
                                  extra_edges=args.extra_edges)
    out = GraphService.write_edge_list(g, _output_path(args.out))
    print(f"Graph: {out} (n={g.n}, m={g.m})")
    return 0


COMMANDS = {
    'run': command_run,
    'release': command_release,
    'fvs': command_fvs,
    'generate': command_generate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main function; returns the process exit code"""
    logging.basicConfig(level=Config.log_level(), format=Config.LOG_FORMAT)
    args = parse_arguments(argv)
    try:
        return COMMANDS[args.command](args)
    except (DpGraphError, OSError) as e:
        logger.error(f"{args.command} failed: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
