import os
import logging
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Config:
    # Output directory for experiment results (CSV, SVG, gnuplot data)
    OUTPUT_DIR = os.getenv('DPGRAPH_OUTPUT_DIR', 'bench_output')

    # Logging
    LOG_LEVEL = os.getenv('DPGRAPH_LOG_LEVEL', 'INFO')
    LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

    # Worker pool size for the experiment harness (1 = run in-process)
    WORKERS = int(os.getenv('DPGRAPH_WORKERS', '1'))

    # Long-running acceptance tests are opt-in
    RUN_SLOW_TESTS = os.getenv('DPGRAPH_RUN_SLOW', '').lower() in ('1', 'true', 'yes')

    # Exhaustive FVS search guard
    BRUTE_FORCE_FVS_MAX_N = 20

    DEFAULT_MASTER_SEED = 20210601

    # Relative tolerance used when comparing exact distances
    DISTANCE_RTOL = 1e-9

    @staticmethod
    def output_dir_override():
        """Output directory from the environment, read at call time (None if unset)"""
        value = os.getenv('DPGRAPH_OUTPUT_DIR')
        return value or None

    @staticmethod
    def log_level():
        """Numeric logging level for DPGRAPH_LOG_LEVEL, defaulting to INFO"""
        name = os.getenv('DPGRAPH_LOG_LEVEL', Config.LOG_LEVEL).upper()
        return getattr(logging, name, logging.INFO)
