"""
Experiment grid definition and its flat ``key = value`` file format.

Example::

    # Error-growth sweep on multi-stage graphs
    preset = ci
    sizes = 101, 201, 401, 801
    weight_ranges = 2000:3000, 10000:100000
    mechanisms = alg1, edge_baseline
    epsilons = 1, 2
    repetitions = 50

Keys given in the file override the preset. Unknown keys are rejected.
"""
import logging
import os
from dataclasses import dataclass, field
from typing import Dict, Tuple

from dpgraph.config import Config
from dpgraph.exceptions import ExperimentConfigError, PrivacyParameterError
from dpgraph.models import PrivacyBudget
from dpgraph.services.generator_service import GRAPH_FAMILIES

logger = logging.getLogger(__name__)

MECHANISMS = ('alg1', 'alg2', 'edge_baseline', 'output_baseline', 'alg1_centered', 'tree')

# Mechanisms that only accept forests
TREE_ONLY_MECHANISMS = ('tree',)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment grid: every size x weight range x mechanism x epsilon x repetition"""
    preset: str = 'ci'
    family: str = 'multi_stage'
    sizes: Tuple[int, ...] = (101, 201, 301, 401, 501)
    weight_ranges: Tuple[Tuple[float, float], ...] = ((2000.0, 3000.0),)
    extra_edges: int = 0
    mechanisms: Tuple[str, ...] = ('alg1', 'edge_baseline')
    epsilons: Tuple[float, ...] = (1.0,)
    delta: float = 0.01
    gamma: float = 0.01
    repetitions: int = 50
    master_seed: int = Config.DEFAULT_MASTER_SEED
    output_dir: str = Config.OUTPUT_DIR
    workers: int = Config.WORKERS
    record_timing: bool = True
    source: str = field(default='<defaults>', compare=False)

    def budget(self, epsilon: float) -> PrivacyBudget:
        return PrivacyBudget(epsilon=epsilon, delta=self.delta, gamma=self.gamma)

    def resolved_output_dir(self) -> str:
        """DPGRAPH_OUTPUT_DIR when set, otherwise the configured output_dir"""
        return Config.output_dir_override() or self.output_dir

    def validate(self) -> "ExperimentConfig":
        """
        Reject grids that cannot run, before any work starts

        Raises:
            ExperimentConfigError: On the first problem found
        """
        where = self.source
        if self.family not in GRAPH_FAMILIES:
            raise ExperimentConfigError(f"{where}: unknown family '{self.family}' (choose from {', '.join(GRAPH_FAMILIES)})")
        if not self.sizes:
            raise ExperimentConfigError(f"{where}: sizes must not be empty")
        if any(n < 4 for n in self.sizes):
            raise ExperimentConfigError(f"{where}: every size must be at least 4, got {list(self.sizes)}")
        if not self.weight_ranges:
            raise ExperimentConfigError(f"{where}: weight_ranges must not be empty")
        for low, high in self.weight_ranges:
            if not 0 <= low < high:
                raise ExperimentConfigError(f"{where}: weight range {low}:{high} must satisfy 0 <= low < high")
        if not self.mechanisms:
            raise ExperimentConfigError(f"{where}: mechanisms must not be empty")
        for mechanism in self.mechanisms:
            if mechanism not in MECHANISMS:
                raise ExperimentConfigError(f"{where}: unknown mechanism '{mechanism}' (choose from {', '.join(MECHANISMS)})")
            if mechanism in TREE_ONLY_MECHANISMS and self.family != 'tree':
                raise ExperimentConfigError(f"{where}: mechanism '{mechanism}' needs family = tree")
        if len(set(self.mechanisms)) != len(self.mechanisms):
            raise ExperimentConfigError(f"{where}: mechanisms listed twice")
        if not self.epsilons:
            raise ExperimentConfigError(f"{where}: epsilons must not be empty")
        try:
            for epsilon in self.epsilons:
                self.budget(epsilon)
        except PrivacyParameterError as e:
            raise ExperimentConfigError(f"{where}: {str(e)}") from e
        if self.repetitions < 1:
            raise ExperimentConfigError(f"{where}: repetitions must be at least 1, got {self.repetitions}")
        if self.workers < 1:
            raise ExperimentConfigError(f"{where}: workers must be at least 1, got {self.workers}")
        if self.extra_edges < 0:
            raise ExperimentConfigError(f"{where}: extra_edges must be nonnegative, got {self.extra_edges}")
        return self


PRESETS: Dict[str, Dict[str, object]] = {
    'ci': {},
    'full': {
        'sizes': tuple(range(101, 1002, 100)),
        'weight_ranges': ((2000.0, 3000.0), (10000.0, 100000.0)),
        'epsilons': (0.5, 1.0, 2.0),
        'repetitions': 200,
    },
}


def _parse_list(raw: str, convert, key: str, where: str) -> tuple:
    items = [item.strip() for item in raw.split(',') if item.strip()]
    try:
        return tuple(convert(item) for item in items)
    except ValueError:
        raise ExperimentConfigError(f"{where}: cannot parse {key} = {raw}") from None


def _parse_range(item: str) -> Tuple[float, float]:
    low, sep, high = item.partition(':')
    if not sep:
        raise ValueError(item)
    return float(low), float(high)


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(raw)


_SCALAR_PARSERS = {
    'preset': str.strip,
    'family': str.strip,
    'extra_edges': int,
    'delta': float,
    'gamma': float,
    'repetitions': int,
    'master_seed': int,
    'output_dir': str.strip,
    'workers': int,
    'record_timing': _parse_bool,
}

# Comma-separated keys and the converter applied to each item
_LIST_PARSERS = {
    'sizes': int,
    'weight_ranges': _parse_range,
    'mechanisms': str,
    'epsilons': float,
}


def parse_config_text(text: str, source: str = '<string>') -> ExperimentConfig:
    """
    Parse and validate an experiment configuration

    Args:
        text (str): File contents
        source (str): Name used in error messages

    Returns:
        ExperimentConfig: The validated grid

    Raises:
        ExperimentConfigError: Malformed lines, unknown keys or presets, invalid values
    """
    values: Dict[str, object] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition('=')
        key = key.strip()
        where = f"{source}:{line_no}"
        if not sep or not key:
            raise ExperimentConfigError(f"{where}: expected 'key = value', got '{line}'")
        if key in values:
            raise ExperimentConfigError(f"{where}: key '{key}' given twice")

        if key in _LIST_PARSERS:
            values[key] = _parse_list(raw, _LIST_PARSERS[key], key, where)
        elif key in _SCALAR_PARSERS:
            try:
                values[key] = _SCALAR_PARSERS[key](raw.strip())
            except ValueError:
                raise ExperimentConfigError(f"{where}: cannot parse {key} = {raw.strip()}") from None
        else:
            raise ExperimentConfigError(f"{where}: unknown key '{key}'")

    preset = values.get('preset', 'ci')
    if preset not in PRESETS:
        raise ExperimentConfigError(f"{source}: unknown preset '{preset}' (choose from {', '.join(PRESETS)})")

    merged = dict(PRESETS[preset])
    merged.update(values)
    merged['preset'] = preset
    cfg = ExperimentConfig(source=source, **merged)
    logger.debug(f"Parsed experiment config from {source}: {cfg}")
    return cfg.validate()


def load_config(path: str) -> ExperimentConfig:
    """Read, parse and validate an experiment configuration file"""
    try:
        with open(path, 'r') as f:
            text = f.read()
    except OSError as e:
        raise ExperimentConfigError(f"Cannot read config {path}: {str(e)}") from e
    return parse_config_text(text, source=os.path.basename(path))
