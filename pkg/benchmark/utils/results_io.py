import logging
import os
from typing import List, Sequence

import numpy as np
import pandas as pd

from benchmark.data.error_record import COLUMNS, ErrorRecord
from dpgraph.exceptions import ResultsIOError
from dpgraph.models import DistanceMatrix

logger = logging.getLogger(__name__)

# 17 significant digits round-trip every float64 exactly
FLOAT_FORMAT = '%.17g'

_DTYPES = {
    'mechanism': str,
    'n': np.int64,
    'epsilon': np.float64,
    'rep': np.int64,
    'max_abs_error': np.float64,
    'mean_abs_error': np.float64,
    'runtime_ms': np.float64,
    'clamped_count': np.int64,
}


def records_to_frame(records: Sequence[ErrorRecord]) -> pd.DataFrame:
    """DataFrame with one row per record in the fixed column order"""
    frame = pd.DataFrame([r.as_row() for r in records], columns=list(COLUMNS))
    if records:
        frame = frame.astype(_DTYPES)
    return frame


def emit_csv(records: Sequence[ErrorRecord], path: str) -> str:
    """
    Write error records as CSV: a header row, then one row per record

    Args:
        records (list): ErrorRecords in the order they should appear
        path (str): Output file

    Returns:
        str: The path written

    Raises:
        ResultsIOError: If the file cannot be written
    """
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        records_to_frame(records).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        raise ResultsIOError(path, f"cannot write CSV: {str(e)}") from e
    logger.info(f"Wrote {len(records)} error records to {path}")
    return path


def read_csv(path: str) -> List[ErrorRecord]:
    """
    Read records written by emit_csv

    Raises:
        ResultsIOError: If the file is missing, unreadable, or has the wrong columns
    """
    try:
        frame = pd.read_csv(path, dtype=_DTYPES, float_precision='round_trip', keep_default_na=False)
    except (OSError, ValueError) as e:
        raise ResultsIOError(path, f"cannot read CSV: {str(e)}") from e

    if tuple(frame.columns) != COLUMNS:
        raise ResultsIOError(path, f"unexpected columns {list(frame.columns)}")

    return [
        ErrorRecord(
            mechanism=str(row.mechanism),
            n=int(row.n),
            epsilon=float(row.epsilon),
            rep=int(row.rep),
            max_abs_error=float(row.max_abs_error),
            mean_abs_error=float(row.mean_abs_error),
            runtime_ms=float(row.runtime_ms),
            clamped_count=int(row.clamped_count),
        )
        for row in frame.itertuples(index=False)
    ]


def write_distance_matrix(released: DistanceMatrix, path: str) -> str:
    """
    Write a released matrix as text: first line n, then n rows of
    17-significant-digit values (``inf`` for unreachable pairs)

    Raises:
        ResultsIOError: If the file cannot be written
    """
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w') as f:
            f.write(f"{released.n}\n")
            np.savetxt(f, released.values, fmt=FLOAT_FORMAT, delimiter=' ')
    except OSError as e:
        raise ResultsIOError(path, f"cannot write distance matrix: {str(e)}") from e
    logger.info(f"Wrote {released.n}x{released.n} distance matrix to {path}")
    return path


def read_distance_matrix(path: str) -> DistanceMatrix:
    """Read a matrix written by write_distance_matrix"""
    try:
        with open(path, 'r') as f:
            n = int(f.readline())
            values = np.loadtxt(f, dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as e:
        raise ResultsIOError(path, f"cannot read distance matrix: {str(e)}") from e
    if values.shape != (n, n):
        raise ResultsIOError(path, f"expected a {n}x{n} matrix, got shape {values.shape}")
    return DistanceMatrix(values, allow_unreachable=True)
