import math
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from dpgraph.exceptions import GraphValidationError
from dpgraph.models import DistanceMatrix


def calculate_errors(released: DistanceMatrix, exact: DistanceMatrix) -> Tuple[float, float]:
    """
    Largest and mean absolute error over all unordered vertex pairs

    Args:
        released (DistanceMatrix): Released distances
        exact (DistanceMatrix): True distances

    Returns:
        tuple: (max_abs_error, mean_abs_error); (0.0, 0.0) for a single vertex
    """
    errors = released.abs_errors(exact)
    if errors.size == 0:
        return 0.0, 0.0
    if not np.all(np.isfinite(errors)):
        raise GraphValidationError("Released matrix has unreachable pairs the exact matrix does not")
    max_error = float(errors.max())
    # Rounding in the mean must not push it past the max
    return max_error, min(float(errors.mean()), max_error)


def sqrt_log_squared(n: float) -> float:
    """sqrt(n) * ln(n)^2"""
    return math.sqrt(n) * math.log(n) ** 2


def linear_reference(ns: Sequence[float], n0: float, err0: float) -> np.ndarray:
    """err0 * n / n0: linear growth anchored at the first empirical point"""
    return err0 * np.asarray(ns, dtype=np.float64) / n0


def sqrt_log_reference(ns: Sequence[float], n0: float, err0: float) -> np.ndarray:
    """err0 * sqrt(n) ln^2 n / (sqrt(n0) ln^2 n0), anchored at the first empirical point"""
    return err0 * np.array([sqrt_log_squared(n) for n in ns]) / sqrt_log_squared(n0)


def aggregate_metrics(records: pd.DataFrame) -> pd.DataFrame:
    """
    Mean of the per-repetition errors for every (mechanism, epsilon, n) series point

    Returns:
        DataFrame: Columns mechanism, epsilon, n, mean_max_error, mean_mean_error, reps; sorted
    """
    if records.empty:
        return pd.DataFrame(columns=['mechanism', 'epsilon', 'n', 'mean_max_error', 'mean_mean_error', 'reps'])
    grouped = records.groupby(['mechanism', 'epsilon', 'n'], sort=True).agg(
        mean_max_error=('max_abs_error', 'mean'),
        mean_mean_error=('mean_abs_error', 'mean'),
        reps=('rep', 'count'),
    )
    return grouped.reset_index()
