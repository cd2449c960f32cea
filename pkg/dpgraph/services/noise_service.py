"""
Laplace noise, tail bounds, and privacy accounting.

Every logarithm in the noise formulas is the natural logarithm (``math.log``);
the constants of the error bounds are asymptotic, so the base only rescales them.
"""
import logging
import math
from typing import Union

import numpy as np

from dpgraph.exceptions import PrivacyParameterError
from dpgraph.models import NoiseParams, PrivacyBudget

logger = logging.getLogger(__name__)

# Smallest positive uniform draw; keeps the inverse CDF finite when the stream yields exactly 0.0
_TINY = np.finfo(np.float64).tiny


class NoiseService:
    """Laplace sampling and the noise-scale formulas of the release mechanisms"""

    # ---------------------------------------------------------------- streams

    @staticmethod
    def substream(seed: int, *keys: int) -> np.random.Generator:
        """
        Independent random stream for (seed, *keys).

        Pure function of its arguments: the same keys always give the same
        stream, whatever else has been drawn before.
        """
        return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))

    @staticmethod
    def derive_seed(seed: int, *keys: int) -> int:
        """Integer seed for (seed, *keys), for APIs that take a plain seed"""
        state = np.random.SeedSequence([int(seed), *(int(k) for k in keys)]).generate_state(1, dtype=np.uint32)
        return int(state[0])

    # --------------------------------------------------------------- sampling

    @staticmethod
    def _check_scale(b: float):
        if not (b > 0 and math.isfinite(b)):
            raise PrivacyParameterError(f"Laplace scale must be positive and finite, got {b}")

    @staticmethod
    def laplace_inverse_cdf(u: Union[float, np.ndarray], mu: float, b: float):
        """
        Inverse CDF of Lap(mu, b) evaluated at uniform u in [0, 1).

        u = 0.5 maps to mu exactly.
        """
        NoiseService._check_scale(b)
        centered = np.asarray(u, dtype=np.float64) - 0.5
        tail = np.maximum(1.0 - 2.0 * np.abs(centered), _TINY)
        x = mu - b * np.sign(centered) * np.log(tail)
        return float(x) if np.ndim(x) == 0 else x

    @staticmethod
    def sample_laplace(mu: float, b: float, rng: np.random.Generator) -> float:
        """
        One draw from Lap(mu, b), density (1/2b) exp(-|x - mu| / b).

        Consumes exactly one uniform from ``rng``.

        Raises:
            PrivacyParameterError: If b <= 0
        """
        return NoiseService.laplace_inverse_cdf(rng.random(), mu, b)

    @staticmethod
    def sample_laplace_many(mu: float, b: float, size: int, rng: np.random.Generator) -> np.ndarray:
        """``size`` independent Lap(mu, b) draws, one uniform each, in stream order"""
        NoiseService._check_scale(b)
        if size == 0:
            return np.zeros(0)
        return np.atleast_1d(NoiseService.laplace_inverse_cdf(rng.random(size), mu, b))

    # ------------------------------------------------------------ tail bounds

    @staticmethod
    def laplace_max_bound(n_vars: int, b: float, gamma: float) -> float:
        """
        Magnitude bound b * ln(n_vars / gamma) that n_vars i.i.d. Lap(0, b)
        variables all respect with probability at least 1 - gamma.
        """
        if n_vars < 1:
            raise PrivacyParameterError(f"n_vars must be at least 1, got {n_vars}")
        NoiseService._check_scale(b)
        if not 0 < gamma < 1:
            raise PrivacyParameterError(f"gamma must lie in (0, 1), got {gamma}")
        return b * math.log(n_vars / gamma)

    # ------------------------------------------------------------ composition

    @staticmethod
    def compose_advanced(epsilon_total: float, k: int, delta_prime: float) -> float:
        """
        Per-query epsilon so that k epsilon-DP queries compose to (epsilon_total, delta_prime)-DP.

        Returns:
            float: epsilon_total / sqrt(8 k ln(1 / delta_prime))
        """
        if not epsilon_total > 0:
            raise PrivacyParameterError(f"epsilon_total must be positive, got {epsilon_total}")
        if k < 1:
            raise PrivacyParameterError(f"k must be at least 1, got {k}")
        if not 0 < delta_prime < 1:
            raise PrivacyParameterError(f"delta_prime must lie in (0, 1), got {delta_prime}")
        return epsilon_total / math.sqrt(8 * k * math.log(1 / delta_prime))

    @staticmethod
    def compose_advanced_forward(epsilon: float, k: int, delta_prime: float) -> float:
        """Total epsilon of k adaptive epsilon-DP mechanisms: sqrt(2k ln(1/delta')) eps + k eps (e^eps - 1)"""
        if not epsilon > 0:
            raise PrivacyParameterError(f"epsilon must be positive, got {epsilon}")
        if k < 1:
            raise PrivacyParameterError(f"k must be at least 1, got {k}")
        if not 0 < delta_prime < 1:
            raise PrivacyParameterError(f"delta_prime must lie in (0, 1), got {delta_prime}")
        return math.sqrt(2 * k * math.log(1 / delta_prime)) * epsilon + k * epsilon * math.expm1(epsilon)

    # ---------------------------------------------------- mechanism parameters

    @staticmethod
    def alg1_noise_params(n: int, budget: PrivacyBudget) -> NoiseParams:
        """
        Noise parameters of the shortcut mechanism.

        The budget is split in half: eps' = eps / 2. Original edges get
        Lap(mu0, sigma0) with sigma0 = 1/eps' and mu0 = sigma0 ln(n^2/gamma).
        Shortcut edges get Lap(mu1, sigma1) with
        sigma1 = 2 sqrt(2) sqrt(n) sqrt(ln(1/delta)) / eps' (advanced
        composition over n pairs) and mu1 = sigma1 ln(n/gamma).
        """
        if n < 2:
            raise PrivacyParameterError(f"n must be at least 2, got {n}")
        eps_prime = budget.epsilon / 2
        sigma0 = 1 / eps_prime
        mu0 = sigma0 * math.log(n ** 2 / budget.gamma)
        sigma1 = 2 * math.sqrt(2) * math.sqrt(n) * math.sqrt(math.log(1 / budget.delta)) / eps_prime
        mu1 = sigma1 * math.log(n / budget.gamma)
        return NoiseParams(mu0=mu0, sigma0=sigma0, mu1=mu1, sigma1=sigma1, epsilon_prime=eps_prime)

    @staticmethod
    def alg2_noise_params(k: int, budget: PrivacyBudget) -> NoiseParams:
        """
        Noise parameters of the feedback-vertex-set mechanism (centered noise).

        eps' = eps / 3, sigma0 = 1/eps' for cross edges and
        sigma1 = 2 sqrt(2) k sqrt(ln(1/delta)) / eps' for FVS pairs. With
        k = 0 no FVS pair exists and sigma1 is set to sigma0 only to keep the
        value positive; it is never sampled.
        """
        if k < 0:
            raise PrivacyParameterError(f"k must be nonnegative, got {k}")
        eps_prime = budget.epsilon / 3
        sigma0 = 1 / eps_prime
        if k == 0:
            sigma1 = sigma0
        else:
            sigma1 = 2 * math.sqrt(2) * k * math.sqrt(math.log(1 / budget.delta)) / eps_prime
        return NoiseParams(mu0=0.0, sigma0=sigma0, mu1=0.0, sigma1=sigma1, epsilon_prime=eps_prime)

    # ------------------------------------------------------- error scales

    @staticmethod
    def alg1_error_scale(n: int, budget: PrivacyBudget) -> float:
        """sqrt(n) ln^2(n/gamma) sqrt(ln(1/delta)) / eps, the growth of the shortcut mechanism's error"""
        return (math.sqrt(n) * math.log(n / budget.gamma) ** 2
                * math.sqrt(math.log(1 / budget.delta)) / budget.epsilon)

    @staticmethod
    def tree_error_scale(n: int, epsilon: float, gamma: float) -> float:
        """ln^2.5(n) ln(1/gamma) / eps, the growth of the tree mechanism's error"""
        return math.log(max(n, 2)) ** 2.5 * math.log(1 / gamma) / epsilon

    @staticmethod
    def alg2_error_scale(k: int, n: int, budget: PrivacyBudget) -> float:
        """(k ln(k/gamma) sqrt(ln(1/delta)) + ln^2.5(n) ln(1/gamma)) / eps"""
        fvs_term = 0.0
        if k > 0:
            fvs_term = k * math.log(k / budget.gamma) * math.sqrt(math.log(1 / budget.delta))
        return fvs_term / budget.epsilon + NoiseService.tree_error_scale(n, budget.epsilon, budget.gamma)
