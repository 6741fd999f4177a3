#!/usr/bin/env python3
"""
Goodness-of-fit and comparison tests for simulated samples.
"""

import logging
from typing import Any, Dict, List, Sequence

import numpy as np
from scipy import stats

logger = logging.getLogger(__name__)


class DistributionTestRunner:
    """Run statistical tests on jump-time samples and ensemble measures."""

    def __init__(self, alpha: float = 0.05):
        self.alpha = alpha

    def ks_critical_value(self, n: int) -> float:
        """Two-sided KS critical distance at level alpha for sample size n."""
        return float(stats.kstwo.ppf(1.0 - self.alpha, n))

    def ks_exponential(self, samples: Sequence[float], rate: float) -> Dict[str, Any]:
        """
        Compare samples with the CDF 1 − e^{−rate·t}.

        Returns:
            Dict with the KS distance, p-value, critical value and pass flag
        """
        samples = np.asarray(samples, dtype=float)
        result = stats.kstest(samples, stats.expon(scale=1.0 / rate).cdf)
        critical = self.ks_critical_value(samples.size)
        return {
            "statistic": float(result.statistic),
            "p_value": float(result.pvalue),
            "critical_value": critical,
            "samples": int(samples.size),
            "passed": bool(result.statistic < critical)
        }

    def chi_square_categorical(
        self,
        observed: Sequence[int],
        probabilities: Sequence[float]
    ) -> Dict[str, Any]:
        """Chi-square goodness of fit of category counts to probabilities."""
        observed = np.asarray(observed, dtype=float)
        probabilities = np.asarray(probabilities, dtype=float)
        keep = probabilities > 0
        if np.any(observed[~keep] > 0):
            return {"chi2": float("inf"), "p_value": 0.0, "degrees_of_freedom": int(keep.sum()) - 1,
                    "significant": True}
        expected = probabilities[keep] / probabilities[keep].sum() * observed.sum()
        if keep.sum() < 2:
            return {"chi2": 0.0, "p_value": 1.0, "degrees_of_freedom": 0, "significant": False}
        chi2, p_value = stats.chisquare(observed[keep], expected)
        return {
            "chi2": float(chi2),
            "p_value": float(p_value),
            "degrees_of_freedom": int(keep.sum()) - 1,
            "significant": bool(p_value < self.alpha)
        }

    def t_test(self, group1: Sequence[float], group2: Sequence[float]) -> Dict[str, Any]:
        """Welch t-test between two samples with Cohen's d."""
        group1 = np.asarray(group1, dtype=float)
        group2 = np.asarray(group2, dtype=float)
        if group1.size < 2 or group2.size < 2:
            return {"statistic": 0.0, "p_value": 1.0, "cohens_d": 0.0,
                    "effect_size": "unknown", "significant": False}

        statistic, p_value = stats.ttest_ind(group1, group2, equal_var=False)

        n1, n2 = group1.size, group2.size
        pooled = ((n1 - 1) * group1.var(ddof=1) + (n2 - 1) * group2.var(ddof=1)) / (n1 + n2 - 2)
        pooled_std = pooled ** 0.5
        cohens_d = (group1.mean() - group2.mean()) / pooled_std if pooled_std > 0 else 0.0

        if abs(cohens_d) < 0.2:
            effect_size = "negligible"
        elif abs(cohens_d) < 0.5:
            effect_size = "small"
        elif abs(cohens_d) < 0.8:
            effect_size = "medium"
        else:
            effect_size = "large"

        return {
            "statistic": float(statistic),
            "p_value": float(p_value),
            "cohens_d": float(cohens_d),
            "effect_size": effect_size,
            "significant": bool(p_value < self.alpha)
        }

    def variance_ratio(self, group1: Sequence[float], group2: Sequence[float]) -> Dict[str, Any]:
        """Ratio var(group1)/var(group2) with a Levene test for equal spread."""
        group1 = np.asarray(group1, dtype=float)
        group2 = np.asarray(group2, dtype=float)
        var1, var2 = group1.var(ddof=1), group2.var(ddof=1)
        ratio = var1 / var2 if var2 > 0 else float("inf")
        statistic, p_value = stats.levene(group1, group2)
        return {
            "ratio": float(ratio),
            "statistic": float(statistic),
            "p_value": float(p_value),
            "significant": bool(p_value < self.alpha)
        }

    def compare_sweep(self, terminal_by_beta: Dict[float, List[float]]) -> Dict[str, Any]:
        """Adjacent-β t-tests plus a one-way ANOVA across the whole sweep."""
        betas = sorted(terminal_by_beta)
        results: Dict[str, Any] = {}
        for low, high in zip(betas, betas[1:]):
            results[f"beta_{low:g}_vs_{high:g}"] = self.t_test(
                terminal_by_beta[low], terminal_by_beta[high]
            )

        groups = [terminal_by_beta[b] for b in betas if len(terminal_by_beta[b]) > 1]
        if len(groups) > 2:
            f_stat, anova_p = stats.f_oneway(*groups)
            results["anova"] = {
                "f_statistic": float(f_stat),
                "p_value": float(anova_p),
                "significant": bool(anova_p < self.alpha)
            }
        logger.debug("compared %d sweep points", len(betas))
        return results
