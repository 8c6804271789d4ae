import numpy as np
import pytest
from scipy import stats

import nets


@pytest.fixture(scope="session")
def battery20():
    return nets.battery(20)


@pytest.fixture(scope="session")
def small_named():
    return nets.small_named()


def chisquare_pvalue(observed_counts, expected_probs, total):
    """Chi-square goodness-of-fit p-value with small expected bins pooled.

    Bins outside the support must be empty; they are removed rather than
    pooled so deterministic distributions do not produce NaN statistics.
    """
    expected = np.asarray(expected_probs, dtype=float) * total
    observed = np.asarray(observed_counts, dtype=float)
    support = expected > 0
    assert observed[~support].sum() == 0, "samples observed outside the exact support"
    observed, expected = observed[support], expected[support]
    keep = expected >= 5.0
    if not keep.all():
        observed = np.append(observed[keep], observed[~keep].sum())
        expected = np.append(expected[keep], expected[~keep].sum())
    if len(expected) < 2:
        return 1.0
    return float(stats.chisquare(observed, expected).pvalue)


def binomial_sigma(p, n):
    return float(np.sqrt(p * (1.0 - p) / n))
