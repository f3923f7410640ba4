import numpy as np
import pytest

from econstat.analytics import fit_two_class
from econstat.synthetic import two_class_sample, two_class_truth


@pytest.fixture(scope="session")
def two_class_million():
    """(truth, fit) for a 10^6-point exponential + Pareto mixture."""
    truth = two_class_truth(20.3, 1.5, 0.03)
    x = two_class_sample(truth, 10**6, np.random.default_rng(1996))
    return truth, fit_two_class(x)
