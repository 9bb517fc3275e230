import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_pair(rng, max_side=16, distinct_levels=None):
    """Random (saliency, mask) with at least one positive and one negative."""
    h = int(rng.integers(2, max_side + 1))
    w = int(rng.integers(2, max_side + 1))
    if distinct_levels:
        sal = rng.integers(0, distinct_levels, (h, w)).astype(np.float64) / (distinct_levels - 1)
    else:
        sal = rng.random((h, w))
    while True:
        mask = (rng.random((h, w)) < rng.uniform(0.1, 0.9)).astype(np.uint8)
        if 0 < mask.sum() < mask.size:
            return sal, mask
