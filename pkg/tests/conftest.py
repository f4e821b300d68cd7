import numpy as np
import pytest

from somimpute import DataMatrix


@pytest.fixture
def small_incomplete():
    """4x3 matrix with a scattered mask, an all-missing row, and labels."""
    values = np.array(
        [
            [1.0, 2.0, 3.0],
            [4.0, np.nan, 6.0],
            [np.nan, np.nan, np.nan],
            [7.0, 8.0, np.nan],
        ]
    )
    mask = np.isfinite(values)
    return DataMatrix(values, mask, ("a", "b", "c", "d"), ("x", "y", "z"))


def random_incomplete(seed, n=12, p=4, missing=0.3):
    """Seeded matrix with roughly ``missing`` masked cells, every column kept alive."""
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(n, p))
    mask = rng.random((n, p)) >= missing
    for k in range(p):
        if not mask[:, k].any():
            mask[rng.integers(n), k] = True
    return DataMatrix(
        values, mask, tuple(f"r{i}" for i in range(n)), tuple(f"c{k}" for k in range(p))
    )
