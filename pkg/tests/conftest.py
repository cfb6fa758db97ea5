import numpy as np
import pytest

from qkerr.dynamics import TwoModeState


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)


def random_triangle_state(rng: np.random.Generator, n_max: int) -> TwoModeState:
    """Random normalized two-mode state supported on n + m <= n_max."""
    dim = n_max + 1
    table = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    n_idx, m_idx = np.indices((dim, dim))
    table[n_idx + m_idx > n_max] = 0.0
    table /= np.linalg.norm(table)
    return TwoModeState(n_max=n_max, amplitudes=table)
