import numpy as np
import pytest

from condensate_lab import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure algorithms."""
    q = np.zeros(5)
    _kernels.rk4_radial_batch(q, np.array([1.0]), 0.1, np.array([0.0]), np.array([1.0]))
    _kernels.rk4_phase(q, 1.0, 0.1)
    _kernels.cn_evolve(np.ones(8, dtype=complex), np.zeros(8), 0.1, 1e-3, 2)
    _kernels.pair_rows(np.zeros((3, 3)), 0.5)
