import numpy as np
import pytest

from loopbu import Loop, south_pole


def random_sphere_loop(rng, n, m, modes=3):
    """Random smooth closed loop on S^n through the south pole."""
    base = south_pole(n)
    t = np.arange(m + 1) / m
    pts = np.zeros((m + 1, n + 1))
    for _ in range(modes):
        k = int(rng.integers(1, 4))
        pts += np.outer(np.sin(2 * np.pi * k * t), rng.standard_normal(n + 1))
        pts += np.outer(np.cos(2 * np.pi * k * t) - 1.0, rng.standard_normal(n + 1))
    pts += base
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts[0] = base
    pts[-1] = base
    return Loop(pts, base)


def random_euclidean_loop(rng, dim, m, modes=3):
    """Random smooth closed loop in R^dim (a Fourier polynomial)."""
    t = np.arange(m + 1) / m
    pts = np.zeros((m + 1, dim))
    for _ in range(modes):
        k = int(rng.integers(1, 4))
        pts += np.outer(np.sin(2 * np.pi * k * t), rng.standard_normal(dim))
        pts += np.outer(np.cos(2 * np.pi * k * t) - 1.0, rng.standard_normal(dim))
    base = rng.standard_normal(dim)
    pts += base
    return Loop(pts, base, manifold="euclidean")


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
