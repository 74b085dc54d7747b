import numpy as np
import pytest

from boxforge import box_core as bc

_ALL_VERTICES = [bc.make_vertex(v) for v in bc.local_vertices() + bc.nonlocal_vertices()]


def make_random_ns_box(rng: np.random.Generator, concentration: float = 1.0) -> bc.Box222:
    """Random no-signaling box: a Dirichlet mixture of all 24 vertices."""
    w = rng.dirichlet(np.full(24, concentration))
    table = sum(wi * b.table for wi, b in zip(w, _ALL_VERTICES))
    return bc.Box222(table)


@pytest.fixture(scope="session")
def all_vertices():
    return list(_ALL_VERTICES)


@pytest.fixture
def random_ns_box():
    """Factory fixture wrapping :func:`make_random_ns_box`."""
    return make_random_ns_box
