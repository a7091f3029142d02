"""Shared fixtures: materials, meshes and a seeded generator.

Sphere tessellations are cached per session; several modules compare
against the same meshes and rebuilding them dominates test runtime.
"""

import numpy as np
import pytest

from eshelby import Material, make_cuboid, tessellate_sphere


@pytest.fixture(scope="session")
def mat():
    """The reference conductor: K = 0.05, Cp = 1, alpha = 0.05 SI."""
    return Material(K=0.05, Cp=1.0)


@pytest.fixture(scope="session")
def cube():
    """0.2 m cube centered at the origin."""
    return make_cuboid(0.2, 0.2, 0.2)


@pytest.fixture(scope="session")
def _sphere_cache():
    return {}


@pytest.fixture(scope="session")
def sphere_mesh(_sphere_cache):
    """Factory for cached radius-0.1 sphere tessellations."""

    def get(refinement: int, radius: float = 0.1):
        key = (radius, refinement)
        if key not in _sphere_cache:
            _sphere_cache[key] = tessellate_sphere(radius, refinement)
        return _sphere_cache[key]

    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(20260826)
