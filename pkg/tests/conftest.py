import math

import numpy as np
import pytest

import collapselab as cl


@pytest.fixture(scope="session")
def params_4d_ref():
    """Reference supercritical 4D parameter set used throughout."""
    return cl.select_parameters_4d(1.0, 1.0, 700.0)


@pytest.fixture(scope="session")
def pair_4d_ref(params_4d_ref):
    return cl.SubsolutionPair4D(params_4d_ref)


@pytest.fixture(scope="session")
def params_2d_ref():
    return cl.select_parameters_2d(16.0 * math.pi)


@pytest.fixture(scope="session")
def sub_2d_ref(params_2d_ref):
    return cl.Subsolution2D(params_2d_ref)


def random_smooth_density(rng, r, floor=0.05):
    """Positive trigonometric test density on the given radii."""
    vals = np.ones_like(r)
    for k in range(1, 5):
        vals = vals + rng.uniform(-0.15, 0.15) * np.cos(k * math.pi * r)
    return cl.RadialProfile(r=r, values=np.clip(vals, floor, None))
