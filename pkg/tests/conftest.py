"""Shared fixtures: seeded RNGs and random network factories."""

import numpy as np
import pytest

from anbeam.types import NetworkInstance


@pytest.fixture
def rng():
    return np.random.default_rng(0xA11CE)


def make_instance(rng, m, var_sr=1.0, var_rd=1.0, var_sd=0.25, sigma2=1.0):
    """Random network with CN gains; mirrors the experiment defaults."""
    def cn(var, size=None):
        sd = np.sqrt(var / 2.0)
        return rng.normal(0.0, sd, size) + 1j * rng.normal(0.0, sd, size)

    return NetworkInstance(
        h_sd=complex(cn(var_sd)),
        h_sr=cn(var_sr, m),
        h_rd=cn(var_rd, m),
        sigma2=sigma2,
    )


@pytest.fixture
def instance_factory():
    return make_instance


def random_weights(rng, m, scale=1.0):
    return scale * (rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1))
