"""Shared fixtures: the reference scenario and random instance factories."""

from __future__ import annotations

import numpy as np
import pytest

import irsmse as ir


@pytest.fixture(scope="session")
def ref_geometry() -> ir.Geometry:
    return ir.Geometry(ap=(0.0, 0.0), irs=(100.0, 0.0), user=(100.0, 20.0))


@pytest.fixture(scope="session")
def ref_fading() -> ir.FadingParams:
    return ir.FadingParams(l0=1e-3, alpha_los=2.0, alpha_nlos=3.0, ricean_k=10.0)


@pytest.fixture(scope="session")
def ref_gains(ref_geometry, ref_fading) -> ir.LinkGains:
    return ir.LinkGains.from_geometry(ref_geometry, ref_fading)


def random_estimate(rng: np.random.Generator, m: int, n: int, scale: float = 1.0) -> ir.ChannelEstimate:
    """An order-one random channel estimate (no geometry attached)."""

    def cn(shape):
        return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)

    return ir.ChannelEstimate(G=cn((n, m)), h_r=cn(n), h_d=cn(m))


def random_unit_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random unit-modulus complex vector."""
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=n))


@pytest.fixture
def make_estimate():
    return random_estimate


@pytest.fixture
def make_unit_vector():
    return random_unit_vector
