"""Compiled-vs-fallback kernel agreement and determinism."""

import numpy as np
import pytest

from wignerflow import StateSpec, WignerCalculator
from wignerflow._kernel import HAVE_COMPILED, fallback_transform, transform

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED,
                                    reason="compiled kernel not built")


@pytest.fixture(scope="module")
def operands():
    rng = np.random.default_rng(42)
    f = rng.standard_normal((97, 513))
    gt = rng.standard_normal((55, 513)) + 1j * rng.standard_normal((55, 513))
    return np.ascontiguousarray(f), np.ascontiguousarray(gt)


def test_fallback_is_matmul(operands):
    f, gt = operands
    assert np.array_equal(fallback_transform(f, gt), f @ gt.T)


@needs_compiled
def test_backends_agree(operands):
    f, gt = operands
    a = transform(f, gt, backend="compiled")
    b = transform(f, gt, backend="fallback")
    scale = np.abs(b).max()
    assert np.abs(a - b).max() < 1e-13 * scale


@needs_compiled
def test_serial_parallel_bitwise_identical(operands):
    f, gt = operands
    serial = transform(f, gt, num_threads=1, backend="compiled")
    for nt in (2, 4, 7):
        assert np.array_equal(serial, transform(f, gt, nt, "compiled"))


def test_unknown_backend_rejected(operands):
    f, gt = operands
    with pytest.raises(ValueError):
        transform(f, gt, backend="gpu")


@needs_compiled
def test_field_level_backend_agreement(small_grid, params, super_state):
    a = WignerCalculator("harmonic", (0, 1), small_grid, params=params,
                         kernel_backend="compiled").field(super_state).values
    b = WignerCalculator("harmonic", (0, 1), small_grid, params=params,
                         kernel_backend="fallback").field(super_state).values
    assert np.abs(a - b).max() < 1e-12 * np.abs(b).max()


@needs_compiled
def test_field_level_thread_determinism(small_grid, params, super_state):
    a = WignerCalculator("harmonic", (0, 1), small_grid, params=params,
                         num_threads=1).field(super_state).values
    b = WignerCalculator("harmonic", (0, 1), small_grid, params=params,
                         num_threads=4).field(super_state).values
    assert np.array_equal(a, b)
