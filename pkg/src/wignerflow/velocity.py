"""Wigner phase-space velocity w = J / W and its divergence.

The divergence is formed from the identity

    div w = -(J . grad W + W dW/dt) / W^2,

which is exact but singular on the zero set of W; points with |W| below a
threshold are masked, never averaged over. The gradient of W defaults to the
analytic quadrature fields when a calculator is supplied (finite differences
of W amplify catastrophically after division by W^2); the sampled-stencil
route remains available for independent cross checks.
"""

import math

import numpy as np

from .flow import gradient_fields
from .grids import DivergenceMap, MaskedVectorField, ScalarField, require_same_grid

DEFAULT_MASK_FRACTION = 1e-12


def mask_threshold(w, eps_w=None):
    if eps_w is None:
        eps_w = DEFAULT_MASK_FRACTION * float(np.abs(w.values).max())
    return eps_w


def phase_velocity(j, w, eps_w=None):
    """w = J / W where |W| >= eps_w, masked elsewhere."""
    grid = require_same_grid(j, w)
    eps_w = mask_threshold(w, eps_w)
    valid = np.abs(w.values) >= eps_w
    w_x = np.zeros(grid.shape)
    w_p = np.zeros(grid.shape)
    np.divide(j.j_x, w.values, out=w_x, where=valid)
    np.divide(j.j_p, w.values, out=w_p, where=valid)
    return MaskedVectorField(grid, w_x, w_p, valid, quantity="phase_velocity",
                             meta={"eps_w": eps_w})


def compress_divergence(raw):
    """Pointwise (2/pi) arctan, mapping the real line onto [-1, 1]."""
    return ScalarField(raw.grid, (2.0 / math.pi) * np.arctan(raw.values),
                       quantity="compressed_divergence", meta=dict(raw.meta))


def velocity_divergence(j, w, dwdt=None, eps_w=None, grad_w=None):
    """Divergence map of w from J, W, dW/dt and grad W.

    ``dwdt = None`` means an energy eigenstate (the time term drops).
    ``grad_w`` takes precomputed (dW/dx, dW/dp) arrays; if omitted they are
    formed by the sampled-derivative stencils.
    """
    fields = [j, w] + ([dwdt] if dwdt is not None else [])
    grid = require_same_grid(*fields)
    eps_w = mask_threshold(w, eps_w)
    if grad_w is None:
        w_x, w_p = gradient_fields(w)
    else:
        w_x, w_p = grad_w
    valid = np.abs(w.values) >= eps_w
    numer = j.j_x * w_x + j.j_p * w_p
    if dwdt is not None:
        numer = numer + w.values * dwdt.values
    raw_vals = np.zeros(grid.shape)
    np.divide(-numer, w.values ** 2, out=raw_vals, where=valid)
    raw = ScalarField(grid, raw_vals, quantity="velocity_divergence",
                      meta={"eps_w": eps_w})
    compressed = compress_divergence(raw)
    compressed.values[~valid] = 0.0
    return DivergenceMap(raw=raw, compressed=compressed, valid=valid)


def analytic_gradient(state, calc):
    """grad W from the quadrature engine's derivative fields."""
    return calc.field(state, 1, 0).values, calc.field(state, 0, 1).values


def statistics_mask(w, fraction=1e-3):
    """|W| > fraction * max|W|: the set on which divergence claims are asserted."""
    return np.abs(w.values) > fraction * float(np.abs(w.values).max())
