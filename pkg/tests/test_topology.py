"""Topology extraction on synthetic fields with known structure, plus the
package's own harmonic eigenstate whose zero set is a circle."""

import math

import numpy as np
import pytest

from wignerflow import (
    LoopPath,
    PhaseGrid,
    StateSpec,
    circle_loop,
    pinch_point_report,
    poincare_index,
    stagnation_points,
    streamline,
    wigner_field,
    zero_contours,
)
from wignerflow.errors import LoopThroughStagnationError, ValidationError
from wignerflow.grids import ScalarField, VectorField
from wignerflow.topology import BilinearField, _contour_sign_changes


def _grid(n=81, half=2.0):
    return PhaseGrid(-half, half, n, -half, half, n)


def _vector(grid, fx, fp):
    xx = grid.x[:, None] + 0.0 * grid.p[None, :]
    pp = 0.0 * grid.x[:, None] + grid.p[None, :]
    return VectorField(grid, fx(xx, pp), fp(xx, pp), quantity="flow")


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------

def test_zero_contour_of_first_eigenstate_is_circle(params):
    # W_1 = 0 on the circle 2H/(hbar w) = 1/2, i.e. x^2 + p^2 = 1/2
    grid = _grid(101, 3.0)
    w = wigner_field(StateSpec("harmonic", ((1, 1.0),)), grid, params=params)
    cs = zero_contours(w)
    assert len(cs) == 1
    c = cs.contours[0]
    assert c.closed
    radii = np.hypot(c.vertices[:, 0], c.vertices[:, 1])
    assert np.abs(radii - math.sqrt(0.5)).max() < 2.0 * grid.dx


def test_zero_contour_of_linear_field_is_axis():
    grid = _grid(41)
    f = ScalarField(grid, np.broadcast_to(grid.p[None, :], grid.shape).copy(),
                    quantity="p")
    cs = zero_contours(f)
    assert len(cs) == 1
    c = cs.contours[0]
    assert not c.closed
    assert np.abs(c.vertices[:, 1]).max() < 1e-12
    assert len(c.vertices) >= grid.n_x - 1


def test_positive_field_has_no_contours():
    grid = _grid(41)
    cs = zero_contours(ScalarField(grid, np.ones(grid.shape) + 0.1, quantity="c"))
    assert len(cs) == 0
    assert cs.all_segments().shape == (0, 4)


# ---------------------------------------------------------------------------
# stagnation points and indices
# ---------------------------------------------------------------------------

def test_center_and_saddle_detection():
    grid = _grid()
    center = _vector(grid, lambda x, p: p, lambda x, p: -x)
    pts = stagnation_points(center)
    assert len(pts) == 1
    assert abs(pts[0].x) < 1e-9 and abs(pts[0].p) < 1e-9
    assert pts[0].index == 1
    saddle = _vector(grid, lambda x, p: x, lambda x, p: -p)
    pts = stagnation_points(saddle)
    assert len(pts) == 1
    assert pts[0].index == -1


def test_off_grid_zero_located_subcell():
    grid = _grid()
    shift = 0.313  # not on any grid line
    j = _vector(grid, lambda x, p: x - shift, lambda x, p: p + shift)
    pts = stagnation_points(j)
    assert len(pts) == 1
    assert abs(pts[0].x - shift) < 1e-9
    assert abs(pts[0].p + shift) < 1e-9


def test_index_additivity():
    # two +1 zeros from the complex square root pair (z - a)(z + a)
    grid = _grid(101, 3.0)
    j = _vector(grid, lambda x, p: x * x - p * p - 1.0, lambda x, p: 2.0 * x * p)
    pts = sorted(stagnation_points(j), key=lambda q: q.x)
    assert len(pts) == 2 and all(q.index == 1 for q in pts)
    # the sub-cell model is bilinear, so positions carry O(h^2) curvature bias
    assert abs(pts[0].x + 1.0) < 1e-3 and abs(pts[1].x - 1.0) < 1e-3
    assert max(abs(q.p) for q in pts) < 1e-3
    big = poincare_index(BilinearField(j), circle_loop((0.0, 0.0), 2.5, 64))
    assert big == 2


def test_degenerate_zero_curve_suppressed():
    # J = W (1, 1) with W = x vanishes along the whole p axis: no isolated
    # stagnation points exist, and candidates must be flagged degenerate
    grid = _grid()
    j = _vector(grid, lambda x, p: x, lambda x, p: x)
    assert stagnation_points(j) == []
    flagged = stagnation_points(j, include_degenerate=True)
    assert flagged and all(q.degenerate for q in flagged)


def test_noise_floor_discards_roundoff_zeros():
    # an order-one localized feature sets the field scale; roundoff-level
    # sign crossings elsewhere must not surface as stagnation points
    grid = _grid()
    rng = np.random.default_rng(7)
    xx = grid.x[:, None]
    pp = grid.p[None, :]
    bump = np.exp(-((xx - 1.5) ** 2 + (pp - 1.5) ** 2) / 0.1)
    jx = bump + 1e-13 * rng.standard_normal(grid.shape)
    jp = bump + 1e-13 * rng.standard_normal(grid.shape)
    assert stagnation_points(VectorField(grid, jx, jp, quantity="flow")) == []


def test_loop_validation():
    with pytest.raises(ValidationError):
        LoopPath([[0, 0], [1, 0]])  # too short
    with pytest.raises(ValidationError):  # figure eight
        LoopPath([[0, 0], [1, 1], [1, 0], [0, 1]])
    with pytest.raises(ValidationError):  # clockwise
        LoopPath([[0, 0], [0, 1], [1, 1], [1, 0]])
    LoopPath([[0, 0], [1, 0], [1, 1], [0, 1]])  # ccw square is fine


def test_winding_of_analytic_evaluators():
    def center(x, p):
        return np.array([p, -x])

    def doubled(x, p):  # z^2: index 2
        return np.array([x * x - p * p, 2.0 * x * p])

    loop = circle_loop((0.0, 0.0), 1.0, 16)
    assert poincare_index(center, loop) == 1
    assert poincare_index(doubled, loop) == 2
    off = circle_loop((5.0, 0.0), 1.0, 16)
    assert poincare_index(center, off) == 0


def test_loop_through_stagnation_raises():
    def center(x, p):
        return np.array([p, -x])

    square = LoopPath([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    assert poincare_index(center, square) == 1
    through = LoopPath([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])  # vertex at zero
    with pytest.raises(LoopThroughStagnationError):
        poincare_index(center, through)


# ---------------------------------------------------------------------------
# streamlines
# ---------------------------------------------------------------------------

def test_streamline_tangent_and_circular():
    def center(x, p):
        return np.array([p, -x])

    line = streamline(center, (1.0, 0.0), step=1e-3, max_length=2.0 * math.pi)
    pts = line.points
    radii = np.hypot(pts[:, 0], pts[:, 1])
    assert np.abs(radii - 1.0).max() < 1e-6
    # tangency: step directions align with the field
    mids = 0.5 * (pts[1:] + pts[:-1])
    segs = pts[1:] - pts[:-1]
    field = np.stack([mids[:, 1], -mids[:, 0]], axis=1)
    cross = segs[:, 0] * field[:, 1] - segs[:, 1] * field[:, 0]
    norm = np.hypot(*segs.T) * np.hypot(*field.T)
    assert np.abs(cross / norm).max() < 1e-6
    # closes after one revolution
    assert np.hypot(pts[-1, 0] - 1.0, pts[-1, 1]) < 1e-3


def test_streamline_termination_reasons():
    def outward(x, p):
        return np.array([1.0, 0.0])

    grid = _grid(41)
    j = _vector(grid, lambda x, p: np.ones_like(x), lambda x, p: np.zeros_like(x))
    line = streamline(j, (1.9, 0.0))
    assert line.terminated == "boundary"
    line = streamline(outward, (0.0, 0.0), max_length=0.5)
    assert line.terminated == "length"
    zero = _vector(grid, lambda x, p: 0.0 * x, lambda x, p: 0.0 * x)
    assert streamline(zero, (0.0, 0.0)).terminated == "seed_stagnation"


# ---------------------------------------------------------------------------
# pinch points
# ---------------------------------------------------------------------------

def test_contour_sign_change_gating():
    verts = np.column_stack([np.zeros(101), np.linspace(-2, 2, 101)])
    vals = verts[:, 1] - 1.0  # one genuine crossing at p = 1
    hits = _contour_sign_changes(verts, vals, closed=False, gate=0.1)
    assert len(hits) == 1
    assert abs(hits[0][1] - 1.0) < 1e-9
    # same crossing buried under the gate is discarded
    assert _contour_sign_changes(verts, 1e-6 * vals, False, gate=0.1) == []


def test_pinch_report_synthetic():
    # W = x has a vertical zero line; J = (1, p - 1) crosses J_p = 0 at p = 1
    grid = _grid(81)
    w = ScalarField(grid, np.broadcast_to(grid.x[:, None], grid.shape).copy(),
                    quantity="w")
    j = _vector(grid, lambda x, p: np.ones_like(x), lambda x, p: p - 1.0)
    rep = pinch_point_report(w, j, stagnation=[])
    assert len(rep.unmatched_pinch) == 1
    (px, pp), = rep.unmatched_pinch
    assert abs(px) < 1e-9 and abs(pp - 1.0) < 1e-9
    assert rep.pairs == []
