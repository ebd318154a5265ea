"""Eigenfunction and eigenenergy checks against independent oracles.

Numerical references here never reuse the package's own formulas: norms and
overlaps come from quadrature, energies from a finite-difference eigensolver,
derivatives from finite differencing the order below.
"""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from wignerflow import PhysicalParams, StateSpec, bound_state_count, eigenenergy
from wignerflow.errors import (
    NoSuchBoundStateError,
    UnsupportedOrderError,
    ValidationError,
)
from wignerflow.states import (
    at_time,
    evaluate_state,
    harmonic_eigenfunction,
    morse_eigenfunction,
)


# ---------------------------------------------------------------------------
# harmonic oscillator
# ---------------------------------------------------------------------------

def test_harmonic_orthonormality():
    x = np.linspace(-12.0, 12.0, 4001)
    psis = [harmonic_eigenfunction(n, x) for n in range(7)]
    for i in range(7):
        for j in range(7):
            ov = simpson(psis[i] * psis[j], x=x)
            assert abs(ov - (1.0 if i == j else 0.0)) < 1e-10


def test_harmonic_high_order_recurrence_stable():
    # n = 200 would overflow any factorial/Hermite-polynomial route
    x = np.linspace(-25.0, 25.0, 20001)
    psi = harmonic_eigenfunction(200, x)
    assert np.all(np.isfinite(psi))
    assert abs(simpson(psi * psi, x=x) - 1.0) < 1e-8


def test_harmonic_sign_change_count():
    # even point count keeps x = 0 (an exact node of odd states) off the grid
    x = np.linspace(-8.0, 8.0, 4000)
    for n in (0, 1, 4):
        psi = harmonic_eigenfunction(n, x)
        changes = int(np.sum(np.sign(psi[:-1]) * np.sign(psi[1:]) < 0))
        assert changes == n


@pytest.mark.parametrize("n", [0, 1, 3])
def test_harmonic_derivatives_match_finite_differences(n):
    x = np.linspace(-4.0, 4.0, 801)
    h = 1e-5
    d1 = (harmonic_eigenfunction(n, x + h) - harmonic_eigenfunction(n, x - h)) / (2 * h)
    d2 = (harmonic_eigenfunction(n, x + h) - 2.0 * harmonic_eigenfunction(n, x)
          + harmonic_eigenfunction(n, x - h)) / h ** 2
    assert np.abs(harmonic_eigenfunction(n, x, 1) - d1).max() < 1e-7
    assert np.abs(harmonic_eigenfunction(n, x, 2) - d2).max() < 1e-4


def test_harmonic_eigen_equation_residual():
    params = PhysicalParams()
    x = np.linspace(-5.0, 5.0, 1001)
    for n in (0, 3):
        psi = harmonic_eigenfunction(n, x, 0, params)
        psi2 = harmonic_eigenfunction(n, x, 2, params)
        lhs = -params.hbar ** 2 / (2 * params.mass) * psi2 \
            + 0.5 * params.spring_k * x ** 2 * psi
        resid = lhs - eigenenergy("harmonic", n, params) * psi
        assert np.abs(resid).max() < 1e-10


def test_harmonic_order_cap():
    with pytest.raises(UnsupportedOrderError):
        harmonic_eigenfunction(201, 0.0)


# ---------------------------------------------------------------------------
# Morse oscillator
# ---------------------------------------------------------------------------

def test_morse_bound_state_count():
    # lambda = sqrt(2 M D)/(a hbar) = 16 at the defaults; states n < 15.5
    assert bound_state_count(PhysicalParams()) == 16
    # just below/above half-integer thresholds
    assert bound_state_count(PhysicalParams(morse_depth=8.0, morse_range=4.0)) == 1


def test_morse_energy_closed_form():
    # E_n = hbar w0 (n + 1/2) - (hbar w0 (n + 1/2))^2 / (4 D), w0 = a sqrt(2D/M)
    params = PhysicalParams()
    w0 = 0.25 * math.sqrt(16.0)
    for n in (0, 1, 5):
        e = w0 * (n + 0.5) - (w0 * (n + 0.5)) ** 2 / 32.0
        assert eigenenergy("morse", n, params) == pytest.approx(e, abs=1e-14)
    assert eigenenergy("morse", 1, params) == pytest.approx(1.4296875, abs=1e-12)


def test_morse_energies_against_grid_eigensolver():
    """Independent oracle: dense FD Hamiltonian diagonalization."""
    params = PhysicalParams()
    n_pts, x = 1400, np.linspace(-4.0, 34.0, 1400)
    h = x[1] - x[0]
    u = params.morse_depth * (1.0 - np.exp(-params.morse_range * x)) ** 2
    t = params.hbar ** 2 / (2.0 * params.mass * h ** 2)
    ham = np.diag(u + 2.0 * t) - t * (np.eye(n_pts, k=1) + np.eye(n_pts, k=-1))
    levels = np.linalg.eigvalsh(ham)[:3]
    for n in range(3):
        assert abs(levels[n] - eigenenergy("morse", n, params)) < 5e-3


def test_morse_orthonormality():
    x = np.linspace(-4.0, 60.0, 64001)
    psis = [morse_eigenfunction(n, x) for n in (0, 1, 2)]
    for i in range(3):
        for j in range(3):
            ov = simpson(psis[i] * psis[j], x=x)
            assert abs(ov - (1.0 if i == j else 0.0)) < 1e-8


def test_morse_derivatives_match_finite_differences():
    x = np.linspace(-2.0, 20.0, 801)
    h = 1e-5
    for n in (0, 1):
        d1 = (morse_eigenfunction(n, x + h) - morse_eigenfunction(n, x - h)) / (2 * h)
        d2 = (morse_eigenfunction(n, x + h) - 2.0 * morse_eigenfunction(n, x)
              + morse_eigenfunction(n, x - h)) / h ** 2
        assert np.abs(morse_eigenfunction(n, x, 1) - d1).max() < 1e-6
        assert np.abs(morse_eigenfunction(n, x, 2) - d2).max() < 1e-3


def test_morse_eigen_equation_residual():
    params = PhysicalParams()
    x = np.linspace(-2.0, 25.0, 2001)
    psi = morse_eigenfunction(1, x, 0, params)
    psi2 = morse_eigenfunction(1, x, 2, params)
    u = params.morse_depth * (1.0 - np.exp(-params.morse_range * x)) ** 2
    resid = -0.5 * psi2 + u * psi - eigenenergy("morse", 1, params) * psi
    assert np.abs(resid).max() < 1e-8


def test_morse_unbound_level_rejected():
    with pytest.raises(NoSuchBoundStateError):
        morse_eigenfunction(16, 0.0)
    with pytest.raises(NoSuchBoundStateError):
        eigenenergy("morse", 16)
    state = StateSpec("morse", ((16, 1.0),))
    with pytest.raises(NoSuchBoundStateError):
        state.validate(PhysicalParams())


# ---------------------------------------------------------------------------
# Kerr energies and state algebra
# ---------------------------------------------------------------------------

def test_kerr_energies():
    params = PhysicalParams(kerr_lambda=2.0)
    assert eigenenergy("kerr", 0, params) == pytest.approx(1.5)
    assert eigenenergy("kerr", 1, params) == pytest.approx(10.5)
    # beat frequency of the figure superposition
    assert eigenenergy("kerr", 1, params) - eigenenergy("kerr", 0, params) \
        == pytest.approx(9.0)


def test_state_validation():
    with pytest.raises(ValidationError):
        StateSpec("harmonic", ((0, 0.5), (1, 0.5)))  # |c|^2 sums to 0.5
    with pytest.raises(ValidationError):
        StateSpec("harmonic", ((0, math.sqrt(0.5)), (0, math.sqrt(0.5))))
    with pytest.raises(ValidationError):
        StateSpec("harmonic", ())
    with pytest.raises(ValidationError):
        StateSpec("hydrogen", ((0, 1.0),))


def test_evaluate_state_linearity(super_state, params):
    x = np.linspace(-3.0, 3.0, 101)
    total = evaluate_state(super_state, x, params)
    parts = sum(
        c * evaluate_state(StateSpec("harmonic", ((n, 1.0),)), x, params)
        for n, c in super_state.terms
    )
    assert np.array_equal(total, parts)


def test_evaluate_state_periodicity(super_state, params):
    # harmonic spacing hbar w = 1: after t = 2 pi the state returns to a
    # global phase, so |psi| matches
    x = np.linspace(-3.0, 3.0, 101)
    a = np.abs(evaluate_state(super_state, x, params))
    b = np.abs(evaluate_state(at_time(super_state, 2.0 * math.pi), x, params))
    assert np.abs(a - b).max() < 1e-12
