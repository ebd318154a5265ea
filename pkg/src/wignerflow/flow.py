"""Wigner flow fields J and their divergence.

Three routes to J:

* ``harmonic_flow``   -- exact closed form J = W (p/M, -k x);
* ``mechanical_flow`` -- truncated hbar series for any smooth potential,
  with p-derivatives of W taken from the quadrature moment weight;
* ``kerr_flow``       -- the Kerr oscillator components, which are not of
  the mechanical-series form.

All series terms are real: (i hbar / 2)^{2l} = (-1)^l (hbar/2)^{2l}.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationNotConvergedError, ValidationError
from .grids import ScalarField, VectorField, require_same_grid
from .states import PhysicalParams
from .wigner import calculator_for

BOUNDARY_BAND = 2  # cells of reduced-accuracy one-sided stencils at each edge


@dataclass(frozen=True)
class PotentialModel:
    """Potential with exact derivatives of every order (never differenced)."""

    kind: str
    spring_k: float = None
    depth: float = None
    rng: float = None
    coefficients: tuple = None

    @classmethod
    def harmonic(cls, spring_k):
        return cls(kind="harmonic", spring_k=float(spring_k))

    @classmethod
    def morse(cls, depth, rng):
        return cls(kind="morse", depth=float(depth), rng=float(rng))

    @classmethod
    def polynomial(cls, coefficients):
        # coefficients[i] multiplies x^i
        return cls(kind="polynomial", coefficients=tuple(float(c) for c in coefficients))

    @classmethod
    def for_params(cls, system, params):
        if system in ("harmonic", "kerr"):
            return cls.harmonic(params.spring_k)
        if system == "morse":
            return cls.morse(params.morse_depth, params.morse_range)
        raise ValidationError(f"no potential model for system {system!r}")

    def derivative(self, x, order=0):
        """Exact d^order U / dx^order at x (order 0 is U itself)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "harmonic":
            if order == 0:
                return 0.5 * self.spring_k * x * x
            if order == 1:
                return self.spring_k * x
            if order == 2:
                return np.full_like(x, self.spring_k)
            return np.zeros_like(x)
        if self.kind == "morse":
            a, d = self.rng, self.depth
            if order == 0:
                return d * (1.0 - np.exp(-a * x)) ** 2
            return d * (
                -2.0 * (-a) ** order * np.exp(-a * x)
                + (-2.0 * a) ** order * np.exp(-2.0 * a * x)
            )
        if self.kind == "polynomial":
            out = np.zeros_like(x)
            for i, c in enumerate(self.coefficients):
                if i < order or c == 0.0:
                    continue
                fall = 1.0
                for k in range(order):
                    fall *= i - k
                out += c * fall * x ** (i - order)
            return out
        raise ValidationError(f"unknown potential kind {self.kind!r}")

    def max_nonzero_order(self):
        """Highest derivative order that is not identically zero (None if all)."""
        if self.kind == "harmonic":
            return 2
        if self.kind == "polynomial":
            deg = max((i for i, c in enumerate(self.coefficients) if c != 0.0), default=0)
            return deg
        return None


@dataclass(frozen=True)
class TruncationPolicy:
    """Stop the hbar series at L_max or once the tail is relatively tiny."""

    l_max: int = 8
    tail_tol: float = 1e-10

    def __post_init__(self):
        problems = []
        if self.l_max < 0:
            problems.append("l_max must be non-negative")
        if not self.tail_tol > 0:
            problems.append("tail_tol must be positive")
        if problems:
            raise ValidationError(problems)


def potential_derivative(pot, x, order=0):
    return pot.derivative(x, order)


def sampled_derivative(values, h, axis):
    """Derivative of uniformly sampled values along one axis.

    4th-order central stencil in the interior, 2nd-order (one-sided at the
    very edge, central next to it) in the two-cell boundary band.
    """
    f = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = f.shape[0]
    if n < 8:
        raise ValidationError("need at least 8 samples along the axis")
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    out[1] = (f[2] - f[0]) / (2.0 * h)
    out[-2] = (f[-1] - f[-3]) / (2.0 * h)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def harmonic_flow(state, grid, quad=None, params=None, calc=None):
    """Exact harmonic Wigner flow J = W (p/M, -k x)."""
    params = params or PhysicalParams()
    if state.basis not in ("harmonic", "kerr"):
        raise ValidationError("harmonic_flow needs a harmonic-basis state")
    calc = calc or calculator_for(state, grid, quad, params)
    w = calc.field(state, 0, 0)
    j_x = w.values * (grid.p / params.mass)[None, :]
    j_p = -((params.spring_k * grid.x)[:, None] * w.values)
    return VectorField(grid, j_x, j_p, quantity="wigner_flow",
                       meta={"form": "harmonic", "t": state.t})


def mechanical_flow(state, grid, pot, trunc=None, quad=None, params=None, calc=None):
    """Truncated hbar-series Wigner flow for a mechanical Hamiltonian.

    J_x = (p/M) W,
    J_p = -sum_l (-1)^l (hbar/2)^{2l} / (2l+1)!  d_p^{2l}W  d_x^{2l+1}U,

    summed in ascending l. Polynomial potentials terminate naturally; other
    potentials stop once a term's grid max falls below tail_tol times the
    running sum's grid max, else raise after l_max.
    """
    params = params or PhysicalParams()
    trunc = trunc or TruncationPolicy()
    calc = calc or calculator_for(state, grid, quad, params)
    w = calc.field(state, 0, 0)
    j_x = w.values * (grid.p / params.mass)[None, :]

    top = pot.max_nonzero_order()
    acc = np.zeros(grid.shape)
    term_norms = []
    converged = top is not None  # a finite series is converged by construction
    for l in range(trunc.l_max + 1):
        order = 2 * l + 1
        if top is not None and order > top:
            break
        du = pot.derivative(grid.x, order)
        dw = w.values if l == 0 else calc.field(state, 0, 2 * l).values
        coeff = (-1.0) ** l * (params.hbar / 2.0) ** (2 * l) / math.factorial(order)
        term = coeff * du[:, None] * dw
        acc = acc + term if l > 0 else term
        norm = float(np.abs(term).max())
        term_norms.append(norm)
        ref = float(np.abs(acc).max())
        if l > 0 and norm < trunc.tail_tol * ref:
            converged = True
            break
    if not converged:
        raise TruncationNotConvergedError(
            f"hbar series tail {term_norms[-1]:.3e} above tolerance after "
            f"l = {trunc.l_max}", term_norms[-1]
        )
    j_p = -acc
    return VectorField(
        grid, j_x, j_p, quantity="wigner_flow",
        meta={"form": "mechanical", "t": state.t,
              "series_terms": len(term_norms), "term_norms": term_norms},
    )


def kerr_flow(state, grid, quad=None, params=None, calc=None):
    """Kerr oscillator Wigner flow.

    The quantum pieces need d_x^2 W, d_p^2 W and the first derivatives (the
    operator products expand as d_p^2(pW) = p d_p^2 W + 2 d_p W and
    d_x^2(xW) = x d_x^2 W + 2 d_x W). At Lambda = 0 the closed harmonic form
    is returned unchanged.
    """
    params = params or PhysicalParams()
    if state.basis not in ("harmonic", "kerr"):
        raise ValidationError("kerr_flow needs a harmonic-basis state")
    calc = calc or calculator_for(state, grid, quad, params)
    if params.kerr_lambda == 0.0:
        return harmonic_flow(state, grid, quad, params, calc=calc)

    m, k, hbar = params.mass, params.spring_k, params.hbar
    lam2 = params.kerr_lambda ** 2
    x = grid.x[:, None]
    p = grid.p[None, :]
    w = calc.field(state, 0, 0).values
    w_x = calc.field(state, 1, 0).values
    w_xx = calc.field(state, 2, 0).values
    w_p = calc.field(state, 0, 1).values
    w_pp = calc.field(state, 0, 2).values

    j_x = lam2 * (
        -(hbar ** 2 / (4.0 * m ** 2)) * p * w_xx
        + (p ** 3 / m ** 2 + k * x ** 2 * p / m) * w
        - (hbar ** 2 * k / (4.0 * m)) * (p * w_pp + 2.0 * w_p)
    ) + w * (grid.p / m)[None, :]
    j_p = lam2 * (
        (hbar ** 2 * k ** 2 / 4.0) * x * w_pp
        - (k ** 2 * x ** 3 + k * x * p ** 2 / m) * w
        + (hbar ** 2 * k / (4.0 * m)) * (x * w_xx + 2.0 * w_x)
    ) - ((k * grid.x)[:, None] * w)
    return VectorField(grid, j_x, j_p, quantity="wigner_flow",
                       meta={"form": "kerr", "t": state.t})


def flow_for_system(system, state, grid, quad=None, params=None, trunc=None, calc=None):
    """Pick the appropriate flow construction for a model system."""
    if system == "harmonic":
        return harmonic_flow(state, grid, quad, params, calc=calc)
    if system == "kerr":
        return kerr_flow(state, grid, quad, params, calc=calc)
    if system == "morse":
        pot = PotentialModel.for_params("morse", params or PhysicalParams())
        return mechanical_flow(state, grid, pot, trunc, quad, params, calc=calc)
    raise ValidationError(f"unknown system {system!r}")


def flow_divergence(j):
    """div J by the sampled-derivative stencils; edge band is reduced accuracy."""
    grid = j.grid
    div = sampled_derivative(j.j_x, grid.dx, axis=0) + \
        sampled_derivative(j.j_p, grid.dp, axis=1)
    return ScalarField(grid, div, quantity="flow_divergence",
                       meta={"boundary_band": BOUNDARY_BAND})


def gradient_fields(field):
    """(d/dx, d/dp) of a scalar field by the same stencils."""
    grid = field.grid
    gx = sampled_derivative(field.values, grid.dx, axis=0)
    gp = sampled_derivative(field.values, grid.dp, axis=1)
    return gx, gp


def interior(values, band=BOUNDARY_BAND):
    """View without the reduced-accuracy boundary band."""
    return np.asarray(values)[band:-band, band:-band]
