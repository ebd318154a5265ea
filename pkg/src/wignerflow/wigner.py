"""Wigner function, its mixed derivatives, and its time derivative.

Everything is built from cross terms between pairs of basis states,

    B_mn(x, p) = (1/pi hbar) Int dy psi_m(x+y) psi_n(x-y) (2iy/hbar)^b
                 exp(2ipy/hbar)        (with d^a/dx^a by the product rule),

evaluated by Simpson quadrature on a fixed symmetric y-window. p-derivatives
enter only through the (2iy/hbar)^b moment weight, never as finite
differences. Pair fields are time-independent and cached, so sweeping the
time parameter of a superposition costs one complex recombination per step.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_laguerre

from . import _kernel
from .errors import InsufficientQuadratureWindowError, ValidationError
from .grids import ScalarField
from .states import PhysicalParams, eigenenergy, eigenfunction

_TAIL_AUTO = 1e-12   # auto window: envelope below this fraction of its max
_TAIL_ERROR = 1e-10  # hard error threshold at the window edge


@dataclass(frozen=True)
class QuadratureSpec:
    """Simpson rule over y in [-Y, Y]; Y = None picks the window automatically."""

    y_halfwidth: float = None
    n_samples: int = 1025
    rule: str = "simpson"

    def __post_init__(self):
        problems = []
        if self.rule != "simpson":
            problems.append(f"unknown quadrature rule {self.rule!r}")
        if self.n_samples < 65 or self.n_samples % 2 == 0:
            problems.append("n_samples must be odd and at least 65")
        if self.y_halfwidth is not None and not self.y_halfwidth > 0:
            problems.append("y_halfwidth must be positive")
        if problems:
            raise ValidationError(problems)


def _simpson_weights(n, dy):
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (dy / 3.0)


class WignerCalculator:
    """Caches eigenfunction tables and pair fields for one (basis, grid, quad).

    Reusable across states that draw on the same quantum numbers, across
    derivative orders, and across time sweeps.
    """

    def __init__(self, basis, quantum_numbers, grid, quad=None, params=None,
                 kernel_backend=None, num_threads=1):
        self.basis = basis
        self.ns = tuple(sorted(set(int(n) for n in quantum_numbers)))
        self.grid = grid
        self.quad = quad or QuadratureSpec()
        self.params = params or PhysicalParams()
        self.kernel_backend = kernel_backend
        self.num_threads = num_threads

        self.y_halfwidth = self._choose_window()
        self._check_tail()
        self.y = np.linspace(-self.y_halfwidth, self.y_halfwidth, self.quad.n_samples)
        self._weights = _simpson_weights(self.quad.n_samples, self.y[1] - self.y[0])
        x = grid.x
        self._x_plus = x[:, None] + self.y[None, :]
        self._x_minus = x[:, None] - self.y[None, :]
        # base Fourier phase, shared by every moment order: exp(2 i p y / hbar)
        self._phase = np.exp(
            2j / self.params.hbar * np.outer(grid.p, self.y)
        )  # (n_p, n_y)
        self._psi_tables = {}
        self._gt_cache = {}
        self._pair_cache = {}

    # -- window selection ---------------------------------------------------

    def _envelope(self, u):
        amp = np.zeros_like(np.asarray(u, dtype=float))
        for n in self.ns:
            amp = np.maximum(amp, np.abs(eigenfunction(self.basis, n, u, 0, self.params)))
        return amp

    def _choose_window(self):
        if self.quad.y_halfwidth is not None:
            return self.quad.y_halfwidth
        g = self.grid
        step = min(g.dx, 0.05)
        span = g.x_max - g.x_min
        u = np.arange(g.x_min - 8.0 * span - 20.0, g.x_max + 8.0 * span + 20.0, step)
        amp = self._envelope(u)
        cut = _TAIL_AUTO * amp.max()
        inside = np.nonzero(amp > cut)[0]
        u_lo, u_hi = u[inside[0]], u[inside[-1]]
        return max(u_hi - g.x_min, g.x_max - u_lo) + step

    def _check_tail(self):
        g = self.grid
        edge = max(
            float(self._envelope(g.x_min + self.y_halfwidth)),
            float(self._envelope(g.x_max - self.y_halfwidth)),
        )
        peak = float(self._envelope(np.linspace(g.x_min, g.x_max, 257)).max())
        if edge > _TAIL_ERROR * peak:
            raise InsufficientQuadratureWindowError(
                f"|psi| = {edge:.3e} at the quadrature window edge "
                f"(limit {_TAIL_ERROR:.0e} x max = {_TAIL_ERROR * peak:.3e})"
            )

    # -- cached building blocks ---------------------------------------------

    def _psi(self, n, side, d):
        key = (n, side, d)
        if key not in self._psi_tables:
            arg = self._x_plus if side == "+" else self._x_minus
            self._psi_tables[key] = eigenfunction(self.basis, n, arg, d, self.params)
        return self._psi_tables[key]

    def _gt(self, b):
        if b not in self._gt_cache:
            col = self._weights * (2j * self.y / self.params.hbar) ** b / (
                math.pi * self.params.hbar
            )
            self._gt_cache[b] = np.ascontiguousarray(self._phase * col[None, :])
        return self._gt_cache[b]

    def pair_field(self, m, n, a=0, b=0):
        """Complex cross-Wigner derivative field B_mn for one (a, b)."""
        key = (m, n, a, b)
        if key not in self._pair_cache:
            if a == 0:
                f = self._psi(m, "+", 0) * self._psi(n, "-", 0)
            elif a == 1:
                f = (
                    self._psi(m, "+", 1) * self._psi(n, "-", 0)
                    + self._psi(m, "+", 0) * self._psi(n, "-", 1)
                )
            elif a == 2:
                f = (
                    self._psi(m, "+", 2) * self._psi(n, "-", 0)
                    + 2.0 * self._psi(m, "+", 1) * self._psi(n, "-", 1)
                    + self._psi(m, "+", 0) * self._psi(n, "-", 2)
                )
            else:
                raise ValidationError("x-derivative order must be at most 2")
            self._pair_cache[key] = _kernel.transform(
                np.ascontiguousarray(f),
                self._gt(b),
                num_threads=self.num_threads,
                backend=self.kernel_backend,
            )
        return self._pair_cache[key]

    # -- assembly ------------------------------------------------------------

    def _weights_for(self, state):
        """Pair weights conj(a_m) a_n with a_n = c_n exp(-i E_n t / hbar).

        Diagonal weights drop the unimodular phases exactly, so diagonal
        contributions are bitwise independent of t.
        """
        out = []
        terms = sorted(state.terms)
        for m, cm in terms:
            for n, cn in terms:
                if m == n:
                    w = complex(cm.real * cn.real + cm.imag * cn.imag, 0.0)
                else:
                    de = eigenenergy(state.basis, m, self.params) - eigenenergy(
                        state.basis, n, self.params
                    )
                    w = np.conj(cm) * cn * np.exp(1j * de * state.t / self.params.hbar)
                out.append((m, n, w))
        return out

    def field(self, state, a=0, b=0):
        """Real part of d^a/dx^a d^b/dp^b W, plus the imaginary residual."""
        state.validate(self.params)
        acc = np.zeros(self.grid.shape, dtype=complex)
        for m, n, w in self._weights_for(state):
            acc += w * self.pair_field(m, n, a, b)
        return ScalarField(
            self.grid,
            acc.real.copy(),
            quantity="wigner",
            orders=(a, b),
            meta={"imag_residual": float(np.abs(acc.imag).max()), "t": state.t},
        )

    def time_derivative(self, state):
        """Analytic dW/dt from the eigenphases; exactly zero for eigenstates."""
        state.validate(self.params)
        if len(state.terms) == 1:
            return ScalarField(
                self.grid,
                np.zeros(self.grid.shape),
                quantity="dwdt",
                meta={"imag_residual": 0.0, "t": state.t},
            )
        acc = np.zeros(self.grid.shape, dtype=complex)
        for m, n, w in self._weights_for(state):
            if m == n:
                continue
            de = eigenenergy(state.basis, m, self.params) - eigenenergy(
                state.basis, n, self.params
            )
            acc += w * (1j * de / self.params.hbar) * self.pair_field(m, n, 0, 0)
        return ScalarField(
            self.grid,
            acc.real.copy(),
            quantity="dwdt",
            meta={"imag_residual": float(np.abs(acc.imag).max()), "t": state.t},
        )

    def point_wigner(self, state, x, p):
        """W of the state at arbitrary (scalar) phase-space points.

        Same Simpson y-grid as the field computation; used by continuous
        evaluators (streamlines) that need off-grid values.
        """
        state.validate(self.params)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        phase = np.exp(2j / self.params.hbar * np.outer(p, self.y))
        gt = phase * (self._weights / (math.pi * self.params.hbar))[None, :]
        total = np.zeros(x.shape, dtype=complex)
        for m, n, w in self._weights_for(state):
            f = eigenfunction(self.basis, m, x[:, None] + self.y[None, :], 0, self.params) * \
                eigenfunction(self.basis, n, x[:, None] - self.y[None, :], 0, self.params)
            total += w * np.einsum("iy,iy->i", f, gt)
        return total.real


def calculator_for(state, grid, quad=None, params=None, **kw):
    return WignerCalculator(
        state.basis, state.quantum_numbers(), grid, quad, params, **kw
    )


def wigner_field(state, grid, a=0, b=0, quad=None, params=None, calc=None):
    """Sample d^a/dx^a d^b/dp^b W(x, p, t) on the grid."""
    calc = calc or calculator_for(state, grid, quad, params)
    return calc.field(state, a, b)


def wigner_time_derivative(state, grid, quad=None, params=None, calc=None):
    """Sample dW/dt on the grid (analytic in the eigenphases)."""
    calc = calc or calculator_for(state, grid, quad, params)
    return calc.time_derivative(state)


def harmonic_wigner_oracle(n, x, p, params=None):
    """Closed-form Wigner function of harmonic eigenstate |n>.

    W_n = ((-1)^n / pi hbar) exp(-2H/(hbar w)) L_n(4H/(hbar w)) with
    H = p^2/2M + k x^2/2. Independent of the quadrature engine.
    """
    params = params or PhysicalParams()
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    h = p ** 2 / (2.0 * params.mass) + 0.5 * params.spring_k * x ** 2
    scale = params.hbar * params.omega
    return ((-1.0) ** n / (math.pi * params.hbar)) * np.exp(-2.0 * h / scale) * \
        eval_laguerre(n, 4.0 * h / scale)
