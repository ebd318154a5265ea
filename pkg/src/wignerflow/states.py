"""Eigenfunctions, eigenenergies and superposition states.

Three model systems share one interface:

* ``harmonic`` -- harmonic oscillator, Hermite-function basis;
* ``kerr``     -- same wavefunctions, Kerr-shifted eigenenergies;
* ``morse``    -- finitely many bound states via generalized Laguerre
  polynomials, with numerically pinned normalization.

Hermite functions are evaluated through the three-term recurrence on the
*normalized* functions, so no factorials or large polynomial values ever
appear; the recurrence is validated up to n = 200.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import eval_genlaguerre

from .errors import NoSuchBoundStateError, UnsupportedOrderError, ValidationError

BASES = ("harmonic", "kerr", "morse")

_MAX_HERMITE_ORDER = 200


@dataclass(frozen=True)
class PhysicalParams:
    """Masses, couplings and hbar for the three model systems."""

    mass: float = 1.0
    spring_k: float = 1.0
    hbar: float = 1.0
    kerr_lambda: float = 0.0
    morse_depth: float = 8.0
    morse_range: float = 0.25

    def __post_init__(self):
        problems = []
        if not self.mass > 0:
            problems.append("mass must be positive")
        if not self.spring_k > 0:
            problems.append("spring_k must be positive")
        if not self.hbar > 0:
            problems.append("hbar must be positive")
        if self.kerr_lambda < 0:
            problems.append("kerr_lambda must be non-negative")
        if not self.morse_depth > 0:
            problems.append("morse_depth must be positive")
        if not self.morse_range > 0:
            problems.append("morse_range must be positive")
        if problems:
            raise ValidationError(problems)

    @property
    def omega(self):
        return math.sqrt(self.spring_k / self.mass)

    @property
    def morse_omega(self):
        return self.morse_range * math.sqrt(2.0 * self.morse_depth / self.mass)


@dataclass(frozen=True)
class StateSpec:
    """Pure state: normalized superposition of basis eigenstates at time t."""

    basis: str
    terms: tuple  # ((n, complex coefficient), ...)
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((int(n), complex(c)) for n, c in self.terms)
        )
        problems = []
        if self.basis not in BASES:
            problems.append(f"unknown basis {self.basis!r}")
        if not self.terms:
            problems.append("state needs at least one term")
        ns = [n for n, _ in self.terms]
        if len(set(ns)) != len(ns):
            problems.append("quantum numbers must be distinct")
        if any(n < 0 for n in ns):
            problems.append("quantum numbers must be non-negative")
        norm = sum(abs(c) ** 2 for _, c in self.terms)
        if self.terms and abs(norm - 1.0) > 1e-12:
            problems.append(f"coefficients not normalized (sum |c|^2 = {norm})")
        if problems:
            raise ValidationError(problems)

    def validate(self, params):
        if self.basis == "morse":
            count = bound_state_count(params)
            bad = [n for n, _ in self.terms if n >= count]
            if bad:
                raise NoSuchBoundStateError(
                    f"morse quantum numbers {bad} exceed bound state count {count}"
                )

    def quantum_numbers(self):
        return tuple(sorted(n for n, _ in self.terms))


def at_time(state, t):
    """Same state with the time parameter replaced."""
    return StateSpec(state.basis, state.terms, t=float(t))


# ---------------------------------------------------------------------------
# harmonic oscillator
# ---------------------------------------------------------------------------

def _hermite_function_pair(n, u):
    """Normalized Hermite functions (phi_{n-1}, phi_n) at u, by recurrence."""
    u = np.asarray(u, dtype=float)
    phi_prev = np.zeros_like(u)
    phi = np.pi ** -0.25 * np.exp(-0.5 * u * u)
    for k in range(n):
        phi_prev, phi = phi, (
            math.sqrt(2.0 / (k + 1)) * u * phi - math.sqrt(k / (k + 1.0)) * phi_prev
        )
    return phi_prev, phi


def harmonic_eigenfunction(n, x, d=0, params=PhysicalParams()):
    """d-th spatial derivative of the n-th harmonic oscillator eigenfunction.

    Uses phi_n' = sqrt(2n) phi_{n-1} - u phi_n and the Hermite-function ODE
    phi_n'' = (u^2 - 2n - 1) phi_n, all on the normalized functions.
    """
    if n < 0 or d not in (0, 1, 2):
        raise ValidationError("need n >= 0 and derivative order in {0, 1, 2}")
    if n > _MAX_HERMITE_ORDER:
        raise UnsupportedOrderError(
            f"harmonic n = {n} beyond validated recurrence range {_MAX_HERMITE_ORDER}"
        )
    alpha = params.mass * params.omega / params.hbar
    u = np.sqrt(alpha) * np.asarray(x, dtype=float)
    phi_prev, phi = _hermite_function_pair(n, u)
    root = alpha ** 0.25
    if d == 0:
        return root * phi
    if d == 1:
        return root * math.sqrt(alpha) * (math.sqrt(2.0 * n) * phi_prev - u * phi)
    return root * alpha * (u * u - 2.0 * n - 1.0) * phi


# ---------------------------------------------------------------------------
# Morse oscillator
# ---------------------------------------------------------------------------

def _morse_lambda(params):
    return math.sqrt(2.0 * params.mass * params.morse_depth) / (
        params.morse_range * params.hbar
    )


def bound_state_count(params=PhysicalParams()):
    """Number of Morse bound states: |{n : n < lambda - 1/2}|."""
    lam = _morse_lambda(params)
    return max(0, math.ceil(lam - 0.5))


def _morse_raw(n, x, d, params):
    """Unnormalized Morse bound state (and x-derivatives) via z = 2 lam e^{-ax}."""
    lam = _morse_lambda(params)
    a = params.morse_range
    s = lam - n - 0.5
    x = np.asarray(x, dtype=float)
    z = 2.0 * lam * np.exp(-a * x)
    alpha = 2.0 * s
    lag = eval_genlaguerre(n, alpha, z)
    with np.errstate(over="ignore"):
        envelope = z ** s * np.exp(-0.5 * z)
    envelope = np.where(np.isfinite(envelope), envelope, 0.0)
    f = envelope * lag
    if d == 0:
        return f
    g = s / z - 0.5
    dlag = -eval_genlaguerre(n - 1, alpha + 1.0, z) if n >= 1 else np.zeros_like(z)
    fp = envelope * (g * lag + dlag)
    if d == 1:
        return -a * z * fp
    ddlag = eval_genlaguerre(n - 2, alpha + 2.0, z) if n >= 2 else np.zeros_like(z)
    fpp = envelope * ((g * g - s / (z * z)) * lag + 2.0 * g * dlag + ddlag)
    return a * a * (z * fp + z * z * fpp)


@lru_cache(maxsize=None)
def _morse_norm(n, mass, depth, rng, hbar):
    """Normalization constant, pinned by quadrature once per (n, params)."""
    params = PhysicalParams(mass=mass, morse_depth=depth, morse_range=rng, hbar=hbar)
    lam = _morse_lambda(params)
    s = lam - n - 0.5
    a = rng
    # z in [z_lo, z_hi] covers the support: superexponential cutoff on the
    # left (z large), power-law z^s cutoff on the right (z small).
    z_hi = 2.0 * lam + 60.0 * math.sqrt(lam) + 200.0
    z_lo = math.exp(-80.0 / s)
    x_lo = -math.log(z_hi / (2.0 * lam)) / a
    x_hi = -math.log(z_lo / (2.0 * lam)) / a
    val, _ = integrate.quad(
        lambda xx: float(_morse_raw(n, xx, 0, params)) ** 2, x_lo, x_hi, limit=400
    )
    return 1.0 / math.sqrt(val)


def morse_eigenfunction(n, x, d=0, params=PhysicalParams()):
    """d-th spatial derivative of the n-th Morse bound state, unit norm."""
    if d not in (0, 1, 2):
        raise ValidationError("derivative order must be in {0, 1, 2}")
    count = bound_state_count(params)
    if n < 0 or n >= count:
        raise NoSuchBoundStateError(
            f"morse has {count} bound states, requested n = {n}"
        )
    norm = _morse_norm(
        n, params.mass, params.morse_depth, params.morse_range, params.hbar
    )
    return norm * _morse_raw(n, x, d, params)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def eigenfunction(basis, n, x, d=0, params=PhysicalParams()):
    """Real eigenfunction derivative for any basis (kerr shares harmonic's)."""
    if basis in ("harmonic", "kerr"):
        return harmonic_eigenfunction(n, x, d, params)
    if basis == "morse":
        return morse_eigenfunction(n, x, d, params)
    raise ValidationError(f"unknown basis {basis!r}")


def eigenenergy(basis, n, params=PhysicalParams()):
    """Eigenenergy of level n in the given basis."""
    if n < 0:
        raise ValidationError("n must be non-negative")
    if basis in ("harmonic", "kerr"):
        e_h = params.hbar * params.omega * (n + 0.5)
        if basis == "harmonic":
            return e_h
        return e_h + params.kerr_lambda ** 2 * e_h ** 2
    if basis == "morse":
        count = bound_state_count(params)
        if n >= count:
            raise NoSuchBoundStateError(
                f"morse has {count} bound states, requested n = {n}"
            )
        e0 = params.hbar * params.morse_omega * (n + 0.5)
        return e0 - e0 ** 2 / (4.0 * params.morse_depth)
    raise ValidationError(f"unknown basis {basis!r}")


def evaluate_state(state, x, params=PhysicalParams(), d=0):
    """Complex wavefunction (or derivative) of a superposition at time state.t.

    Time dependence enters only through the eigenphases exp(-i E_n t / hbar).
    """
    state.validate(params)
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for n, c in state.terms:
        phase = np.exp(-1j * eigenenergy(state.basis, n, params) * state.t / params.hbar)
        out += c * phase * eigenfunction(state.basis, n, x, d, params)
    return out
