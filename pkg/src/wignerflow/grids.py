"""Phase-space grids and sampled fields.

Conventions used everywhere in the package:

* fields are stored row-major over (x index, p index), i.e. ``values[i, j]``
  is the sample at ``(x[i], p[j])``;
* grids are uniform in both directions.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, ValidationError


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform rectangular (x, p) grid."""

    x_min: float
    x_max: float
    n_x: int
    p_min: float
    p_max: float
    n_p: int

    def __post_init__(self):
        problems = []
        if self.n_x < 8 or self.n_p < 8:
            problems.append("grid must be at least 8x8")
        if not self.x_min < self.x_max:
            problems.append("x_min must be below x_max")
        if not self.p_min < self.p_max:
            problems.append("p_min must be below p_max")
        if problems:
            raise ValidationError(problems)

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def p(self):
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def dp(self):
        return (self.p_max - self.p_min) / (self.n_p - 1)

    @property
    def shape(self):
        return (self.n_x, self.n_p)


def _check_values(grid, values, name):
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ValidationError(f"{name} has shape {values.shape}, grid wants {grid.shape}")
    if not np.all(np.isfinite(values)):
        raise ValidationError(f"{name} contains non-finite entries")
    return values


@dataclass
class ScalarField:
    """Real scalar field sampled on a :class:`PhaseGrid`.

    ``orders = (a, b)`` records which mixed derivative of the base quantity
    the values represent (``(0, 0)`` for the quantity itself).
    """

    grid: PhaseGrid
    values: np.ndarray
    quantity: str = ""
    orders: tuple = (0, 0)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = _check_values(self.grid, self.values, "values")


@dataclass
class VectorField:
    """Vector field (J_x, J_p) sampled on a :class:`PhaseGrid`."""

    grid: PhaseGrid
    j_x: np.ndarray
    j_p: np.ndarray
    quantity: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.j_x = _check_values(self.grid, self.j_x, "j_x")
        self.j_p = _check_values(self.grid, self.j_p, "j_p")

    def magnitude(self):
        return np.hypot(self.j_x, self.j_p)


@dataclass
class MaskedVectorField:
    """Vector field defined only where ``valid`` is True.

    Entries at masked points are stored as zero but must never enter
    statistics; use ``valid`` to select.
    """

    grid: PhaseGrid
    w_x: np.ndarray
    w_p: np.ndarray
    valid: np.ndarray
    quantity: str = ""
    meta: dict = field(default_factory=dict)


@dataclass
class DivergenceMap:
    """Raw and arctan-compressed velocity divergence on the unmasked set."""

    raw: ScalarField
    compressed: ScalarField
    valid: np.ndarray


def require_same_grid(*objs):
    grids = [o.grid for o in objs]
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise GridMismatchError("fields live on different grids")
    return first
