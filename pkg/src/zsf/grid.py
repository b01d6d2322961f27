"""Spatial discretization, symmetric potentials, and the tridiagonal Hamiltonian.

The domain is a uniform symmetric grid on [-x_max, x_max] with an odd number
of points so that x = 0 is a node.  Potentials are mirror symmetric around
x = 0 and the symmetry is enforced by construction (the x >= 0 half is the
canonical data; the left half is its bitwise mirror).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DomainError


@dataclass(frozen=True)
class Grid:
    """Uniform symmetric 1D grid with a node exactly at x = 0."""

    x_max: float
    n_points: int
    x: np.ndarray = field(repr=False, compare=False)

    @property
    def spacing(self) -> float:
        return 2.0 * self.x_max / (self.n_points - 1)

    @property
    def center_index(self) -> int:
        return self.n_points // 2

    def right_half(self) -> np.ndarray:
        """Abscissae for x >= 0 (includes the center node)."""
        return self.x[self.center_index:]


def make_grid(x_max: float, n_points: int) -> Grid:
    """Build a symmetric grid; n_points must be odd and >= 3, x_max > 0.

    The abscissae are constructed as an exact mirror pair so that
    x[i] == -x[n-1-i] holds bitwise, not just approximately.
    """
    if n_points < 3 or n_points % 2 == 0:
        raise ConfigError(f"n_points must be odd and >= 3, got {n_points}")
    if not x_max > 0:
        raise ConfigError(f"x_max must be positive, got {x_max}")
    m = (n_points - 1) // 2
    right = x_max * (np.arange(m + 1) / m)
    x = np.concatenate([-right[:0:-1], right])
    x.setflags(write=False)
    return Grid(float(x_max), int(n_points), x)


def _mirror_from_right(right_values: np.ndarray) -> np.ndarray:
    """Full array from the x >= 0 half; symmetry is exact by construction."""
    return np.concatenate([right_values[:0:-1], right_values])


@dataclass(frozen=True)
class SampledPotential:
    """Potential values on a Grid, mirror symmetric bit-for-bit."""

    grid: Grid
    values: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise DataError(
                f"potential needs {self.grid.n_points} values, got {values.shape}"
            )
        # Canonical data is the x >= 0 half; the left half is mirrored from it.
        full = _mirror_from_right(values[self.grid.center_index:])
        full.setflags(write=False)
        object.__setattr__(self, "values", full)

    def shifted_by(self, delta: np.ndarray) -> "SampledPotential":
        """New potential with `delta` added node-wise."""
        return SampledPotential(self.grid, self.values + np.asarray(delta, dtype=float))

    def value_at(self, x: float) -> float:
        """Linear interpolation of V at an arbitrary position inside the grid."""
        if abs(x) > self.grid.x_max:
            raise DomainError(
                f"x = {x} outside the grid range [-{self.grid.x_max}, {self.grid.x_max}]"
            )
        return float(np.interp(abs(x), self.grid.right_half(),
                               self.values[self.grid.center_index:]))


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal operator: one diagonal and one off-diagonal array."""

    diagonal: np.ndarray = field(repr=False, compare=False)
    off_diagonal: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        d = np.ascontiguousarray(self.diagonal, dtype=float)
        e = np.ascontiguousarray(self.off_diagonal, dtype=float)
        if d.ndim != 1 or e.shape != (max(d.size - 1, 0),):
            raise DataError(
                f"off-diagonal must have length n-1, got n={d.size}, {e.size}"
            )
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def size(self) -> int:
        return self.diagonal.size

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out


def sample_symmetric(half_profile, grid: Grid) -> SampledPotential:
    """Interpolate a half profile of (x >= 0, V) pairs onto the grid and mirror it.

    The profile must start at x = 0, have strictly increasing x and
    non-decreasing V.  Grid nodes beyond the last profile point are filled by
    continuing the final segment's slope (constant if the profile has a
    single point).
    """
    if hasattr(half_profile, "x") and hasattr(half_profile, "energy"):
        px = np.asarray(half_profile.x, dtype=float)
        pv = np.asarray(half_profile.energy, dtype=float)
    else:
        pts = np.asarray(half_profile, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise DataError("half profile must be a non-empty sequence of (x, V) pairs")
        px, pv = pts[:, 0], pts[:, 1]
    if px[0] != 0.0:
        raise DataError(f"half profile must start at x = 0, starts at {px[0]}")
    if np.any(np.diff(px) <= 0):
        i = int(np.argmax(np.diff(px) <= 0))
        raise DataError(f"half profile x not strictly increasing at index {i + 1}")
    if np.any(np.diff(pv) < 0):
        i = int(np.argmax(np.diff(pv) < 0))
        raise DataError(f"half profile V decreases at index {i + 1}")

    xs = grid.right_half()
    right = np.interp(xs, px, pv)
    if xs[-1] > px[-1]:
        slope = (pv[-1] - pv[-2]) / (px[-1] - px[-2]) if px.size > 1 else 0.0
        beyond = xs > px[-1]
        right[beyond] = pv[-1] + slope * (xs[beyond] - px[-1])
    return SampledPotential(grid, _mirror_from_right(right))


def build_hamiltonian(potential: SampledPotential) -> TridiagonalOperator:
    """Finite-difference Hamiltonian -d2/dx2 + V with Dirichlet endpoints."""
    return hamiltonian_from_values(potential.grid, potential.values)


def hamiltonian_from_values(grid: Grid, values: np.ndarray) -> TridiagonalOperator:
    """Hamiltonian from a raw value array (no symmetry enforcement).

    Used by tests and finite-difference oracles that perturb single nodes.
    """
    dx2 = grid.spacing ** 2
    diag = 2.0 / dx2 + np.asarray(values, dtype=float)
    off = np.full(grid.n_points - 1, -1.0 / dx2)
    return TridiagonalOperator(diag, off)


def write_potential_csv(potential: SampledPotential, path) -> None:
    """CSV serialization: header `x,V`, full range, 17 significant digits."""
    lines = ["x,V"]
    for xi, vi in zip(potential.grid.x, potential.values):
        lines.append(f"{xi:.17g},{vi:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_potential_csv(path) -> SampledPotential:
    """Read a potential written by write_potential_csv."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "x,V":
            raise DataError(f"{path}: expected header 'x,V', got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    x, v = data[:, 0], data[:, 1]
    n = x.size
    if n < 3 or n % 2 == 0 or x[n // 2] != 0.0:
        raise DataError(f"{path}: not a symmetric odd-length grid")
    grid = make_grid(float(x[-1]), n)
    if not np.allclose(grid.x, x, rtol=0, atol=1e-12 * max(1.0, x[-1])):
        raise DataError(f"{path}: abscissae are not a uniform symmetric grid")
    return SampledPotential(grid, v)
