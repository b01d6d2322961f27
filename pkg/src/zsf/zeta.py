"""Riemann zeros, the smooth counting function, and its per-zero inversion.

True zeros are read from a bundled data file (computing them is out of
scope).  The smooth side is the classical main term

    N(T) = (T/2pi) log(T/2pi) - T/2pi

whose inversion via the Lambert W function gives the smooth approximation
to the n-th zero.  The phase form f(E) = pi*N(E) + pi/2 is the right-hand
side used by the semiclassical inversion.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import DataError, DomainError

TWO_PI = 2.0 * np.pi

_BUNDLED_ZEROS = "riemann_zeros_100.txt"


@dataclass(frozen=True)
class ZeroTable:
    """Ascending imaginary parts of nontrivial zeros, 1-indexed via zero()."""

    zeros: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=float)
        if z.size < 1:
            raise DataError("zero table is empty")
        if np.any(np.diff(z) <= 0):
            i = int(np.argmax(np.diff(z) <= 0))
            raise DataError(f"zeros not strictly ascending at entry {i + 2}")
        if not 14.13 <= z[0] <= 14.14:
            raise DataError(
                f"first zero {z[0]!r} outside the sanity window [14.13, 14.14]"
            )
        z.setflags(write=False)
        object.__setattr__(self, "zeros", z)

    def __len__(self) -> int:
        return self.zeros.size

    def zero(self, n: int) -> float:
        """The n-th zero, n = 1, 2, ..."""
        if not 1 <= n <= len(self):
            raise ValueError(f"zero index {n} outside 1..{len(self)}")
        return float(self.zeros[n - 1])


def load_zeros(source) -> ZeroTable:
    """Parse a zeros file: one decimal per line, '#' comments allowed.

    Accepts bytes, a binary stream, or a text stream.  Parse failures and
    ordering violations raise DataError naming the offending line.
    """
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8")
    elif isinstance(source, io.TextIOBase):
        text = source.read()
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise DataError(f"line {lineno}: cannot parse {line!r} as a number")
    if not values:
        raise DataError("zeros file contains no values")
    arr = np.array(values)
    bad = np.nonzero(np.diff(arr) <= 0)[0]
    if bad.size:
        raise DataError(f"zeros not ascending at value {bad[0] + 2} of the file")
    return ZeroTable(arr)


def bundled_zeros() -> ZeroTable:
    """The first 100 zeros shipped with the package."""
    data = resources.files("zsf.data").joinpath(_BUNDLED_ZEROS).read_bytes()
    return load_zeros(data)


def counting_function(T: float) -> float:
    """Smooth main term of the zero-counting function (remainder dropped)."""
    if not T > 0:
        raise DomainError(f"counting function needs T > 0, got {T}")
    u = T / TWO_PI
    return u * np.log(u) - u


def phase_rhs(E: float) -> float:
    """Target phase (E/2)(log(E/2pi) - 1) + pi/2; equals pi*N(E) + pi/2."""
    if not E > 0:
        raise DomainError(f"phase needs E > 0, got {E}")
    return 0.5 * E * (np.log(E / TWO_PI) - 1.0) + 0.5 * np.pi


def lambert_w(y: float) -> float:
    """Principal-branch Lambert W for y >= 0, by guarded Newton iteration.

    Solves w * exp(w) = y to 1e-12 relative residual.
    """
    y = float(y)
    if y < 0:
        raise DomainError(f"lambert_w needs y >= 0, got {y}")
    if y == 0.0:
        return 0.0
    if y < 1.0:
        w = y * (1.0 - y)  # series start W = y - y^2 + ...
    elif y < 3.0:
        w = np.log1p(y)
    else:
        ly = np.log(y)
        w = ly - np.log(ly)
    for _ in range(100):
        ew = np.exp(w)
        f = w * ew - y
        step = f / (ew * (1.0 + w))
        w_new = w - step
        if w_new < 0.0:  # principal branch stays nonnegative for y >= 0
            w_new = 0.5 * w
        if abs(w_new - w) <= 1e-16 * (1.0 + abs(w_new)):
            w = w_new
            break
        w = w_new
    if abs(w * np.exp(w) - y) > 1e-12 * y:
        raise DomainError(f"lambert_w failed to converge for y = {y!r}")
    return float(w)


def smooth_zero(n: int) -> float:
    """Smooth approximation to the n-th zero: root of N(E) = n - 1.

    Closed form 2pi(n-1)/W((n-1)/e) for n >= 2; the n = 1 limit is 2pi*e.
    """
    if n < 1:
        raise ValueError(f"zero index must be >= 1, got {n}")
    if n == 1:
        return float(TWO_PI * np.e)
    m = float(n - 1)
    return float(TWO_PI * m / lambert_w(m / np.e))


def smooth_zero_phase_root(n: int) -> float:
    """Same value as smooth_zero but found as the root of the phase equation.

    Solves phase_rhs(E) = (n - 1/2) pi by bisection; serves as the
    independent cross-check of the Lambert inversion.
    """
    if n < 1:
        raise ValueError(f"zero index must be >= 1, got {n}")
    target = (n - 0.5) * np.pi
    lo = TWO_PI * 1.0000001  # phase is increasing above 2pi
    hi = TWO_PI * np.e
    while phase_rhs(hi) < target:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if phase_rhs(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    return 0.5 * (lo + hi)


def approximation_error(n: int, table: ZeroTable) -> float:
    """Signed smooth-minus-true difference for the n-th zero."""
    if not 1 <= n <= len(table):
        raise ValueError(f"zero index {n} outside 1..{len(table)}")
    return smooth_zero(n) - table.zero(n)
