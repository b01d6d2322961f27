"""Semiclassical construction of the smooth starting potential.

The potential is marched upward in energy from its center value: each step
raises the energy by dE and extends the turning point by the increment that
makes the phase integral close on the target phase, assuming the potential
is linear on the new segment.  The 3/(4*sqrt(dE)) prefactor is the exact
inversion of the closed-form integral of sqrt over a linear segment, so the
quadrature below must (and does) use that same closed form on the segment
where the energy crosses the potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DomainError, NumericalError
from .zeta import TWO_PI, phase_rhs


@dataclass(frozen=True)
class HalfProfile:
    """Monotone turning-point profile: x[i] is where the potential reaches energy[i]."""

    x: np.ndarray = field(repr=False, compare=False)
    energy: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        px = np.asarray(self.x, dtype=float)
        pe = np.asarray(self.energy, dtype=float)
        if px.ndim != 1 or px.shape != pe.shape or px.size < 1:
            raise DataError("profile needs matching 1D x and energy arrays")
        if px[0] != 0.0:
            raise DataError(f"profile must start at x = 0, starts at {px[0]}")
        if np.any(np.diff(px) <= 0) or np.any(np.diff(pe) <= 0):
            raise DataError("profile must be strictly increasing in x and energy")
        px.setflags(write=False)
        pe.setflags(write=False)
        object.__setattr__(self, "x", px)
        object.__setattr__(self, "energy", pe)

    def __len__(self) -> int:
        return self.x.size


def ground_value() -> float:
    """Center value of the potential: root of the target phase on (2pi, 2pi*e)."""
    lo, hi = TWO_PI, TWO_PI * np.e
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if phase_rhs(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _half_action(px: np.ndarray, pe: np.ndarray, E: float) -> float:
    """Integral of sqrt(max(E - V, 0)) over the piecewise-linear profile, x >= 0.

    Full segments use the trapezoid rule; the segment on which V crosses
    (or just reaches) E uses the exact 3/2-power antiderivative, which
    keeps the square-root turning point accurate.
    """
    if E <= pe[0]:
        return 0.0
    idx = int(np.searchsorted(pe, E, side="left"))
    total = 0.0
    if idx >= 2:
        s = np.sqrt(E - pe[:idx])
        total += float(np.sum(0.5 * (s[:-1] + s[1:]) * np.diff(px[:idx])))
    if idx < pe.size:
        slope = (pe[idx] - pe[idx - 1]) / (px[idx] - px[idx - 1])
        total += (2.0 / (3.0 * slope)) * (E - pe[idx - 1]) ** 1.5
    return total


def phase_integral(profile: HalfProfile, E: float) -> float:
    """Symmetric action 2 * integral_0^x0(E) sqrt(max(E - V, 0)) dx."""
    if E < profile.energy[0]:
        raise DomainError(
            f"E = {E} below the profile's minimum energy {profile.energy[0]}"
        )
    return 2.0 * _half_action(profile.x, profile.energy, float(E))


def march_potential(E_max: float, dE: float, phase_target=None,
                    E_start: float | None = None) -> HalfProfile:
    """March the turning-point profile upward until the energy reaches E_max.

    phase_target(E) defaults to the zeta target phase; it is injectable so
    tests can drive the march with a phase whose potential is known in
    closed form.  E_start defaults to the root of the default target.
    """
    if phase_target is None:
        phase_target = phase_rhs
        if E_start is None:
            E_start = ground_value()
    elif E_start is None:
        raise DataError("E_start is required when injecting a phase target")
    if not dE > 0:
        raise DomainError(f"dE must be positive, got {dE}")
    if not E_max > E_start:
        raise DomainError(f"E_max = {E_max} must exceed the start {E_start}")

    n_steps = int(np.ceil((E_max - E_start) / dE))
    px = np.empty(n_steps + 1)
    pe = np.empty(n_steps + 1)
    px[0], pe[0] = 0.0, E_start
    prefactor = 0.75 / np.sqrt(dE)
    for k in range(1, n_steps + 1):
        E_new = E_start + k * dE
        action = 2.0 * _half_action(px[:k], pe[:k], E_new)
        dx0 = prefactor * (phase_target(E_new) - action)
        if not dx0 > 0.0:
            raise NumericalError(
                f"non-positive turning-point step at E = {E_new} "
                f"(dx0 = {dx0:.3e}); decrease dE"
            )
        px[k] = px[k - 1] + dx0
        pe[k] = E_new
    return HalfProfile(px, pe)


def write_profile_csv(profile: HalfProfile, path) -> None:
    """CSV serialization of the marched profile, header `x0,E`."""
    lines = ["x0,E"]
    for xi, ei in zip(profile.x, profile.energy):
        lines.append(f"{xi:.17g},{ei:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
