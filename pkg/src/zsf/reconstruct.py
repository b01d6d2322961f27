"""Closed-form rebuild of the corrections and assembly of the full potential.

The oscillating part of correction n is

    A_n (-1)^n cos( integral_0^x 2 sqrt(Z_n - V(x') - s_n) dx' )

with the amplitude A_n twice the smooth-approximation error and a small
constant energy shift s_n that absorbs the frequency drift.  The phase
integrand uses twice the semiclassical momentum: the corrections oscillate
like a squared eigenfunction, at double the WKB frequency, which is also
what the measured zero-crossing wavelengths show.  Outside the oscillation
the universal tail template is attached at the outermost trough, scaled by
the amplitude.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis import CorrectionProfile, TailTemplate, summarize_oscillation
from .errors import DomainError
from .grid import SampledPotential, _mirror_from_right
from .optimize import spectrum_of
from .zeta import ZeroTable, approximation_error, smooth_zero


def model_amplitude(n: int, table: ZeroTable) -> float:
    """Amplitude law: twice the signed smooth-approximation error."""
    return 2.0 * approximation_error(n, table)


def model_shift(amplitude: float) -> float:
    """Empirical drift shift s = (A - 1) / 3."""
    return (amplitude - 1.0) / 3.0


@dataclass(frozen=True)
class ReconstructedOscillation:
    """Oscillating part of one correction, on the grid, zero past the turning point."""

    grid: object
    values: np.ndarray = field(repr=False, compare=False)
    n: int = 0
    trough_x: float = 0.0   # outermost trough reached by the phase; tails attach here
    turning_x: float = 0.0


def degenerate_oscillation(grid, amplitude: float) -> ReconstructedOscillation:
    """The n = 1 'oscillation': a single trough at the center node."""
    values = np.zeros(grid.n_points)
    values[grid.center_index] = -amplitude
    return ReconstructedOscillation(grid=grid, values=values, n=1,
                                    trough_x=0.0, turning_x=0.0)


def reconstruct_oscillation(n: int, base: SampledPotential, zero: float,
                            amplitude: float, shift: float) -> ReconstructedOscillation:
    """Cosine of the accumulated doubled semiclassical phase, mirrored.

    `base` is the potential the phase integral runs over (the running
    reconstructed potential during assembly).  Values are truncated to zero
    at the model turning point, where zero - base - shift changes sign.
    """
    grid = base.grid
    mid = grid.center_index
    vr = base.values[mid:]
    if not zero > vr[0] + shift:
        raise DomainError(
            f"energy {zero} must exceed the shifted center value "
            f"{vr[0] + shift}"
        )
    k2 = zero - vr - shift
    wavenumber = 2.0 * np.sqrt(np.maximum(k2, 0.0))
    dx = grid.spacing
    phase = np.concatenate([
        [0.0], np.cumsum(0.5 * (wavenumber[:-1] + wavenumber[1:]) * dx)])

    inside = k2 > 0.0
    turn = int(np.argmin(inside)) if not inside.all() else vr.size
    right = np.where(np.arange(vr.size) < turn,
                     amplitude * (-1.0) ** n * np.cos(phase), 0.0)
    turning_x = float(grid.x[mid + turn - 1]) if turn < vr.size else grid.x_max

    # The tails attach at the (n-1)-period trough, phase (n-1)pi.  A shifted
    # phase that falls slightly short of it attaches at the turning point
    # instead, where the cosine is already near the trough; stepping back a
    # whole period would discard real oscillation.
    target = (n - 1) * np.pi
    phase_end = phase[max(turn - 1, 0)]
    if target > phase_end:
        trough_x = turning_x if n > 1 else 0.0
    else:
        trough_x = float(np.interp(target, phase[:max(turn, 1)],
                                   grid.x[mid:mid + max(turn, 1)]))
    return ReconstructedOscillation(
        grid=grid, values=_mirror_from_right(right), n=n,
        trough_x=trough_x, turning_x=turning_x)


def attach_tails(osc: ReconstructedOscillation, tail: TailTemplate,
                 amplitude: float) -> CorrectionProfile:
    """Replace everything beyond the outermost trough by the scaled template.

    The template starts at -1, so scaling by the signed amplitude matches
    the trough value -A_n and the junction is continuous; the profile is
    zero beyond the template support.
    """
    grid = osc.grid
    mid = grid.center_index
    xr = grid.x[mid:]
    right = osc.values[mid:].copy()
    beyond = xr > osc.trough_x
    right[beyond] = amplitude * tail.sample(xr[beyond] - osc.trough_x)
    return CorrectionProfile(grid, _mirror_from_right(right), osc.n)


def fit_shift(C_actual: CorrectionProfile, base: SampledPotential,
              zero: float, amplitude: float, bounds=(-2.0, 2.0),
              tol: float = 1e-4) -> float:
    """Shift minimizing the squared mismatch over the oscillating region.

    Plain golden-section search on the bounded interval; the objective is
    smooth and single-welled in practice.
    """
    summary = summarize_oscillation(C_actual)
    lo_x, hi_x = summary.region
    grid = C_actual.grid
    mask = (grid.x >= lo_x) & (grid.x <= hi_x)
    target = C_actual.values[mask]

    def mismatch(s: float) -> float:
        rec = reconstruct_oscillation(C_actual.n, base, zero, amplitude, s)
        return float(np.sum((target - rec.values[mask]) ** 2))

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(bounds[0]), float(bounds[1])
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = mismatch(c), mismatch(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = mismatch(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = mismatch(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class ReconstructionModel:
    """Everything needed to rebuild a correction: tail + amplitude + shift rules."""

    tail: TailTemplate
    amplitude_rule: Callable[[int], float]
    shift_rule: Callable[[int, float], float]  # (n, A_n) -> s_n


def build_model(tail: TailTemplate, table: ZeroTable, shift_mode: str = "model",
                fitted_shifts: dict | None = None) -> ReconstructionModel:
    """Model with the amplitude law and either the (A-1)/3 rule or fitted shifts."""
    if shift_mode == "model":
        shift_rule = lambda n, a: model_shift(a)
    elif shift_mode == "fitted":
        if not fitted_shifts:
            raise ValueError("shift_mode 'fitted' needs a fitted_shifts mapping")
        shift_rule = lambda n, a: fitted_shifts[n]
    else:
        raise ValueError(f"unknown shift mode {shift_mode!r}")
    return ReconstructionModel(
        tail=tail,
        amplitude_rule=lambda n: model_amplitude(n, table),
        shift_rule=shift_rule)


@dataclass
class VerificationReport:
    """Spectrum check of an assembled potential against the true zeros."""

    count: int
    eigenvalues: np.ndarray
    targets: np.ndarray
    residuals: np.ndarray
    max_abs_residual: float
    sup_vs_direct: float | None = None
    shifts: list = field(default_factory=list)
    amplitudes: list = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "count": self.count,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "targets": [float(v) for v in self.targets],
            "residuals": [float(v) for v in self.residuals],
            "max_abs_residual": self.max_abs_residual,
            "sup_vs_direct": self.sup_vs_direct,
            "shifts": [float(s) for s in self.shifts],
            "amplitudes": [float(a) for a in self.amplitudes],
        }
        return json.dumps(payload, indent=2)


def assemble_and_verify(V0: SampledPotential, model: ReconstructionModel,
                        table: ZeroTable, N: int,
                        direct: SampledPotential | None = None,
                        spectrum_count: int | None = None):
    """Stack N reconstructed corrections onto V0 and eigencheck the result.

    Each correction's phase integral runs over the running reconstructed
    potential (corrections are small against the energy, so the phase error
    is second order).  Returns (potential, VerificationReport); residuals
    are against true zeros, or smooth approximations when N = 0.
    """
    if N < 0 or N > len(table):
        raise ValueError(f"N must be in 0..{len(table)}, got {N}")
    current = V0
    shifts, amplitudes = [], []
    for n in range(1, N + 1):
        amp = model.amplitude_rule(n)
        s = model.shift_rule(n, amp)
        if n == 1:
            # Degenerate correction: two tails joined at the center, no
            # oscillation (and no phase integral, which the shifted energy
            # could not support anyway).
            osc = degenerate_oscillation(current.grid, amp)
            s = 0.0
        else:
            osc = reconstruct_oscillation(n, current, table.zero(n), amp, s)
        corr = attach_tails(osc, model.tail, amp)
        current = current.shifted_by(corr.values)
        shifts.append(s)
        amplitudes.append(amp)

    k = spectrum_count or (N if N >= 1 else 10)
    eigenvalues = spectrum_of(current, k)
    if N >= 1:
        targets = np.array([table.zero(i) for i in range(1, k + 1)])
    else:
        targets = np.array([smooth_zero(i) for i in range(1, k + 1)])
    residuals = eigenvalues - targets
    sup = None
    if direct is not None:
        sup = float(np.max(np.abs(current.values - direct.values)))
    report = VerificationReport(
        count=k, eigenvalues=eigenvalues, targets=targets, residuals=residuals,
        max_abs_residual=float(np.max(np.abs(residuals))),
        sup_vs_direct=sup, shifts=shifts, amplitudes=amplitudes)
    return current, report
