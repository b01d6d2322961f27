"""Empirical structure of the correction functions.

Each correction is an oscillation of near-constant amplitude flanked by
decaying tails.  This module locates the oscillating region (span of the
outermost zero crossings), measures the signed amplitude and period count,
extracts local wavelengths by two independent methods, and builds the
universal normalized tail template.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DomainError
from .grid import Grid, SampledPotential, _mirror_from_right


@dataclass(frozen=True)
class CorrectionProfile:
    """One correction function (mirror symmetric) with its zero index."""

    grid: Grid
    values: np.ndarray = field(repr=False, compare=False)
    n: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise DataError(
                f"correction needs {self.grid.n_points} values, got {values.shape}"
            )
        full = _mirror_from_right(values[self.grid.center_index:])
        full.setflags(write=False)
        object.__setattr__(self, "values", full)


@dataclass(frozen=True)
class OscillationSummary:
    """Oscillating-region summary of one correction.

    `extrema` holds the refined (x, value) of every full-amplitude extremum,
    including the outermost troughs where the tails attach; `region` spans
    the outermost zero crossings, and `amplitude` is signed: positive when
    the center extremum has the parity sign (-1)^n expected from a positive
    smooth-approximation error.
    """

    region: tuple[float, float]
    extrema: tuple
    zero_crossings: np.ndarray = field(repr=False, compare=False)
    amplitude: float = 0.0
    period_count: int = 0

    def interior_extrema(self):
        lo, hi = self.region
        if lo == hi:
            return tuple(e for e in self.extrema if e[0] == lo)
        return tuple(e for e in self.extrema if lo < e[0] < hi)

    def attachment_x(self, side: str) -> float:
        xs = [e[0] for e in self.extrema]
        return max(xs) if side == "right" else min(xs)


@dataclass(frozen=True)
class TailTemplate:
    """Averaged normalized decay tail; starts at exactly -1 at offset 0."""

    offsets: np.ndarray = field(repr=False, compare=False)
    values: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        off = np.asarray(self.offsets, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if off.shape != val.shape or off.ndim != 1 or off.size < 2:
            raise DataError("tail template needs matching 1D offset/value arrays")
        if off[0] != 0.0 or np.any(np.diff(off) <= 0):
            raise DataError("tail offsets must start at 0 and ascend")
        if val[0] != -1.0:
            raise DataError(f"tail template must start at -1, got {val[0]!r}")
        off.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "offsets", off)
        object.__setattr__(self, "values", val)

    @property
    def support(self) -> float:
        return float(self.offsets[-1])

    def sample(self, offsets: np.ndarray) -> np.ndarray:
        """Values at the given offsets; zero beyond the template support."""
        out = np.interp(offsets, self.offsets, self.values, left=-1.0, right=0.0)
        return np.where(np.asarray(offsets) > self.support, 0.0, out)


@dataclass(frozen=True)
class TailSamples:
    """One extracted, amplitude-normalized tail (offsets from the attachment)."""

    offsets: np.ndarray = field(repr=False, compare=False)
    values: np.ndarray = field(repr=False, compare=False)


def _refine_extremum(x: np.ndarray, v: np.ndarray, i: int, dx: float):
    """Sub-grid extremum via a parabola through three raw samples."""
    if i == 0 or i == v.size - 1:
        return float(x[i]), float(v[i])
    denom = v[i - 1] - 2.0 * v[i] + v[i + 1]
    if denom == 0.0:
        return float(x[i]), float(v[i])
    delta = 0.5 * (v[i - 1] - v[i + 1]) / denom
    delta = float(np.clip(delta, -1.0, 1.0))
    value = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * delta
    return float(x[i] + delta * dx), float(value)


def _detect_extrema(x: np.ndarray, raw: np.ndarray, dx: float):
    """All strict local extrema of the 3-point-smoothed values, refined on raw."""
    sm = raw.copy()
    sm[1:-1] = (raw[:-2] + raw[1:-1] + raw[2:]) / 3.0
    ds = np.sign(np.diff(sm))
    idx = np.nonzero(ds[:-1] * ds[1:] < 0)[0] + 1
    return [_refine_extremum(x, raw, int(i), dx) for i in idx]


def summarize_oscillation(C: CorrectionProfile,
                          noise_floor: float = 1e-12) -> OscillationSummary:
    """Locate the oscillating region and measure amplitude and period count.

    Extrema are detected on lightly smoothed values (grid-level jitter is
    far below the oscillation scale) and refined on the raw samples.  The
    oscillation's extrema all have magnitude close to the amplitude while
    tail wiggles stay well under half of it, so a two-pass magnitude cut
    separates them; zero crossings are then counted only between the
    outermost full-amplitude extrema, which keeps tail overshoots (the tail
    averages to zero, so it must cross) out of the region.
    """
    raw = C.values
    x = C.grid.x
    peak = float(np.max(np.abs(raw)))
    if peak <= 10.0 * noise_floor:
        raise DataError(f"correction is trivial (max |C| = {peak:.3e})")

    extrema = _detect_extrema(x, raw, C.grid.spacing)
    core = [e for e in extrema if abs(e[1]) >= 0.5 * peak]
    if core:
        scale = float(np.mean([abs(e[1]) for e in core]))
        major = [e for e in extrema if abs(e[1]) >= 0.45 * scale]
    else:
        major = []

    mid = C.grid.center_index
    if len(major) <= 1:
        # Two joined tails: no oscillation, the single extremum sits at x = 0.
        center_value = float(raw[mid])
        sign = 1.0 if center_value * (-1.0) ** C.n >= 0 else -1.0
        return OscillationSummary(
            region=(0.0, 0.0), extrema=((0.0, center_value),),
            zero_crossings=np.empty(0),
            amplitude=sign * abs(center_value), period_count=0)

    xs = np.array([e[0] for e in major])
    i_lo = int(np.searchsorted(x, xs.min()))
    i_hi = int(np.searchsorted(x, xs.max(), side="right")) - 1
    seg = raw[i_lo:i_hi + 1]
    prod = seg[:-1] * seg[1:]
    cross_idx = np.nonzero(prod < 0)[0]
    crossings = []
    for j in cross_idx:
        a, b = seg[j], seg[j + 1]
        crossings.append(x[i_lo + j] + C.grid.spacing * a / (a - b))
    crossings.extend(x[i_lo:i_hi + 1][seg == 0.0])
    crossings = np.sort(np.array(crossings))

    if crossings.size == 0:
        center_value = float(raw[mid])
        sign = 1.0 if center_value * (-1.0) ** C.n >= 0 else -1.0
        return OscillationSummary(
            region=(0.0, 0.0), extrema=tuple(major),
            zero_crossings=crossings,
            amplitude=sign * abs(center_value), period_count=0)

    region = (float(crossings[0]), float(crossings[-1]))
    interior = [e for e in major if region[0] < e[0] < region[1]]
    if not interior:
        interior = [min(major, key=lambda e: abs(e[0]))]
    magnitude = float(np.mean([abs(e[1]) for e in interior]))
    center_extremum = min(major, key=lambda e: abs(e[0]))
    sign = 1.0 if center_extremum[1] * (-1.0) ** C.n >= 0 else -1.0
    return OscillationSummary(
        region=region, extrema=tuple(major), zero_crossings=crossings,
        amplitude=sign * magnitude, period_count=int(crossings.size // 2))


def amplitude_law_residuals(summaries, table) -> np.ndarray:
    """Relative deviation of each measured amplitude from twice the smooth error.

    summaries[i] must describe the correction for zero i+1.
    """
    from .zeta import approximation_error

    out = np.empty(len(summaries))
    for i, summary in enumerate(summaries):
        predicted = 2.0 * approximation_error(i + 1, table)
        out[i] = (summary.amplitude - predicted) / abs(predicted)
    return out


def wavelength_zero_crossing(C: CorrectionProfile):
    """Local wavelength at each extremum: twice the flanking-crossing distance."""
    summary = summarize_oscillation(C)
    crossings = summary.zero_crossings
    if crossings.size < 2:
        return []
    out = []
    for ex, _ in sorted(summary.interior_extrema()):
        left = crossings[crossings < ex]
        right = crossings[crossings > ex]
        if left.size and right.size:
            out.append((float(ex), 2.0 * float(right[0] - left[-1])))
    return out


def wavelength_curvature(C: CorrectionProfile):
    """Local wavelength from the curvature ratio 2pi/sqrt(|C''/C|).

    Points with |C| below a tenth of the amplitude are excluded; the ratio
    is singular at the zero crossings.
    """
    summary = summarize_oscillation(C)
    amp = abs(summary.amplitude)
    v = C.values
    dx = C.grid.spacing
    second = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dx ** 2
    center = v[1:-1]
    keep = (np.abs(center) >= 0.1 * amp) & (second != 0.0)
    ratio = np.abs(second[keep] / center[keep])
    lam = 2.0 * np.pi / np.sqrt(ratio)
    return list(zip(C.grid.x[1:-1][keep].tolist(), lam.tolist()))


def wkb_wavelength(V: SampledPotential, zero: float, x: float) -> float:
    """Semiclassical local wavelength pi/sqrt(zero - V(x)).

    This is half the naive de Broglie wavelength: the corrections oscillate
    at twice the semiclassical frequency, like a squared eigenfunction.
    """
    vx = V.value_at(x)
    if vx >= zero:
        raise DomainError(
            f"V({x}) = {vx} is not below the energy {zero} (beyond turning point)"
        )
    return float(np.pi / np.sqrt(zero - vx))


def extract_tail(C: CorrectionProfile, side: str, amplitude: float,
                 summary: OscillationSummary | None = None) -> TailSamples:
    """Tail beyond the outermost oscillation extremum, amplitude-normalized.

    The attachment point (offset 0) is the outermost full-amplitude
    extremum, i.e. the trough the tails hang off; for the degenerate
    two-tail case that is the center node.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if amplitude == 0:
        raise ValueError("amplitude must be nonzero to normalize a tail")
    if summary is None:
        summary = summarize_oscillation(C)
    attach = summary.attachment_x(side)
    x = C.grid.x
    if side == "right":
        mask = x > attach
        offsets = x[mask] - attach
        values = C.values[mask]
    else:
        mask = x < attach
        offsets = (attach - x[mask])[::-1]
        values = C.values[mask][::-1]
    return TailSamples(offsets, values / abs(amplitude))


def average_tails(tails) -> TailTemplate:
    """Pointwise mean of normalized tails, rescaled to start at exactly -1.

    The tails are resampled onto a shared uniform offset grid (shortest
    common support); the rescale is a pure scaling, which preserves the
    near-zero mean of the tail.
    """
    tails = list(tails)
    if len(tails) < 2:
        raise ValueError(f"need at least 2 tails to average, got {len(tails)}")
    dx = float(np.median(np.diff(tails[0].offsets)))
    support = min(float(t.offsets[-1]) for t in tails)
    m = int(np.floor(support / dx))
    if m < 2:
        raise DataError("tails are too short to share a common support")
    common = dx * np.arange(m + 1)
    stack = np.array([np.interp(common, t.offsets, t.values) for t in tails])
    mean = stack.mean(axis=0)
    if mean[0] == 0.0:
        raise DataError("averaged tail starts at 0; cannot rescale to -1")
    return TailTemplate(common, mean / -mean[0])


def write_correction_csv(C: CorrectionProfile, path) -> None:
    """CSV serialization: header `x,C`, full symmetric range."""
    lines = ["x,C"]
    for xi, ci in zip(C.grid.x, C.values):
        lines.append(f"{xi:.17g},{ci:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_correction_csv(path, n: int) -> CorrectionProfile:
    """Read a correction written by write_correction_csv."""
    from .grid import make_grid

    with open(path) as fh:
        header = fh.readline().strip()
        if header != "x,C":
            raise DataError(f"{path}: expected header 'x,C', got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    x, v = data[:, 0], data[:, 1]
    grid = make_grid(float(x[-1]), x.size)
    return CorrectionProfile(grid, v, n)


def write_tail_csv(template: TailTemplate, path) -> None:
    """CSV serialization: header `offset,value`."""
    lines = ["offset,value"]
    for oi, vi in zip(template.offsets, template.values):
        lines.append(f"{oi:.17g},{vi:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_tail_csv(path) -> TailTemplate:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "offset,value":
            raise DataError(f"{path}: expected header 'offset,value', got {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return TailTemplate(data[:, 0], data[:, 1])
