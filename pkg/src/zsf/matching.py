"""One-zero-at-a-time matching: produces the potential ladder and corrections.

Stage n refines the previous potential against a target list whose first n
entries are true zeros and whose next `buffer` entries are smooth
approximations (the buffer keeps the optimizer from dumping error into the
unconstrained part of the spectrum).  Warm starting from the previous
potential is what makes the corrections come out as the clean localized
oscillations; cold starts can land on other minima of the non-unique
inverse problem.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import CorrectionProfile
from .errors import StageError
from .grid import SampledPotential
from .optimize import OptimizerConfig, OptimizerReport, TargetSpectrum, refine
from .zeta import ZeroTable, smooth_zero


@dataclass
class MatchConfig:
    stage_tol: float = 1e-3     # max |e_i - Z_i| over the matched zeros
    buffer: int = 10            # smooth targets appended past the matched zeros
    retries: int = 2            # extra refine rounds if a stage misses stage_tol
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)


@dataclass
class MatchStageReport:
    n: int
    refine_reports: list[OptimizerReport]
    max_matched_residual: float
    wall_time_s: float


@dataclass
class MatchSequence:
    """The potential ladder V_1..V_N with corrections C_n = V_n - V_{n-1}."""

    base: SampledPotential
    potentials: list[SampledPotential]
    corrections: list[CorrectionProfile]
    reports: list[MatchStageReport]

    def potential(self, n: int) -> SampledPotential:
        return self.base if n == 0 else self.potentials[n - 1]

    def correction(self, n: int) -> CorrectionProfile:
        return self.corrections[n - 1]


def build_targets(n: int, table: ZeroTable, buffer: int) -> TargetSpectrum:
    """First n true zeros followed by `buffer` smooth approximations."""
    if n < 0 or buffer < 0:
        raise ValueError(f"n and buffer must be nonnegative, got {n}, {buffer}")
    if n > len(table):
        raise ValueError(f"table holds {len(table)} zeros, asked for {n}")
    if n + buffer < 1:
        raise ValueError("target list would be empty")
    head = [table.zero(i) for i in range(1, n + 1)]
    tail = [smooth_zero(i) for i in range(n + 1, n + buffer + 1)]
    return TargetSpectrum(np.array(head + tail), matched_count=n)


def match_sequence(V0: SampledPotential, n_max: int, table: ZeroTable,
                   config: MatchConfig | None = None) -> MatchSequence:
    """Match zeros 1..n_max one at a time, warm-starting each stage.

    Every stage must bring the first n eigenvalues within stage_tol of the
    true zeros; a stage that cannot after the configured retries raises
    StageError naming n.
    """
    cfg = config or MatchConfig()
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if n_max > len(table):
        raise ValueError(f"table holds {len(table)} zeros, asked for {n_max}")

    current = V0
    potentials: list[SampledPotential] = []
    corrections: list[CorrectionProfile] = []
    reports: list[MatchStageReport] = []
    for n in range(1, n_max + 1):
        t0 = time.perf_counter()
        targets = build_targets(n, table, cfg.buffer)
        stage_reports = []
        candidate = current
        max_resid = np.inf
        for _ in range(1 + cfg.retries):
            candidate, rep = refine(candidate, targets, cfg.optimizer)
            stage_reports.append(rep)
            max_resid = float(np.max(np.abs(rep.residuals[:n])))
            if max_resid <= cfg.stage_tol:
                break
        if max_resid > cfg.stage_tol:
            raise StageError(
                f"stage {n}: residual {max_resid:.3e} above stage "
                f"tolerance {cfg.stage_tol:.1e} after "
                f"{1 + cfg.retries} refine rounds"
            )
        corrections.append(CorrectionProfile(
            current.grid, candidate.values - current.values, n))
        potentials.append(candidate)
        reports.append(MatchStageReport(
            n=n, refine_reports=stage_reports,
            max_matched_residual=max_resid,
            wall_time_s=time.perf_counter() - t0))
        current = candidate
    return MatchSequence(base=V0, potentials=potentials,
                         corrections=corrections, reports=reports)
