"""Angle spectrum, peak extraction, and per-trial error scoring.

The sparse coefficient vector lives on the scan grid, so its squared moduli
already form the angle power spectrum. Peaks degenerate to the support of
the estimate, and scoring reduces to aligning two sorted angle lists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .array_model import AngleGrid, SourceSet
from .errors import DimensionMismatchError
from .recovery import SparseEstimate

# Charged once per true source that the estimate failed to recover.
MISS_PENALTY_DEG = 180.0


@dataclass(eq=False)
class AngleSpectrum:
    """Power over the scan grid: ``power[j]`` belongs to ``grid.angles_deg[j]``."""

    grid: AngleGrid
    power: np.ndarray


@dataclass(frozen=True)
class DoaEstimate:
    """Estimated arrival angles, sorted ascending, with their spectrum powers."""

    doas_deg: tuple[float, ...]
    powers: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.doas_deg) != len(self.powers):
            raise DimensionMismatchError("doas_deg and powers must have equal length")
        if any(b <= a for a, b in zip(self.doas_deg, self.doas_deg[1:])):
            raise ValueError("doas_deg must be strictly increasing")

    @property
    def num_sources(self) -> int:
        return len(self.doas_deg)


def angle_spectrum(estimate: SparseEstimate, grid: AngleGrid) -> AngleSpectrum:
    """Squared-modulus spectrum of a sparse estimate over its scan grid."""
    coef = np.asarray(estimate.coefficients)
    if coef.shape[0] != len(grid):
        raise DimensionMismatchError(
            f"estimate length {coef.shape[0]} does not match grid length {len(grid)}"
        )
    return AngleSpectrum(grid=grid, power=np.abs(coef) ** 2)


def pick_peaks(spectrum: AngleSpectrum, num_peaks: int) -> DoaEstimate:
    """Angles of the ``num_peaks`` largest positive spectrum entries.

    Ties break toward the lower angle. Zero-power entries are never peaks, so
    the result is shorter than ``num_peaks`` when the spectrum has fewer
    positive entries.
    """
    if num_peaks < 1:
        raise ValueError("num_peaks must be >= 1")
    power = np.asarray(spectrum.power)
    order = np.argsort(-power, kind="stable")[:num_peaks]
    order = order[power[order] > 0.0]
    order = np.sort(order)
    return DoaEstimate(
        doas_deg=tuple(float(spectrum.grid.angles_deg[j]) for j in order),
        powers=tuple(float(power[j]) for j in order),
    )


def trial_error(estimated: DoaEstimate, truth: SourceSet) -> np.ndarray:
    """Per-source absolute angle errors of an estimate against the truth.

    Both angle lists are sorted ascending and aligned in order: each true
    source is either paired with one estimated angle or counted as a miss at
    ``MISS_PENALTY_DEG``. Among the order-preserving alignments the one with
    the smallest total error is used, so a lone estimate near one of several
    true sources is credited to that source rather than paired positionally.
    Returns one error per true source, in sorted-truth order.
    """
    est = sorted(estimated.doas_deg)
    true = sorted(truth.doas_deg)
    n_true = len(true)
    n_est = len(est)
    if n_true == 0:
        return np.zeros(0)

    # cost[i][j]: minimal total error assigning true[i:] given est[j:] remain,
    # preferring a match over a miss on exact ties.
    inf = float("inf")
    cost = [[inf] * (n_est + 1) for _ in range(n_true + 1)]
    cost[n_true] = [0.0] * (n_est + 1)
    for i in range(n_true - 1, -1, -1):
        for j in range(n_est, -1, -1):
            miss = MISS_PENALTY_DEG + cost[i + 1][j]
            best = miss
            if j < n_est:
                match = abs(est[j] - true[i]) + cost[i + 1][j + 1]
                skip = cost[i][j + 1]  # spurious estimate, costs nothing
                best = min(match, skip, miss)
            cost[i][j] = best

    errors = np.empty(n_true)
    i = j = 0
    while i < n_true:
        miss = MISS_PENALTY_DEG + cost[i + 1][j]
        if j < n_est:
            match = abs(est[j] - true[i]) + cost[i + 1][j + 1]
            if match <= min(cost[i][j + 1], miss):
                errors[i] = abs(est[j] - true[i])
                i += 1
                j += 1
                continue
            if cost[i][j + 1] < miss:
                j += 1
                continue
        errors[i] = MISS_PENALTY_DEG
        i += 1
    return errors
