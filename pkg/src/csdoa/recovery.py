"""Greedy sparse solvers on complex data: OMP, CoSaMP, and a brute-force oracle.

All solvers work on a :class:`~csdoa.sensing.SensingSystem` and return a
:class:`SparseEstimate` whose coefficient vector is zero off the support.
Atom selection always uses column-normalized correlations so it is invariant
to column scaling; the least-squares refits use the raw columns.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooLargeError, RankDeficientError
from .sensing import SensingSystem

# Relative threshold on the QR diagonal below which a column set is treated
# as rank deficient.
RANK_TOL = 1e-10

# Relative residual improvement below which CoSaMP is considered stalled.
STAGNATION_TOL = 1e-6

LOWEST_INDEX = "lowest_index"


@dataclass(frozen=True)
class SolverConfig:
    """Sparsity budget and termination settings shared by both solvers."""

    sparsity: int
    max_iterations: int = 50
    residual_tol: float = 1e-6
    tie_break: str = LOWEST_INDEX

    def __post_init__(self) -> None:
        if self.sparsity < 1:
            raise ValueError("sparsity must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.residual_tol < 0:
            raise ValueError("residual_tol must be >= 0")
        if self.tie_break != LOWEST_INDEX:
            raise ValueError(f"unsupported tie_break {self.tie_break!r}")


@dataclass(eq=False)
class SparseEstimate:
    """Recovered coefficient vector with its support and solver diagnostics."""

    coefficients: np.ndarray
    support: tuple[int, ...]
    residual_norm: float
    iterations: int
    converged: bool


def least_squares(basis: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares coefficients of ``y`` against the columns of ``basis``.

    Solved through a reduced QR factorization with an explicit rank guard:
    the smallest magnitude on the R diagonal must exceed ``RANK_TOL`` times
    the largest, otherwise :class:`RankDeficientError` is raised. Requires at
    least as many rows as columns.
    """
    basis = np.asarray(basis)
    y = np.asarray(y)
    m, k = basis.shape
    if k == 0:
        return np.zeros(0, dtype=complex)
    if k > m:
        raise RankDeficientError(f"system with {k} columns and {m} rows is underdetermined")
    q, r = np.linalg.qr(basis)
    diag = np.abs(np.diag(r))
    if diag.min() <= RANK_TOL * diag.max():
        raise RankDeficientError("selected columns are numerically rank deficient")
    return np.linalg.solve(r, q.conj().T @ y)


def correlate(system: SensingSystem, residual: np.ndarray) -> np.ndarray:
    """Normalized correlation magnitudes ``|<residual, psi_j>| / ||psi_j||``."""
    return np.abs(system.psi.conj().T @ np.asarray(residual)) / system.column_norms


def _top_indices(values: np.ndarray, count: int) -> np.ndarray:
    """Indices of the ``count`` largest entries, ties resolved to lowest index."""
    return np.argsort(-values, kind="stable")[:count]


def _empty_estimate(num_atoms: int) -> SparseEstimate:
    return SparseEstimate(
        coefficients=np.zeros(num_atoms, dtype=complex),
        support=(),
        residual_norm=0.0,
        iterations=0,
        converged=True,
    )


def omp(system: SensingSystem, y: np.ndarray, config: SolverConfig) -> SparseEstimate:
    """Orthogonal matching pursuit.

    Runs exactly ``config.sparsity`` greedy selections unless the relative
    residual drops to ``config.residual_tol`` first. Each iteration picks the
    column with the largest normalized correlation against the residual
    (ties break to the lowest index; already-selected columns are excluded),
    refits all selected columns by least squares, and updates the residual,
    which is therefore orthogonal to every selected column.
    """
    y = np.asarray(y, dtype=complex)
    m = system.num_measurements
    if config.sparsity > m:
        raise ValueError(f"sparsity {config.sparsity} exceeds {m} measurements")
    if config.max_iterations < config.sparsity:
        raise ValueError("max_iterations must be at least the sparsity budget")
    norm_y = float(np.linalg.norm(y))
    if norm_y == 0.0:
        return _empty_estimate(system.num_atoms)

    support: list[int] = []
    coef = np.zeros(0, dtype=complex)
    residual = y
    residual_norm = norm_y
    for _ in range(config.sparsity):
        proxy = correlate(system, residual)
        if support:
            proxy[support] = -1.0  # an index is never re-selected
        support.append(int(np.argmax(proxy)))
        basis = system.psi[:, support]
        coef = least_squares(basis, y)
        residual = y - basis @ coef
        residual_norm = float(np.linalg.norm(residual))
        if residual_norm <= config.residual_tol * norm_y:
            break

    coefficients = np.zeros(system.num_atoms, dtype=complex)
    coefficients[support] = coef
    return SparseEstimate(
        coefficients=coefficients,
        support=tuple(support),
        residual_norm=residual_norm,
        iterations=len(support),
        converged=residual_norm <= config.residual_tol * norm_y,
    )


def cosamp(system: SensingSystem, y: np.ndarray, config: SolverConfig) -> SparseEstimate:
    """Compressive sampling matching pursuit.

    Per iteration: correlate the residual with all columns, merge the 2M
    strongest indices into the current support, least-squares fit on the
    merged set, prune back to the M largest coefficients, and recompute the
    residual. Halts on a small relative residual, on stagnation (relative
    improvement below ``STAGNATION_TOL``), or after ``max_iterations``; the
    best-residual iterate seen is returned.
    """
    y = np.asarray(y, dtype=complex)
    m = system.num_measurements
    sparsity = config.sparsity
    if 2 * sparsity > m:
        raise ValueError(f"cosamp needs 2 * sparsity <= measurements, got {sparsity} vs {m}")
    norm_y = float(np.linalg.norm(y))
    if norm_y == 0.0:
        return _empty_estimate(system.num_atoms)

    support = np.zeros(0, dtype=int)
    residual = y
    prev_norm = norm_y
    best_norm = math.inf
    best_support = support
    best_coef = np.zeros(0, dtype=complex)
    iterations = 0
    for _ in range(config.max_iterations):
        proxy = correlate(system, residual)
        omega = _top_indices(proxy, min(2 * sparsity, system.num_atoms))
        merged = np.union1d(omega, support)
        if merged.size > m:
            raise RankDeficientError(
                f"merged support of {merged.size} columns exceeds {m} measurements"
            )
        fit = least_squares(system.psi[:, merged], y)
        keep = np.sort(_top_indices(np.abs(fit), sparsity))
        support = merged[keep]
        coef = fit[keep]
        residual = y - system.psi[:, support] @ coef
        residual_norm = float(np.linalg.norm(residual))
        iterations += 1
        if residual_norm < best_norm:
            best_norm = residual_norm
            best_support = support
            best_coef = coef
        if residual_norm <= config.residual_tol * norm_y:
            break
        if prev_norm - residual_norm < STAGNATION_TOL * prev_norm:
            break
        prev_norm = residual_norm

    coefficients = np.zeros(system.num_atoms, dtype=complex)
    coefficients[best_support] = best_coef
    return SparseEstimate(
        coefficients=coefficients,
        support=tuple(int(i) for i in best_support),
        residual_norm=best_norm,
        iterations=iterations,
        converged=best_norm <= config.residual_tol * norm_y,
    )


def l0_oracle(system: SensingSystem, y: np.ndarray, sparsity: int) -> SparseEstimate:
    """Exhaustive minimum-residual search over all column subsets of the given size.

    Test-scale oracle: evaluates a least-squares fit on every subset and keeps
    the one with the smallest residual (ties go to the lexicographically
    smallest support). Guarded to at most 10^6 candidate subsets.
    """
    if sparsity < 1:
        raise ValueError("sparsity must be >= 1")
    num_atoms = system.num_atoms
    n_subsets = math.comb(num_atoms, sparsity)
    if n_subsets > 1_000_000:
        raise InstanceTooLargeError(
            f"{n_subsets} candidate subsets exceed the 10^6 enumeration guard"
        )
    y = np.asarray(y, dtype=complex)
    best: tuple[float, tuple[int, ...], np.ndarray] | None = None
    evaluated = 0
    for subset in itertools.combinations(range(num_atoms), sparsity):
        basis = system.psi[:, subset]
        try:
            coef = least_squares(basis, y)
        except RankDeficientError:
            continue
        evaluated += 1
        res_norm = float(np.linalg.norm(y - basis @ coef))
        if best is None or res_norm < best[0]:
            best = (res_norm, subset, coef)
    if best is None:
        raise RankDeficientError("every candidate subset was rank deficient")
    res_norm, subset, coef = best
    coefficients = np.zeros(num_atoms, dtype=complex)
    coefficients[list(subset)] = coef
    return SparseEstimate(
        coefficients=coefficients,
        support=subset,
        residual_norm=res_norm,
        iterations=evaluated,
        converged=True,
    )
