"""Scenario container, single-run driver, and the Monte Carlo RMSE harness.

A :class:`Scenario` bundles everything one experiment needs (array, grid,
sources, SNR, measurement scheme, solver settings, seed). ``run_single``
produces spectra and peak estimates for each requested algorithm;
``run_monte_carlo`` sweeps SNR and aggregates RMSE and success rates over
independently seeded trials, optionally across worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .array_model import (
    UNIT_MODULUS,
    AngleGrid,
    ArrayGeometry,
    Snapshot,
    SourceSet,
    build_manifold,
    make_grid,
    synthesize,
)
from .errors import DimensionMismatchError, RankDeficientError
from .recovery import SolverConfig, cosamp, omp
from .sensing import (
    GAUSSIAN,
    IDENTITY,
    MEASUREMENT_KINDS,
    build_sensing_system,
    compress,
    draw_measurement_matrix,
    min_measurements,
)
from .spectrum import (
    MISS_PENALTY_DEG,
    AngleSpectrum,
    DoaEstimate,
    angle_spectrum,
    pick_peaks,
    trial_error,
)

OMP = "omp"
COSAMP = "cosamp"
ALGORITHMS = (OMP, COSAMP)

_SOLVERS = {OMP: omp, COSAMP: cosamp}


@dataclass(frozen=True)
class MeasurementSpec:
    """Compression scheme: matrix family and number of measurement rows."""

    kind: str
    num_measurements: int

    def __post_init__(self) -> None:
        if self.kind not in MEASUREMENT_KINDS:
            raise ValueError(f"unknown measurement kind {self.kind!r}")
        if self.num_measurements < 1:
            raise ValueError("num_measurements must be >= 1")


@dataclass(frozen=True, eq=False)
class Scenario:
    """Full, self-contained description of one simulation setup.

    Every run is a pure function of a Scenario: all randomness (measurement
    matrices, source amplitudes, noise) derives from ``seed``.
    """

    geometry: ArrayGeometry
    grid: AngleGrid
    sources: SourceSet
    snr_db: float
    measurement: MeasurementSpec
    solver: SolverConfig
    algorithms: tuple[str, ...] = ALGORITHMS
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {name!r}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms must not repeat")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError("snr_db must be finite or +inf (noise disabled)")
        for doa in self.sources.doas_deg:
            self.grid.index_of(doa)  # raises OffGridSourceError otherwise
        m = self.measurement.num_measurements
        if self.measurement.kind == IDENTITY and m != self.geometry.num_sensors:
            raise DimensionMismatchError(
                f"identity measurement needs m = {self.geometry.num_sensors} sensors, got {m}"
            )
        if OMP in self.algorithms:
            if self.solver.sparsity > m:
                raise ValueError(f"omp needs sparsity <= {m} measurements")
            if self.solver.max_iterations < self.solver.sparsity:
                raise ValueError("omp needs max_iterations >= sparsity")
        if COSAMP in self.algorithms and 2 * self.solver.sparsity > m:
            raise ValueError(f"cosamp needs 2 * sparsity <= {m} measurements")


@dataclass(eq=False)
class TrialRecord:
    """Outcome of one algorithm on one trial, scored against the truth."""

    trial_index: int
    algorithm: str
    estimated: DoaEstimate
    errors_deg: np.ndarray
    residual_norm: float
    iterations: int
    success: bool


@dataclass(eq=False)
class AlgorithmRun:
    """Spectrum, peak estimate, and scored record for one algorithm."""

    algorithm: str
    spectrum: AngleSpectrum
    estimated: DoaEstimate
    record: TrialRecord


@dataclass(eq=False)
class SingleRunResult:
    """Everything produced by one seeded run: the snapshot and per-algorithm runs."""

    scenario: Scenario
    snapshot: Snapshot
    runs: dict[str, AlgorithmRun]


@dataclass(eq=False)
class AlgorithmRmse:
    """Aggregated sweep results for one algorithm, index-aligned with the SNR points."""

    algorithm: str
    rmse_deg: tuple[float, ...]
    rmse_success_only_deg: tuple[float, ...]
    success_rate: tuple[float, ...]


@dataclass(eq=False)
class RmseCurve:
    """RMSE-vs-SNR sweep for every requested algorithm."""

    snr_points_db: tuple[float, ...]
    per_algorithm: dict[str, AlgorithmRmse]
    trials: int


def default_num_measurements(num_sources: int, num_sensors: int) -> int:
    """Default measurement count: one more than the information-theoretic floor."""
    return min_measurements(num_sources, num_sensors) + 1


def trial_seeds(seed: int, snr_index: int, trial_index: int) -> tuple[int, int]:
    """Derive independent (data_seed, phi_seed) for one trial.

    Uses a splittable seed sequence over (scenario seed, sweep position,
    trial position) so trials are reproducible regardless of execution order
    or worker count.
    """
    state = np.random.SeedSequence([seed, snr_index, trial_index]).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def build_scenario(
    sources_deg: Sequence[float],
    *,
    num_sensors: int = 15,
    spacing_over_wavelength: float = 0.5,
    grid_spec: tuple[float, float, float] = (-90.0, 90.0, 1.0),
    coherent_groups: Sequence[Sequence[int]] = (),
    amplitude_model: str = UNIT_MODULUS,
    snr_db: float = 0.0,
    measurement_kind: str = GAUSSIAN,
    num_measurements: int | None = None,
    algorithms: Sequence[str] = ALGORITHMS,
    sparsity: int | None = None,
    max_iterations: int | None = None,
    residual_tol: float = 1e-6,
    seed: int = 0,
) -> Scenario:
    """Assemble a Scenario from loose parameters, filling documented defaults.

    ``coherent_groups`` uses zero-based source indices and may cover only
    some sources; uncovered ones become independent singletons. ``sparsity``
    defaults to the source count and ``num_measurements`` to
    ``default_num_measurements`` (identity measurements always use one row
    per sensor).
    """
    geometry = ArrayGeometry(num_sensors, spacing_over_wavelength)
    grid = make_grid(*grid_spec)
    groups = tuple(tuple(sorted(int(i) for i in g)) for g in coherent_groups)
    covered = {i for g in groups for i in g}
    groups += tuple((i,) for i in range(len(sources_deg)) if i not in covered)
    # Canonical group order keeps the per-group amplitude draws reproducible.
    groups = tuple(sorted(groups, key=lambda g: g[0]))
    sources = SourceSet(
        doas_deg=tuple(float(s) for s in sources_deg),
        coherent_groups=groups,
        amplitude_model=amplitude_model,
    )
    if sparsity is None:
        sparsity = sources.num_sources
    if num_measurements is None:
        if measurement_kind == IDENTITY:
            num_measurements = num_sensors
        else:
            num_measurements = default_num_measurements(sparsity, num_sensors)
    if max_iterations is None:
        max_iterations = max(50, sparsity)
    solver = SolverConfig(
        sparsity=sparsity,
        max_iterations=max_iterations,
        residual_tol=residual_tol,
    )
    return Scenario(
        geometry=geometry,
        grid=grid,
        sources=sources,
        snr_db=snr_db,
        measurement=MeasurementSpec(measurement_kind, num_measurements),
        solver=solver,
        algorithms=tuple(dict.fromkeys(algorithms)),
        seed=seed,
    )


def _run_trial(
    scenario: Scenario,
    manifold: np.ndarray,
    snr_db: float,
    snr_index: int,
    trial_index: int,
) -> SingleRunResult:
    """One fully seeded trial: synthesize, compress, solve, and score."""
    data_seed, phi_seed = trial_seeds(scenario.seed, snr_index, trial_index)
    trial_scenario = scenario if snr_db == scenario.snr_db else replace(scenario, snr_db=snr_db)
    snapshot = synthesize(trial_scenario, np.random.default_rng(data_seed))
    phi = draw_measurement_matrix(
        trial_scenario.measurement.num_measurements,
        trial_scenario.geometry.num_sensors,
        trial_scenario.measurement.kind,
        seed=phi_seed,
    )
    system = build_sensing_system(phi, manifold)
    y = compress(phi, snapshot.data)

    grid = trial_scenario.grid
    num_sources = trial_scenario.sources.num_sources
    runs: dict[str, AlgorithmRun] = {}
    for algorithm in trial_scenario.algorithms:
        try:
            estimate = _SOLVERS[algorithm](system, y, trial_scenario.solver)
        except RankDeficientError:
            spectrum = AngleSpectrum(grid=grid, power=np.zeros(len(grid)))
            estimated = DoaEstimate(doas_deg=(), powers=())
            record = TrialRecord(
                trial_index=trial_index,
                algorithm=algorithm,
                estimated=estimated,
                errors_deg=np.full(num_sources, MISS_PENALTY_DEG),
                residual_norm=float(np.linalg.norm(y)),
                iterations=0,
                success=False,
            )
            runs[algorithm] = AlgorithmRun(algorithm, spectrum, estimated, record)
            continue
        spectrum = angle_spectrum(estimate, grid)
        estimated = pick_peaks(spectrum, trial_scenario.solver.sparsity)
        errors = trial_error(estimated, trial_scenario.sources)
        record = TrialRecord(
            trial_index=trial_index,
            algorithm=algorithm,
            estimated=estimated,
            errors_deg=errors,
            residual_norm=estimate.residual_norm,
            iterations=estimate.iterations,
            success=bool(errors.max() < grid.step_deg),
        )
        runs[algorithm] = AlgorithmRun(algorithm, spectrum, estimated, record)
    return SingleRunResult(scenario=trial_scenario, snapshot=snapshot, runs=runs)


def run_single(scenario: Scenario) -> SingleRunResult:
    """Run one trial at the scenario's own SNR, deterministic in ``scenario.seed``.

    Equivalent to trial 0 of the first sweep point of ``run_monte_carlo``.
    """
    manifold = build_manifold(scenario.grid, scenario.geometry)
    return _run_trial(scenario, manifold, scenario.snr_db, 0, 0)


def _mc_trial(
    scenario: Scenario,
    manifold: np.ndarray,
    snr_db: float,
    snr_index: int,
    trial_index: int,
) -> dict[str, tuple[np.ndarray, bool]]:
    """Slim per-trial result for aggregation: per-algorithm (errors, success)."""
    result = _run_trial(scenario, manifold, snr_db, snr_index, trial_index)
    return {
        algorithm: (run.record.errors_deg, run.record.success)
        for algorithm, run in result.runs.items()
    }


# Worker-process state installed by the pool initializer: the scenario plus
# the manifold built once per process instead of once per trial.
_WORKER: dict = {}


def _init_mc_worker(scenario: Scenario, sweep: tuple[float, ...]) -> None:
    _WORKER["scenario"] = scenario
    _WORKER["sweep"] = sweep
    _WORKER["manifold"] = build_manifold(scenario.grid, scenario.geometry)


def _mc_worker(task: tuple[int, int]) -> dict[str, tuple[np.ndarray, bool]]:
    snr_index, trial_index = task
    scenario = _WORKER["scenario"]
    return _mc_trial(scenario, _WORKER["manifold"], _WORKER["sweep"][snr_index], snr_index, trial_index)


def run_monte_carlo(
    scenario: Scenario,
    snr_sweep_db: Sequence[float],
    trials: int,
    workers: int = 1,
) -> RmseCurve:
    """Sweep SNR, running ``trials`` independent trials per point.

    Trial (i, t) is seeded by ``trial_seeds(scenario.seed, i, t)`` with a
    fresh measurement matrix, amplitudes, and noise every time, so the curve
    is deterministic for a given scenario regardless of ``workers``.
    Aggregates, per algorithm and SNR point, the RMSE over all per-source
    errors (misses included at the 180 degree penalty), the RMSE over
    successful trials only (NaN when there are none), and the success rate.
    """
    sweep = tuple(float(s) for s in snr_sweep_db)
    if not sweep:
        raise ValueError("snr_sweep_db must be nonempty")
    if trials < 1:
        raise ValueError("trials must be >= 1")

    tasks = [(i, t) for i in range(len(sweep)) for t in range(trials)]
    if workers > 1:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_mc_worker,
            initargs=(scenario, sweep),
        ) as pool:
            outcomes = list(pool.map(_mc_worker, tasks, chunksize=chunk))
    else:
        manifold = build_manifold(scenario.grid, scenario.geometry)
        outcomes = [_mc_trial(scenario, manifold, sweep[i], i, t) for i, t in tasks]

    per_algorithm: dict[str, AlgorithmRmse] = {}
    for algorithm in scenario.algorithms:
        rmse: list[float] = []
        rmse_success: list[float] = []
        rate: list[float] = []
        for i in range(len(sweep)):
            point = outcomes[i * trials : (i + 1) * trials]
            errors = np.concatenate([trial[algorithm][0] for trial in point])
            rmse.append(float(np.sqrt(np.mean(errors**2))))
            hits = [trial[algorithm][0] for trial in point if trial[algorithm][1]]
            if hits:
                hit_errors = np.concatenate(hits)
                rmse_success.append(float(np.sqrt(np.mean(hit_errors**2))))
            else:
                rmse_success.append(float("nan"))
            rate.append(sum(trial[algorithm][1] for trial in point) / trials)
        per_algorithm[algorithm] = AlgorithmRmse(
            algorithm=algorithm,
            rmse_deg=tuple(rmse),
            rmse_success_only_deg=tuple(rmse_success),
            success_rate=tuple(rate),
        )
    return RmseCurve(snr_points_db=sweep, per_algorithm=per_algorithm, trials=trials)
