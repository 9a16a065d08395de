"""Shared helpers and independent oracles for the test suite.

The oracles here deliberately take different computational routes than the
library (normal equations instead of QR, scalar loops instead of vectorized
products) so agreement is meaningful.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

import csdoa


def normal_equations(basis: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares solution via the normal equations (B^H B) c = B^H y."""
    gram = basis.conj().T @ basis
    return np.linalg.solve(gram, basis.conj().T @ y)


def gaussian_system(m: int, n: int, seed: int) -> csdoa.SensingSystem:
    """Sensing system whose effective dictionary is an m-by-n Gaussian matrix.

    An identity manifold makes psi equal to the measurement matrix itself,
    giving an incoherent generic dictionary for solver tests.
    """
    phi = csdoa.draw_measurement_matrix(m, n, csdoa.GAUSSIAN, seed=seed)
    return csdoa.build_sensing_system(phi, np.eye(n, dtype=complex))


def planted_instance(offset: int, inst: int, m: int = 10, n: int = 20, sparsity: int = 2):
    """Noiseless sparse instance with a known planted support.

    Instance ``inst`` of the family anchored at ``offset`` uses seed
    ``offset + 2*inst`` for the measurement matrix and ``offset + 2*inst + 1``
    for the support and coefficients (unit-modulus random phases).

    Returns (system, y, support, x).
    """
    phi = csdoa.draw_measurement_matrix(m, n, csdoa.GAUSSIAN, seed=offset + 2 * inst)
    system = csdoa.build_sensing_system(phi, np.eye(n, dtype=complex))
    rng = np.random.default_rng(offset + 2 * inst + 1)
    support = tuple(sorted(int(i) for i in rng.choice(n, size=sparsity, replace=False)))
    x = np.zeros(n, dtype=complex)
    x[list(support)] = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, sparsity))
    y = csdoa.compress(phi, x)
    return system, y, support, x


@lru_cache(maxsize=None)
def oracle_match_counts(offset: int, count: int) -> dict:
    """How often each solver's support matches the exhaustive oracle.

    Cached so the module-level invariant test and the acceptance gate share
    one computation. Also checks coefficient agreement on matches and reports
    the worst relative deviation.
    """
    matches = {"omp": 0, "cosamp": 0}
    worst_coef = {"omp": 0.0, "cosamp": 0.0}
    for inst in range(count):
        system, y, _, _ = planted_instance(offset, inst)
        oracle = csdoa.l0_oracle(system, y, 2)
        config = csdoa.SolverConfig(sparsity=2)
        for name, solver in (("omp", csdoa.omp), ("cosamp", csdoa.cosamp)):
            estimate = solver(system, y, config)
            if tuple(sorted(estimate.support)) == oracle.support:
                matches[name] += 1
                scale = float(np.linalg.norm(oracle.coefficients))
                dev = float(np.linalg.norm(estimate.coefficients - oracle.coefficients))
                worst_coef[name] = max(worst_coef[name], dev / scale)
    return {"matches": matches, "worst_coef_rel": worst_coef}


class ZeroRng:
    """Generator stub whose every draw is zero: phases 0, no noise."""

    def uniform(self, low=0.0, high=1.0, size=None):
        return np.zeros(size if size is not None else ())

    def standard_normal(self, size=None):
        return np.zeros(size if size is not None else ())
