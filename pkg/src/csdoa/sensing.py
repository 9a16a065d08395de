"""Measurement-matrix draw, snapshot compression, and the effective dictionary.

Compression is ``y = Phi x``; the sparse-recovery dictionary is
``Psi = Phi A(theta)``, cached together with its column norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

GAUSSIAN = "gaussian"
IDENTITY = "identity"
MEASUREMENT_KINDS = (GAUSSIAN, IDENTITY)


@dataclass(eq=False)
class MeasurementMatrix:
    """Compression operator Phi (m x N) with its provenance."""

    entries: np.ndarray
    kind: str
    seed: int = 0

    def __post_init__(self) -> None:
        if self.entries.ndim != 2 or self.entries.shape[0] < 1:
            raise ValueError("entries must be a matrix with at least one row")
        if self.kind not in MEASUREMENT_KINDS:
            raise ValueError(f"unknown measurement kind {self.kind!r}")
        if self.kind == IDENTITY:
            m, n = self.entries.shape
            if m != n:
                raise DimensionMismatchError("identity measurement requires m == n")
            if not np.array_equal(self.entries, np.eye(n, dtype=self.entries.dtype)):
                raise ValueError("identity measurement entries must be the identity")

    @property
    def num_measurements(self) -> int:
        return self.entries.shape[0]

    @property
    def signal_len(self) -> int:
        return self.entries.shape[1]


@dataclass(eq=False)
class SensingSystem:
    """The pair (Phi, A) together with Psi = Phi A and cached column norms."""

    phi: MeasurementMatrix
    manifold: np.ndarray
    psi: np.ndarray
    column_norms: np.ndarray

    def __post_init__(self) -> None:
        if self.phi.signal_len != self.manifold.shape[0]:
            raise DimensionMismatchError(
                f"Phi has {self.phi.signal_len} columns but the dictionary has "
                f"{self.manifold.shape[0]} rows"
            )
        product = self.phi.entries @ self.manifold
        scale = np.linalg.norm(product)
        if np.linalg.norm(self.psi - product) > 1e-10 * max(scale, 1.0):
            raise ValueError("psi does not match Phi @ manifold")
        norms = np.linalg.norm(self.psi, axis=0)
        if np.any(norms <= 0.0) or not np.all(np.isfinite(norms)):
            raise ValueError("every psi column must have a positive finite norm")
        if np.max(np.abs(self.column_norms - norms)) > 1e-10 * max(float(norms.max()), 1.0):
            raise ValueError("column_norms do not match psi")

    @property
    def num_measurements(self) -> int:
        return self.psi.shape[0]

    @property
    def num_atoms(self) -> int:
        return self.psi.shape[1]


def min_measurements(num_sources: int, signal_len: int) -> int:
    """Smallest integer strictly greater than ``num_sources * ln(signal_len)``."""
    if num_sources < 1:
        raise ValueError(f"num_sources must be >= 1, got {num_sources}")
    if signal_len < 2:
        raise ValueError(f"signal_len must be >= 2, got {signal_len}")
    return int(math.floor(num_sources * math.log(signal_len))) + 1


def draw_measurement_matrix(m: int, n: int, kind: str, seed: int = 0) -> MeasurementMatrix:
    """Draw an m x n measurement matrix of the given kind.

    ``gaussian`` entries are i.i.d. circular complex Gaussian with real and
    imaginary parts N(0, 1/(2m)), giving unit expected column energy.
    ``identity`` requires m == n and takes no random draws. The seed is kept
    on the result so a run can be reproduced from its metadata.
    """
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    if kind == IDENTITY:
        if m != n:
            raise DimensionMismatchError(f"identity measurement requires m == n, got {m} x {n}")
        entries = np.eye(n, dtype=complex)
    elif kind == GAUSSIAN:
        rng = np.random.default_rng(seed)
        scale = math.sqrt(1.0 / (2.0 * m))
        entries = scale * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    else:
        raise ValueError(f"unknown measurement kind {kind!r}")
    return MeasurementMatrix(entries=entries, kind=kind, seed=int(seed))


def compress(phi: MeasurementMatrix, x: np.ndarray) -> np.ndarray:
    """Exact matrix-vector product ``y = Phi x``."""
    x = np.asarray(x)
    if x.shape[0] != phi.signal_len:
        raise DimensionMismatchError(
            f"x has length {x.shape[0]} but Phi has {phi.signal_len} columns"
        )
    return phi.entries @ x


def build_sensing_system(phi: MeasurementMatrix, manifold: np.ndarray) -> SensingSystem:
    """Form Psi = Phi A and cache its column norms."""
    manifold = np.asarray(manifold)
    if phi.signal_len != manifold.shape[0]:
        raise DimensionMismatchError(
            f"Phi has {phi.signal_len} columns but the dictionary has {manifold.shape[0]} rows"
        )
    psi = phi.entries @ manifold
    return SensingSystem(
        phi=phi,
        manifold=manifold,
        psi=psi,
        column_norms=np.linalg.norm(psi, axis=0),
    )
