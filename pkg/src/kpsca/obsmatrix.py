"""Observation-matrix layouts (slots as rows) and column standardization.

Four layouts feed the clustering/classification stages:

* ``samples_matrix`` - raw trace, one row per slot, all D*S samples as columns
  (cycle-major, sample-minor);
* ``compressed_matrix`` - compressed trace, one column per clock cycle;
* ``cycle_samples_matrix`` - raw trace restricted to one clock cycle (S columns);
* ``cycle_value_matrix`` - compressed trace restricted to one cycle (1 column).

Each column remembers the (cycle, sample) it came from so downstream feature
pruning can drop whole cycles.
"""

from dataclasses import dataclass

import numpy as np

from .trace import CompressedTrace, RawTrace


@dataclass(frozen=True, eq=False)
class ObservationMatrix:
    """l x d feature matrix with per-column provenance (1-based cycle/sample)."""

    data: np.ndarray
    col_cycles: np.ndarray
    col_samples: np.ndarray | None  # None for compressed layouts

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError("observation matrix must be 2-D")
        if not np.all(np.isfinite(data)):
            raise ValueError("observation matrix entries must be finite")
        if self.col_cycles.shape != (data.shape[1],):
            raise ValueError("column provenance length must equal column count")
        if self.col_samples is not None and self.col_samples.shape != (data.shape[1],):
            raise ValueError("column provenance length must equal column count")
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def provenance(self, col: int) -> tuple:
        """(cycle, sample) for raw layouts, (cycle,) for compressed ones."""
        if self.col_samples is None:
            return (int(self.col_cycles[col]),)
        return (int(self.col_cycles[col]), int(self.col_samples[col]))


@dataclass(frozen=True, eq=False)
class StandardizedMatrix:
    """Column-standardized matrix; zero-variance source columns are all-zero."""

    data: np.ndarray
    constant_columns: frozenset[int]
    col_cycles: np.ndarray
    col_samples: np.ndarray | None

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def effective_dim(self) -> int:
        return self.data.shape[1] - len(self.constant_columns)


def samples_matrix(trace: RawTrace) -> ObservationMatrix:
    """All samples of each slot as features: l rows, S*D columns."""
    g = trace.geometry
    data = trace.samples.reshape(g.l, g.D * g.S).copy()
    cycles = np.repeat(np.arange(1, g.D + 1), g.S)
    samples = np.tile(np.arange(1, g.S + 1), g.D)
    return ObservationMatrix(data, cycles, samples)


def compressed_matrix(ctrace: CompressedTrace) -> ObservationMatrix:
    """One compressed value per clock cycle as features: l rows, D columns."""
    data = ctrace.values.reshape(ctrace.l, ctrace.D).copy()
    return ObservationMatrix(data, np.arange(1, ctrace.D + 1), None)


def _check_cycle(cycle: int, D: int):
    if not 1 <= cycle <= D:
        raise ValueError(f"cycle index {cycle} out of range 1..{D}")


def cycle_samples_matrix(trace: RawTrace, cycle: int) -> ObservationMatrix:
    """Samples of one clock cycle across slots: l rows, S columns."""
    g = trace.geometry
    _check_cycle(cycle, g.D)
    data = np.ascontiguousarray(trace.cube()[:, cycle - 1, :])
    return ObservationMatrix(
        data,
        np.full(g.S, cycle),
        np.arange(1, g.S + 1),
    )


def cycle_value_matrix(ctrace: CompressedTrace, cycle: int) -> ObservationMatrix:
    """The compressed value of one cycle across slots: l rows, 1 column."""
    _check_cycle(cycle, ctrace.D)
    data = ctrace.grid()[:, cycle - 1 : cycle].copy()
    return ObservationMatrix(data, np.array([cycle]), None)


def standardize(m: ObservationMatrix) -> StandardizedMatrix:
    """Center each column and scale it to unit population standard deviation.

    Columns whose values are all identical have no scale; they become all-zero
    and are reported in ``constant_columns`` instead of producing NaNs.
    """
    data = m.data
    constant = data.max(axis=0) == data.min(axis=0)
    mu = data.mean(axis=0)
    centered = data - mu
    sigma = np.sqrt((centered * centered).mean(axis=0))
    divisor = np.where(constant, 1.0, sigma)
    out = centered / divisor
    out[:, constant] = 0.0
    return StandardizedMatrix(
        out,
        frozenset(int(c) for c in np.flatnonzero(constant)),
        m.col_cycles,
        m.col_samples,
    )
