"""Single-trace key recovery toolkit for scalar-multiplication power traces.

Pipeline: simulate (or load) a trace, compress clock cycles to sums of
squares, lay slots out as observation matrices, standardize, then recover
the key bits with K-means clustering or PCA first-component classification.
"""

__version__ = "0.1.0"

from ._backend import backend_name
from .attack import (
    AttackReport,
    KeyCandidate,
    attack1,
    attack2,
    attack3,
    rank_leakage,
    relative_correctness,
)
from .kmeans import Clustering, KMeansConfig, kmeans_restarted, kmeans_single
from .obsmatrix import (
    ObservationMatrix,
    StandardizedMatrix,
    compressed_matrix,
    cycle_samples_matrix,
    cycle_value_matrix,
    samples_matrix,
    standardize,
)
from .pca import PcaModel, classify_pc1, covariance_matrix, eigendecompose, pca_fit, project
from .simulate import LeakModel, SimulatedTrace, gen_key, preset, simulate_trace
from .trace import (
    BadMagicError,
    CompressedTrace,
    GeometryError,
    NonFiniteSampleError,
    RawTrace,
    SecretKey,
    TraceFormatError,
    TraceGeometry,
    TruncatedFileError,
    compress,
    parse_key_hex,
    read_compressed,
    read_trace,
    write_compressed,
    write_trace,
)

__all__ = [
    "AttackReport",
    "BadMagicError",
    "Clustering",
    "CompressedTrace",
    "GeometryError",
    "KMeansConfig",
    "KeyCandidate",
    "LeakModel",
    "NonFiniteSampleError",
    "ObservationMatrix",
    "PcaModel",
    "RawTrace",
    "SecretKey",
    "SimulatedTrace",
    "StandardizedMatrix",
    "TraceFormatError",
    "TraceGeometry",
    "TruncatedFileError",
    "attack1",
    "attack2",
    "attack3",
    "backend_name",
    "classify_pc1",
    "compress",
    "compressed_matrix",
    "covariance_matrix",
    "cycle_samples_matrix",
    "cycle_value_matrix",
    "eigendecompose",
    "gen_key",
    "kmeans_restarted",
    "kmeans_single",
    "parse_key_hex",
    "pca_fit",
    "preset",
    "project",
    "rank_leakage",
    "read_compressed",
    "read_trace",
    "relative_correctness",
    "samples_matrix",
    "simulate_trace",
    "standardize",
    "write_compressed",
    "write_trace",
]
