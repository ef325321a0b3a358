"""The three key-recovery attacks, their metrics and report serialization.

* ``attack1``: cluster/classify the whole trace at once (one candidate).
* ``attack2``: one experiment per clock cycle (needs the true key; yields a
  per-cycle correctness profile, i.e. a leakage ranking).
* ``attack3``: repeat the whole-trace attack while discarding the weakest
  cycles one at a time, strongest-first per a leakage ranking.

Unsupervised labels only split slots into two classes; which class means
bit 1 is unknowable. Correctness is therefore relative: with ``m`` matching
bits out of ``l``, delta = max(m, l-m)/l in [0.5, 1.0]. Without a known key
a report carries every candidate together with its complement.

Reports serialize to JSON with the schema::

    {attack, method, geometry, config,
     experiments: [{cycles_used, delta, candidate_hex, converged}],
     best_delta, eta, num_high_candidates, ranking}

``candidate_hex`` packs the slot labels MSB-first, left-padded to whole
bytes. ``num_high_candidates`` counts experiments with delta > 0.95;
``eta`` (attack3) is the smallest retained-cycle count among experiments
reaching ``best_delta``.
"""

import dataclasses
import json
from dataclasses import dataclass

import numpy as np

from .kmeans import KMeansConfig, kmeans_restarted
from .obsmatrix import (
    ObservationMatrix,
    StandardizedMatrix,
    compressed_matrix,
    samples_matrix,
    standardize,
)
from .pca import classify_pc1, pca_fit, project
from .trace import CompressedTrace, RawTrace, SecretKey

METHODS = ("kmeans", "pca")
HIGH_DELTA = 0.95


@dataclass(frozen=True, eq=False)
class KeyCandidate:
    """Binary labels in slot order (slot t <-> analyzed key bit t)."""

    labels: np.ndarray
    method: str
    source: dict

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.uint8)
        if labels.ndim != 1 or np.any(labels > 1):
            raise ValueError("candidate labels must be binary")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def complement(self) -> np.ndarray:
        return (1 - self.labels).astype(np.uint8)

    def to_hex(self) -> str:
        value = 0
        for b in self.labels:
            value = (value << 1) | int(b)
        n_bytes = (self.labels.size + 7) // 8
        return format(value, f"0{2 * n_bytes}x")


@dataclass(frozen=True, eq=False)
class Experiment:
    cycles_used: tuple[int, ...]
    candidate: KeyCandidate
    delta: float | None
    converged: bool


@dataclass(frozen=True, eq=False)
class AttackReport:
    attack: str
    method: str
    geometry: dict
    config: dict
    experiments: tuple[Experiment, ...]
    best_delta: float | None
    eta: int | None
    num_high_candidates: int | None
    ranking: tuple[int, ...] | None

    @property
    def candidates(self) -> list[KeyCandidate]:
        return [e.candidate for e in self.experiments]

    @property
    def deltas(self) -> list[float | None]:
        return [e.delta for e in self.experiments]

    def to_json_dict(self) -> dict:
        experiments = []
        for e in self.experiments:
            entry = {
                "cycles_used": list(e.cycles_used),
                "delta": e.delta,
                "candidate_hex": e.candidate.to_hex(),
                "converged": e.converged,
            }
            if e.delta is None:
                entry["complement_hex"] = KeyCandidate(
                    e.candidate.complement(), e.candidate.method, e.candidate.source
                ).to_hex()
            experiments.append(entry)
        return {
            "attack": self.attack,
            "method": self.method,
            "geometry": self.geometry,
            "config": self.config,
            "experiments": experiments,
            "best_delta": self.best_delta,
            "eta": self.eta,
            "num_high_candidates": self.num_high_candidates,
            "ranking": None if self.ranking is None else list(self.ranking),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def _truth_bits(truth) -> np.ndarray:
    if isinstance(truth, SecretKey):
        return truth.analyzed_bits
    return np.ascontiguousarray(truth, dtype=np.uint8)


def relative_correctness(candidate, truth) -> float:
    """max(matches, l - matches) / l of a candidate against the known bits."""
    labels = candidate.labels if isinstance(candidate, KeyCandidate) else np.asarray(candidate)
    bits = _truth_bits(truth)
    if labels.shape != bits.shape:
        raise ValueError(
            f"candidate has {labels.size} bits, truth window has {bits.size}"
        )
    m = int(np.count_nonzero(labels == bits))
    return max(m, labels.size - m) / labels.size


def _layout(data):
    if isinstance(data, RawTrace):
        g = data.geometry
        return samples_matrix(data), {"l": g.l, "D": g.D, "S": g.S}, g.D
    if isinstance(data, CompressedTrace):
        return (
            compressed_matrix(data),
            {"l": data.l, "D": data.D, "S": None},
            data.D,
        )
    raise TypeError(f"expected RawTrace or CompressedTrace, got {type(data).__name__}")


def _restrict(matrix: ObservationMatrix, cycles) -> ObservationMatrix:
    mask = np.isin(matrix.col_cycles, list(cycles))
    return ObservationMatrix(
        np.ascontiguousarray(matrix.data[:, mask]),
        matrix.col_cycles[mask],
        None if matrix.col_samples is None else matrix.col_samples[mask],
    )


def experiment_matrix(data, cycles_used) -> StandardizedMatrix:
    """Standardized feature matrix of one experiment (used for re-plotting)."""
    matrix, _, _ = _layout(data)
    return standardize(_restrict(matrix, cycles_used))


def _run_method(std: StandardizedMatrix, method: str, cfg: KMeansConfig):
    if method == "kmeans":
        clustering = kmeans_restarted(std, cfg)
        return clustering.labels.astype(np.uint8), bool(clustering.converged)
    if method == "pca":
        model = pca_fit(std, max_components=1)
        if model.n_components == 0:  # fully degenerate matrix
            return np.zeros(std.shape[0], dtype=np.uint8), True
        return classify_pc1(project(std, model, 1)), True
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def _check_cfg(method: str, cfg: KMeansConfig):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if cfg.K != 2:
        raise ValueError("key-recovery attacks require K=2")


def _config_echo(method: str, cfg: KMeansConfig) -> dict:
    return {
        "method": method,
        "K": cfg.K,
        "max_iter": cfg.max_iter,
        "restarts": cfg.restarts,
        "base_seed": cfg.base_seed,
    }


def _finalize(attack, method, geometry, cfg, experiments, ranking, with_eta):
    deltas = [e.delta for e in experiments if e.delta is not None]
    best = max(deltas) if deltas else None
    num_high = sum(1 for d in deltas if d > HIGH_DELTA) if deltas else None
    eta = None
    if with_eta and best is not None:
        eta = min(len(e.cycles_used) for e in experiments if e.delta == best)
    return AttackReport(
        attack=attack,
        method=method,
        geometry=geometry,
        config=_config_echo(method, cfg),
        experiments=tuple(experiments),
        best_delta=best,
        eta=eta,
        num_high_candidates=num_high,
        ranking=None if ranking is None else tuple(int(c) for c in ranking),
    )


def attack1(data, method: str, cfg: KMeansConfig, truth=None) -> AttackReport:
    """Whole-trace attack: one candidate from all cycles' features."""
    _check_cfg(method, cfg)
    matrix, geometry, D = _layout(data)
    labels, converged = _run_method(standardize(matrix), method, cfg)
    candidate = KeyCandidate(labels, method, {"attack": "attack1"})
    delta = relative_correctness(candidate, truth) if truth is not None else None
    exp = Experiment(tuple(range(1, D + 1)), candidate, delta, converged)
    return _finalize("attack1", method, geometry, cfg, [exp], None, False)


def attack2(data, method: str, cfg: KMeansConfig, truth) -> AttackReport:
    """Per-cycle attack: D experiments, one candidate per clock cycle."""
    _check_cfg(method, cfg)
    if truth is None:
        raise ValueError("attack2 evaluates every cycle against the true key")
    matrix, geometry, D = _layout(data)
    experiments = []
    for cycle in range(1, D + 1):
        std = standardize(_restrict(matrix, [cycle]))
        labels, converged = _run_method(std, method, cfg)
        candidate = KeyCandidate(labels, method, {"attack": "attack2", "cycle": cycle})
        delta = relative_correctness(candidate, truth)
        experiments.append(Experiment((cycle,), candidate, delta, converged))
    report = _finalize("attack2", method, geometry, cfg, experiments, None, False)
    return dataclasses.replace(report, ranking=tuple(rank_leakage(report)))


def rank_leakage(report: AttackReport) -> list[int]:
    """Cycles of an attack2 report ordered strongest leakage first.

    Sorts by per-cycle correctness, descending; equal scores go to the lower
    cycle index.
    """
    pairs = []
    for e in report.experiments:
        if len(e.cycles_used) != 1 or e.delta is None:
            raise ValueError("leakage ranking needs a per-cycle report with deltas")
        pairs.append((e.cycles_used[0], e.delta))
    return [c for c, _ in sorted(pairs, key=lambda p: (-p[1], p[0]))]


def attack3(data, method: str, cfg: KMeansConfig, ranking, truth=None) -> AttackReport:
    """Feature-pruning attack: drop the weakest-ranked cycle one experiment
    at a time. Experiment 1 equals attack1; experiment D keeps only the
    strongest cycle."""
    _check_cfg(method, cfg)
    matrix, geometry, D = _layout(data)
    ranking = [int(c) for c in ranking]
    if sorted(ranking) != list(range(1, D + 1)):
        raise ValueError(f"ranking must be a permutation of 1..{D}")
    experiments = []
    for e in range(1, D + 1):
        retained = sorted(ranking[: D - e + 1])
        std = standardize(_restrict(matrix, retained))
        labels, converged = _run_method(std, method, cfg)
        candidate = KeyCandidate(
            labels, method, {"attack": "attack3", "experiment": e}
        )
        delta = relative_correctness(candidate, truth) if truth is not None else None
        experiments.append(Experiment(tuple(retained), candidate, delta, converged))
    return _finalize("attack3", method, geometry, cfg, experiments, ranking, True)
