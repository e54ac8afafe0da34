"""Exhaustive enumeration over all 2^n deletion patterns.

Ground truth for everything the sampler and the closed-form bounds claim:
exact distributions of per-realization statistics and exact tails of matrix
Bernoulli series.  Enumeration is capped at n = 20 vertices.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .graph_core import WeightedGraph
from .percolation import (
    PercolationSample,
    SurvivalProfile,
    algebraic_connectivity_survivors,
    augmented_laplacian,
    expected_augmented_laplacian,
    survivor_connectivity,
)
from .spectral import spectral_norm

__all__ = [
    "MAX_ENUM_VERTICES",
    "STATISTIC_KINDS",
    "ExactDistribution",
    "exact_distribution",
    "exact_tail",
    "exact_bernoulli_series_tail",
]

MAX_ENUM_VERTICES = 20
STATISTIC_KINDS = ("deviation_norm", "a_delta", "connectivity_indicator")


@dataclass(frozen=True)
class ExactDistribution:
    """Exact joint table of (pattern, probability, statistic).

    patterns[t] encodes the survival flags of entry t little-endian: bit i is
    delta_i.  Patterns are in ascending mask order and cover all 2^n of them,
    so probabilities sum to 1.  statistics may contain +inf (a_delta with
    fewer than two survivors).
    """

    n: int
    statistic_kind: str
    patterns: np.ndarray
    probabilities: np.ndarray
    statistics: np.ndarray

    def __len__(self) -> int:
        return int(self.patterns.shape[0])

    def total_probability(self) -> float:
        return math.fsum(self.probabilities.tolist())

    def pattern_bits(self, t: int) -> str:
        """Binary string of entry t, vertex 0 first."""
        mask = int(self.patterns[t])
        return "".join("1" if (mask >> i) & 1 else "0" for i in range(self.n))

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pattern_bits", "probability", "statistic"])
        for t in range(len(self)):
            stat = self.statistics[t]
            writer.writerow([
                self.pattern_bits(t),
                repr(float(self.probabilities[t])),
                "inf" if math.isinf(stat) else repr(float(stat)),
            ])


def _pattern_probabilities(p: np.ndarray) -> np.ndarray:
    """Probability of every mask, index little-endian in the vertex bits."""
    q = np.ones(1)
    for pi in p:
        q = np.concatenate([q * (1.0 - pi), q * pi])
    return q


def _check_enumerable(n: int) -> None:
    if n > MAX_ENUM_VERTICES:
        raise ValueError(
            f"exhaustive enumeration is capped at {MAX_ENUM_VERTICES} vertices, got {n}"
        )


def exact_distribution(g: WeightedGraph, profile: SurvivalProfile, alpha: float,
                       statistic_kind: str) -> ExactDistribution:
    """Enumerate all 2^n survival patterns and their statistic.

    statistic_kind is one of deviation_norm (spectral norm of the augmented
    Laplacian minus its expectation, needs alpha), a_delta (algebraic
    connectivity of the survivors, +inf below two survivors), or
    connectivity_indicator (1.0 if the survivors are connected).
    """
    _check_enumerable(g.n)
    if statistic_kind not in STATISTIC_KINDS:
        raise ValueError(
            f"statistic_kind must be one of {STATISTIC_KINDS}, got {statistic_kind!r}"
        )
    if len(profile) != g.n:
        raise ValueError(f"profile has length {len(profile)} but the graph has {g.n} vertices")

    n = g.n
    count = 1 << n
    probabilities = _pattern_probabilities(profile.p)
    statistics = np.empty(count)
    expected = None
    if statistic_kind == "deviation_norm":
        expected = expected_augmented_laplacian(g, profile, alpha)

    bit = np.arange(n)
    for mask in range(count):
        delta = (mask >> bit) & 1 == 1
        s = PercolationSample(delta=delta, seed=0, trial_index=mask)
        if statistic_kind == "deviation_norm":
            statistics[mask] = spectral_norm(augmented_laplacian(g, s, alpha) - expected)
        elif statistic_kind == "a_delta":
            statistics[mask] = algebraic_connectivity_survivors(g, s)
        else:
            statistics[mask] = 1.0 if survivor_connectivity(g, s)[1] else 0.0

    return ExactDistribution(
        n=n,
        statistic_kind=statistic_kind,
        patterns=np.arange(count, dtype=np.uint32),
        probabilities=probabilities,
        statistics=statistics,
    )


def exact_tail(dist: ExactDistribution, t: float) -> float:
    """Exact P(statistic > t), summed with compensated summation."""
    selected = dist.probabilities[dist.statistics > t]
    return math.fsum(selected.tolist())


def exact_bernoulli_series_tail(matrices, profile: SurvivalProfile, t: float) -> float:
    """Exact P(|| sum_i (delta_i - p_i) X_i || >= t) by enumeration.

    matrices are symmetric and share a common size; delta_i ~ Bernoulli(p_i)
    independent.  Capped at 20 Bernoulli variables.
    """
    X = np.asarray(matrices, dtype=float)
    if X.ndim != 3 or X.shape[1] != X.shape[2]:
        raise ValueError("expected a sequence of square matrices of equal size")
    n = X.shape[0]
    if n != len(profile):
        raise ValueError(f"{n} matrices but profile has length {len(profile)}")
    _check_enumerable(n)
    p = profile.p
    probabilities = _pattern_probabilities(p)
    hits = []
    for mask in range(1 << n):
        coeff = np.array([(mask >> i) & 1 for i in range(n)]) - p
        S = np.einsum("i,ijk->jk", coeff, X)
        norm = float(np.abs(np.linalg.eigvalsh(0.5 * (S + S.T))).max())
        if norm >= t:
            hits.append(float(probabilities[mask]))
    return math.fsum(hits)
