"""Fuzzy c-means over domain feature vectors."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class FcmConfig:
    n_clusters: int = 2
    m: float = 2.0
    epsilon: float = 1e-6
    max_iterations: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.n_clusters < 1:
            raise InvalidInputError(f"n_clusters must be >= 1, got {self.n_clusters}")
        if not self.m > 1.0:
            raise InvalidInputError(f"fuzzifier m must be > 1, got {self.m}")
        if not self.epsilon > 0:
            raise InvalidInputError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise InvalidInputError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class Centroids:
    centers: np.ndarray
    # cluster indices whose fuzzy weight vanished and were moved to a data point
    reseeded: tuple[int, ...] = ()


@dataclass(frozen=True)
class FcmResult:
    centers: np.ndarray
    memberships: np.ndarray
    iterations: int
    converged: bool
    objective: list[float] = field(default_factory=list)
    reseeded: tuple[int, ...] = ()

    def hard_labels(self) -> np.ndarray:
        return np.argmax(self.memberships, axis=1)


def _as_2d(data) -> np.ndarray:
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidInputError(f"data must be 1-D or 2-D, got shape {X.shape}")
    return X


def standardize(data) -> np.ndarray:
    """Z-score each column; constant columns become zero."""
    X = _as_2d(data)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return (X - mu) / sd


def random_memberships(n_points: int, n_clusters: int, rng: np.random.Generator) -> np.ndarray:
    U = rng.random((n_points, n_clusters))
    return U / U.sum(axis=1, keepdims=True)


def update_centers(data, memberships, m: float, rng: np.random.Generator | None = None) -> Centroids:
    """Weighted means with weights V_k(y)**m.

    A cluster whose total weight is zero gets a data point drawn from
    ``rng`` as its new center and is reported in ``reseeded``.
    """
    X = _as_2d(data)
    W = np.asarray(memberships, dtype=float) ** m
    if W.shape[0] != X.shape[0]:
        raise InvalidInputError(f"{W.shape[0]} membership rows for {X.shape[0]} points")
    denom = W.sum(axis=0)
    centers = np.zeros((W.shape[1], X.shape[1]))
    reseeded = []
    for k in range(W.shape[1]):
        if denom[k] > 0:
            centers[k] = W[:, k] @ X / denom[k]
        else:
            rng = rng if rng is not None else np.random.default_rng(0)
            centers[k] = X[rng.integers(X.shape[0])]
            reseeded.append(k)
    return Centroids(centers, tuple(reseeded))


def update_memberships(data, centers, m: float) -> np.ndarray:
    """V_k(y) = 1 / sum_j (d_k / d_j) ** (2 / (m - 1)), Euclidean d.

    A point sitting exactly on one or more centers splits its membership
    evenly between those centers.
    """
    X = _as_2d(data)
    C = _as_2d(centers)
    if not np.all(np.isfinite(C)):
        raise InvalidInputError("centers must be finite")
    d = np.sqrt(((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2))
    U = np.empty_like(d)
    power = 2.0 / (m - 1.0)
    for i, row in enumerate(d):
        hit = row == 0
        if hit.any():
            U[i] = hit / hit.sum()
            continue
        ratio = (row[:, None] / row[None, :]) ** power
        U[i] = 1.0 / ratio.sum(axis=1)
    return U


def objective(data, centers, memberships, m: float) -> float:
    """J = sum_y sum_k V_k(y)**m * d(center_k, y)**2."""
    X = _as_2d(data)
    C = _as_2d(centers)
    sq = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    return float((np.asarray(memberships) ** m * sq).sum())


def fcm_fit(
    data,
    config: FcmConfig = FcmConfig(),
    init: np.ndarray | None = None,
    callback: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> FcmResult:
    """Run fuzzy c-means from a seeded random membership matrix.

    Each iteration recomputes centers from memberships, then memberships
    from centers, and stops once no membership moved by more than
    ``config.epsilon``. ``objective`` holds J after every iteration.
    ``callback(iteration, centers, memberships)`` is called after each one.
    """
    X = _as_2d(data)
    n = X.shape[0]
    if n == 0:
        raise InvalidInputError("fcm_fit needs at least one data point")
    if config.n_clusters > n:
        raise InvalidInputError(f"{config.n_clusters} clusters for {n} points")
    rng = np.random.default_rng(config.seed)
    U = random_memberships(n, config.n_clusters, rng) if init is None else np.array(init, dtype=float)

    trace: list[float] = []
    reseeded: set[int] = set()
    converged = False
    it = 0
    C = np.zeros((config.n_clusters, X.shape[1]))
    for it in range(1, config.max_iterations + 1):
        cent = update_centers(X, U, config.m, rng)
        reseeded.update(cent.reseeded)
        C = cent.centers
        new_U = update_memberships(X, C, config.m)
        trace.append(objective(X, C, new_U, config.m))
        change = np.abs(new_U - U).max()
        U = new_U
        if callback is not None:
            callback(it, C, U)
        if change <= config.epsilon:
            converged = True
            break
    return FcmResult(C, U, it, converged, trace, tuple(sorted(reseeded)))


def write_memberships_csv(domains: Sequence[str], memberships, stream: TextIO) -> None:
    U = np.asarray(memberships)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["domain", *(f"cluster_{k}" for k in range(U.shape[1]))])
    for dom, row in zip(domains, U):
        writer.writerow([dom, *(repr(float(v)) for v in row)])
