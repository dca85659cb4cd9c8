"""Fisher information of a symbol distribution along a scalar parameter sweep.

At each grid point the hub agent's pooled symbol frequencies give a
smoothed distribution p(s; theta). Derivatives come from finite differences
along the grid (central inside, one-sided at both ends) and

    F(theta) = sum_s (dp_s/dtheta)^2 / p_s(theta)

The selected parameter value is the grid point with the largest F
(lowest theta on ties); no interpolation between grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, EmptyEnsemble, GridTooSmall
from .trace import SymbolSeries

DEFAULT_BETA = 0.5


@dataclass(frozen=True)
class SweepGrid:
    thetas: tuple[float, ...]
    label: str = "theta"

    def __post_init__(self):
        thetas = tuple(float(t) for t in self.thetas)
        if len(thetas) < 3:
            raise GridTooSmall(f"need at least 3 grid points for central differences, got {len(thetas)}")
        if not all(math.isfinite(t) for t in thetas):
            raise ConfigError("grid values must be finite")
        if any(b <= a for a, b in zip(thetas, thetas[1:])):
            raise ConfigError("grid values must be strictly increasing")
        object.__setattr__(self, "thetas", thetas)

    def __len__(self):
        return len(self.thetas)


@dataclass(frozen=True, eq=False)
class ProbVector:
    """Smoothed symbol distribution; ``probs[s]`` for symbol code ``s``."""

    probs: np.ndarray
    sample_count: int
    smoothing_beta: float


def estimate_distribution(ensemble: Iterable[SymbolSeries], beta: float = DEFAULT_BETA) -> ProbVector:
    """Pool symbol counts over the ensemble: p_s = (n_s + beta) / (n + beta * A)."""
    ensemble = list(ensemble)
    if not ensemble:
        raise EmptyEnsemble("no symbol series at this grid point")
    if not beta > 0:
        raise ConfigError(f"smoothing beta must be > 0 to keep probabilities positive, got {beta}")
    sizes = {s.alphabet_size for s in ensemble}
    if len(sizes) != 1:
        raise ConfigError(f"ensemble mixes alphabets of sizes {sorted(sizes)}")
    A = sizes.pop()
    counts = np.zeros(A, dtype=np.int64)
    for s in ensemble:
        counts += np.bincount(s.symbols, minlength=A)
    total = int(counts.sum())
    probs = (counts + beta) / (total + beta * A)
    probs.setflags(write=False)
    return ProbVector(probs, total, beta)


def grid_derivative(thetas: Sequence[float], values: np.ndarray) -> np.ndarray:
    """d(values)/d(theta) along axis 0: central inside, one-sided at the ends."""
    t = np.asarray(thetas, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(t) < 3:
        raise GridTooSmall(f"need at least 3 grid points, got {len(t)}")
    shape = (-1,) + (1,) * (v.ndim - 1)
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (t[2:] - t[:-2]).reshape(shape)
    d[0] = (v[1] - v[0]) / (t[1] - t[0])
    d[-1] = (v[-1] - v[-2]) / (t[-1] - t[-2])
    return d


def fisher_information(thetas: Sequence[float], probs: np.ndarray) -> np.ndarray:
    """F at every grid point from an ``(M, A)`` array of distributions."""
    p = np.asarray(probs, dtype=float)
    if np.any(p <= 0):
        raise ValueError("probabilities must be strictly positive")
    dp = grid_derivative(thetas, p)
    return np.sum(dp * dp / p, axis=1)


@dataclass(frozen=True, eq=False)
class FisherCurve:
    grid: SweepGrid
    values: np.ndarray
    theta_star: float
    hub: int | None = None
    beta: float = DEFAULT_BETA

    def to_json(self) -> dict:
        return {
            "parameter": self.grid.label,
            "grid": list(self.grid.thetas),
            "fisher": [float(v) for v in self.values],
            "theta_star": self.theta_star,
            "hub": self.hub,
            "beta": self.beta,
        }


def _argmax_theta(thetas: Sequence[float], values: np.ndarray) -> float:
    # np.argmax picks the first maximum, i.e. the lowest theta
    return float(thetas[int(np.argmax(values))])


def curve_from_distributions(
    grid: SweepGrid, probs: np.ndarray, hub: int | None = None, beta: float = DEFAULT_BETA
) -> FisherCurve:
    values = fisher_information(grid.thetas, probs)
    values.setflags(write=False)
    return FisherCurve(grid, values, _argmax_theta(grid.thetas, values), hub, beta)


def fisher_curve(
    sweep: Mapping[float, Sequence[SymbolSeries]],
    beta: float = DEFAULT_BETA,
    label: str = "theta",
    hub: int | None = None,
) -> FisherCurve:
    grid = SweepGrid(tuple(sorted(sweep)), label)
    dists = []
    for t in grid.thetas:
        ens = sweep[t]
        if not ens:
            raise EmptyEnsemble(f"no symbol series at {label}={t:g}")
        dists.append(estimate_distribution(ens, beta).probs)
    return curve_from_distributions(grid, np.array(dists), hub, beta)


def select_theta_star(curve: FisherCurve) -> float:
    return _argmax_theta(curve.grid.thetas, curve.values)
