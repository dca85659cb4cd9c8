"""Plug-in estimation of conditional transfer entropy between symbol series.

For a target ``x``, source ``y`` and conditioning process ``b`` the
estimate is

    T = 1/(L-k) * sum_n log2 p(x[n+1] | x[n-k+1..n], y[n], b[n])
                           / p(x[n+1] | x[n-k+1..n], b[n])

with every probability taken as a ratio of empirical counts over the
``L - k`` valid time indices. No bias correction is applied.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, LengthMismatch, SeriesTooShort
from .trace import SymbolSeries

LOG_BASE = 2

SeriesLike = Union[SymbolSeries, Sequence[int], np.ndarray]


@dataclass(frozen=True)
class EstimatorConfig:
    history_k: int = 2

    def __post_init__(self):
        if isinstance(self.history_k, bool) or int(self.history_k) != self.history_k or self.history_k < 1:
            raise ConfigError(f"history length k must be an integer >= 1, got {self.history_k}")

    @property
    def log_base(self) -> int:
        return LOG_BASE


@dataclass(frozen=True)
class ContingencyTable:
    """Counts keyed by ``(x_next, x_past, y, b)`` with ``x_past`` a k-tuple."""

    counts: dict
    total: int
    history_k: int


def _as_array(s: SeriesLike) -> np.ndarray:
    if isinstance(s, SymbolSeries):
        return s.symbols
    return np.asarray(s)


def _check(x, y, b, cfg: EstimatorConfig):
    x, y, b = _as_array(x), _as_array(y), _as_array(b)
    if not (len(x) == len(y) == len(b)):
        raise LengthMismatch(f"series lengths differ: x={len(x)}, y={len(y)}, b={len(b)}")
    if len(x) <= cfg.history_k:
        raise SeriesTooShort(f"series length {len(x)} must exceed history k={cfg.history_k}")
    return x, y, b


def joint_counts(x: SeriesLike, y: SeriesLike, b: SeriesLike, cfg: EstimatorConfig | None = None) -> ContingencyTable:
    cfg = cfg or EstimatorConfig()
    x, y, b = _check(x, y, b, cfg)
    k = cfg.history_k
    xs, ys, bs = x.tolist(), y.tolist(), b.tolist()
    counts = Counter(
        (xs[n + 1], tuple(xs[n - k + 1:n + 1]), ys[n], bs[n]) for n in range(k - 1, len(xs) - 1)
    )
    return ContingencyTable(dict(counts), len(xs) - k, k)


# ---------------------------------------------------------------------------
# vectorised estimator
# ---------------------------------------------------------------------------

def _dense(codes: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel arbitrary integer codes to 0..m-1."""
    uniq, inv = np.unique(codes, return_inverse=True)
    return inv.reshape(-1).astype(np.int64), len(uniq)


def _combine(a: np.ndarray, na: int, b: np.ndarray, nb: int) -> tuple[np.ndarray, int]:
    code = a * nb + b
    if na * nb <= 4 * len(code) + 1024:
        return code, na * nb
    return _dense(code)


def _counts_at(code: np.ndarray, size: int) -> np.ndarray:
    """For every sample, the number of samples sharing its code."""
    return np.bincount(code, minlength=size)[code]


@dataclass(frozen=True, eq=False)
class _TargetContext:
    """Per-target codes reused across many sources (same x and b)."""

    nxt: np.ndarray
    n_nxt: int
    ctx: np.ndarray
    n_ctx: int
    c_ctx: np.ndarray
    c_nxt_ctx: np.ndarray


def _target_context(x: np.ndarray, b: np.ndarray, k: int) -> _TargetContext:
    L = len(x)
    xd, nx = _dense(x)
    bd, nb = _dense(b)
    # past window x[n-k+1..n] for n = k-1 .. L-2
    ctx, nctx = xd[0:L - k].copy(), nx
    for lag in range(1, k):
        ctx, nctx = _combine(ctx, nctx, xd[lag:L - k + lag], nx)
    ctx, nctx = _combine(ctx, nctx, bd[k - 1:L - 1], nb)
    nxt = xd[k:L]
    nxt_ctx, n_nc = _combine(nxt, nx, ctx, nctx)
    return _TargetContext(nxt, nx, ctx, nctx, _counts_at(ctx, nctx), _counts_at(nxt_ctx, n_nc))


def _te_with_context(tc: _TargetContext, y: np.ndarray, k: int) -> float:
    L = len(y)
    yd, ny = _dense(y[k - 1:L - 1])
    ctx_src, n_cs = _combine(tc.ctx, tc.n_ctx, yd, ny)
    joint, n_j = _combine(tc.nxt, tc.n_nxt, ctx_src, n_cs)
    c_joint = _counts_at(joint, n_j)
    c_ctx_src = _counts_at(ctx_src, n_cs)
    # per-sample log ratio; its mean equals the count-weighted sum over table cells
    num = c_joint * tc.c_ctx
    den = c_ctx_src * tc.c_nxt_ctx
    return float(np.mean(np.log2(num / den)))


def conditional_transfer_entropy(
    x: SeriesLike, y: SeriesLike, b: SeriesLike, cfg: EstimatorConfig | None = None
) -> float:
    """Average conditional TE from source ``y`` to target ``x`` given ``b``, in bits."""
    cfg = cfg or EstimatorConfig()
    x, y, b = _check(x, y, b, cfg)
    return _te_with_context(_target_context(x, b, cfg.history_k), y, cfg.history_k)


def te_from_table(table: ContingencyTable) -> float:
    """Same quantity evaluated cell by cell from a :class:`ContingencyTable`."""
    ctx, ctx_src, nxt_ctx = Counter(), Counter(), Counter()
    for (xn, past, y, b), c in table.counts.items():
        ctx[past, b] += c
        ctx_src[past, b, y] += c
        nxt_ctx[xn, past, b] += c
    te = 0.0
    for (xn, past, y, b), c in table.counts.items():
        ratio = (c * ctx[past, b]) / (ctx_src[past, b, y] * nxt_ctx[xn, past, b])
        te += c / table.total * math.log2(ratio)
    return te


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _entropy(counter: Counter, total: int) -> float:
    return -sum(c / total * math.log2(c / total) for c in counter.values())


def brute_force_te_oracle(
    x: SeriesLike, y: SeriesLike, b: SeriesLike | None = None, cfg: EstimatorConfig | None = None
) -> float:
    """Reference value from four plug-in joint entropies.

    T = H(next, past, b) - H(past, b) - H(next, past, y, b) + H(past, y, b)

    Built from plain Python counters over an explicit sliding window; it
    shares no code with the vectorised estimator. ``b=None`` drops the
    conditioning process (equivalent to a constant ``b``).
    """
    cfg = cfg or EstimatorConfig()
    if b is None:
        b = [0] * len(_as_array(x))
    x, y, b = _check(x, y, b, cfg)
    k = cfg.history_k
    xs, ys, bs = list(x.tolist()), list(y.tolist()), list(b.tolist())
    full, past_src, next_past, past_only = Counter(), Counter(), Counter(), Counter()
    total = 0
    for n in range(k - 1, len(xs) - 1):
        past = tuple(xs[n - k + 1:n + 1])
        full[xs[n + 1], past, ys[n], bs[n]] += 1
        past_src[past, ys[n], bs[n]] += 1
        next_past[xs[n + 1], past, bs[n]] += 1
        past_only[past, bs[n]] += 1
        total += 1
    return (
        _entropy(next_past, total)
        - _entropy(past_only, total)
        - _entropy(full, total)
        + _entropy(past_src, total)
    )
