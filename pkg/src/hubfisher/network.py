"""Interaction networks: TE matrices, responders, and the hub agent.

For every opponent agent i the responder is the agent j of the analysed
team receiving the largest conditional TE from i. Per-game responders are
aggregated over games by their mode, each opponent contributes one link
i -> responder(i), and the hub is the agent with the most incoming links.

All tie-breaks are total orders so results are reproducible:

* per-game argmax: lowest j;
* mode over games: highest mean TE(i, j) across games, then lowest j;
* hub: largest summed mean TE over its incoming links, then lowest j.

Strengths within a relative 1e-9 of the best count as tied. Means are
float sums, so two exactly tied means can round apart once every entry is
rescaled; the tolerance keeps decisions invariant under positive scaling.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .errors import InconsistentGames, SeriesTooShort
from .estimators import EstimatorConfig, _target_context, _te_with_context
from .trace import AGENT_INDICES, BALL, EntityId, GameTrace, Side, SymbolizerConfig, symbolize_trace

N_AGENTS = len(AGENT_INDICES)
_NEG_GUARD = -1e-12
TIE_RTOL = 1e-9


class Direction(str, Enum):
    Y_TO_X = "y2x"
    X_TO_Y = "x2y"

    @property
    def source(self) -> Side:
        return Side.Y if self is Direction.Y_TO_X else Side.X

    @property
    def target(self) -> Side:
        return Side.X if self is Direction.Y_TO_X else Side.Y


def _row(i: int) -> int:
    if i not in AGENT_INDICES:
        raise ValueError(f"agent index must be in 2..11, got {i}")
    return i - AGENT_INDICES[0]


@dataclass(frozen=True, eq=False)
class TEMatrix:
    """values[i-2, j-2] = TE from source agent i to target agent j (bits)."""

    game_id: str
    values: np.ndarray
    direction: Direction = Direction.Y_TO_X

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (N_AGENTS, N_AGENTS):
            raise ValueError(f"TE matrix must be {N_AGENTS}x{N_AGENTS}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("TE matrix has non-finite entries")
        if np.any(v < _NEG_GUARD):
            raise ValueError(f"TE matrix entry below {_NEG_GUARD}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "direction", Direction(self.direction))

    def te(self, i: int, j: int) -> float:
        return float(self.values[_row(i), _row(j)])

    def scaled(self, c: float) -> "TEMatrix":
        return TEMatrix(self.game_id, self.values * c, self.direction)


def te_matrix(
    trace: GameTrace,
    sym_cfg: SymbolizerConfig | None = None,
    est_cfg: EstimatorConfig | None = None,
    direction: Direction | str = Direction.Y_TO_X,
) -> TEMatrix:
    sym_cfg = sym_cfg or SymbolizerConfig()
    est_cfg = est_cfg or EstimatorConfig()
    direction = Direction(direction)
    k = est_cfg.history_k
    if trace.cycles <= k + 1:
        raise SeriesTooShort(f"trace {trace.game_id!r} has {trace.cycles} cycles; need more than k+1={k + 1}")
    symbols = symbolize_trace(trace, sym_cfg)
    ball = symbols[BALL].symbols
    values = np.empty((N_AGENTS, N_AGENTS))
    for col, j in enumerate(AGENT_INDICES):
        tc = _target_context(symbols[EntityId(direction.target, j)].symbols, ball, k)
        for row, i in enumerate(AGENT_INDICES):
            values[row, col] = _te_with_context(tc, symbols[EntityId(direction.source, i)].symbols, k)
    return TEMatrix(trace.game_id, values, direction)


def responder_per_game(m: TEMatrix, i: int) -> int:
    # np.argmax returns the first maximum, i.e. the lowest j
    return AGENT_INDICES[int(np.argmax(m.values[_row(i)]))]


def mean_te(matrices: Sequence[TEMatrix]) -> np.ndarray:
    return np.mean([m.values for m in matrices], axis=0)


@dataclass(frozen=True)
class ResponderTable:
    """Per-game responders ``per_game[game][i] = j`` for ``games`` in order.

    ``mean_te`` (optional) is the across-game mean TE matrix used to break
    ties between equally frequent responders.
    """

    per_game: Mapping[str, Mapping[int, int]]
    games: tuple[str, ...]
    mean_te: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "games", tuple(self.games))
        if set(self.games) != set(self.per_game) or len(set(self.games)) != len(self.games):
            raise InconsistentGames("games list does not match per-game responders")
        for g in self.games:
            if set(self.per_game[g]) != set(AGENT_INDICES):
                raise InconsistentGames(f"game {g!r} does not cover agents 2..11")
            if not set(self.per_game[g].values()) <= set(AGENT_INDICES):
                raise ValueError(f"game {g!r} has a responder outside 2..11")

    @classmethod
    def from_matrices(cls, matrices: Sequence[TEMatrix]) -> "ResponderTable":
        per_game = {m.game_id: {i: responder_per_game(m, i) for i in AGENT_INDICES} for m in matrices}
        return cls(per_game, tuple(m.game_id for m in matrices), mean_te(matrices) if matrices else None)


def responder_mode(table: ResponderTable, i: int, mean: np.ndarray | None = None) -> int:
    if not table.games:
        raise ValueError("responder table covers no games")
    mean = table.mean_te if mean is None else mean
    freq = Counter(table.per_game[g][i] for g in table.games)
    top = max(freq.values())
    tied = [j for j in freq if freq[j] == top]
    if mean is None:
        return min(tied)
    return _strongest(tied, lambda j: mean[_row(i), _row(j)])


def _strongest(candidates, strength) -> int:
    s = {j: float(strength(j)) for j in candidates}
    best = max(s.values())
    return min(j for j in candidates if s[j] >= best - TIE_RTOL * abs(best))


@dataclass(frozen=True)
class InteractionDiagram:
    responder: dict[int, int]
    incoming: dict[int, int]
    hub: int
    hub_tiebreak_used: bool
    games: tuple[str, ...]
    direction: Direction = Direction.Y_TO_X

    def to_json(self) -> dict:
        return {
            "direction": self.direction.value,
            "responder": {str(i): j for i, j in sorted(self.responder.items())},
            "incoming": {str(j): c for j, c in sorted(self.incoming.items())},
            "hub": self.hub,
            "hub_tiebreak_used": self.hub_tiebreak_used,
            "games": list(self.games),
        }


def build_diagram(table: ResponderTable, matrices: Sequence[TEMatrix]) -> InteractionDiagram:
    if not matrices:
        raise InconsistentGames("no TE matrices supplied")
    ids = [m.game_id for m in matrices]
    if len(set(ids)) != len(ids):
        raise InconsistentGames("duplicate game ids among matrices")
    if set(ids) != set(table.games):
        raise InconsistentGames("responder table and matrices cover different games")
    directions = {m.direction for m in matrices}
    if len(directions) != 1:
        raise InconsistentGames("matrices mix TE directions")
    if len(ids) < 3:
        warnings.warn(f"only {len(ids)} game(s); a mode over fewer than 3 games is weak evidence", stacklevel=2)

    mean = mean_te(matrices)
    responder = {i: responder_mode(table, i, mean) for i in AGENT_INDICES}
    counts = Counter(responder.values())
    incoming = {j: counts.get(j, 0) for j in AGENT_INDICES}
    top = max(incoming.values())
    tied = [j for j in AGENT_INDICES if incoming[j] == top]

    def mass(j):
        return sum(mean[_row(i), _row(j)] for i, r in responder.items() if r == j)

    hub = _strongest(tied, mass)
    return InteractionDiagram(responder, incoming, hub, len(tied) > 1, table.games, directions.pop())


def diagram_from_matrices(matrices: Sequence[TEMatrix]) -> InteractionDiagram:
    return build_diagram(ResponderTable.from_matrices(matrices), matrices)
