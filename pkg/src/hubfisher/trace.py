"""Positional game traces: data model, text I/O, motion increments and symbols.

A trace holds the 2D position of 20 field agents (indices 2..11 on each
team) and the ball for every cycle of one game. Analysis never looks at raw
positions directly; it works on per-cycle displacements discretised into a
small alphabet:

    0            stationary (displacement norm <= epsilon)
    1 + m        moving in angular sector m, m = 0 .. sectors-1

Trace files are either CSV with header ``cycle,side,index,x,y`` or JSON
lines with the same keys. ``side`` is ``L`` (team X), ``R`` (team Y) or
``B`` (ball, empty index).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Mapping

import numpy as np

from .errors import (
    ConfigError,
    DuplicateSample,
    MalformedRow,
    MissingEntity,
    RosterViolation,
    TraceError,
)

AGENT_INDICES = tuple(range(2, 12))
CSV_HEADER = ("cycle", "side", "index", "x", "y")
STATIONARY = 0


class Side(str, Enum):
    X = "L"
    Y = "R"
    BALL = "B"


_SIDE_ORDER = {Side.X: 0, Side.Y: 1, Side.BALL: 2}


@dataclass(frozen=True)
class EntityId:
    side: Side
    index: int | None = None

    def __post_init__(self):
        if self.side is Side.BALL:
            if self.index is not None:
                raise ValueError("ball entity takes no index")
        elif self.index is None:
            raise ValueError(f"{self.side.name} entity needs an agent index")

    @property
    def sort_key(self) -> tuple[int, int]:
        return (_SIDE_ORDER[self.side], self.index or 0)

    def __str__(self) -> str:
        if self.side is Side.BALL:
            return "ball"
        return f"{self.side.name}{self.index}"


BALL = EntityId(Side.BALL)


def team(side: Side) -> list[EntityId]:
    return [EntityId(side, i) for i in AGENT_INDICES]


def all_entities() -> list[EntityId]:
    return team(Side.X) + team(Side.Y) + [BALL]


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GameTrace:
    """All entity positions of one game, sorted by cycle.

    ``positions[e]`` is an ``(N, 2)`` array in metres, row n belonging to
    ``cycle_ids[n]``.
    """

    game_id: str
    cycle_ids: np.ndarray
    positions: Mapping[EntityId, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "cycle_ids", _frozen(self.cycle_ids, dtype=np.int64))
        n = len(self.cycle_ids)
        if n < 2:
            raise TraceError(f"game {self.game_id!r}: need at least 2 cycles, got {n}")
        if np.any(np.diff(self.cycle_ids) <= 0):
            raise TraceError("cycle ids must be strictly increasing")
        wanted = set(all_entities())
        have = set(self.positions)
        if have != wanted:
            extra = sorted(map(str, have - wanted))
            missing = sorted(map(str, wanted - have))
            if extra:
                raise RosterViolation(f"unexpected entities {extra}")
            raise MissingEntity(f"entities absent from trace: {missing}")
        frozen = {}
        for e in sorted(self.positions, key=lambda e: e.sort_key):
            arr = _frozen(self.positions[e])
            if arr.shape != (n, 2):
                raise TraceError(f"{e}: expected shape ({n}, 2), got {arr.shape}")
            frozen[e] = arr
        object.__setattr__(self, "positions", frozen)

    @property
    def cycles(self) -> int:
        return len(self.cycle_ids)

    def __eq__(self, other):
        if not isinstance(other, GameTrace):
            return NotImplemented
        return (
            self.game_id == other.game_id
            and np.array_equal(self.cycle_ids, other.cycle_ids)
            and self.positions.keys() == other.positions.keys()
            and all(np.array_equal(self.positions[e], other.positions[e]) for e in self.positions)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class IncrementSeries:
    entity: EntityId
    deltas: np.ndarray  # (N-1, 2), metres per cycle


@dataclass(frozen=True)
class SymbolizerConfig:
    stationary_threshold: float = 0.05
    sectors: int = 8

    def __post_init__(self):
        if not (self.stationary_threshold >= 0 and math.isfinite(self.stationary_threshold)):
            raise ConfigError(f"epsilon must be a finite value >= 0, got {self.stationary_threshold}")
        if int(self.sectors) != self.sectors or self.sectors < 2:
            raise ConfigError(f"sectors must be an integer >= 2, got {self.sectors}")

    @property
    def alphabet_size(self) -> int:
        return self.sectors + 1


@dataclass(frozen=True, eq=False)
class SymbolSeries:
    """Integer-coded symbol sequence over ``range(alphabet_size)``."""

    symbols: np.ndarray
    alphabet_size: int
    entity: EntityId | None = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", _frozen(self.symbols, dtype=np.int64))
        if self.symbols.ndim != 1:
            raise ValueError("symbols must be one-dimensional")
        if self.symbols.size and (self.symbols.min() < 0 or self.symbols.max() >= self.alphabet_size):
            raise ValueError(f"symbols outside alphabet of size {self.alphabet_size}")

    def __len__(self):
        return len(self.symbols)

    def labels(self) -> list[str]:
        return [symbol_label(s) for s in self.symbols]


def symbol_label(code: int) -> str:
    return "S" if code == STATIONARY else f"D{int(code) - 1}"


# ---------------------------------------------------------------------------
# parsing / writing
# ---------------------------------------------------------------------------

def _parse_entity(side: str, index, line: int) -> EntityId:
    try:
        s = Side(str(side).strip())
    except ValueError:
        raise MalformedRow(line, f"unknown side {side!r}") from None
    if index is None or (isinstance(index, str) and index.strip() == ""):
        idx = None
    else:
        try:
            idx = int(str(index).strip())
        except ValueError:
            raise MalformedRow(line, f"bad agent index {index!r}") from None
    if s is Side.BALL:
        if idx is not None:
            raise MalformedRow(line, "ball rows must leave index empty")
        return BALL
    if idx is None:
        raise MalformedRow(line, f"side {s.value} requires an agent index")
    if idx not in AGENT_INDICES:
        raise RosterViolation(f"line {line}: agent index {idx} outside 2..11")
    return EntityId(s, idx)


def _parse_number(raw, line: int, name: str, kind=float):
    if isinstance(raw, bool):
        raise MalformedRow(line, f"bad {name} {raw!r}")
    try:
        if kind is int and isinstance(raw, float):
            if not raw.is_integer():
                raise ValueError
            val = int(raw)
        else:
            val = kind(str(raw).strip()) if isinstance(raw, str) else kind(raw)
    except (TypeError, ValueError):
        raise MalformedRow(line, f"bad {name} {raw!r}") from None
    if kind is float and not math.isfinite(val):
        raise MalformedRow(line, f"non-finite {name}")
    return val


def _csv_rows(stream: IO[str]):
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise MalformedRow(1, f"expected header {','.join(CSV_HEADER)}")
    for row in reader:
        line = reader.line_num
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise MalformedRow(line, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        yield line, row


def _jsonl_rows(stream: IO[str]):
    for line, text in enumerate(stream, start=1):
        if not text.strip():
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedRow(line, f"invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict) or set(obj) != set(CSV_HEADER):
            raise MalformedRow(line, f"expected an object with keys {list(CSV_HEADER)}")
        yield line, [obj[k] for k in CSV_HEADER]


def parse_trace(stream: IO[str], format: str = "csv", game_id: str = "game") -> GameTrace:
    """Read one game from ``stream``; rows may come in any order."""
    if format == "csv":
        rows = _csv_rows(stream)
    elif format == "jsonl":
        rows = _jsonl_rows(stream)
    else:
        raise ConfigError(f"unknown trace format {format!r}")

    samples: dict[EntityId, dict[int, tuple[float, float]]] = {}
    for line, (cycle, side, index, x, y) in rows:
        cyc = _parse_number(cycle, line, "cycle", int)
        ent = _parse_entity(side, index, line)
        xy = (_parse_number(x, line, "x"), _parse_number(y, line, "y"))
        per = samples.setdefault(ent, {})
        if cyc in per:
            raise DuplicateSample(f"line {line}: second sample for {ent} at cycle {cyc}")
        per[cyc] = xy

    cycles = sorted(set().union(*samples.values())) if samples else []
    for ent in all_entities():
        per = samples.get(ent)
        if per is None:
            raise MissingEntity(f"{ent} never appears")
        if len(per) != len(cycles):
            gap = next(c for c in cycles if c not in per)
            raise MissingEntity(f"{ent} missing at cycle {gap}")
    positions = {e: np.array([samples[e][c] for c in cycles], dtype=float) for e in samples}
    return GameTrace(game_id, np.array(cycles, dtype=np.int64), positions)


def _row_fields(trace: GameTrace) -> Iterable[tuple]:
    ents = list(trace.positions)
    for n, cyc in enumerate(trace.cycle_ids):
        for e in ents:
            x, y = trace.positions[e][n]
            yield int(cyc), e.side.value, e.index, float(x), float(y)


def write_trace(trace: GameTrace, stream: IO[str], format: str = "csv") -> None:
    """Serialise ``trace``; floats use ``repr`` so re-parsing is lossless."""
    if format == "csv":
        stream.write(",".join(CSV_HEADER) + "\n")
        for cyc, side, idx, x, y in _row_fields(trace):
            stream.write(f"{cyc},{side},{'' if idx is None else idx},{x!r},{y!r}\n")
    elif format == "jsonl":
        for cyc, side, idx, x, y in _row_fields(trace):
            stream.write(json.dumps(dict(zip(CSV_HEADER, (cyc, side, idx, x, y)))) + "\n")
    else:
        raise ConfigError(f"unknown trace format {format!r}")


def format_for_path(path) -> str:
    return "jsonl" if str(path).endswith((".jsonl", ".ndjson")) else "csv"


# ---------------------------------------------------------------------------
# increments and symbols
# ---------------------------------------------------------------------------

def compute_increments(trace: GameTrace) -> dict[EntityId, IncrementSeries]:
    out = {}
    for e, pos in trace.positions.items():
        out[e] = IncrementSeries(e, _frozen(np.diff(pos, axis=0)))
    return out


def symbolize_deltas(deltas: np.ndarray, cfg: SymbolizerConfig) -> np.ndarray:
    """Vectorised core of :func:`symbolize` for an ``(n, 2)`` array."""
    d = np.asarray(deltas, dtype=float).reshape(-1, 2)
    angle = np.mod(np.arctan2(d[:, 1], d[:, 0]), 2 * np.pi)
    # mod can return exactly 2*pi for tiny negative angles
    sector = np.floor(cfg.sectors * angle / (2 * np.pi)).astype(np.int64) % cfg.sectors
    moving = np.hypot(d[:, 0], d[:, 1]) > cfg.stationary_threshold
    return np.where(moving, sector + 1, STATIONARY)


def symbolize(inc: IncrementSeries, cfg: SymbolizerConfig | None = None) -> SymbolSeries:
    cfg = cfg or SymbolizerConfig()
    return SymbolSeries(symbolize_deltas(inc.deltas, cfg), cfg.alphabet_size, inc.entity)


def symbolize_trace(trace: GameTrace, cfg: SymbolizerConfig | None = None) -> dict[EntityId, SymbolSeries]:
    cfg = cfg or SymbolizerConfig()
    return {e: symbolize(inc, cfg) for e, inc in compute_increments(trace).items()}
