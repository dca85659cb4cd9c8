"""Synthetic matches with planted coupling and a tunable critical agent.

Team Y agents and the ball take fixed-length steps in uniformly random
directions. A team X agent listed in ``couplings`` copies the previous step
direction of a source Y agent with probability ``strength``; when several
Y agents drive the same X agent one of them is picked uniformly per step.
All other X agents walk randomly.

The optional critical agent (an X index) keeps its direction rule but
draws its step length from a pitchfork family

    length = base + sign * sqrt(max(0, theta - theta_critical)) + noise * z

with ``sign`` = +-1 uniformly per step and z standard normal. With the
default ``base = 0`` it is nearly stationary below ``theta_critical`` and
starts moving above it, so its symbol distribution changes abruptly there.

Config files are flat ``key = value`` lines (``#`` comments), for example::

    cycles = 6000
    couplings = 3->5:1.0, 4->5:1.0
    critical_agent = 5
    grid = 0.3, 0.4, 0.5, 0.6, 0.7
    games_per_theta = 10
    seed = 7
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Iterable

import numpy as np

from .errors import ConfigError
from .fisher import SweepGrid
from .trace import AGENT_INDICES, BALL, EntityId, GameTrace, Side

_TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class ScenarioConfig:
    couplings: tuple[tuple[int, int, float], ...] = ()
    free_agent_step: float = 0.3
    cycles: int = 6000
    theta: float = 0.0
    theta_critical: float = 0.5
    ball_step: float = 0.5
    critical_agent: int | None = None
    critical_base: float = 0.0
    critical_noise: float = 0.02

    def __post_init__(self):
        cps = tuple((int(i), int(j), float(c)) for i, j, c in self.couplings)
        object.__setattr__(self, "couplings", cps)
        for i, j, c in cps:
            if i not in AGENT_INDICES or j not in AGENT_INDICES:
                raise ConfigError(f"coupling {i}->{j}: agent indices must be in 2..11")
            if not 0.0 <= c <= 1.0:
                raise ConfigError(f"coupling {i}->{j}: strength {c} outside [0, 1]")
        pairs = [(i, j) for i, j, _ in cps]
        if len(set(pairs)) != len(pairs):
            raise ConfigError("duplicate coupling pair")
        if int(self.cycles) != self.cycles or self.cycles < 100:
            raise ConfigError(f"cycles must be an integer >= 100, got {self.cycles}")
        if self.critical_agent is not None and self.critical_agent not in AGENT_INDICES:
            raise ConfigError(f"critical_agent must be in 2..11, got {self.critical_agent}")
        for name in ("free_agent_step", "ball_step", "critical_noise"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"{name} must be finite and >= 0, got {v}")
        for name in ("theta", "theta_critical", "critical_base"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    def sources_of(self, j: int) -> list[tuple[int, float]]:
        return [(i, c) for i, jj, c in self.couplings if jj == j]


@dataclass(frozen=True)
class SweepConfig:
    scenario: ScenarioConfig
    grid: SweepGrid
    games_per_theta: int = 10
    seed: int = 0

    def __post_init__(self):
        if int(self.games_per_theta) != self.games_per_theta or self.games_per_theta < 1:
            raise ConfigError(f"games_per_theta must be >= 1, got {self.games_per_theta}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


def derive_seed(seed: int, theta_index: int, game_index: int) -> int:
    """Seed for one game of a sweep.

    ``SeedSequence(seed, spawn_key=(theta_index, game_index))`` hashed to a
    64-bit integer, so any single game can be regenerated on its own.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(theta_index, game_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _start_positions() -> dict[EntityId, np.ndarray]:
    start = {}
    for n, idx in enumerate(AGENT_INDICES):
        start[EntityId(Side.X, idx)] = np.array([-20.0, -27.0 + 6.0 * n])
        start[EntityId(Side.Y, idx)] = np.array([20.0, -27.0 + 6.0 * n])
    start[BALL] = np.zeros(2)
    return start


def _steps(angles: np.ndarray, length) -> np.ndarray:
    return np.stack([length * np.cos(angles), length * np.sin(angles)], axis=-1)


def simulate_match(cfg: ScenarioConfig, seed: int, game_id: str | None = None) -> GameTrace:
    """Generate one game; a pure function of ``(cfg, seed)``.

    Positions are not confined to the pitch.
    """
    rng = np.random.default_rng(seed)
    steps = cfg.cycles - 1
    n_agents = len(AGENT_INDICES)
    # fixed draw order keeps the stream layout independent of the config
    y_angles = rng.uniform(0.0, _TWO_PI, (n_agents, steps))
    ball_angles = rng.uniform(0.0, _TWO_PI, steps)
    x_angles = rng.uniform(0.0, _TWO_PI, (n_agents, steps))
    copy_draw = rng.random((n_agents, steps))
    source_draw = rng.integers(0, 2**31, (n_agents, steps))
    crit_sign = rng.choice(np.array([-1.0, 1.0]), steps)
    crit_noise = rng.standard_normal(steps)

    deltas: dict[EntityId, np.ndarray] = {}
    for row, i in enumerate(AGENT_INDICES):
        deltas[EntityId(Side.Y, i)] = _steps(y_angles[row], cfg.free_agent_step)
    deltas[BALL] = _steps(ball_angles, cfg.ball_step)

    for row, j in enumerate(AGENT_INDICES):
        angles = x_angles[row].copy()
        sources = cfg.sources_of(j)
        if sources:
            src_rows = np.array([AGENT_INDICES.index(i) for i, _ in sources])
            strengths = np.array([c for _, c in sources])
            pick = source_draw[row, 1:] % len(sources)
            copied = copy_draw[row, 1:] < strengths[pick]
            prev = y_angles[src_rows[pick], np.arange(steps - 1)]
            angles[1:] = np.where(copied, prev, angles[1:])
        length = cfg.free_agent_step
        if j == cfg.critical_agent:
            spread = math.sqrt(max(0.0, cfg.theta - cfg.theta_critical))
            length = cfg.critical_base + crit_sign * spread + cfg.critical_noise * crit_noise
        deltas[EntityId(Side.X, j)] = _steps(angles, length)

    positions = {}
    for e, start in _start_positions().items():
        path = np.vstack([np.zeros((1, 2)), np.cumsum(deltas[e], axis=0)])
        positions[e] = start + path
    return GameTrace(game_id or f"sim_{seed}", np.arange(cfg.cycles), positions)


def format_theta(theta: float) -> str:
    return format(float(theta), ".12g")


def sweep_game_id(theta: float, game_index: int) -> str:
    return f"theta={format_theta(theta)}_game_{game_index}"


def sweep_game(cfg: SweepConfig, theta_index: int, game_index: int) -> GameTrace:
    theta = cfg.grid.thetas[theta_index]
    return simulate_match(
        replace(cfg.scenario, theta=theta),
        derive_seed(cfg.seed, theta_index, game_index),
        sweep_game_id(theta, game_index),
    )


def sweep(cfg: SweepConfig) -> dict[float, list[GameTrace]]:
    return {
        theta: [sweep_game(cfg, m, g) for g in range(cfg.games_per_theta)]
        for m, theta in enumerate(cfg.grid.thetas)
    }


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

_SCENARIO_KEYS = {f.name for f in fields(ScenarioConfig)}
_SWEEP_KEYS = {"grid", "label", "games_per_theta", "seed"}


def parse_couplings(text: str) -> tuple[tuple[int, int, float], ...]:
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            pair, strength = item.split(":")
            i, j = pair.split("->")
            out.append((int(i), int(j), float(strength)))
        except ValueError:
            raise ConfigError(f"bad coupling {item!r}; expected '<y>-><x>:<strength>'") from None
    return tuple(out)


def _convert(key: str, raw: str):
    try:
        if key == "couplings":
            return parse_couplings(raw)
        if key == "critical_agent":
            return None if raw.lower() in ("", "none") else int(raw)
        if key in ("cycles", "games_per_theta", "seed"):
            return int(raw)
        if key == "grid":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if key == "label":
            return raw
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None


def parse_config(text: str, required: Iterable[str] = ()) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _SCENARIO_KEYS | _SWEEP_KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw)
    for key in required:
        if key not in values:
            raise ConfigError(f"missing required config key {key!r}")
    return values


def scenario_from_config(values: dict) -> ScenarioConfig:
    return ScenarioConfig(**{k: v for k, v in values.items() if k in _SCENARIO_KEYS})


def sweep_from_config(values: dict, seed: int | None = None) -> SweepConfig:
    if "grid" not in values:
        raise ConfigError("missing required config key 'grid'")
    return SweepConfig(
        scenario=scenario_from_config(values),
        grid=SweepGrid(values["grid"], values.get("label", "theta")),
        games_per_theta=values.get("games_per_theta", 10),
        seed=values.get("seed", 0) if seed is None else seed,
    )


def format_config(cfg: ScenarioConfig | SweepConfig) -> str:
    """Inverse of :func:`parse_config` for a resolved configuration."""
    sweep_cfg = cfg if isinstance(cfg, SweepConfig) else None
    scenario = sweep_cfg.scenario if sweep_cfg else cfg
    lines = []
    for f in fields(ScenarioConfig):
        v = getattr(scenario, f.name)
        if f.name == "couplings":
            v = ", ".join(f"{i}->{j}:{c!r}" for i, j, c in v)
        elif v is None:
            v = "none"
        lines.append(f"{f.name} = {v}")
    if sweep_cfg:
        lines.append("grid = " + ", ".join(repr(t) for t in sweep_cfg.grid.thetas))
        lines.append(f"label = {sweep_cfg.grid.label}")
        lines.append(f"games_per_theta = {sweep_cfg.games_per_theta}")
        lines.append(f"seed = {sweep_cfg.seed}")
    return "\n".join(lines) + "\n"
