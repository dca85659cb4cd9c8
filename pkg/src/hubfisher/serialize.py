"""JSON documents exchanged between CLI commands.

Floats are rounded to 12 significant digits before encoding so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import HubFisherError, InconsistentGames
from .network import Direction, TEMatrix
from .trace import AGENT_INDICES

SIG_DIGITS = 12


class SchemaError(HubFisherError, ValueError):
    pass


def round_sig(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    return float(format(x, f".{SIG_DIGITS}g"))


def _normalise(obj):
    if isinstance(obj, dict):
        return {str(k): _normalise(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_normalise(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    return obj


def dumps(obj) -> str:
    return json.dumps(_normalise(obj), indent=2) + "\n"


def load_json(path: Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    return doc


def _require(doc: dict, keys, path) -> None:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise SchemaError(f"{path}: missing keys {missing}")


def matrix_to_json(m: TEMatrix, extra: dict | None = None) -> dict:
    doc = {
        "game_id": m.game_id,
        "direction": m.direction.value,
        "sources": list(AGENT_INDICES),
        "targets": list(AGENT_INDICES),
        "values": m.values.tolist(),
    }
    doc.update(extra or {})
    return doc


def matrix_from_json(doc: dict, path="<matrix>") -> TEMatrix:
    _require(doc, ("game_id", "direction", "sources", "targets", "values"), path)
    if doc["sources"] != list(AGENT_INDICES) or doc["targets"] != list(AGENT_INDICES):
        raise InconsistentGames(f"{path}: roster differs from agents 2..11")
    try:
        return TEMatrix(str(doc["game_id"]), np.array(doc["values"], dtype=float), Direction(doc["direction"]))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: {exc}") from None


def check_diagram(doc: dict, path="<diagram>") -> dict:
    _require(doc, ("direction", "responder", "incoming", "hub", "hub_tiebreak_used", "games"), path)
    if not isinstance(doc["incoming"], dict) or not isinstance(doc["hub"], int):
        raise SchemaError(f"{path}: malformed diagram")
    return doc


def check_fisher(doc: dict, path="<fisher>") -> dict:
    _require(doc, ("parameter", "grid", "fisher", "theta_star", "hub", "beta"), path)
    grid, fisher = doc["grid"], doc["fisher"]
    if not (isinstance(grid, list) and isinstance(fisher, list) and len(grid) == len(fisher) and grid):
        raise SchemaError(f"{path}: grid and fisher must be equal-length lists")
    return doc
