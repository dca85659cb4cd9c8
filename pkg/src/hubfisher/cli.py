"""``hubfisher`` command line.

Subcommands::

    te        trace files -> one TE matrix JSON per game
    diagram   TE matrix JSON (or trace) files -> interaction diagram JSON
    fisher    sweep directory (theta=<v>/game_<n>.csv) -> Fisher curve JSON + CSV
    simulate  config file -> synthetic trace file(s)
    sweep     config file -> sweep directory
    report    diagram JSON + Fisher JSON -> text summary and plot CSVs

Each run writes ``<command>.manifest.json`` next to its outputs. Exit codes:
0 success, 1 user or configuration error, 2 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import traceback
import warnings
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import ConfigError, EmptyEnsemble, HubFisherError, InconsistentGames
from .estimators import EstimatorConfig
from .fisher import DEFAULT_BETA, fisher_curve
from .network import Direction, ResponderTable, TEMatrix, build_diagram, te_matrix
from .serialize import check_diagram, check_fisher, dumps, load_json, matrix_from_json, matrix_to_json
from .simulator import (
    derive_seed,
    format_config,
    format_theta,
    parse_config,
    scenario_from_config,
    simulate_match,
    sweep_from_config,
    sweep_game,
)
from .trace import EntityId, SymbolizerConfig, compute_increments, format_for_path, parse_trace, symbolize, write_trace

TRACE_SUFFIXES = (".csv", ".jsonl", ".ndjson")


class _Outputs:
    """Collects files written by one command; removes them all on failure."""

    def __init__(self, out_dir: Path):
        self.dir = Path(out_dir)
        self.written: list[Path] = []
        self._created: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.dir / name
        for parent in reversed(p.parents):
            if not parent.exists():
                parent.mkdir()
                self._created.append(parent)
        return p

    def write(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.write_text(text)
        self.written.append(p)
        return p

    def rollback(self) -> None:
        for p in self.written:
            p.unlink(missing_ok=True)
        for d in reversed(self._created):
            try:
                d.rmdir()
            except OSError:
                pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(args, command: str, config: dict, inputs: Sequence[Path], seeds=None) -> str:
    return dumps(
        {
            "command": command,
            "argv": list(args.argv),
            "config": config,
            "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
            "tool_version": __version__,
            "seeds": seeds,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
    )


def _configs(args) -> tuple[SymbolizerConfig, EstimatorConfig]:
    try:
        est = EstimatorConfig(args.k)
    except ConfigError as exc:
        raise ConfigError(f"--k: {exc}") from None
    try:
        sym = SymbolizerConfig(args.epsilon, args.sectors)
    except ConfigError as exc:
        raise ConfigError(f"--epsilon/--sectors: {exc}") from None
    return sym, est


def _trace_config(sym: SymbolizerConfig, est: EstimatorConfig, direction: Direction) -> dict:
    return {**asdict(sym), **asdict(est), "direction": direction.value}


def _read_trace(path: Path, game_id: str, fmt: str | None = None):
    fmt = fmt or format_for_path(path)
    with open(path, newline="") as fh:
        return parse_trace(fh, fmt, game_id)


def _game_ids(paths: Sequence[Path]) -> list[str]:
    stems = [p.stem for p in paths]
    if len(set(stems)) == len(stems):
        return stems
    return [f"{p.parent.name}__{p.stem}" for p in paths]


def _matrices_from_traces(paths, args) -> list[TEMatrix]:
    sym, est = _configs(args)
    direction = Direction(args.direction)
    ids = _game_ids(paths)
    if len(set(ids)) != len(ids):
        raise ConfigError("input traces do not have distinct game ids")
    return [te_matrix(_read_trace(p, g, args.format), sym, est, direction) for p, g in zip(paths, ids)]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_te(args, out: _Outputs) -> int:
    paths = [Path(p) for p in args.traces]
    matrices = _matrices_from_traces(paths, args)
    sym, est = _configs(args)
    config = _trace_config(sym, est, Direction(args.direction))
    for m in matrices:
        out.write(f"{m.game_id}.te.json", dumps(matrix_to_json(m, {"config": config})))
    out.write("te.manifest.json", _manifest(args, "te", config, paths))
    print(f"wrote {len(matrices)} TE matrices to {out.dir}")
    return 0


def cmd_diagram(args, out: _Outputs) -> int:
    paths = [Path(p) for p in args.inputs]
    json_paths = [p for p in paths if p.suffix == ".json"]
    trace_paths = [p for p in paths if p.suffix != ".json"]
    if json_paths and trace_paths:
        raise InconsistentGames("mix of matrix JSON and trace inputs")
    if json_paths:
        matrices = [matrix_from_json(load_json(p), p) for p in json_paths]
        config = {}
    else:
        matrices = _matrices_from_traces(trace_paths, args)
        sym, est = _configs(args)
        config = _trace_config(sym, est, Direction(args.direction))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        diagram = build_diagram(ResponderTable.from_matrices(matrices), matrices)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out.write("diagram.json", dumps(diagram.to_json()))
    out.write("diagram.manifest.json", _manifest(args, "diagram", config, paths))
    print(f"hub: {diagram.hub}")
    return 0


def _theta_groups(sweep_dir: Path) -> dict[float, list[Path]]:
    if not sweep_dir.is_dir():
        raise ConfigError(f"sweep directory {sweep_dir} not found")
    groups = {}
    for d in sorted(sweep_dir.iterdir()):
        if not (d.is_dir() and d.name.startswith("theta=")):
            continue
        try:
            theta = float(d.name.split("=", 1)[1])
        except ValueError:
            raise ConfigError(f"cannot read parameter value from {d.name!r}") from None
        if theta in groups:
            raise ConfigError(f"duplicate parameter value {theta:g}")
        groups[theta] = sorted(p for p in d.iterdir() if p.suffix in TRACE_SUFFIXES)
    return groups


def cmd_fisher(args, out: _Outputs) -> int:
    if args.hub is None:
        raise ConfigError("--hub is required")
    if args.hub not in range(2, 12):
        raise ConfigError(f"--hub must be in 2..11, got {args.hub}")
    sym, _ = _configs(args)
    direction = Direction(args.direction)
    hub = EntityId(direction.target, args.hub)
    groups = _theta_groups(Path(args.sweep_dir))
    sweep_symbols = {}
    inputs = []
    for theta in sorted(groups):
        files = groups[theta]
        if not files:
            raise EmptyEnsemble(f"no trace files for theta={format_theta(theta)}")
        series = []
        for p in files:
            trace = _read_trace(p, p.stem, args.format)
            series.append(symbolize(compute_increments(trace)[hub], sym))
            inputs.append(p)
        sweep_symbols[theta] = series
    curve = fisher_curve(sweep_symbols, beta=args.beta, label=args.label, hub=args.hub)
    doc = curve.to_json()
    out.write("fisher.json", dumps(doc))
    csv_lines = ["theta,fisher"] + [
        f"{format_theta(t)},{format(v, '.12g')}" for t, v in zip(curve.grid.thetas, curve.values)
    ]
    out.write("fisher.csv", "\n".join(csv_lines) + "\n")
    config = {**asdict(sym), "beta": args.beta, "hub": args.hub, "direction": direction.value, "label": args.label}
    out.write("fisher.manifest.json", _manifest(args, "fisher", config, inputs))
    print(f"theta*: {format_theta(curve.theta_star)}")
    return 0


def _load_config_file(path: str, required: Sequence[str]) -> dict:
    return parse_config(Path(path).read_text(), required)


def cmd_simulate(args, out: _Outputs) -> int:
    values = _load_config_file(args.config, ("theta",))
    scenario = scenario_from_config(values)
    seed = args.seed if args.seed is not None else values.get("seed", 0)
    ext = "jsonl" if args.format == "jsonl" else "csv"
    seeds = []
    for g in range(args.games):
        s = derive_seed(seed, 0, g)
        seeds.append(s)
        trace = simulate_match(scenario, s, f"game_{g}")
        p = out.path(f"game_{g}.{ext}")
        with open(p, "w", newline="") as fh:
            out.written.append(p)
            write_trace(trace, fh, ext)
    config = {"scenario": format_config(scenario), "seed": seed, "games": args.games}
    out.write("simulate.manifest.json", _manifest(args, "simulate", config, [Path(args.config)], seeds))
    print(f"wrote {args.games} trace(s) to {out.dir}")
    return 0


def cmd_sweep(args, out: _Outputs) -> int:
    values = _load_config_file(args.config, ("grid",))
    cfg = sweep_from_config(values, args.seed)
    ext = "jsonl" if args.format == "jsonl" else "csv"
    count = 0
    for m, theta in enumerate(cfg.grid.thetas):
        for g in range(cfg.games_per_theta):
            trace = sweep_game(cfg, m, g)
            p = out.path(f"theta={format_theta(theta)}/game_{g}.{ext}")
            with open(p, "w", newline="") as fh:
                out.written.append(p)
                write_trace(trace, fh, ext)
            count += 1
    config = {"sweep": format_config(cfg), "seed": cfg.seed}
    out.write("sweep.manifest.json", _manifest(args, "sweep", config, [Path(args.config)], cfg.seed))
    print(f"wrote {count} traces in {len(cfg.grid)} groups to {out.dir}")
    return 0


def cmd_report(args, out: _Outputs) -> int:
    diagram = check_diagram(load_json(Path(args.diagram)), args.diagram)
    fisher = check_fisher(load_json(Path(args.fisher)), args.fisher)
    if fisher["hub"] is not None and fisher["hub"] != diagram["hub"]:
        print(
            f"warning: Fisher curve was computed for agent {fisher['hub']}, "
            f"but the diagram hub is {diagram['hub']}",
            file=sys.stderr,
        )
    peak = max(fisher["fisher"])
    incoming = sorted(((int(j), c) for j, c in diagram["incoming"].items()), key=lambda t: t[0])
    lines = [
        f"direction: {diagram['direction']}  games: {len(diagram['games'])}",
        f"hub agent: {diagram['hub']}" + ("  (tie-break used)" if diagram["hub_tiebreak_used"] else ""),
        "incoming links: " + ", ".join(f"{j}:{c}" for j, c in incoming if c),
        f"parameter: {fisher['parameter']}  grid points: {len(fisher['grid'])}",
        f"theta*: {format_theta(fisher['theta_star'])}  peak Fisher information: {format(peak, '.6g')}",
    ]
    summary = "\n".join(lines) + "\n"
    out.write("report.txt", summary)
    out.write("incoming.csv", "agent,incoming\n" + "".join(f"{j},{c}\n" for j, c in incoming))
    out.write(
        "fisher_curve.csv",
        "theta,fisher\n" + "".join(f"{format_theta(t)},{format(v, '.12g')}\n" for t, v in zip(fisher["grid"], fisher["fisher"])),
    )
    out.write("report.manifest.json", _manifest(args, "report", {}, [Path(args.diagram), Path(args.fisher)]))
    sys.stdout.write(summary)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=("csv", "jsonl"), default=None, help="trace format (default: by extension)")

    analysis = argparse.ArgumentParser(add_help=False)
    analysis.add_argument("--k", type=int, default=EstimatorConfig.history_k, help="target history length")
    analysis.add_argument("--epsilon", type=float, default=SymbolizerConfig.stationary_threshold, help="stationary threshold (m)")
    analysis.add_argument("--sectors", type=int, default=SymbolizerConfig.sectors, help="number of direction sectors")
    analysis.add_argument("--direction", choices=[d.value for d in Direction], default=Direction.Y_TO_X.value)

    parser = argparse.ArgumentParser(prog="hubfisher", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("te", parents=[common, analysis], help="TE matrices from trace files")
    p.add_argument("traces", nargs="+")
    p.set_defaults(func=cmd_te)

    p = sub.add_parser("diagram", parents=[common, analysis], help="interaction diagram and hub")
    p.add_argument("inputs", nargs="+", help="TE matrix JSON files or trace files")
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("fisher", parents=[common, analysis], help="Fisher curve over a sweep directory")
    p.add_argument("sweep_dir")
    p.add_argument("--hub", type=int, default=None)
    p.add_argument("--beta", type=float, default=DEFAULT_BETA, help="additive smoothing constant")
    p.add_argument("--label", default="theta", help="parameter name")
    p.set_defaults(func=cmd_fisher)

    p = sub.add_parser("simulate", parents=[common], help="synthetic match traces")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--games", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="synthetic parameter sweep")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", parents=[common], help="summarise diagram and Fisher outputs")
    p.add_argument("diagram")
    p.add_argument("fisher")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are user errors here
        return 0 if exc.code == 0 else 1
    args.argv = argv
    out = _Outputs(Path(args.out))
    try:
        return args.func(args, out)
    except (HubFisherError, OSError, UnicodeDecodeError) as exc:
        out.rollback()
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        out.rollback()
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
