import io

import numpy as np
import pytest

from hubfisher.trace import AGENT_INDICES, parse_trace


def trace_rows(cycles=3, skip=(), extra=(), seed=0):
    """CSV body rows for a full 21-entity game; ``skip`` holds (cycle, side, index) to omit."""
    rng = np.random.default_rng(seed)
    rows = []
    for c in range(1, cycles + 1):
        ents = [("L", i) for i in AGENT_INDICES] + [("R", i) for i in AGENT_INDICES] + [("B", "")]
        for side, idx in ents:
            if (c, side, idx) in skip:
                continue
            x, y = (float(v) for v in rng.uniform(-50, 50, 2))
            rows.append(f"{c},{side},{idx},{x!r},{y!r}")
    rows.extend(extra)
    return rows


def trace_csv(cycles=3, skip=(), extra=(), seed=0, header=True):
    head = ["cycle,side,index,x,y"] if header else []
    return "\n".join(head + trace_rows(cycles, skip, extra, seed)) + "\n"


@pytest.fixture
def small_trace():
    return parse_trace(io.StringIO(trace_csv(cycles=5)), "csv", "small")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call":
                continue
            for name, value in getattr(rep, "user_properties", []):
                if name == "acceptance":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
