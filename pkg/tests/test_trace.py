import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubfisher.errors import ConfigError, DuplicateSample, MalformedRow, MissingEntity, RosterViolation
from hubfisher.trace import (
    BALL,
    STATIONARY,
    EntityId,
    GameTrace,
    IncrementSeries,
    Side,
    SymbolizerConfig,
    all_entities,
    compute_increments,
    parse_trace,
    symbol_label,
    symbolize,
    symbolize_deltas,
    write_trace,
)
from tests.conftest import trace_csv, trace_rows


def parse(text, fmt="csv"):
    return parse_trace(io.StringIO(text), fmt, "g")


class TestParse:
    def test_minimal_file(self):
        tr = parse(trace_csv(cycles=3))
        assert tr.cycles == 3
        assert len(tr.positions) == 21
        assert list(tr.cycle_ids) == [1, 2, 3]

    def test_rows_in_any_order(self):
        rows = trace_rows(cycles=4)
        shuffled = rows[::-1]
        a = parse("cycle,side,index,x,y\n" + "\n".join(rows))
        b = parse("cycle,side,index,x,y\n" + "\n".join(shuffled))
        assert a == b
        assert list(b.cycle_ids) == [1, 2, 3, 4]

    def test_missing_ball(self):
        with pytest.raises(MissingEntity, match="cycle 2"):
            parse(trace_csv(cycles=3, skip={(2, "B", "")}))

    def test_entity_never_present(self):
        skip = {(c, "R", 7) for c in (1, 2, 3)}
        with pytest.raises(MissingEntity):
            parse(trace_csv(cycles=3, skip=skip))

    @pytest.mark.parametrize("index", [12, 1, 0])
    def test_roster_bounds(self, index):
        with pytest.raises(RosterViolation):
            parse(trace_csv(cycles=3, extra=[f"2,L,{index},0.0,0.0"]))

    def test_duplicate_sample(self):
        with pytest.raises(DuplicateSample):
            parse(trace_csv(cycles=3, extra=["2,R,4,1.0,1.0"]))

    @pytest.mark.parametrize(
        "row, line",
        [
            ("1,L,2,0.0", 65),
            ("1,X,2,0.0,0.0", 65),
            ("abc,L,2,0.0,0.0", 65),
            ("1,L,2,zero,0.0", 65),
            ("1,B,3,0.0,0.0", 65),
            ("1,L,,0.0,0.0", 65),
            ("1,L,2,nan,0.0", 65),
        ],
    )
    def test_malformed_row_reports_line(self, row, line):
        text = trace_csv(cycles=3, extra=[row])
        with pytest.raises(MalformedRow) as info:
            parse(text)
        assert info.value.line == line

    def test_header_required(self):
        with pytest.raises(MalformedRow) as info:
            parse(trace_csv(cycles=3, header=False))
        assert info.value.line == 1

    def test_single_cycle_rejected(self):
        with pytest.raises(Exception, match="at least 2 cycles"):
            parse(trace_csv(cycles=1))

    def test_jsonl(self):
        tr = parse(trace_csv(cycles=3))
        buf = io.StringIO()
        write_trace(tr, buf, "jsonl")
        assert parse(buf.getvalue(), "jsonl") == tr

    def test_jsonl_bad_object(self):
        with pytest.raises(MalformedRow) as info:
            parse('{"cycle": 1, "side": "L"}\n', "jsonl")
        assert info.value.line == 1


@st.composite
def traces(draw):
    n = draw(st.integers(2, 6))
    start = draw(st.integers(-5, 100))
    gaps = draw(st.lists(st.integers(1, 3), min_size=n - 1, max_size=n - 1))
    cycles = np.cumsum([start] + gaps)
    coord = st.floats(-120, 120, allow_nan=False, allow_infinity=False)
    positions = {e: np.array(draw(st.lists(st.tuples(coord, coord), min_size=n, max_size=n))) for e in all_entities()}
    return GameTrace("rt", cycles, positions)


@settings(max_examples=40, deadline=None)
@given(traces(), st.sampled_from(["csv", "jsonl"]))
def test_round_trip(tr, fmt):
    buf = io.StringIO()
    write_trace(tr, buf, fmt)
    assert parse_trace(io.StringIO(buf.getvalue()), fmt, "rt") == tr


def test_trace_is_immutable(small_trace):
    with pytest.raises(ValueError):
        small_trace.positions[BALL][0, 0] = 1.0


def test_entity_id_invariant():
    with pytest.raises(ValueError):
        EntityId(Side.BALL, 3)
    with pytest.raises(ValueError):
        EntityId(Side.X)


class TestIncrements:
    def _trace(self, pts_for_ball, n):
        pos = {e: np.zeros((n, 2)) for e in all_entities()}
        pos[BALL] = np.array(pts_for_ball, dtype=float)
        return GameTrace("inc", np.arange(n), pos)

    def test_constant_series(self):
        inc = compute_increments(self._trace([(3, 4)] * 4, 4))
        assert all(np.all(s.deltas == 0) for s in inc.values())

    def test_direct_subtraction(self):
        inc = compute_increments(self._trace([(0, 0), (1, 0), (1, 2)], 3))
        np.testing.assert_array_equal(inc[BALL].deltas, [[1, 0], [0, 2]])

    def test_two_cycles(self):
        inc = compute_increments(self._trace([(0, 0), (1, 1)], 2))
        assert all(len(s.deltas) == 1 for s in inc.values())


class TestSymbolize:
    cfg = SymbolizerConfig()

    def sym(self, *deltas, cfg=None):
        return symbolize(IncrementSeries(BALL, np.array(deltas, dtype=float)), cfg or self.cfg)

    def test_examples(self):
        s = self.sym((0, 0), (1, 0), (-1, 0))
        assert s.labels() == ["S", "D0", "D4"]
        assert s.alphabet_size == 9

    def test_threshold_is_inclusive(self):
        assert self.sym((0.05, 0)).symbols[0] == STATIONARY
        assert self.sym((0.0501, 0)).symbols[0] == 1

    def test_sector_boundaries_half_open(self):
        # angle exactly pi/2 starts sector 2 of 8
        assert symbol_label(self.sym((0, 1)).symbols[0]) == "D2"
        # just below 2*pi stays in the last sector
        assert symbol_label(self.sym((1, -1e-12)).symbols[0]) == "D7"
        # -0.0 angle wraps to sector 0
        assert symbol_label(self.sym((1, -0.0)).symbols[0]) == "D0"

    def test_bad_config(self):
        with pytest.raises(ConfigError):
            SymbolizerConfig(-0.1, 8)
        with pytest.raises(ConfigError):
            SymbolizerConfig(0.05, 1)

    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(2, 16),
        st.lists(st.tuples(st.floats(0.05, 0.95), st.floats(0.06, 50), st.integers(0, 15)), min_size=1, max_size=30),
        st.booleans(),
    )
    def test_rotation_permutes_sectors(self, sectors, specs, with_zero):
        cfg = SymbolizerConfig(0.05, sectors)
        width = 2 * math.pi / sectors
        # keep angles away from sector edges so rounding cannot move them
        angles = np.array([(m % sectors + frac) * width for frac, _, m in specs])
        radii = np.array([r for _, r, _ in specs])
        d = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
        if with_zero:
            d = np.vstack([d, [0.0, 0.0]])
        rot = np.array([[math.cos(width), -math.sin(width)], [math.sin(width), math.cos(width)]])
        before = symbolize_deltas(d, cfg)
        after = symbolize_deltas(d @ rot.T, cfg)
        expected = np.where(before == STATIONARY, STATIONARY, (before - 1 + 1) % sectors + 1)
        np.testing.assert_array_equal(after, expected)

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=1, max_size=30),
        st.floats(1.0, 1e3, exclude_min=True),
    )
    def test_scaling_keeps_sector(self, pts, factor):
        d = np.array(pts)
        before = symbolize_deltas(d, self.cfg)
        after = symbolize_deltas(d * factor, self.cfg)
        moving = before != STATIONARY
        np.testing.assert_array_equal(after[moving], before[moving])
