import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubfisher.errors import ConfigError, LengthMismatch, SeriesTooShort
from hubfisher.estimators import (
    EstimatorConfig,
    brute_force_te_oracle,
    conditional_transfer_entropy,
    joint_counts,
    te_from_table,
)
from hubfisher.trace import SymbolSeries

K1 = EstimatorConfig(1)


class TestJointCounts:
    def test_boundary_length(self):
        t = joint_counts([0, 1, 2], [1, 1, 0], [0, 0, 0], EstimatorConfig(2))
        assert t.total == 1
        assert t.counts == {(2, (0, 1), 1, 0): 1}

    def test_constant_series(self):
        t = joint_counts([0] * 4, [0] * 4, [0] * 4, K1)
        assert t.counts == {(0, (0,), 0, 0): 3}

    def test_hand_enumerated_window(self):
        # n=0: (x1=1, x0=0, y0=1); n=1: (0, 1, 0); n=2: (1, 0, 1)
        t = joint_counts([0, 1, 0, 1], [1, 0, 1, 0], [0, 0, 0, 0], K1)
        assert t.total == 3
        assert t.counts == {(1, (0,), 1, 0): 2, (0, (1,), 0, 0): 1}

    def test_total_is_length_minus_k(self):
        rng = np.random.default_rng(1)
        x, y, b = rng.integers(0, 3, (3, 50))
        for k in (1, 2, 3):
            t = joint_counts(x, y, b, EstimatorConfig(k))
            assert t.total == 50 - k == sum(t.counts.values())

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            joint_counts([0, 1, 0], [0, 1], [0, 0, 0], K1)
        with pytest.raises(SeriesTooShort):
            joint_counts([0, 1], [0, 1], [0, 0], EstimatorConfig(2))
        with pytest.raises(ConfigError):
            EstimatorConfig(0)


class TestTransferEntropy:
    def test_hand_worked_one_bit(self):
        # rows (next, past, y): (0,0,0) (1,0,1) (1,1,1) (0,1,0); next is fixed by
        # (past, y) but is a fair coin given past alone -> exactly 1 bit
        x, y = [0, 0, 1, 1, 0], [0, 1, 1, 0, 0]
        assert conditional_transfer_entropy(x, y, [0] * 5, K1) == pytest.approx(1.0, abs=1e-15)
        assert brute_force_te_oracle(x, y, [0] * 5, K1) == pytest.approx(1.0, abs=1e-15)

    def test_alternating_example(self):
        x, y, b = [0, 1, 0, 1], [1, 0, 1, 0], [0, 0, 0, 0]
        assert conditional_transfer_entropy(x, y, b, K1) == 0.0
        assert brute_force_te_oracle(x, y, b, K1) == 0.0

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_identical_constant_series(self, k):
        x = [4] * 30
        assert conditional_transfer_entropy(x, x, [0] * 30, EstimatorConfig(k)) == 0.0

    def test_constant_source_is_zero(self):
        rng = np.random.default_rng(5)
        x, b = rng.integers(0, 4, (2, 500))
        assert conditional_transfer_entropy(x, np.full(500, 3), b) == 0.0

    def test_accepts_symbol_series(self):
        rng = np.random.default_rng(2)
        x, y, b = (SymbolSeries(s, 9) for s in rng.integers(0, 9, (3, 300)))
        assert conditional_transfer_entropy(x, y, b) == pytest.approx(
            conditional_transfer_entropy(x.symbols, y.symbols, b.symbols), abs=0
        )

    def test_table_route_matches(self):
        rng = np.random.default_rng(3)
        x, y, b = rng.integers(0, 3, (3, 400))
        cfg = EstimatorConfig(2)
        assert te_from_table(joint_counts(x, y, b, cfg)) == pytest.approx(
            conditional_transfer_entropy(x, y, b, cfg), abs=1e-12
        )

    def test_copy_channel_near_one_bit(self):
        rng = np.random.default_rng(11)
        y = rng.integers(0, 2, 10_000)
        x = np.concatenate([[0], y[:-1]])
        te = conditional_transfer_entropy(x, y, np.zeros_like(y), K1)
        assert 0.95 <= te <= 1.0
        assert te == pytest.approx(brute_force_te_oracle(x, y, None, K1), abs=1e-12)

    def test_large_alphabet_codes(self):
        # symbols far apart exercise the relabelling path
        rng = np.random.default_rng(4)
        x, y, b = (rng.choice([-7, 10**9, 3, 2**40], 300) for _ in range(3))
        cfg = EstimatorConfig(3)
        assert conditional_transfer_entropy(x, y, b, cfg) == pytest.approx(
            brute_force_te_oracle(x, y, b, cfg), abs=1e-12
        )


symbol_triples = st.integers(3, 120).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
        st.lists(st.integers(0, 3), min_size=n, max_size=n),
        st.lists(st.integers(0, 2), min_size=n, max_size=n),
        st.integers(1, 2),
    )
)


@settings(max_examples=300, deadline=None)
@given(symbol_triples)
def test_estimator_matches_oracle(args):
    x, y, b, k = args
    cfg = EstimatorConfig(k)
    est = conditional_transfer_entropy(x, y, b, cfg)
    assert abs(est - brute_force_te_oracle(x, y, b, cfg)) <= 1e-12
    # plug-in conditionals fitted on the same data: difference of conditional entropies
    assert est >= -1e-12


@settings(max_examples=150, deadline=None)
@given(symbol_triples, st.permutations(range(4)), st.permutations(range(4)), st.permutations(range(3)))
def test_relabelling_invariance(args, px, py, pb):
    x, y, b, k = args
    cfg = EstimatorConfig(k)
    base = conditional_transfer_entropy(x, y, b, cfg)
    relabelled = conditional_transfer_entropy([px[v] for v in x], [py[v] for v in y], [pb[v] for v in b], cfg)
    assert relabelled == pytest.approx(base, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(symbol_triples, st.integers(0, 5))
def test_constant_source_property(args, c):
    x, _, b, k = args
    assert conditional_transfer_entropy(x, [c] * len(x), b, EstimatorConfig(k)) == 0.0
