import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmstar import (
    GroundTruthMatrix,
    HardPredictionMatrix,
    ProbabilityMatrix,
    build_ground_truth,
    confusion,
    decompose,
    encode_labels,
    harden,
    probabilistic_confusion,
    split_q,
)
from cmstar.errors import DegenerateProblemError, DimensionError, EncodingError, ValidationError

from oracles import (
    EXAMPLE_CM,
    EXAMPLE_CM_STAR,
    EXAMPLE_LABELS,
    EXAMPLE_P,
    EXAMPLE_Q,
    EXAMPLE_T,
    EXAMPLE_U,
    EXAMPLE_V,
    accumulate_cm_star,
    random_instance,
    row_argmax,
    tally_confusion,
)


@pytest.fixture
def example():
    enc = encode_labels(EXAMPLE_LABELS)
    return build_ground_truth(EXAMPLE_LABELS, enc), ProbabilityMatrix(EXAMPLE_Q)


class TestEncodeLabels:
    def test_lexicographic(self):
        enc = encode_labels(["B", "A", "A", "C"])
        assert enc.classes == ("A", "B", "C")
        assert enc.k == 3

    def test_worked_example_labels(self):
        assert encode_labels(EXAMPLE_LABELS).classes == ("A", "B", "C")

    def test_single_class_rejected(self):
        with pytest.raises(DegenerateProblemError):
            encode_labels(["yes"])
        with pytest.raises(DegenerateProblemError):
            encode_labels(["yes", "yes"])

    def test_bijection(self):
        enc = encode_labels(["z", "10", "9", "a"])
        assert enc.classes == ("10", "9", "a", "z")
        for i, c in enumerate(enc.classes):
            assert enc.index(c) == i
        assert enc.decode(enc.encode(enc.classes)) == list(enc.classes)

    def test_order_independent_of_input_order(self):
        assert encode_labels(["b", "a", "c"]) == encode_labels(["c", "b", "a"])


class TestGroundTruth:
    def test_worked_example(self):
        enc = encode_labels(EXAMPLE_LABELS)
        np.testing.assert_array_equal(build_ground_truth(EXAMPLE_LABELS, enc).values, EXAMPLE_T)

    def test_single_row(self):
        enc = encode_labels(["A", "B"])
        np.testing.assert_array_equal(build_ground_truth(["A"], enc).values, [[1, 0]])

    def test_order(self):
        enc = encode_labels(["A", "B", "C"])
        np.testing.assert_array_equal(build_ground_truth(["C", "A"], enc).values, [[0, 0, 1], [1, 0, 0]])

    def test_unknown_label_named(self):
        enc = encode_labels(["A", "B"])
        with pytest.raises(EncodingError, match="'Z'"):
            build_ground_truth(["A", "Z"], enc)

    def test_class_counts(self, example):
        t, _ = example
        np.testing.assert_array_equal(t.class_counts, [3, 2, 1])
        assert t.class_counts.sum() == t.n == 6

    def test_not_one_hot_rejected(self):
        with pytest.raises(ValidationError):
            GroundTruthMatrix([[1, 1], [0, 1]])

    def test_immutable(self, example):
        t, q = example
        with pytest.raises(ValueError):
            t.values[0, 0] = 0
        with pytest.raises(ValueError):
            q.values[0, 0] = 0.5


class TestProbabilityMatrix:
    def test_renormalizes_within_band(self):
        q = ProbabilityMatrix([[0.5, 0.5 + 5e-7], [1.0, 0.0]])
        np.testing.assert_allclose(q.values.sum(axis=1), 1.0, atol=1e-15)

    def test_rejects_outside_band(self):
        with pytest.raises(ValidationError, match="row 2"):
            ProbabilityMatrix([[0.5, 0.5], [0.5, 0.3]])

    def test_rejects_negative(self):
        with pytest.raises(ValidationError, match="row 1, column 2"):
            ProbabilityMatrix([[1.1, -0.1]])

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            ProbabilityMatrix([[np.nan, 1.0]])


class TestHarden:
    def test_worked_example(self):
        np.testing.assert_array_equal(harden(ProbabilityMatrix(EXAMPLE_Q)).values, EXAMPLE_P)

    def test_tie_goes_to_lowest_index(self):
        np.testing.assert_array_equal(harden(ProbabilityMatrix([[0.5, 0.5, 0.0]])).values, [[1, 0, 0]])

    def test_one_hot_fixed_point(self):
        np.testing.assert_array_equal(harden(ProbabilityMatrix([[0, 0, 1]])).values, [[0, 0, 1]])


class TestConfusion:
    def test_worked_example(self, example):
        t, q = example
        cm = confusion(t, harden(q))
        np.testing.assert_array_equal(cm.values, EXAMPLE_CM)
        assert cm.values.dtype.kind == "i"
        assert cm.n == 6

    def test_perfect_predictor(self, example):
        t, _ = example
        cm = confusion(t, HardPredictionMatrix(t.values))
        np.testing.assert_array_equal(cm.values, np.diag([3, 2, 1]))

    def test_matches_tally_oracle(self):
        rng = np.random.default_rng(7)
        true = rng.integers(0, 4, size=30)
        pred = rng.integers(0, 4, size=30)
        cm = confusion(GroundTruthMatrix(np.eye(4, dtype=int)[true]), HardPredictionMatrix(np.eye(4, dtype=int)[pred]))
        np.testing.assert_array_equal(cm.values, tally_confusion(true, pred, 4))

    def test_shape_mismatch(self, example):
        t, _ = example
        with pytest.raises(DimensionError):
            confusion(t, HardPredictionMatrix(np.eye(3, dtype=int)))


class TestProbabilisticConfusion:
    def test_worked_example(self, example):
        t, q = example
        cm_star = probabilistic_confusion(t, q)
        np.testing.assert_allclose(cm_star.values, EXAMPLE_CM_STAR, atol=1e-12)
        assert cm_star.n == 6

    def test_rows_sum_to_class_counts(self, example):
        t, q = example
        np.testing.assert_allclose(probabilistic_confusion(t, q).values.sum(axis=1), [3, 2, 1], atol=1e-12)
        # column sum of class A: 3 in CM, 2.8 in CM*
        assert probabilistic_confusion(t, q).values[:, 0].sum() == pytest.approx(2.8, abs=1e-12)

    def test_one_hot_q_equals_cm(self, example):
        t, _ = example
        q = ProbabilityMatrix(EXAMPLE_P)
        np.testing.assert_array_equal(probabilistic_confusion(t, q).values, confusion(t, harden(q)).values)

    def test_matches_accumulation_oracle(self):
        rng = np.random.default_rng(11)
        true = rng.integers(0, 4, size=30)
        raw = rng.random((30, 4))
        q = raw / raw.sum(axis=1, keepdims=True)
        got = probabilistic_confusion(GroundTruthMatrix(np.eye(4, dtype=int)[true]), ProbabilityMatrix(q))
        np.testing.assert_allclose(got.values, accumulate_cm_star(true, q), atol=1e-12)

    def test_shape_mismatch(self, example):
        t, _ = example
        with pytest.raises(DimensionError):
            probabilistic_confusion(t, ProbabilityMatrix(np.full((6, 2), 0.5)))


class TestSplitQ:
    def test_worked_example(self):
        q_plus, q_minus = split_q(ProbabilityMatrix(EXAMPLE_Q))
        np.testing.assert_allclose(q_plus.max(axis=1), [0.9, 0.8, 0.6, 0.4, 0.8, 0.9])
        np.testing.assert_array_equal(q_plus.argmax(axis=1), EXAMPLE_P.argmax(axis=1))
        np.testing.assert_allclose(q_plus + q_minus, EXAMPLE_Q, atol=0)

    def test_one_hot(self):
        q_plus, q_minus = split_q(ProbabilityMatrix(EXAMPLE_P))
        np.testing.assert_array_equal(q_plus, EXAMPLE_P)
        assert not q_minus.any()

    def test_tie_consistent_with_harden(self):
        q_plus, q_minus = split_q(ProbabilityMatrix([[0.4, 0.4, 0.2]]))
        np.testing.assert_allclose(q_plus, [[0.4, 0, 0]])
        np.testing.assert_allclose(q_minus, [[0, 0.4, 0.2]])


class TestDecompose:
    def test_worked_example(self, example):
        t, q = example
        dec = decompose(t, q)
        np.testing.assert_allclose(dec.v, EXAMPLE_V, atol=1e-12)
        np.testing.assert_allclose(dec.u, EXAMPLE_U, atol=1e-12)

    def test_one_hot(self, example):
        t, _ = example
        q = ProbabilityMatrix(EXAMPLE_P)
        dec = decompose(t, q)
        np.testing.assert_array_equal(dec.v, confusion(t, harden(q)).values)
        assert not dec.u.any()

    def test_sum_matches_independent_cm_star(self):
        rng = np.random.default_rng(5)
        codes, q = random_instance(rng, n_max=40, k_max=5)
        k = q.shape[1]
        dec = decompose(GroundTruthMatrix(np.eye(k, dtype=int)[codes]), ProbabilityMatrix(q))
        np.testing.assert_allclose(dec.v + dec.u, accumulate_cm_star(codes, q), atol=1e-12)


@st.composite
def truth_and_q(draw):
    k = draw(st.integers(2, 6))
    n = draw(st.integers(1, 50))
    codes = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    rows = draw(
        st.lists(
            st.lists(st.integers(0, 20), min_size=k, max_size=k).filter(lambda r: sum(r) > 0),
            min_size=n,
            max_size=n,
        )
    )
    q = np.array(rows, dtype=float)
    q /= q.sum(axis=1, keepdims=True)
    return np.array(codes), q


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(truth_and_q())
    def test_decomposition_identity(self, inst):
        codes, q = inst
        k = q.shape[1]
        t = GroundTruthMatrix(np.eye(k, dtype=int)[codes])
        pq = ProbabilityMatrix(q)
        q_plus, q_minus = split_q(pq)
        np.testing.assert_allclose(q_plus + q_minus, pq.values, atol=1e-15)
        assert ((q_plus != 0).sum(axis=1) <= 1).all()
        hot = harden(pq).values.argmax(axis=1)
        assert [row_argmax(r) for r in pq.values] == list(hot)
        np.testing.assert_array_equal(q_plus.argmax(axis=1), hot)
        dec = decompose(t, pq)
        cm_star = probabilistic_confusion(t, pq)
        np.testing.assert_allclose(dec.v + dec.u, cm_star.values, atol=1e-9)
        assert (dec.v >= 0).all() and (dec.u >= 0).all()

    @settings(max_examples=200, deadline=None)
    @given(truth_and_q())
    def test_row_sums_are_class_counts(self, inst):
        codes, q = inst
        k = q.shape[1]
        t = GroundTruthMatrix(np.eye(k, dtype=int)[codes])
        pq = ProbabilityMatrix(q)
        counts = np.bincount(codes, minlength=k)
        np.testing.assert_array_equal(confusion(t, harden(pq)).values.sum(axis=1), counts)
        np.testing.assert_allclose(probabilistic_confusion(t, pq).values.sum(axis=1), counts, atol=1e-6 * len(codes))

    @settings(max_examples=200, deadline=None)
    @given(truth_and_q())
    def test_oracle_agreement(self, inst):
        codes, q = inst
        k = q.shape[1]
        t = GroundTruthMatrix(np.eye(k, dtype=int)[codes])
        pq = ProbabilityMatrix(q)
        pred = [row_argmax(r) for r in pq.values]
        np.testing.assert_array_equal(confusion(t, harden(pq)).values, tally_confusion(codes, pred, k))
        np.testing.assert_allclose(probabilistic_confusion(t, pq).values, accumulate_cm_star(codes, pq.values), atol=1e-9)
