"""Term-weighting function tests against hand-computed values."""

import math

import pytest
from hypothesis import given, strategies as st

from lexcourt.scoring import (
    BM25Params,
    FieldScore,
    LMParams,
    bm25_term,
    compound_score,
    lm_jm_term,
    tfidf_weight,
)


class TestBM25:
    def test_absent_term_scores_zero(self):
        assert bm25_term(0, 5, 10, 4, 4.0, BM25Params()) == 0.0

    def test_hand_computed(self):
        # idf = ln 2, tf part = 4.4 / 3.2
        got = bm25_term(2, 1, 2, 4, 4.0, BM25Params(k1=1.2, b=0.75))
        assert got == pytest.approx(math.log(2) * 1.375, abs=1e-12)
        assert got == pytest.approx(0.9530, abs=1e-4)

    def test_independent_scalar_oracle(self):
        # same quantity assembled differently: idf and saturation separately
        tf, df, n, unit_len, avg = 3, 4, 20, 7, 5.5
        k1, b = 0.9, 0.4
        idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
        saturation = (tf * (k1 + 1)) / (tf + k1 * (1 - b + b * unit_len / avg))
        assert bm25_term(tf, df, n, unit_len, avg, BM25Params(k1, b)) == pytest.approx(
            idf * saturation, rel=1e-12
        )

    def test_b_zero_ignores_length(self):
        params = BM25Params(k1=1.2, b=0.0)
        assert bm25_term(2, 1, 4, 3, 10.0, params) == bm25_term(2, 1, 4, 300, 10.0, params)

    def test_b_one_fully_normalizes(self):
        params = BM25Params(k1=1.2, b=1.0)
        short = bm25_term(2, 1, 4, 5, 10.0, params)
        long = bm25_term(2, 1, 4, 20, 10.0, params)
        assert short > long

    @given(
        tf=st.integers(1, 50),
        df=st.integers(1, 99),
        unit_len=st.integers(0, 500),
    )
    def test_monotonic_in_tf_and_df(self, tf, df, unit_len):
        params = BM25Params(k1=1.2, b=0.75)
        n = 100
        more_tf = bm25_term(tf + 1, df, n, unit_len, 50.0, params)
        base = bm25_term(tf, df, n, unit_len, 50.0, params)
        assert more_tf > base > 0.0
        rarer = bm25_term(tf, df, n, unit_len, 50.0, params)
        commoner = bm25_term(tf, df + 1, n, unit_len, 50.0, params)
        assert rarer > commoner

    def test_precondition_errors(self):
        with pytest.raises(ValueError):
            bm25_term(1, 0, 10, 4, 4.0, BM25Params())
        with pytest.raises(ValueError):
            bm25_term(1, 1, 0, 4, 4.0, BM25Params())
        with pytest.raises(ValueError):
            bm25_term(1, 1, 10, 4, 0.0, BM25Params())

    def test_param_validation(self):
        with pytest.raises(ValueError):
            BM25Params(k1=-0.1)
        with pytest.raises(ValueError):
            BM25Params(b=1.5)


class TestLMJelinekMercer:
    def test_absent_term_scores_zero(self):
        assert lm_jm_term(0, 10, 5, 100, LMParams(0.5)) == 0.0

    def test_hand_computed(self):
        got = lm_jm_term(1, 2, 1, 4, LMParams(0.5))
        assert got == pytest.approx(math.log(3), abs=1e-12)

    def test_lambda_monotonicity(self):
        # heavier collection smoothing shrinks the score toward zero
        low = lm_jm_term(2, 10, 4, 1000, LMParams(0.5))
        high = lm_jm_term(2, 10, 4, 1000, LMParams(0.99))
        assert 0.0 < high < low

    @given(tf=st.integers(1, 30), ctf_extra=st.integers(0, 100))
    def test_increasing_tf_decreasing_ctf(self, tf, ctf_extra):
        params = LMParams(0.4)
        ctf = tf + ctf_extra  # ctf >= tf always holds in a real index
        total = 10_000
        assert lm_jm_term(tf + 1, 50, ctf + 1, total, params) > lm_jm_term(
            tf, 50, ctf + 1, total, params
        )
        assert lm_jm_term(tf, 50, ctf, total, params) > lm_jm_term(
            tf, 50, ctf + 1, total, params
        )

    def test_nonnegative(self):
        assert lm_jm_term(1, 1000, 999, 1000, LMParams(0.99)) > 0.0

    def test_internal_consistency_error(self):
        with pytest.raises(RuntimeError):
            lm_jm_term(2, 10, 0, 100, LMParams(0.5))

    def test_param_validation(self):
        for bad in (0.0, 1.0, -1.0, 2.0):
            with pytest.raises(ValueError):
                LMParams(bad)


class TestTfidf:
    def test_absent_term(self):
        assert tfidf_weight(0, 3, 100) == 0.0

    def test_hand_computed(self):
        assert tfidf_weight(3, 1, 100) == pytest.approx(3 * math.log(101 / 2), abs=1e-12)
        assert tfidf_weight(3, 1, 100) == pytest.approx(11.766, abs=1e-3)

    def test_ubiquitous_term_zeroed(self):
        assert tfidf_weight(3, 100, 100) == 0.0

    def test_errors(self):
        with pytest.raises(ValueError):
            tfidf_weight(1, 1, 0)


class TestCompoundScore:
    @pytest.mark.parametrize(
        "s_body,s_statute,s_b,expected",
        [(1.0, 2.0, 0.0, 1.0), (1.0, 2.0, 0.5, 2.0), (0.0, 3.0, 1.0, 3.0)],
    )
    def test_examples(self, s_body, s_statute, s_b, expected):
        assert compound_score(s_body, s_statute, s_b) == expected

    @given(st.floats(0, 1e6), st.floats(0, 1e6))
    def test_sb_zero_is_body_exactly(self, s_body, s_statute):
        assert compound_score(s_body, s_statute, 0.0) == s_body

    def test_field_score_combine(self):
        fs = FieldScore.combine(1.5, 2.0, 0.25)
        assert fs.s_total == 1.5 + 2.0 * 0.25
        assert (fs.s_body, fs.s_statute) == (1.5, 2.0)


@given(
    tfs=st.lists(st.integers(0, 10), min_size=1, max_size=8),
    scorer=st.sampled_from(["bm25", "lm"]),
)
def test_additivity_over_query_terms(tfs, scorer):
    """A multi-term query scores the sum of its single-term scores."""
    if scorer == "bm25":
        total = sum(bm25_term(tf, max(tf, 1), 50, 30, 25.0, BM25Params()) for tf in tfs)
        parts = [bm25_term(tf, max(tf, 1), 50, 30, 25.0, BM25Params()) for tf in tfs]
    else:
        total = sum(lm_jm_term(tf, 30, max(tf, 1) + 5, 5000, LMParams()) for tf in tfs)
        parts = [lm_jm_term(tf, 30, max(tf, 1) + 5, 5000, LMParams()) for tf in tfs]
    assert total == pytest.approx(sum(parts), rel=1e-12)
