import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hcgibbs import ActivitySpec, DivergenceError, DomainError, Kind
from hcgibbs.activities import (
    lambda_at,
    lambda_values,
    sum_activities,
    sum_weighted,
    tail_bound,
    tail_sup,
)

# S = sum_j lambda_j z_j for the first worked example, from mpmath nsum at 50 digits
S_EXAMPLE_1 = 0.26291311890319105577

SPECS = [
    {"kind": "geometric", "alpha": 0.4, "beta": 0.475, "scale": 1.0},
    {"kind": "geometric", "alpha": 0.05, "beta": 0.9, "scale": 2.5},
    {"kind": "poisson", "rate_pos": 2.4, "rate_neg": 8.0, "scale": 1.0},
    {"kind": "poisson", "rate_pos": 0.3, "rate_neg": 17.5, "scale": 0.7},
    {"kind": "telescoping", "scale": 0.25},
    {"kind": "telescoping", "scale": 3.0},
    {"kind": "explicit", "values": {"1": 0.5, "-1": 0.25, "2": 0.125}},
]


def spec_of(d):
    return ActivitySpec.from_dict(d)


class TestLambdaAt:
    def test_telescoping_first_terms(self, ex1):
        assert lambda_at(ex1, 1) == pytest.approx(3 / 4, abs=1e-15)
        assert lambda_at(ex1, -1) == pytest.approx(3 / 20, abs=1e-15)

    def test_geometric_symmetric_parameters(self):
        spec = ActivitySpec.geometric(0.3, 0.3, 1.7)
        for j in (1, 2, 7, 40):
            assert lambda_at(spec, j) == lambda_at(spec, -j)

    def test_zero_index_rejected(self, ex1):
        with pytest.raises(DomainError):
            lambda_at(ex1, 0)

    def test_repeated_calls_bit_identical(self, ex2):
        first = [lambda_at(ex2, j) for j in range(-30, 31) if j]
        second = [lambda_at(ex2, j) for j in range(-30, 31) if j]
        assert first == second

    @pytest.mark.parametrize("params", SPECS, ids=lambda d: d["kind"])
    def test_against_formula_oracle(self, params):
        spec = spec_of(params)
        for j in (1, -1, 2, -2, 5, -9, 20, -33, 150):
            expected = float(oracles.lam(params, j))
            assert lambda_at(spec, j) == pytest.approx(expected, rel=1e-12, abs=1e-300)

    def test_vectorised_agrees_with_scalar(self, ex3):
        js = np.array([-50, -3, -1, 1, 2, 80])
        np.testing.assert_array_equal(lambda_values(ex3, js), [lambda_at(ex3, j) for j in js])

    def test_explicit_unlisted_is_zero(self):
        spec = ActivitySpec.explicit({1: 0.5, -2: 0.25})
        assert lambda_at(spec, 3) == 0.0
        assert lambda_at(spec, -2) == 0.25

    @pytest.mark.parametrize("bad", [
        dict(kind="geometric", alpha=0.0, beta=0.5),
        dict(kind="geometric", alpha=0.5, beta=1.0),
        dict(kind="poisson", rate_pos=-1.0, rate_neg=1.0),
        dict(kind="telescoping", scale=0.0),
        dict(kind="explicit", values={"1": -0.5}),
        dict(kind="explicit", values={"0": 0.5}),
    ])
    def test_invalid_parameters(self, bad):
        with pytest.raises(DomainError):
            ActivitySpec.from_dict(bad)


class TestSumActivities:
    @pytest.mark.parametrize("spec, expected", [
        (ActivitySpec.telescoping(0.25), 9 / 8),
        (ActivitySpec.geometric(0.4, 0.475), 1.125),
        (ActivitySpec.geometric(1 / 3, 1 / 3, 4.0), 16 / 3),
        (ActivitySpec.telescoping(1.0), 9 / 2),
    ])
    def test_worked_example_totals(self, spec, expected):
        assert sum_activities(spec).value == pytest.approx(expected, abs=1e-12)

    def test_poisson_exact_total(self, ex2):
        exact = (1 - math.exp(-2.4)) + (1 - math.exp(-8.0))
        assert sum_activities(ex2).value == pytest.approx(exact, abs=1e-15)

    @pytest.mark.parametrize("fn, spec", [
        (oracles.geometric_np(0.4, 0.475), ActivitySpec.geometric(0.4, 0.475)),
        (oracles.geometric_np(0.01, 0.02, 3.0), ActivitySpec.geometric(0.01, 0.02, 3.0)),
        (oracles.poisson_np(2.4, 8.0), ActivitySpec.poisson(2.4, 8.0)),
        (oracles.poisson_np(30.0, 0.5, 2.0), ActivitySpec.poisson(30.0, 0.5, 2.0)),
    ])
    def test_closed_form_against_million_term_sum(self, fn, spec):
        assert sum_activities(spec).value == pytest.approx(oracles.brute_partial_sum(fn),
                                                           abs=1e-10)

    @pytest.mark.parametrize("params", SPECS, ids=lambda d: d["kind"])
    def test_value_and_tail_bracket_true_sum(self, params):
        s = sum_activities(spec_of(params), tol=1e-10)
        true = float(oracles.total(params))
        assert s.value - 1e-15 * true <= true <= s.value + s.tail_bound + 1e-15 * true
        assert s.tail_bound <= 1e-10

    def test_divergent_explicit_is_infinite(self):
        s = sum_activities(ActivitySpec.explicit({1: 1.0}, divergent=True))
        assert math.isinf(s.value)


class TestTailBounds:
    @pytest.mark.parametrize("params", SPECS[:6], ids=lambda d: d["kind"])
    @pytest.mark.parametrize("n", [0, 1, 3, 10, 50])
    def test_tail_bound_dominates_true_tail(self, params, n):
        true = oracles.tail(params, n)
        assert tail_bound(spec_of(params), n) >= float(true) * (1 - 1e-12)

    @pytest.mark.parametrize("params", SPECS, ids=lambda d: d["kind"])
    @pytest.mark.parametrize("n", [0, 2, 7, 30])
    def test_tail_sup_dominates_terms(self, params, n):
        sup = tail_sup(spec_of(params), n)
        terms = [oracles.lam(params, s * j) for j in range(n + 1, n + 60) for s in (1, -1)]
        assert sup >= float(max(terms)) * (1 - 1e-12)

    def test_negative_n_rejected(self, ex1):
        with pytest.raises(DomainError):
            tail_bound(ex1, -1)


class TestSumWeighted:
    @pytest.mark.parametrize("params", SPECS, ids=lambda d: d["kind"])
    def test_unit_weights_equal_total(self, params):
        spec = spec_of(params)
        assert sum_weighted(spec, 1.0, 1e-12).value == pytest.approx(
            sum_activities(spec).value, abs=1e-11)

    def test_zero_weights(self, ex2):
        assert sum_weighted(ex2, 0.0).value == 0.0

    def test_example_1_S_against_oracles(self, ex1):
        # w_j = lambda_j / (1 + 1/2)^2, the law of the first worked example
        w = lambda js: lambda_values(ex1, js) / 2.25  # noqa: E731
        got = sum_weighted(ex1, w, 1e-12, weight_sup=lambda n: tail_sup(ex1, n) / 2.25)
        brute = oracles.brute_partial_sum(lambda j: oracles.telescoping_np(0.25)(j) ** 2 / 2.25)
        assert got.value == pytest.approx(S_EXAMPLE_1, abs=1e-12)
        assert brute == pytest.approx(S_EXAMPLE_1, abs=1e-12)
        assert got.tail_bound <= 1e-12
        assert got.certified

    def test_mapping_weights(self, ex3):
        got = sum_weighted(ex3, {1: 2.0, -3: 1.0}).value
        assert got == pytest.approx(2 * lambda_at(ex3, 1) + lambda_at(ex3, -3), rel=1e-15)

    def test_divergence_detected(self):
        spec = ActivitySpec.geometric(0.1, 0.1)
        # lambda_j w_j = 0.1 * 1.2^|j| grows without bound
        w = lambda js: (1.2 / 0.9) ** np.abs(js)  # noqa: E731
        with pytest.raises(DivergenceError):
            sum_weighted(spec, w, weight_sup=lambda n: math.inf)

    def test_uncertified_without_sup(self, ex3):
        s = sum_weighted(ex3, lambda js: np.ones(js.shape))
        assert not s.certified
        assert s.value == pytest.approx(1.125, abs=1e-12)

    def test_flagged_divergent_spec(self):
        with pytest.raises(DivergenceError):
            sum_weighted(ActivitySpec.explicit({1: 1.0}, divergent=True), 1.0)

    def test_bad_tol(self, ex1):
        with pytest.raises(DomainError):
            sum_weighted(ex1, 1.0, tol=0.0)


class TestSpecSerialisation:
    @pytest.mark.parametrize("params", SPECS, ids=lambda d: d["kind"])
    def test_dict_round_trip(self, params):
        spec = spec_of(params)
        again = ActivitySpec.from_json(json.dumps(spec.to_dict()))
        assert again == spec
        assert again.kind is Kind(params["kind"])

    @given(alpha=st.floats(0.001, 0.999), beta=st.floats(0.001, 0.999),
           scale=st.floats(1e-3, 1e3))
    @settings(max_examples=50, deadline=None)
    def test_geometric_round_trip(self, alpha, beta, scale):
        spec = ActivitySpec.geometric(alpha, beta, scale)
        assert ActivitySpec.from_json(json.dumps(spec.to_dict())) == spec

    def test_unknown_field_rejected(self):
        with pytest.raises(DomainError, match="unknown field"):
            ActivitySpec.from_dict({"kind": "telescoping", "scale": 1, "alpha": 0.3})

    def test_unknown_kind_rejected(self):
        with pytest.raises(DomainError, match="unknown activity kind"):
            ActivitySpec.from_dict({"kind": "zipf"})

    def test_parse_error_names_line_and_column(self):
        with pytest.raises(DomainError, match=r"^2:11: "):
            ActivitySpec.from_json('{"kind": "geometric",\n "alpha": , "beta": 0.5}')

    def test_non_numeric_field(self):
        with pytest.raises(DomainError):
            ActivitySpec.from_json('{"kind": "telescoping", "scale": "1"}')

    def test_scaled(self, ex1):
        assert sum_activities(ex1.scaled(4.0)).value == pytest.approx(4.5, abs=1e-12)


def test_mpmath_oracle_precision_is_set():
    assert mp.mp.dps >= 30
