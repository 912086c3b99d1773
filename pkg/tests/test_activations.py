import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptact import activations as act
from adaptact.activations import ActivationInstance, ActivationKind, ParamSet
from adaptact.errors import ParamDomainError, UnknownActivation
from adaptact.numerics import erf_oracle

ALPHA = 0.882267
GRID = np.linspace(-5, 5, 1000)


def erfrelu(alpha=ALPHA):
    return act.make("erfrelu", alpha=alpha)


class TestRegistry:
    def test_count_and_order(self):
        rows = act.registry_list()
        assert len(rows) == 23
        assert [r.kind for r in rows] == list(ActivationKind)
        assert [r.kind for r in rows] == [r.kind for r in act.registry_list()]

    def test_erfrelu_entry(self):
        (row,) = [r for r in act.registry_list() if r.kind is ActivationKind.ERFRELU]
        assert row.arity == 1
        assert row.names == ("alpha",)
        assert row.trainable == (True,)

    def test_serf_is_parameter_free(self):
        (row,) = [r for r in act.registry_list() if r.kind is ActivationKind.SERF]
        assert row.arity == 0

    def test_benchmark_flags(self):
        flagged = {r.kind for r in act.registry_list() if r.benchmark}
        assert flagged == set(act.BENCHMARK_KINDS)
        assert len(flagged) == 10

    def test_lowercase_names_parse(self):
        for r in act.registry_list():
            assert ActivationKind.parse(r.kind.value.upper()) is r.kind

    def test_unknown(self):
        with pytest.raises(UnknownActivation):
            act.make("gelu")


class TestDefaults:
    @pytest.mark.parametrize("kind,expected", [
        ("erfrelu", {"alpha": 0.882267}),
        ("tanhsoft1", {"alpha": 0.87}),
        ("tanhsoft2", {"beta": 0.75, "gamma": 0.75}),
        ("tanhsoft3", {"delta": 0.85}),
        ("tanhlu", {"alpha": 1.0, "beta": 0.5, "gamma": 2.0}),
        ("saaf", {"alpha": 3.0, "beta": 2.0}),
        ("erfact", {"alpha": 0.75, "beta": 0.75}),
        ("pserf", {"gamma": 1.25, "delta": 0.85}),
        ("smish", {"alpha": 0.95, "beta": 1.2}),
        ("serf", {}),
        ("relu", {}),
    ])
    def test_table_values(self, kind, expected):
        assert act.default_params(kind).as_dict() == expected

    def test_fixed_families_frozen(self):
        for kind in ["lrelu", "elu", "swish", "eswish", "pats", "iplu"]:
            assert not any(act.default_params(kind).trainable)

    def test_adaptive_families_trainable(self):
        for kind in act.BENCHMARK_KINDS:
            assert all(act.default_params(kind).trainable)


class TestParamSet:
    def test_mismatched_params_rejected(self):
        with pytest.raises(ParamDomainError):
            ActivationInstance(ActivationKind.ERFRELU, ParamSet())
        with pytest.raises(ParamDomainError):
            ActivationInstance(ActivationKind.RELU, act.default_params("erfrelu"))

    def test_non_finite_rejected(self):
        with pytest.raises(ParamDomainError):
            act.make("erfrelu", alpha=float("nan"))

    def test_unknown_override_rejected(self):
        with pytest.raises(ParamDomainError):
            act.make("erfrelu", beta=1.0)

    def test_freeze_and_values(self):
        ps = act.default_params("saaf").frozen()
        assert ps.trainable == (False, False)
        assert ps.with_values([1.0, 2.5]).values == (1.0, 2.5)
        assert ps.with_values([1.0, 2.5]).trainable == (False, False)


class TestForward:
    def test_relu(self):
        r = act.make("relu")
        assert act.forward(r, -3.0) == 0.0
        assert act.forward(r, 2.0) == 2.0

    def test_erfrelu_examples(self):
        inst = erfrelu()
        assert act.forward(inst, 1.5) == 1.5
        # alpha * erf_oracle(-1), computed when the test was written
        assert act.forward(inst, -1.0) == pytest.approx(-0.7434871004933661, abs=1e-12)
        assert act.forward(inst, -1.0) == pytest.approx(ALPHA * erf_oracle(-1.0), abs=1e-12)

    def test_mish_zero(self):
        assert act.forward(act.make("mish"), 0.0) == 0.0

    def test_swish_one_is_silu(self):
        sw, si = act.make("swish", beta=1.0), act.make("silu")
        assert np.array_equal(act.forward_batch(sw, GRID), act.forward_batch(si, GRID))

    def test_saaf_bad_params(self):
        with pytest.raises(ParamDomainError):
            act.forward(act.make("saaf", alpha=0.0), 1.0)
        with pytest.raises(ParamDomainError):
            act.derivative(act.make("saaf", beta=-1.0), 1.0)

    def test_saaf_vanishing_denominator(self):
        # beta/alpha > e lets x/alpha + exp(-x/beta) reach zero
        inst = act.make("saaf", alpha=1.0, beta=5.0)
        with pytest.raises(ParamDomainError):
            act.forward_batch(inst, np.linspace(-10, 0, 1001))

    def test_tanhsoft3_domain(self):
        inst = act.make("tanhsoft3", delta=-1.0)
        with pytest.raises(ParamDomainError):
            act.forward(inst, 3.0)
        # negative inputs are fine for any delta: e^x tanh(dx) > -1
        act.forward(inst, -3.0)

    def test_pats_domain(self):
        with pytest.raises(ParamDomainError):
            act.forward(act.make("pats", k=0.0), 1.0)


class TestBatch:
    def test_examples(self):
        assert list(act.forward_batch(act.make("relu"), [-1.0, 0.0, 2.0])) == [0.0, 0.0, 2.0]
        assert act.forward_batch(act.make("tanh"), []).shape == (0,)
        out = act.forward_batch(erfrelu(1.0), [-1.0, 1.0])
        assert out[0] == pytest.approx(erf_oracle(-1.0), abs=1e-12)
        assert out[1] == 1.0

    @pytest.mark.parametrize("kind", [r.kind for r in act.registry_list()])
    def test_bitwise_equal_to_scalar(self, kind):
        inst = act.make(kind)
        xs = np.linspace(-6, 6, 97).reshape(1, 97)
        batch = act.forward_batch(inst, xs)
        assert batch.shape == xs.shape
        scalar = np.array([act.forward(inst, float(v)) for v in xs.ravel()])
        assert np.array_equal(batch.ravel(), scalar)

    @pytest.mark.parametrize("kind", [r.kind for r in act.registry_list()])
    def test_finite_on_wide_range(self, kind):
        inst = act.make(kind)
        xs = np.concatenate([np.linspace(-1000, 1000, 2001), [-1e6, 1e6]])
        assert np.all(np.isfinite(act.forward_batch(inst, xs)))
        assert np.all(np.isfinite(act.derivative_batch(inst, xs)))
        for g in act.param_gradient_batch(inst, xs):
            assert np.all(np.isfinite(g))


class TestDerivative:
    def test_relu(self):
        r = act.make("relu")
        assert act.derivative(r, 2.0) == 1.0
        assert act.derivative(r, -2.0) == 0.0
        assert act.derivative(r, 0.0) == 1.0

    def test_sigmoid_zero(self):
        assert act.derivative(act.make("sigmoid"), 0.0) == 0.25

    def test_erfrelu(self):
        inst = erfrelu()
        assert act.derivative(inst, 5.0) == 1.0
        assert act.derivative(inst, 0.0) == 1.0
        left = act.derivative(inst, -1e-300)
        assert left == pytest.approx(0.9955317026158567, abs=1e-12)
        assert left == pytest.approx(ALPHA * 2 / math.sqrt(math.pi), abs=1e-12)

    def test_mish_zero(self):
        assert act.derivative(act.make("mish"), 0.0) == pytest.approx(0.6, abs=1e-15)


class TestParamGradient:
    def test_erfrelu(self):
        for a in [0.3, ALPHA, 2.0]:
            (g,) = act.param_gradient(erfrelu(a), -1.0)
            assert g == pytest.approx(-0.8427007929497148, abs=1e-12)
        assert act.param_gradient(erfrelu(), 3.0) == [0.0]

    @given(st.floats(0.1, 5.0))
    def test_swish_at_zero(self, beta):
        assert act.param_gradient(act.make("swish", beta=beta), 0.0) == [0.0]

    def test_order_matches_paramset(self):
        inst = act.make("tanhlu", alpha=1.0, beta=0.5, gamma=2.0)
        da, db, dg = act.param_gradient(inst, 0.3)
        assert da == pytest.approx(math.tanh(0.6), abs=1e-15)
        assert db == pytest.approx(0.3, abs=1e-15)

    def test_no_params(self):
        assert act.param_gradient(act.make("relu"), 1.0) == []


class TestErfReLUProperties:
    def test_identity_on_nonnegative(self):
        xs = np.concatenate([[0.0], np.geomspace(1e-300, 1e300, 500)])
        assert np.array_equal(act.forward_batch(erfrelu(), xs), xs)

    def test_continuity_at_zero(self):
        inst = erfrelu()
        assert abs(act.forward(inst, -1e-12) - act.forward(inst, 0.0)) <= 1e-11

    @pytest.mark.parametrize("alpha", [0.05, ALPHA, 1.0, 3.0])
    def test_monotone(self, alpha):
        inst = erfrelu(alpha)
        xs = np.linspace(-8, 8, 4001)
        xs = xs[np.abs(xs) >= 1e-3]
        assert np.all(act.derivative_batch(inst, xs) > 0)
        assert np.all(np.diff(act.forward_batch(inst, np.linspace(-4, 6, 4001))) > 0)
        # erf rounds to -1 in float64 below about -5.9, so only non-decreasing there
        assert np.all(np.diff(act.forward_batch(inst, np.linspace(-50, 6, 4001))) >= 0)

    def test_bounded_below(self):
        inst = erfrelu()
        xs = np.linspace(-5.5, 50, 10001)
        assert np.all(act.forward_batch(inst, xs) > -ALPHA)
        # further left the float64 value is exactly -alpha, never below it
        assert np.all(act.forward_batch(inst, np.linspace(-1e6, 0, 10001)) >= -ALPHA)
        assert abs(act.forward(inst, -8.0) - (-ALPHA)) <= 1e-12

    def test_unbounded_above(self):
        assert act.forward(erfrelu(), 1e6) == 1e6

    def test_negative_alpha_allowed(self):
        # no constraint on alpha; monotonicity is simply lost
        inst = erfrelu(-0.5)
        assert act.forward(inst, -1.0) > 0


class TestCollapses:
    GRID = np.linspace(-10, 10, 1000)

    def test_eswish_one_is_silu(self):
        a = act.forward_batch(act.make("eswish", beta=1.0), self.GRID)
        b = act.forward_batch(act.make("silu"), self.GRID)
        assert np.max(np.abs(a - b)) <= 1e-12

    def test_tanhlu_identity(self):
        out = act.forward_batch(act.make("tanhlu", alpha=0.0, beta=1.0), self.GRID)
        assert np.max(np.abs(out - self.GRID)) <= 1e-12

    def test_pserf_one_one_is_serf(self):
        a = act.forward_batch(act.make("pserf", gamma=1.0, delta=1.0), self.GRID)
        b = act.forward_batch(act.make("serf"), self.GRID)
        assert np.max(np.abs(a - b)) <= 1e-12

    def test_smish_unit_params_reduce_to_plain_form(self):
        x = self.GRID
        plain = x * np.tanh(np.log1p(1 / (1 + np.exp(-x))))
        out = act.forward_batch(act.make("smish", alpha=1.0, beta=1.0), x)
        assert np.max(np.abs(out - plain)) <= 1e-12


class TestSymmetries:
    def test_tanh_odd_derivative_even(self):
        t = act.make("tanh")
        assert np.array_equal(act.forward_batch(t, -GRID), -act.forward_batch(t, GRID))
        assert np.array_equal(act.derivative_batch(t, -GRID), act.derivative_batch(t, GRID))

    def test_lisht_even_derivative_odd(self):
        f = act.make("lisht")
        assert np.array_equal(act.forward_batch(f, -GRID), act.forward_batch(f, GRID))
        assert np.array_equal(act.derivative_batch(f, -GRID), -act.derivative_batch(f, GRID))

    def test_sigmoid_complement(self):
        s = act.make("sigmoid")
        total = act.forward_batch(s, GRID) + act.forward_batch(s, -GRID)
        assert np.max(np.abs(total - 1.0)) <= 1e-15


def test_saaf_bounded_by_alpha():
    inst = act.make("saaf")
    xs = np.linspace(-50, 50, 20001)
    assert np.all(np.abs(act.forward_batch(inst, xs)) <= inst.params["alpha"])
