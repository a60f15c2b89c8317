"""Weight family: values, derivative, smoothness and growth envelopes."""
import numpy as np
import pytest

from pdscatter import DomainError, WeightSpec, weight_deriv, weight_eval
from pdscatter.weights import alt_cutoff, default_cutoff, xi_cutoff


@pytest.fixture(params=[(1, 0.3229, 2.0), (2, 0.3229, 2.0), (2, 0.25, 3.0), (1, 0.6, 0.7)])
def spec(request):
    order, cutoff, steepness = request.param
    return WeightSpec(order=order, cutoff=cutoff, steepness=steepness)


def test_zero_at_origin(spec):
    assert weight_eval(spec, 0.0) == 0.0


def test_one_at_cutoff_and_above(spec):
    assert weight_eval(spec, spec.cutoff) == 1.0
    assert weight_eval(spec, 1.0) == 1.0
    # continuity from below
    assert weight_eval(spec, spec.cutoff - 1e-9) == pytest.approx(1.0, abs=1e-6)


def test_closed_formula_spot_value():
    # direct evaluation of the closed formula at r = C/2 as the oracle
    import math

    C, K = 0.3229, 2.0
    for i in (1, 2):
        g = (1.0 - 0.25) ** (2 * i)
        oracle = (math.exp(-K * g) - math.exp(-K)) / (1.0 - math.exp(-K))
        spec = WeightSpec(order=i, cutoff=C, steepness=K)
        assert weight_eval(spec, C / 2.0) == pytest.approx(oracle, rel=1e-13)


def test_monotone_on_unit_interval(spec):
    r = np.linspace(0.0, 1.0, 2001)
    w = weight_eval(spec, r)
    assert np.all(np.diff(w) >= -1e-14)
    assert np.all((w >= 0.0) & (w <= 1.0))


def test_derivative_zero_outside_support(spec):
    assert weight_deriv(spec, 0.0) == 0.0
    assert weight_deriv(spec, spec.cutoff) == 0.0
    assert weight_deriv(spec, 1.0) == 0.0
    # C^1 matching: derivative vanishes approaching the cutoff
    assert weight_deriv(spec, spec.cutoff - 1e-7) == pytest.approx(0.0, abs=1e-4)


def test_derivative_matches_finite_differences(spec):
    # central differences of weight_eval as the independent oracle
    h = 1e-7
    for r in np.arange(0.05, 0.96, 0.05):
        if abs(r - spec.cutoff) < 2 * h:
            continue
        fd = (weight_eval(spec, min(r + h, 1.0)) - weight_eval(spec, max(r - h, 0.0))) / (2 * h)
        an = weight_deriv(spec, r)
        assert an == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_derivative_nonnegative(spec):
    r = np.linspace(0.0, 1.0, 1001)
    assert np.all(weight_deriv(spec, r) >= 0.0)


def test_derivative_lipschitz_stable_under_refinement(spec):
    def emp_lipschitz(n):
        r = np.linspace(0.0, 1.0, n)
        d = weight_deriv(spec, r)
        return np.max(np.abs(np.diff(d)) / np.diff(r))

    l1, l2 = emp_lipschitz(10_000), emp_lipschitz(20_000)
    assert np.isfinite(l1) and np.isfinite(l2)
    assert l2 <= 1.25 * l1 + 1e-9


def test_near_zero_growth_envelope(spec):
    # the breakdown-point results require w_i(r) <= M_i r^i near 0
    i = spec.order
    r = np.linspace(1e-6, 0.1 * spec.cutoff, 200)
    w = weight_eval(spec, r)
    ratio = w / r**i
    assert np.all(np.isfinite(ratio))
    assert ratio.max() < 1e3  # finite envelope constant


def test_tiny_depth_no_cancellation():
    spec = WeightSpec(order=2, cutoff=0.3229, steepness=2.0)
    w = weight_eval(spec, 1e-16)
    assert w > 0.0
    assert w < 1e-25  # quadratic leading order, not float noise


def test_domain_errors():
    spec = WeightSpec(order=2, cutoff=0.5, steepness=1.0)
    with pytest.raises(DomainError):
        weight_eval(spec, -0.1)
    with pytest.raises(DomainError):
        weight_eval(spec, 1.1)
    with pytest.raises(DomainError):
        WeightSpec(order=3, cutoff=0.5, steepness=1.0)
    with pytest.raises(DomainError):
        WeightSpec(order=1, cutoff=1.5, steepness=1.0)
    with pytest.raises(DomainError):
        WeightSpec(order=1, cutoff=0.5, steepness=0.0)


def test_cutoff_families():
    # oracle: 1/(1 + sqrt(2)/Phi^{-1}(3/4)) evaluated independently
    from scipy import stats
    oracle = 1.0 / (1.0 + np.sqrt(2.0) / stats.norm.ppf(0.75))
    assert default_cutoff(2) == pytest.approx(oracle, abs=1e-12)
    assert default_cutoff(2) == pytest.approx(0.3229227, abs=1e-7)
    assert alt_cutoff(2) == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert xi_cutoff(10, 0.9) == pytest.approx(0.25, abs=1e-12)
