import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import becflow.params as params_mod
from becflow.params import (
    ModelParameters,
    check_admissibility,
    compute_nstar,
    cubic_residual,
    kappa_upper_bound,
)


def test_nstar_matches_published_value():
    # stated to four decimals: 1.5361...
    assert abs(compute_nstar() - 1.5361) < 5e-5


def test_nstar_residual_below_tolerance():
    assert abs(cubic_residual(compute_nstar())) < 1e-12


def test_nstar_bracket_signs():
    # evaluate the cubic by hand: 1+5+16-40 and 8+20+32-40
    assert cubic_residual(1.0) == -18.0
    assert cubic_residual(2.0) == 20.0


def test_nstar_idempotent_and_deterministic():
    first = compute_nstar()
    params_mod._NSTAR_CACHE = None
    assert compute_nstar() == first
    assert compute_nstar() == first


def test_kappa_upper_bound_physical_point():
    # direct substitution: min{1.75, 0.5, 1.5, 0.5} = 0.5, exact in floats
    p = ModelParameters(n=2.0, alpha=6.5, beta=0.5, kappa=0.0)
    assert kappa_upper_bound(p) == 0.5


def test_kappa_upper_bound_second_point():
    # min{1.75, 0.5, 1.75, 0.875} = 0.5
    p = ModelParameters(n=2.0, alpha=6.5, beta=0.75, kappa=0.0)
    assert kappa_upper_bound(p) == 0.5


def test_kappa_upper_bound_rejects_n_zero():
    p = ModelParameters(n=0.0, alpha=6.5, beta=0.5)
    with pytest.raises(ValueError):
        kappa_upper_bound(p)


@given(
    n=st.floats(1.6, 2.9),
    alpha=st.floats(3.1, 20.0),
    beta=st.floats(-0.9, 5.0),
)
@settings(max_examples=200, deadline=None)
def test_kappa_upper_bound_never_exceeds_first_term(n, alpha, beta):
    p = ModelParameters(n=n, alpha=alpha, beta=beta)
    assert kappa_upper_bound(p) <= (alpha - 3.0) / 2.0


def test_blowup_admissible_physical(physical):
    report = check_admissibility(physical, mode="blowup")
    assert report.blowup_ok
    assert report.existence_ok
    assert report.violated == []
    assert report.kappa_max == 0.5
    # the beta window at (n=2, alpha=13/2) is (1/6, 3/4]
    lo = (physical.alpha - physical.n - 4.0) / (physical.n + 1.0)
    hi = (physical.alpha - physical.n - 3.0) / physical.n
    assert math.isclose(lo, 1.0 / 6.0)
    assert math.isclose(hi, 0.75)


def test_subcritical_n_fails_existence():
    p = ModelParameters(n=1.0, alpha=6.5, beta=0.5, gamma=0.0, kappa=0.4)
    report = check_admissibility(p, mode="existence")
    assert not report.existence_ok
    assert any("n in" in name for name, _ in report.violated)


def test_alpha_below_blowup_window_named():
    p = ModelParameters(n=2.0, alpha=5.9, beta=0.5, gamma=0.0, kappa=0.4)
    report = check_admissibility(p, mode="blowup")
    assert not report.blowup_ok
    assert any(name == "alpha > n+4" for name, _ in report.violated)


def test_beta_closed_right_endpoint_accepted():
    # beta = (alpha-n-3)/n is inside the window (closed end)
    p = ModelParameters(n=2.0, alpha=6.5, beta=0.75, gamma=0.0, kappa=0.4)
    assert check_admissibility(p, mode="blowup").blowup_ok


def test_kappa_at_or_above_cap_rejected():
    for kappa in (0.5, 0.6):
        p = ModelParameters(n=2.0, alpha=6.5, beta=0.5, gamma=0.0, kappa=kappa)
        report = check_admissibility(p, mode="blowup")
        assert not report.blowup_ok
        assert any("kappa" in name for name, _ in report.violated)


def test_gamma_optional_in_blowup_mode():
    p = ModelParameters(n=2.0, alpha=6.5, beta=0.5, gamma=None, kappa=0.4)
    report = check_admissibility(p, mode="blowup")
    assert report.blowup_ok
    assert not report.existence_ok  # existence needs gamma


def test_random_blowup_admissible_have_positive_kappa_room(rng):
    # the four kappa caps can be met simultaneously throughout the window
    nstar = compute_nstar()
    for _ in range(1000):
        n = rng.uniform(nstar + 1e-6, 3.0 - 1e-9)
        alpha = rng.uniform(n + 4.0 + 1e-9, n + 9.0)
        lo = (alpha - n - 4.0) / (n + 1.0)
        hi = (alpha - n - 3.0) / n
        beta = rng.uniform(lo + 1e-12 * (1 + abs(lo)), hi)
        p = ModelParameters(n=n, alpha=alpha, beta=beta)
        kmax = kappa_upper_bound(p)
        assert kmax > 0.0
        p2 = ModelParameters(n=n, alpha=alpha, beta=beta, gamma=None, kappa=0.5 * kmax)
        assert check_admissibility(p2, mode="blowup").blowup_ok


def test_model_parameter_type_invariants():
    with pytest.raises(ValueError):
        ModelParameters(n=2.0, alpha=6.5, beta=0.5, length=0.0)
    with pytest.raises(ValueError):
        ModelParameters(n=2.0, alpha=6.5, beta=0.5, length=1.0, epsilon=0.8)
    with pytest.raises(ValueError):
        ModelParameters(n=2.0, alpha=6.5, beta=0.5, kappa=-0.1)
    # epsilon = 0 denotes the formal limit problem and is allowed
    ModelParameters(n=2.0, alpha=6.5, beta=0.5, epsilon=0.0)


def test_check_admissibility_rejects_unknown_mode(physical):
    with pytest.raises(ValueError):
        check_admissibility(physical, mode="both")
