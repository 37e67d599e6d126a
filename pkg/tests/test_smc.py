"""Sliding-mode learner: update laws, diagnostics, stability properties."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

import t2fnn
from t2fnn import (NetworkState, NonFiniteUpdateError, RuleConsequent,
                   SmcParams, StabilityBounds, Type2GaussianMF, error_band,
                   infer, smc_step, smooth_sign)

from conftest import draw_clear_input, make_random_network

GUARD_CLEARANCE = math.sqrt(0.001) * 1.1


def tiny_net(c=0.2, s_lo=0.4, s_up=0.8, a=0.3, b=0.1, q=0.6, alpha=0.8):
    mf = Type2GaussianMF(c, s_lo, s_up)
    return NetworkState.from_sets([[mf]], [RuleConsequent([a], b)],
                                  q=q, alpha=alpha)


# -- smooth sign ---------------------------------------------------------------

def test_smooth_sign_origin():
    assert smooth_sign(0.0, 0.05) == 0.0


def test_smooth_sign_half_at_width():
    assert smooth_sign(0.05, 0.05) == 0.5
    assert smooth_sign(-0.05, 0.05) == -0.5


def test_smooth_sign_odd_and_bounded():
    rng = np.random.default_rng(0)
    for _ in range(200):
        e = rng.uniform(-10, 10)
        d = rng.uniform(1e-4, 1.0)
        assert smooth_sign(-e, d) == -smooth_sign(e, d)
        assert abs(smooth_sign(e, d)) < 1.0


def test_smooth_sign_rejects_nonpositive_width():
    with pytest.raises(ValueError):
        smooth_sign(1.0, 0.0)


# -- single fully hand-checked step --------------------------------------------

def test_smc_step_hand_computed():
    net = tiny_net()
    params = SmcParams(gamma=2.0, nu=0.1, delta_s=0.05, rho_ant=0.25,
                       denom_guard=0.001, dt=0.01, sigma_floor=1e-3)
    x, x_dot, y = [0.7], [0.2], 0.11

    # single rule, q = 0.6: output equals the consequent 0.3*0.7 + 0.1
    # e = 0.31 - 0.11 = 0.2; s = 0.2/0.25 = 0.8; antecedent rate 0.25*0.8
    e, s, a_ant = 0.2, 0.8, 0.2
    d = 0.7 - 0.2
    c_exp = 0.2 + 0.01 * (0.2 + d * a_ant * s)
    slo_dot = -(0.4 + 0.4 ** 3 / d ** 2) * a_ant * s
    sup_dot = -(0.8 + 0.8 ** 3 / d ** 2) * a_ant * s
    a_exp = 0.3 + 0.01 * (-0.7 * 1.0 * 0.8 * s / 1.0)
    b_exp = 0.1 + 0.01 * (-1.0 * 0.8 * s / 1.0)
    alpha_exp = 0.8 + 0.01 * (2.0 * 3.0 * e - 0.1 * 2.0 * 0.8)

    new, diag = smc_step(net, x, x_dot, y, params)
    assert diag.e == pytest.approx(e, abs=1e-15)
    assert new.centers[0, 0] == pytest.approx(c_exp, rel=1e-14)
    assert new.sigma_lower[0, 0] == pytest.approx(0.4 + 0.01 * slo_dot, rel=1e-14)
    assert new.sigma_upper[0, 0] == pytest.approx(0.8 + 0.01 * sup_dot, rel=1e-14)
    assert new.a[0, 0] == pytest.approx(a_exp, rel=1e-14)
    assert new.b[0] == pytest.approx(b_exp, rel=1e-14)
    assert new.alpha == pytest.approx(alpha_exp, rel=1e-14)
    assert new.alpha_ant == pytest.approx(a_ant, rel=1e-15)
    # single rule: the mixing denominator is exactly zero -> guard + clamp
    assert diag.denom_guard_hits >= 1
    assert new.q == 0.0 and diag.q_saturated
    # closure identity holds exactly off the guard
    assert diag.k_r_residual < 1e-12
    assert diag.sigma_projections == 0


def test_smc_step_zero_error_only_leaks_alpha():
    # q = 0.5 single-rule net makes the output exactly the consequent value,
    # so a matching target gives e = 0 exactly
    net = tiny_net(q=0.5, alpha=0.7)
    params = SmcParams(gamma=1.5, nu=0.2, dt=0.01)
    x = [0.7]
    y = float(infer(net, x).y_n)
    new, diag = smc_step(net, x, [0.0], y, params)
    assert diag.e == 0.0
    assert_array_equal(new.centers, net.centers)
    assert_array_equal(new.sigma_lower, net.sigma_lower)
    assert_array_equal(new.sigma_upper, net.sigma_upper)
    assert_array_equal(new.a, net.a)
    assert_array_equal(new.b, net.b)
    assert new.q == net.q
    assert new.alpha == pytest.approx(0.7 * (1.0 - 0.01 * 0.2 * 1.5), rel=1e-15)


def test_smc_step_does_not_mutate_input_state():
    rng = np.random.default_rng(1)
    net = make_random_network(rng, alpha=0.5)
    before = net.copy()
    smc_step(net, rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3), 0.3, SmcParams())
    assert_array_equal(net.centers, before.centers)
    assert_array_equal(net.a, before.a)
    assert net.q == before.q and net.alpha == before.alpha


# -- closure identity -----------------------------------------------------------

def test_antecedent_closure_identity_random():
    # with the width-law denominator unguarded, every rule's summed A*dA/dt
    # equals n_inputs * antecedent_rate * sign-surrogate up to rounding
    rng = np.random.default_rng(2)
    params = SmcParams(gamma=1.0, nu=0.5)
    for _ in range(300):
        net = make_random_network(rng, alpha=rng.uniform(0.0, 2.0))
        x = draw_clear_input(rng, net, GUARD_CLEARANCE)
        x_dot = rng.uniform(-3, 3, size=3)
        y = infer(net, x).y_n - rng.uniform(-2, 2)
        _, diag = smc_step(net, x, x_dot, y, params)
        assert diag.k_r_residual < 1e-10


# -- update-direction contracts ---------------------------------------------------

def test_consequent_sign_contract():
    # each consequent offset moves against the error surrogate when its
    # mixed weight is positive
    rng = np.random.default_rng(3)
    params = SmcParams()
    for _ in range(100):
        net = make_random_network(rng, alpha=rng.uniform(0.1, 2.0))
        x = rng.uniform(-2, 2, size=3)
        y = infer(net, x).y_n - rng.uniform(-2, 2)
        new, diag = smc_step(net, x, np.zeros(3), y, params)
        s = smooth_sign(diag.e, params.delta_s)
        db = new.b - net.b
        cache = infer(net, x)
        g = net.q * cache.wt_lower + (1 - net.q) * cache.wt_upper
        assert np.all(db[g > 0] * s <= 1e-18)


def test_reduction_to_signum_laws():
    # with the antecedent rate equal to the consequent rate and a vanishing
    # smoothing width, the consequent updates match a direct transcription
    # of the signum-based laws
    rng = np.random.default_rng(4)
    delta = 1e-12
    params = SmcParams(gamma=1.0, nu=0.5, delta_s=delta, rho_ant=1.0, dt=0.001)
    for _ in range(100):
        net = make_random_network(rng, alpha=rng.uniform(0.1, 2.0))
        x = rng.uniform(-2, 2, size=3)
        cache = infer(net, x)
        y = cache.y_n - rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
        e = cache.y_n - y

        # independent transcription of the signum-based consequent laws
        g = net.q * cache.wt_lower + (1 - net.q) * cache.wt_upper
        denom = max(float(g @ g), params.denom_guard)
        sgn = np.sign(e)
        da_ref = params.dt * (-x[None, :] * g[:, None] * net.alpha * sgn / denom)
        db_ref = params.dt * (-g * net.alpha * sgn / denom)

        new, diag = smc_step(net, x, np.zeros(3), y, params)
        scale = abs(e) / (abs(e) + delta)  # smoothing factor, ~1 here
        # atol at the parameter quantization scale: applied deltas smaller
        # than one ulp of the parameter cannot be recovered by subtraction
        assert_allclose(new.a - net.a, da_ref * scale, rtol=1e-9, atol=1e-15)
        assert_allclose(new.b - net.b, db_ref * scale, rtol=1e-9, atol=1e-15)
        visible = np.abs(db_ref) > 1e-12
        assert np.all(np.sign(new.b - net.b)[visible] == (-sgn * np.sign(g))[visible])


# -- adaptive learning rate -------------------------------------------------------

def test_alpha_bounded_by_equilibrium():
    rng = np.random.default_rng(5)
    params = SmcParams(gamma=2.0, nu=0.4, dt=0.001)
    net = make_random_network(rng, alpha=0.0)
    max_abs_e = 0.0
    for k in range(2000):
        x = rng.uniform(-2, 2, size=3)
        y = rng.uniform(-2, 2)
        net, diag = smc_step(net, x, np.zeros(3), y, params)
        max_abs_e = max(max_abs_e, abs(diag.e))
        bound = max(0.0, (3 + 2) * max_abs_e / params.nu) + 1e-9
        assert 0.0 <= net.alpha <= bound


def test_alpha_never_negative():
    net = tiny_net(q=0.5, alpha=1e-9)
    params = SmcParams(gamma=100.0, nu=100.0, dt=0.01)
    x = [0.7]
    y = float(infer(net, x).y_n)  # e = 0: pure leakage
    for _ in range(50):
        net, _ = smc_step(net, x, [0.0], y, params)
    assert net.alpha >= 0.0


# -- safeguards --------------------------------------------------------------------

def test_sigma_projection_keeps_order_and_floor():
    rng = np.random.default_rng(6)
    params = SmcParams(dt=0.05, rho_ant=1.0)  # aggressive antecedent steps
    net = make_random_network(rng, alpha=2.0)
    total_proj = 0
    for _ in range(200):
        x = rng.uniform(-2, 2, size=3)
        y = infer(net, x).y_n - rng.uniform(-3, 3)
        net, diag = smc_step(net, x, rng.uniform(-1, 1, 3), y, params)
        total_proj += diag.sigma_projections
        assert np.all(net.sigma_lower >= params.sigma_floor)
        assert np.all(net.sigma_lower <= net.sigma_upper)
        assert 0.0 <= net.q <= 1.0
    assert total_proj > 0  # the projection path was actually exercised


def test_nonfinite_update_raises():
    net = tiny_net(alpha=1e308)
    params = SmcParams(dt=1.0)
    with pytest.raises(NonFiniteUpdateError):
        net2 = net
        for _ in range(50):
            net2, _ = smc_step(net2, [0.7], [0.0], -5.0, params)


def test_determinism_bit_identical():
    rng_a = np.random.default_rng(7)
    rng_b = np.random.default_rng(7)
    params = SmcParams()

    def run(rng):
        net = make_random_network(rng, alpha=0.3)
        for _ in range(100):
            x = rng.uniform(-2, 2, size=3)
            y = rng.uniform(-2, 2)
            net, _ = smc_step(net, x, np.zeros(3), y, params)
        return net

    na, nb = run(rng_a), run(rng_b)
    assert_array_equal(na.centers, nb.centers)
    assert_array_equal(na.sigma_lower, nb.sigma_lower)
    assert_array_equal(na.a, nb.a)
    assert na.q == nb.q and na.alpha == nb.alpha


# -- parameter validation and the error band -----------------------------------------

def test_smc_params_validation():
    with pytest.raises(ValueError):
        SmcParams(delta_s=-1.0)
    with pytest.raises(ValueError):
        SmcParams(gamma=0.0)
    with pytest.raises(ValueError):
        SmcParams(rho_ant=1.5)
    with pytest.raises(ValueError):
        SmcParams(alpha_init=-0.1)


def test_stability_bounds_invariant():
    StabilityBounds(b_xdot=1.0, b_x2=1.0, b_ydot=1.0, b_a=1.0, alpha_star=2.0)
    with pytest.raises(ValueError):
        StabilityBounds(b_xdot=1.0, b_x2=1.0, b_ydot=1.0, b_a=1.0, alpha_star=1.0)


def test_error_band_zero_leakage():
    bounds = StabilityBounds(b_xdot=1.0, b_x2=1.0, b_ydot=1.0, b_a=1.0,
                             alpha_star=2.0)
    assert error_band(bounds, 0.0, 3) == 0.0


def test_error_band_hand_value():
    bounds = StabilityBounds(b_xdot=0.1, b_x2=1.0, b_ydot=0.1, b_a=1.0,
                             alpha_star=1.0)
    assert error_band(bounds, 0.1, 3) == pytest.approx(0.1 / 10.0, rel=1e-15)


def test_error_band_monotone_in_leakage():
    bounds = StabilityBounds(b_xdot=0.1, b_x2=2.0, b_ydot=0.1, b_a=0.5,
                             alpha_star=1.0)
    bands = [error_band(bounds, nu, 3) for nu in (0.0, 0.1, 0.2, 0.5)]
    assert all(b1 < b2 for b1, b2 in zip(bands, bands[1:]))
