"""Shared fixtures and independent oracles.

The oracles here are deliberately separate implementations (plain numpy,
different operation order) of the quantities the library computes, so that
agreement is meaningful.
"""

import math

import numpy as np
import pytest

from t2fnn.network import NetworkState, rule_grid


def make_random_network(rng, n_inputs=3, n_mfs=3, degenerate_fou=False,
                        q=None, alpha=0.0, sigma_gap=0.0):
    """Random valid network with centers in [-2, 2] and widths in [0.3, 1.5].

    ``degenerate_fou`` collapses the width interval (lower == upper).
    ``sigma_gap`` forces sigma_upper >= sigma_lower * (1 + gap), which keeps
    finite-difference perturbations inside the valid region.
    """
    centers = rng.uniform(-2.0, 2.0, size=(n_inputs, n_mfs))
    sig_lo = rng.uniform(0.3, 1.2, size=(n_inputs, n_mfs))
    if degenerate_fou:
        sig_up = sig_lo.copy()
    else:
        sig_up = sig_lo * rng.uniform(1.0 + sigma_gap, 2.0, size=(n_inputs, n_mfs))
    n_rules = n_mfs ** n_inputs
    a = rng.uniform(-1.0, 1.0, size=(n_rules, n_inputs))
    b = rng.uniform(-1.0, 1.0, size=n_rules)
    if q is None:
        q = rng.uniform(0.0, 1.0)
    return NetworkState(centers, sig_lo, sig_up, a, b, q=float(q), alpha=alpha)


def draw_clear_input(rng, net, clearance, lo=-2.5, hi=2.5, max_tries=1000):
    """Input vector keeping |x_i - c_ik| >= clearance for every set, so the
    width-law denominator guard stays inactive."""
    for _ in range(max_tries):
        x = rng.uniform(lo, hi, size=net.n_inputs)
        ok = True
        for i in range(net.n_inputs):
            k = net.mf_counts[i]
            if np.min(np.abs(x[i] - net.centers[i, :k])) < clearance:
                ok = False
                break
        if ok:
            return x
    raise RuntimeError("could not sample a guard-clear input")


def type1_tsk_output(centers, sigmas, a, b, rule_idx, x):
    """Independent type-1 TSK forward pass (vectorized numpy)."""
    x = np.asarray(x, dtype=float)
    mu = np.exp(-0.5 * ((x[:, None] - centers) / sigmas) ** 2)
    rows = np.arange(len(x))[None, :]
    w = np.prod(mu[rows, rule_idx], axis=1)
    wt = w / w.sum()
    f = a @ x + b
    return float(np.dot(f, wt))


def type1_tsk_gradients(centers, sigmas, a, b, rule_idx, x, y):
    """Independent analytic gradients of 0.5*(out - y)^2 for a type-1 TSK
    network (chain rule written out directly)."""
    x = np.asarray(x, dtype=float)
    n_in, n_mf = centers.shape
    mu = np.exp(-0.5 * ((x[:, None] - centers) / sigmas) ** 2)
    rows = np.arange(n_in)[None, :]
    w = np.prod(mu[rows, rule_idx], axis=1)
    s = w.sum()
    wt = w / s
    f = a @ x + b
    out = float(np.dot(f, wt))
    e = out - y

    g_b = e * wt
    g_a = e * wt[:, None] * x[None, :]
    # dout/dw_r = (f_r - out) / s; dw_r/dmu_ik = w_r / mu_ik on matching sets
    dout_dw = (f - out) / s
    g_c = np.zeros_like(centers)
    g_s = np.zeros_like(centers)
    for r in range(len(w)):
        for i in range(n_in):
            k = rule_idx[r, i]
            d = x[i] - centers[i, k]
            g_c[i, k] += e * dout_dw[r] * w[r] * d / sigmas[i, k] ** 2
            g_s[i, k] += e * dout_dw[r] * w[r] * d * d / sigmas[i, k] ** 3
    return {"c": g_c, "sigma": g_s, "a": g_a, "b": g_b, "e": e, "out": out}


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numeric kernels once before any timed test runs."""
    import t2fnn
    from t2fnn.gradient import GdParams, gd_step
    from t2fnn.smc import SmcParams, smc_step

    rng = np.random.default_rng(0)
    net = make_random_network(rng, n_inputs=2, n_mfs=2)
    x = np.zeros(2)
    t2fnn.infer(net, x)
    t2fnn.normalize(np.ones(4))
    t2fnn.firing_strengths(net, x)
    t2fnn.rule_outputs(net, x)
    smc_step(net, x, x, 0.1, SmcParams())
    gd_step(net, x, 0.1, GdParams())
    cache = t2fnn.infer(net, x)
    t2fnn.gd_gradients(net, cache, x, 0.1)
