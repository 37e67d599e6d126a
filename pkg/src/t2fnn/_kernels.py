"""Compiled numeric kernels.

Every arithmetic path of the package (inference, sliding-mode updates,
gradient updates) is implemented exactly once in this module and wrapped by
the public API. Keeping a single compiled implementation makes trajectories
bit-reproducible across the library, the experiment harness and the CLI.

All kernels are single-threaded, allocation-free and operate on caller-owned
float64/int64 arrays. ``error_model="numpy"`` gives IEEE semantics (inf/nan
propagate instead of raising), which the non-finite status check relies on.
"""

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_NONFINITE = 1

# smallest firing-strength sum treated as non-degenerate
DEGENERATE_EPS = 1e-300

# diagnostic slot layout for the step kernels' ``out`` array
OUT_Y_N = 0
OUT_E = 1
OUT_Q_NEW = 2
OUT_ALPHA_NEW = 3
OUT_ALPHA_ANT = 4
OUT_KR_RESIDUAL = 5
OUT_GUARD_HITS = 6
OUT_SIGMA_PROJECTIONS = 7
OUT_Q_SATURATED = 8
OUT_DEGENERATE = 9
OUT_SIZE = 10


@njit(cache=True, error_model="numpy")
def gauss_pair(x, center, sigma_lower, sigma_upper):
    """Lower/upper Gaussian membership degrees of one uncertain-width set."""
    d2 = (x - center) * (x - center)
    mu_lo = np.exp(-0.5 * d2 / (sigma_lower * sigma_lower))
    mu_up = np.exp(-0.5 * d2 / (sigma_upper * sigma_upper))
    return mu_lo, mu_up


@njit(cache=True, error_model="numpy")
def memberships(x, centers, sig_lo, sig_up, mu_lo, mu_up):
    """Fill the (inputs x sets) membership grids for one input vector."""
    n_in, n_mf = centers.shape
    for i in range(n_in):
        for k in range(n_mf):
            mu_lo[i, k], mu_up[i, k] = gauss_pair(
                x[i], centers[i, k], sig_lo[i, k], sig_up[i, k]
            )


@njit(cache=True, error_model="numpy")
def firing(mu_lo, mu_up, rule_idx, w_lo, w_up):
    """Product-t-norm rule firing strengths from the membership grids."""
    n_rules, n_in = rule_idx.shape
    for r in range(n_rules):
        lo = 1.0
        up = 1.0
        for i in range(n_in):
            k = rule_idx[r, i]
            lo *= mu_lo[i, k]
            up *= mu_up[i, k]
        w_lo[r] = lo
        w_up[r] = up


@njit(cache=True, error_model="numpy")
def normalize(w, out):
    """Normalize ``w`` into ``out``; returns 1 and uniform weights when the
    total firing is numerically zero (degenerate), else 0."""
    n = w.shape[0]
    total = 0.0
    for r in range(n):
        total += w[r]
    if total < DEGENERATE_EPS:
        u = 1.0 / n
        for r in range(n):
            out[r] = u
        return 1
    for r in range(n):
        out[r] = w[r] / total
    return 0


@njit(cache=True, error_model="numpy")
def rule_outputs(x, a, b, f):
    """Affine consequent value of every rule."""
    n_rules, n_in = a.shape
    for r in range(n_rules):
        v = b[r]
        for i in range(n_in):
            v += a[r, i] * x[i]
        f[r] = v


@njit(cache=True, error_model="numpy")
def infer(x, centers, sig_lo, sig_up, a, b, q, rule_idx,
          mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f):
    """Full forward pass; fills all cache arrays.

    Returns (y_n, degenerate_count) where the count is the number of firing
    levels (0..2) that fell back to uniform weights.
    """
    memberships(x, centers, sig_lo, sig_up, mu_lo, mu_up)
    firing(mu_lo, mu_up, rule_idx, w_lo, w_up)
    degen = normalize(w_lo, wt_lo)
    degen += normalize(w_up, wt_up)
    rule_outputs(x, a, b, f)
    n_rules = f.shape[0]
    y_lo = 0.0
    y_up = 0.0
    for r in range(n_rules):
        y_lo += f[r] * wt_lo[r]
        y_up += f[r] * wt_up[r]
    return q * y_lo + (1.0 - q) * y_up, degen


@njit(cache=True, error_model="numpy")
def smooth_sign(e, delta_s):
    """Chattering-free sign surrogate e / (|e| + delta_s)."""
    return e / (abs(e) + delta_s)


@njit(cache=True, error_model="numpy")
def _all_finite(centers, sig_lo, sig_up, a, b, q, alpha):
    n_in, n_mf = centers.shape
    for i in range(n_in):
        for k in range(n_mf):
            if not (np.isfinite(centers[i, k]) and np.isfinite(sig_lo[i, k])
                    and np.isfinite(sig_up[i, k])):
                return False
    n_rules = b.shape[0]
    for r in range(n_rules):
        if not np.isfinite(b[r]):
            return False
        for i in range(n_in):
            if not np.isfinite(a[r, i]):
                return False
    return np.isfinite(q) and np.isfinite(alpha)


@njit(cache=True, error_model="numpy")
def smc_step(x, x_dot, y, centers, sig_lo, sig_up, a, b, q, alpha, rule_idx,
             gamma, nu, delta_s, rho_ant, denom_guard, dt, sigma_floor,
             sigma_cap, mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f,
             aad_lo, aad_up, out):
    """One explicit-Euler step of the sliding-mode adaptation laws.

    Mutates the parameter arrays in place; the new mixing weight and adaptive
    rate are returned through ``out`` (scalars cannot be mutated). All update
    laws are evaluated from a single frozen snapshot of the state and the
    inference cache. ``aad_lo``/``aad_up`` receive the per-set products
    A_ik * dA_ik/dt used for the closure-identity residual diagnostic.

    Widths are projected into [sigma_floor, sigma_cap] and re-ordered after
    the Euler step; the cubic width law has finite-time escape to infinity
    under a sustained error sign, so the ceiling is as necessary in discrete
    time as the floor.
    """
    n_in, n_mf = centers.shape
    n_rules = rule_idx.shape[0]

    y_n, degen = infer(x, centers, sig_lo, sig_up, a, b, q, rule_idx,
                       mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f)
    e = y_n - y
    if not np.isfinite(e):
        return STATUS_NONFINITE
    s = smooth_sign(e, delta_s)
    alpha_ant = rho_ant * alpha

    guard_hits = 0.0
    projections = 0.0

    # antecedents: centers track the input velocity plus an error-driven pull,
    # widths contract/expand against the error sign
    for i in range(n_in):
        xd = x_dot[i]
        for k in range(n_mf):
            c_old = centers[i, k]
            slo_old = sig_lo[i, k]
            sup_old = sig_up[i, k]
            d = x[i] - c_old
            d2 = d * d
            d2g = d2
            if d2g < denom_guard:
                d2g = denom_guard
                guard_hits += 1.0

            c_dot = xd + d * alpha_ant * s
            slo_dot = -(slo_old + slo_old * slo_old * slo_old / d2g) * alpha_ant * s
            sup_dot = -(sup_old + sup_old * sup_old * sup_old / d2g) * alpha_ant * s

            # continuous-time closure diagnostic, evaluated before the Euler
            # discretization and the width projection
            a_lo = d / slo_old
            a_up = d / sup_old
            ad_lo = (xd - c_dot) / slo_old - d * slo_dot / (slo_old * slo_old)
            ad_up = (xd - c_dot) / sup_old - d * sup_dot / (sup_old * sup_old)
            aad_lo[i, k] = a_lo * ad_lo
            aad_up[i, k] = a_up * ad_up

            centers[i, k] = c_old + dt * c_dot
            slo_new = slo_old + dt * slo_dot
            sup_new = sup_old + dt * sup_dot
            if slo_new < sigma_floor:
                slo_new = sigma_floor
                projections += 1.0
            if sup_new < sigma_floor:
                sup_new = sigma_floor
                projections += 1.0
            if slo_new > sigma_cap:
                slo_new = sigma_cap
                projections += 1.0
            if sup_new > sigma_cap:
                sup_new = sigma_cap
                projections += 1.0
            if slo_new > sup_new:
                tmp = slo_new
                slo_new = sup_new
                sup_new = tmp
                projections += 1.0
            sig_lo[i, k] = slo_new
            sig_up[i, k] = sup_new

    # closure residual: each rule's summed A*dA must equal n_in*alpha_ant*s
    target = n_in * alpha_ant * s
    residual = 0.0
    for r in range(n_rules):
        k_lo = 0.0
        k_up = 0.0
        for i in range(n_in):
            k = rule_idx[r, i]
            k_lo += aad_lo[i, k]
            k_up += aad_up[i, k]
        dev = abs(k_lo - target)
        if dev > residual:
            residual = dev
        dev = abs(k_up - target)
        if dev > residual:
            residual = dev

    # consequents: shared squared-norm denominator over the mixed weights
    denom = 0.0
    for r in range(n_rules):
        g = q * wt_lo[r] + (1.0 - q) * wt_up[r]
        denom += g * g
    if denom < denom_guard:
        denom = denom_guard
        guard_hits += 1.0
    coef = alpha * s / denom
    for r in range(n_rules):
        g = q * wt_lo[r] + (1.0 - q) * wt_up[r]
        for i in range(n_in):
            a[r, i] += dt * (-x[i] * g * coef)
        b[r] += dt * (-g * coef)

    # mixing weight: signed denominator, magnitude floored preserving sign
    # (exact zero is treated as positive)
    d_q = 0.0
    for r in range(n_rules):
        d_q += f[r] * (wt_lo[r] - wt_up[r])
    if abs(d_q) < denom_guard:
        d_q = denom_guard if d_q >= 0.0 else -denom_guard
        guard_hits += 1.0
    q_new = q + dt * (-alpha * s / d_q)
    q_sat = 0.0
    if q_new < 0.0:
        q_new = 0.0
        q_sat = 1.0
    elif q_new > 1.0:
        q_new = 1.0
        q_sat = 1.0

    # adaptive learning rate: growth on |e| with leakage reset
    alpha_new = alpha + dt * (gamma * (n_in + 2.0) * abs(e) - nu * gamma * alpha)
    if alpha_new < 0.0:
        alpha_new = 0.0

    out[OUT_Y_N] = y_n
    out[OUT_E] = e
    out[OUT_Q_NEW] = q_new
    out[OUT_ALPHA_NEW] = alpha_new
    out[OUT_ALPHA_ANT] = alpha_ant
    out[OUT_KR_RESIDUAL] = residual
    out[OUT_GUARD_HITS] = guard_hits
    out[OUT_SIGMA_PROJECTIONS] = projections
    out[OUT_Q_SATURATED] = q_sat
    out[OUT_DEGENERATE] = degen

    if not _all_finite(centers, sig_lo, sig_up, a, b, q_new, alpha_new):
        return STATUS_NONFINITE
    return STATUS_OK


@njit(cache=True, error_model="numpy")
def gd_gradients(x, y, centers, sig_lo, sig_up, a, b, q, rule_idx,
                 mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f,
                 g_c, g_slo, g_sup, g_a, g_b, g_scalar):
    """Analytic gradients of the squared-error loss 0.5*(y_n - y)^2.

    The cache arrays must already hold a forward pass for ``x``. Gradients
    are written to the ``g_*`` arrays; ``g_scalar`` receives
    [dE/dq, e, y_n]. Degenerate (uniform-fallback) firing levels contribute
    no antecedent gradient, matching the constant weights actually used.
    """
    n_in, n_mf = centers.shape
    n_rules = rule_idx.shape[0]

    s_lo = 0.0
    s_up = 0.0
    y_lo = 0.0
    y_up = 0.0
    for r in range(n_rules):
        s_lo += w_lo[r]
        s_up += w_up[r]
        y_lo += f[r] * wt_lo[r]
        y_up += f[r] * wt_up[r]
    y_n = q * y_lo + (1.0 - q) * y_up
    e = y_n - y

    for r in range(n_rules):
        g = q * wt_lo[r] + (1.0 - q) * wt_up[r]
        g_b[r] = e * g
        for i in range(n_in):
            g_a[r, i] = e * x[i] * g
    g_scalar[0] = e * (y_lo - y_up)
    g_scalar[1] = e
    g_scalar[2] = y_n

    # accumulate dy/dw * w per membership cell; division by mu is avoided by
    # folding d(w)/d(mu) * d(mu)/d(theta) = w * d(log mu)/d(theta)
    for i in range(n_in):
        for k in range(n_mf):
            g_c[i, k] = 0.0
            g_slo[i, k] = 0.0
            g_sup[i, k] = 0.0
    lo_ok = s_lo >= DEGENERATE_EPS
    up_ok = s_up >= DEGENERATE_EPS
    for r in range(n_rules):
        p_lo = q * (f[r] - y_lo) / s_lo if lo_ok else 0.0
        p_up = (1.0 - q) * (f[r] - y_up) / s_up if up_ok else 0.0
        u_lo = p_lo * w_lo[r]
        u_up = p_up * w_up[r]
        for i in range(n_in):
            k = rule_idx[r, i]
            d = x[i] - centers[i, k]
            slo = sig_lo[i, k]
            sup = sig_up[i, k]
            g_c[i, k] += e * d * (u_lo / (slo * slo) + u_up / (sup * sup))
            g_slo[i, k] += e * u_lo * d * d / (slo * slo * slo)
            g_sup[i, k] += e * u_up * d * d / (sup * sup * sup)


@njit(cache=True, error_model="numpy")
def gd_step(x, y, centers, sig_lo, sig_up, a, b, q, rule_idx,
            eta, eta_ant, sigma_floor, sigma_cap,
            mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f,
            g_c, g_slo, g_sup, g_a, g_b, g_scalar, out):
    """One online gradient-descent step with the same width/mixing
    projections as the sliding-mode learner."""
    n_in, n_mf = centers.shape
    n_rules = rule_idx.shape[0]

    y_n, degen = infer(x, centers, sig_lo, sig_up, a, b, q, rule_idx,
                       mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f)
    e = y_n - y
    if not np.isfinite(e):
        return STATUS_NONFINITE
    gd_gradients(x, y, centers, sig_lo, sig_up, a, b, q, rule_idx,
                 mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f,
                 g_c, g_slo, g_sup, g_a, g_b, g_scalar)

    projections = 0.0
    for i in range(n_in):
        for k in range(n_mf):
            centers[i, k] -= eta_ant * g_c[i, k]
            slo_new = sig_lo[i, k] - eta_ant * g_slo[i, k]
            sup_new = sig_up[i, k] - eta_ant * g_sup[i, k]
            if slo_new < sigma_floor:
                slo_new = sigma_floor
                projections += 1.0
            if sup_new < sigma_floor:
                sup_new = sigma_floor
                projections += 1.0
            if slo_new > sigma_cap:
                slo_new = sigma_cap
                projections += 1.0
            if sup_new > sigma_cap:
                sup_new = sigma_cap
                projections += 1.0
            if slo_new > sup_new:
                tmp = slo_new
                slo_new = sup_new
                sup_new = tmp
                projections += 1.0
            sig_lo[i, k] = slo_new
            sig_up[i, k] = sup_new
    for r in range(n_rules):
        b[r] -= eta * g_b[r]
        for i in range(n_in):
            a[r, i] -= eta * g_a[r, i]

    q_new = q - eta * g_scalar[0]
    q_sat = 0.0
    if q_new < 0.0:
        q_new = 0.0
        q_sat = 1.0
    elif q_new > 1.0:
        q_new = 1.0
        q_sat = 1.0

    out[OUT_Y_N] = y_n
    out[OUT_E] = e
    out[OUT_Q_NEW] = q_new
    out[OUT_ALPHA_NEW] = eta
    out[OUT_ALPHA_ANT] = eta_ant
    out[OUT_KR_RESIDUAL] = 0.0
    out[OUT_GUARD_HITS] = 0.0
    out[OUT_SIGMA_PROJECTIONS] = projections
    out[OUT_Q_SATURATED] = q_sat
    out[OUT_DEGENERATE] = degen

    if not _all_finite(centers, sig_lo, sig_up, a, b, q_new, eta):
        return STATUS_NONFINITE
    return STATUS_OK
