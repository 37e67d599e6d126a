"""Gradient-descent baseline learner.

Minimizes the instantaneous squared error 0.5 * (y_n - y)^2 by exact
analytic differentiation through the full inference chain (memberships,
product firing, normalization, mixing). Applied online, one sample per
step, with the same width/mixing projections as the sliding-mode learner
so that performance differences come from the update law alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonFiniteUpdateError
from .network import InferenceCache, NetworkState
from .smc import StepDiagnostics


@dataclass(frozen=True)
class GdParams:
    """Step sizes: ``eta`` for consequents and the mixing weight,
    ``eta_ant`` for the antecedent parameters. The width projection bounds
    match the sliding-mode learner's."""

    eta: float = 0.5
    eta_ant: float = 0.05
    sigma_floor: float = 1e-3
    sigma_cap: float = 10.0

    def __post_init__(self):
        if self.eta <= 0.0 or self.eta_ant <= 0.0:
            raise ValueError("step sizes must be strictly positive")
        if self.sigma_floor <= 0.0:
            raise ValueError("sigma_floor must be strictly positive")
        if self.sigma_cap <= self.sigma_floor:
            raise ValueError("sigma_cap must exceed sigma_floor")


@dataclass(frozen=True)
class GradientSet:
    """Exact partial derivatives of 0.5 * (y_n - y)^2 per parameter class."""

    centers: np.ndarray
    sigma_lower: np.ndarray
    sigma_upper: np.ndarray
    a: np.ndarray
    b: np.ndarray
    q: float
    e: float


def gd_gradients(net: NetworkState, cache: InferenceCache, x, y: float) -> GradientSet:
    """Analytic gradients at ``x`` given a forward-pass cache for ``x``.

    The consequent gradients are ``e * (q wt_lower + (1-q) wt_upper)``
    times the relevant input; antecedent gradients chain through the
    normalized firing levels. A degenerate (uniform-fallback) level
    contributes no antecedent gradient because its weights are constants.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    g_c = np.empty_like(net.centers)
    g_slo = np.empty_like(net.centers)
    g_sup = np.empty_like(net.centers)
    g_a = np.empty_like(net.a)
    g_b = np.empty_like(net.b)
    g_scalar = np.zeros(3)
    _kernels.gd_gradients(x, float(y), net.centers, net.sigma_lower,
                          net.sigma_upper, net.a, net.b, net.q,
                          net.rule_index,
                          cache.mu_lower, cache.mu_upper,
                          cache.w_lower, cache.w_upper,
                          cache.wt_lower, cache.wt_upper, cache.f,
                          g_c, g_slo, g_sup, g_a, g_b, g_scalar)
    return GradientSet(g_c, g_slo, g_sup, g_a, g_b,
                       q=float(g_scalar[0]), e=float(g_scalar[1]))


def gd_step(net: NetworkState, x, y: float, params: GdParams):
    """One online gradient step; returns ``(new_state, diagnostics)``.

    Raises :class:`NonFiniteUpdateError` as the sliding-mode learner does.
    The diagnostics reuse the shared per-step schema (the closure residual
    and guard counters are not applicable and read zero).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (net.n_inputs,):
        raise ValueError(f"x must have shape ({net.n_inputs},)")
    new = net.copy()
    n = net.n_rules
    shape = net.centers.shape
    out = np.zeros(_kernels.OUT_SIZE)
    status = _kernels.gd_step(
        x, float(y), new.centers, new.sigma_lower, new.sigma_upper,
        new.a, new.b, new.q, new.rule_index,
        params.eta, params.eta_ant, params.sigma_floor, params.sigma_cap,
        np.empty(shape), np.empty(shape), np.empty(n), np.empty(n),
        np.empty(n), np.empty(n), np.empty(n),
        np.empty(shape), np.empty(shape), np.empty(shape),
        np.empty((n, net.n_inputs)), np.empty(n), np.zeros(3), out)
    if status != _kernels.STATUS_OK:
        raise NonFiniteUpdateError(
            "gradient step produced a non-finite parameter; reduce eta")
    new.q = float(out[_kernels.OUT_Q_NEW])
    diag = StepDiagnostics(
        e=float(out[_kernels.OUT_E]),
        k_r_residual=0.0,
        q_saturated=bool(out[_kernels.OUT_Q_SATURATED]),
        denom_guard_hits=0,
        sigma_projections=int(out[_kernels.OUT_SIGMA_PROJECTIONS]),
        degenerate_levels=int(out[_kernels.OUT_DEGENERATE]),
    )
    return new, diag
