"""Sliding-mode online learner.

Adapts every network parameter (centers, both widths, consequents, the
mixing weight ``q`` and the learning rate ``alpha`` itself) from the sign of
the identification error ``e = y_n - y``, smoothed to avoid chattering. One
call performs one explicit-Euler step of the continuous adaptation laws,
evaluated from a single frozen snapshot of the state.

Discrete-time safeguards on top of the continuous laws:

* denominators are floored at ``denom_guard`` (magnitude only for the signed
  mixing-weight denominator),
* widths are projected into ``[sigma_floor, sigma_cap]`` and re-ordered so
  the lower width never exceeds the upper one (the cubic width law escapes
  to zero or infinity in finite time under a sustained error sign, so both
  ends need a bound),
* ``q`` is clamped to [0, 1] and ``alpha`` to nonnegative values.

Every guard/projection event is counted in :class:`StepDiagnostics`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonFiniteUpdateError
from .network import NetworkState


@dataclass(frozen=True)
class SmcParams:
    """Gains and safeguards of the sliding-mode learner.

    ``gamma`` drives the learning-rate growth, ``nu`` its leakage reset
    (kept small so it does not interrupt adaptation). ``rho_ant`` scales
    the antecedent rate as a fraction of the consequent rate, reflecting
    the higher output sensitivity of the antecedent parameters. ``dt`` is
    the Euler step, equal to the sampling period of the identification
    loop.
    """

    gamma: float = 1.0
    nu: float = 0.5
    delta_s: float = 0.05
    rho_ant: float = 0.1
    denom_guard: float = 0.001
    dt: float = 0.001
    sigma_floor: float = 1e-3
    sigma_cap: float = 10.0
    alpha_init: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "nu", "delta_s", "rho_ant", "denom_guard",
                     "dt", "sigma_floor"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rho_ant > 1.0:
            raise ValueError("rho_ant must lie in (0, 1]")
        if self.sigma_cap <= self.sigma_floor:
            raise ValueError("sigma_cap must exceed sigma_floor")
        if self.alpha_init < 0.0:
            raise ValueError("alpha_init must be nonnegative")


@dataclass(frozen=True)
class StabilityBounds:
    """Assumed bounds on the identification signals, used only for the
    terminal error-band diagnostic.

    ``b_xdot`` bounds |dx/dt|, ``b_x2`` is the input-energy constant,
    ``b_ydot`` bounds |dy/dt| and ``b_a`` the consequent coefficients.
    ``alpha_star`` is the equilibrium learning rate, which must dominate
    ``2 (I b_a b_xdot + b_ydot) / (2 + I b_x2)``.
    """

    b_xdot: float
    b_x2: float
    b_ydot: float
    b_a: float
    alpha_star: float
    n_inputs: int = 3

    def __post_init__(self):
        for name in ("b_xdot", "b_x2", "b_ydot", "b_a", "alpha_star"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        lo = 2.0 * (self.n_inputs * self.b_a * self.b_xdot + self.b_ydot) \
            / (2.0 + self.n_inputs * self.b_x2)
        if self.alpha_star < lo:
            raise ValueError(f"alpha_star must be at least {lo:.6g} for these bounds")


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step bookkeeping emitted by the learners.

    ``k_r_residual`` is the worst-rule deviation of the closure identity
    tying the antecedent laws together (sum_i A_ik dA_ik/dt must equal
    I * alpha_ant * sign-surrogate); it is exactly zero up to rounding
    whenever no denominator guard engaged.
    """

    e: float
    k_r_residual: float
    q_saturated: bool
    denom_guard_hits: int
    sigma_projections: int
    degenerate_levels: int = 0


def smooth_sign(e: float, delta_s: float) -> float:
    """Continuous sign surrogate ``e / (|e| + delta_s)``.

    Odd in ``e``, bounded by 1 in magnitude, and equal to +/-0.5 at
    ``|e| = delta_s``.
    """
    if delta_s <= 0.0:
        raise ValueError("delta_s must be strictly positive")
    return float(_kernels.smooth_sign(float(e), float(delta_s)))


def smc_step(net: NetworkState, x, x_dot, y: float, params: SmcParams):
    """One sliding-mode adaptation step.

    Parameters
    ----------
    net : NetworkState
        Current state; not modified (a stepped copy is returned).
    x, x_dot : array-like, shape (n_inputs,)
        Input vector and the caller's estimate of its time derivative
        (typically a backward difference over ``params.dt``).
    y : float
        Measured target output for this sample.
    params : SmcParams

    Returns
    -------
    (NetworkState, StepDiagnostics)

    Raises
    ------
    NonFiniteUpdateError
        If any parameter leaves the finite range, which signals an Euler
        step too large for the current gains.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    x_dot = np.ascontiguousarray(x_dot, dtype=np.float64)
    if x.shape != (net.n_inputs,) or x_dot.shape != (net.n_inputs,):
        raise ValueError(f"x and x_dot must have shape ({net.n_inputs},)")

    new = net.copy()
    ws = _workspace(net)
    out = np.zeros(_kernels.OUT_SIZE)
    status = _kernels.smc_step(
        x, x_dot, float(y),
        new.centers, new.sigma_lower, new.sigma_upper, new.a, new.b,
        new.q, new.alpha, new.rule_index,
        params.gamma, params.nu, params.delta_s, params.rho_ant,
        params.denom_guard, params.dt, params.sigma_floor, params.sigma_cap,
        *ws, out)
    if status != _kernels.STATUS_OK:
        raise NonFiniteUpdateError(
            "sliding-mode step produced a non-finite parameter; reduce dt or the gains")
    new.q = float(out[_kernels.OUT_Q_NEW])
    new.alpha = float(out[_kernels.OUT_ALPHA_NEW])
    new.alpha_ant = float(out[_kernels.OUT_ALPHA_ANT])
    diag = StepDiagnostics(
        e=float(out[_kernels.OUT_E]),
        k_r_residual=float(out[_kernels.OUT_KR_RESIDUAL]),
        q_saturated=bool(out[_kernels.OUT_Q_SATURATED]),
        denom_guard_hits=int(out[_kernels.OUT_GUARD_HITS]),
        sigma_projections=int(out[_kernels.OUT_SIGMA_PROJECTIONS]),
        degenerate_levels=int(out[_kernels.OUT_DEGENERATE]),
    )
    return new, diag


def error_band(bounds: StabilityBounds, nu: float, n_inputs: int) -> float:
    """Theoretical terminal band for |e| under the leakage reset ``nu``.

    Returns ``alpha_star * nu / (2 * (2 + I * b_x2))``; zero leakage gives
    exact convergence, and the band grows linearly with ``nu``.
    """
    if nu < 0.0:
        raise ValueError("nu must be nonnegative")
    return bounds.alpha_star * nu / (2.0 * (2.0 + n_inputs * bounds.b_x2))


def _workspace(net):
    n = net.n_rules
    shape = net.centers.shape
    return (np.empty(shape), np.empty(shape), np.empty(n), np.empty(n),
            np.empty(n), np.empty(n), np.empty(n),
            np.empty(shape), np.empty(shape))
