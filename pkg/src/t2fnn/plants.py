"""Benchmark plants for online identification.

Two discrete-time single-input single-output plants:

* a non-BIBO nonlinear plant whose output stays bounded only for part of
  the bounded-input range (constant inputs slightly above ~0.82 blow up),
  excited by a decaying sinusoid, and
* a second-order nonlinear plant with periodically time-varying
  coefficients.

Both start from all-zero output history and step deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DivergedError

# |y| beyond this sentinel is reported as divergence
DIVERGENCE_LIMIT = 1e6

DEFAULT_SAMPLING_PERIOD = 0.001
DEFAULT_TV_PERIOD = 1000


@dataclass
class PlantState:
    """Output history (most recent first), last input and step counter."""

    history: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    u_prev: float = 0.0
    k: int = 0
    t_o: float = DEFAULT_SAMPLING_PERIOD

    def __post_init__(self):
        if len(self.history) < 3:
            self.history = list(self.history) + [0.0] * (3 - len(self.history))

    def push(self, y_new: float, u: float):
        self.history = [y_new] + self.history[:2]
        self.u_prev = u
        self.k += 1


def step_nonbibo(state: PlantState, u: float) -> float:
    """Advance the non-BIBO plant one step with input ``u``.

    The new output is a quadratic/delayed/sinusoidal combination of the two
    most recent outputs plus a linear input term. Raises
    :class:`DivergedError` past the divergence sentinel, which is the
    expected outcome for inputs outside the bounded range.
    """
    y1, y2 = state.history[0], state.history[1]
    half_sum = 0.5 * (y1 + y2)
    y_new = (0.2 * y1 * y1 + 0.2 * y2
             + 0.4 * math.sin(half_sum) * math.cos(half_sum)
             + 1.2 * u)
    if not abs(y_new) <= DIVERGENCE_LIMIT:
        raise DivergedError(state.k, abs(y_new))
    state.push(y_new, u)
    return y_new


def input_ex1(k: int, t_o: float = DEFAULT_SAMPLING_PERIOD, phase: float = 0.0) -> float:
    """Decaying-sinusoid excitation ``0.5 exp(-0.1 k t_o) sin(5 k t_o + phase)``.

    Bounded by 0.5 in magnitude for any step. The phase offset selects an
    independent test excitation from the same family.
    """
    t = k * t_o
    return 0.5 * math.exp(-0.1 * t) * math.sin(5.0 * t + phase)


def step_timevarying(state: PlantState, u: float, period: int = DEFAULT_TV_PERIOD) -> float:
    """Advance the time-varying plant one step with input ``u``.

    The output mixes a cubic history/input product against a denominator
    ``a(k) + y(k-2)^2 + y(k-3)^2`` whose periodic coefficient ``a(k)``
    never drops below 1, so the denominator is structurally positive.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    y1, y2, y3 = state.history
    w = 2.0 * math.pi * state.k / period
    a_k = 1.2 - 0.2 * math.cos(w)
    b_k = 1.0 - 0.4 * math.sin(w)
    c_k = 1.0 + 0.4 * math.sin(w)
    x1 = y1 * y2 * y3 * state.u_prev
    x2 = y3 - b_k
    x3 = c_k * u
    x4 = a_k + y2 * y2 + y3 * y3
    y_new = (x1 * x2 + x3) / x4
    if not abs(y_new) <= DIVERGENCE_LIMIT:
        raise DivergedError(state.k, abs(y_new))
    state.push(y_new, u)
    return y_new


def input_ex2(k: int, period: int = 25) -> float:
    """Default sinusoidal excitation for the time-varying plant."""
    return math.sin(2.0 * math.pi * k / period)


def bounded_sup_check(amplitude: float, steps: int) -> float:
    """Largest |y| of the non-BIBO plant under a constant input.

    Propagates :class:`DivergedError` when the constant input lies outside
    the bounded range (empirically, above ~0.8193 from zero history).
    """
    if not 0.0 <= amplitude < 0.83:
        raise ValueError("amplitude must lie in [0, 0.83)")
    state = PlantState()
    peak = 0.0
    for _ in range(steps):
        y = step_nonbibo(state, amplitude)
        if abs(y) > peak:
            peak = abs(y)
    return peak


def simulate_nonbibo(n_steps: int, input_fn, t_o: float = DEFAULT_SAMPLING_PERIOD):
    """Simulate the non-BIBO plant; returns input and output lists.

    ``input_fn(k)`` supplies the excitation at each step; output ``y[k]``
    is the sample produced by applying ``u[k]`` to the history before the
    step.
    """
    state = PlantState(t_o=t_o)
    u_seq = []
    y_seq = []
    for k in range(n_steps):
        u = input_fn(k)
        u_seq.append(u)
        y_seq.append(step_nonbibo(state, u))
    return u_seq, y_seq


def simulate_timevarying(n_steps: int, input_fn=input_ex2,
                         period: int = DEFAULT_TV_PERIOD,
                         t_o: float = DEFAULT_SAMPLING_PERIOD):
    """Simulate the time-varying plant; returns input and output lists."""
    state = PlantState(t_o=t_o)
    u_seq = []
    y_seq = []
    for k in range(n_steps):
        u = input_fn(k)
        u_seq.append(u)
        y_seq.append(step_timevarying(state, u, period))
    return u_seq, y_seq
