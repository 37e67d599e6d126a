"""Interval type-2 TSK network: data model and forward inference.

The network fuzzifies each input with Gaussian sets of uncertain width
(a lower and an upper standard deviation around a shared center), fires a
full Cartesian grid of rules with the product t-norm, and mixes the
normalized lower/upper firing levels with a scalar weight ``q`` into a
crisp output through affine rule consequents.

Parameters are stored as flat float64 arrays so that the compiled kernels
can run allocation-free; :class:`Type2GaussianMF` and :class:`RuleConsequent`
are value views used at the API boundary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateFiringError


@dataclass(frozen=True)
class Type2GaussianMF:
    """One antecedent fuzzy set: shared center, uncertain width.

    Attributes
    ----------
    center : float
        Peak location, in input units.
    sigma_lower, sigma_upper : float
        Standard deviations of the lower and upper membership functions.
        Both strictly positive with ``sigma_lower <= sigma_upper``.
    """

    center: float
    sigma_lower: float
    sigma_upper: float

    def __post_init__(self):
        if not (self.sigma_lower > 0.0 and self.sigma_upper > 0.0):
            raise ValueError("membership widths must be strictly positive")
        if self.sigma_lower > self.sigma_upper:
            raise ValueError("sigma_lower must not exceed sigma_upper")


@dataclass(frozen=True)
class RuleConsequent:
    """Affine rule consequent f_r = a . x + b."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=np.float64))
        if self.a.ndim != 1:
            raise ValueError("consequent coefficient vector must be 1-D")


def rule_grid(mf_counts):
    """Row-major rule index grid over per-input set counts.

    Rule ``r`` uses set ``grid[r, i]`` for input ``i``; the last input's
    index varies fastest. This ordering is fixed so that traces and
    checkpoints are reproducible.
    """
    combos = list(itertools.product(*[range(k) for k in mf_counts]))
    return np.array(combos, dtype=np.int64).reshape(len(combos), len(mf_counts))


@dataclass
class NetworkState:
    """Complete mutable parameter set of the network.

    Arrays are rectangular over ``(n_inputs, max(mf_counts))``; when set
    counts differ per input the unused cells are inert padding (never
    referenced by the rule grid). ``alpha`` is the adaptive consequent rate
    and ``alpha_ant`` the (smaller) antecedent rate maintained by the
    sliding-mode learner.
    """

    centers: np.ndarray
    sigma_lower: np.ndarray
    sigma_upper: np.ndarray
    a: np.ndarray
    b: np.ndarray
    q: float
    alpha: float = 0.0
    alpha_ant: float = 0.0
    mf_counts: tuple = None
    rule_index: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.centers = np.ascontiguousarray(self.centers, dtype=np.float64)
        self.sigma_lower = np.ascontiguousarray(self.sigma_lower, dtype=np.float64)
        self.sigma_upper = np.ascontiguousarray(self.sigma_upper, dtype=np.float64)
        self.a = np.ascontiguousarray(self.a, dtype=np.float64)
        self.b = np.ascontiguousarray(self.b, dtype=np.float64)
        if self.mf_counts is None:
            self.mf_counts = (self.centers.shape[1],) * self.centers.shape[0]
        self.mf_counts = tuple(int(k) for k in self.mf_counts)
        if self.rule_index is None:
            self.rule_index = rule_grid(self.mf_counts)
        self.validate()

    # -- structure ---------------------------------------------------------

    @property
    def n_inputs(self):
        return self.centers.shape[0]

    @property
    def n_rules(self):
        return self.rule_index.shape[0]

    def mf(self, i, k):
        """Membership set ``k`` of input ``i`` as a value object."""
        if k >= self.mf_counts[i]:
            raise IndexError(f"input {i} has {self.mf_counts[i]} sets")
        return Type2GaussianMF(self.centers[i, k], self.sigma_lower[i, k],
                               self.sigma_upper[i, k])

    def consequent(self, r):
        return RuleConsequent(self.a[r].copy(), float(self.b[r]))

    def validate(self):
        """Check the structural invariants; raises ValueError on breach."""
        n_in, k_max = self.centers.shape
        if len(self.mf_counts) != n_in:
            raise ValueError("mf_counts length must match the input count")
        if max(self.mf_counts) != k_max or min(self.mf_counts) < 1:
            raise ValueError("mf_counts inconsistent with parameter arrays")
        expected = int(np.prod(self.mf_counts))
        if self.rule_index.shape != (expected, n_in):
            raise ValueError("rule grid must cover the full Cartesian product")
        if self.a.shape != (expected, n_in) or self.b.shape != (expected,):
            raise ValueError("consequent arrays must be (n_rules, n_inputs) and (n_rules,)")
        for i in range(n_in):
            k = self.mf_counts[i]
            if not (np.all(self.sigma_lower[i, :k] > 0.0)
                    and np.all(self.sigma_upper[i, :k] > 0.0)):
                raise ValueError("membership widths must be strictly positive")
            if np.any(self.sigma_lower[i, :k] > self.sigma_upper[i, :k]):
                raise ValueError("sigma_lower must not exceed sigma_upper")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("mixing weight q must lie in [0, 1]")
        if self.alpha < 0.0 or self.alpha_ant < 0.0:
            raise ValueError("learning rates must be nonnegative")

    def copy(self):
        return NetworkState(
            centers=self.centers.copy(),
            sigma_lower=self.sigma_lower.copy(),
            sigma_upper=self.sigma_upper.copy(),
            a=self.a.copy(),
            b=self.b.copy(),
            q=self.q,
            alpha=self.alpha,
            alpha_ant=self.alpha_ant,
            mf_counts=self.mf_counts,
            rule_index=self.rule_index,
        )

    @classmethod
    def from_sets(cls, mf_grid, consequents, q, alpha=0.0, alpha_ant=0.0):
        """Build a state from per-input lists of :class:`Type2GaussianMF`
        and a row-major list of :class:`RuleConsequent`."""
        counts = tuple(len(row) for row in mf_grid)
        n_in = len(counts)
        k_max = max(counts)
        centers = np.zeros((n_in, k_max))
        sig_lo = np.ones((n_in, k_max))
        sig_up = np.ones((n_in, k_max))
        for i, row in enumerate(mf_grid):
            for k, mf in enumerate(row):
                centers[i, k] = mf.center
                sig_lo[i, k] = mf.sigma_lower
                sig_up[i, k] = mf.sigma_upper
        a = np.stack([np.asarray(c.a, dtype=np.float64) for c in consequents])
        b = np.array([c.b for c in consequents], dtype=np.float64)
        return cls(centers, sig_lo, sig_up, a, b, q=q, alpha=alpha,
                   alpha_ant=alpha_ant, mf_counts=counts)


@dataclass
class InferenceCache:
    """All intermediates of one forward pass, shared by both learners.

    ``degenerate_levels`` counts how many of the two firing levels (lower,
    upper) fell back to uniform weights because every rule fired with
    numerically zero strength.
    """

    mu_lower: np.ndarray
    mu_upper: np.ndarray
    w_lower: np.ndarray
    w_upper: np.ndarray
    wt_lower: np.ndarray
    wt_upper: np.ndarray
    f: np.ndarray
    y_n: float
    degenerate_levels: int = 0


def eval_mf(mf: Type2GaussianMF, x: float):
    """Lower and upper membership degree of ``x`` in one fuzzy set."""
    return _kernels.gauss_pair(float(x), mf.center, mf.sigma_lower, mf.sigma_upper)


def firing_strengths(net: NetworkState, x):
    """Lower and upper rule firing strengths for input vector ``x``."""
    x = _as_input(net, x)
    mu_lo = np.empty_like(net.centers)
    mu_up = np.empty_like(net.centers)
    _kernels.memberships(x, net.centers, net.sigma_lower, net.sigma_upper,
                         mu_lo, mu_up)
    w_lo = np.empty(net.n_rules)
    w_up = np.empty(net.n_rules)
    _kernels.firing(mu_lo, mu_up, net.rule_index, w_lo, w_up)
    return w_lo, w_up


def normalize(w):
    """Proportionally rescale nonnegative strengths to sum to one.

    Raises
    ------
    DegenerateFiringError
        If the strengths sum below the representable firing threshold; the
        caller is expected to substitute uniform weights (``infer`` does
        this automatically and counts the event).
    """
    w = np.ascontiguousarray(w, dtype=np.float64)
    out = np.empty_like(w)
    if _kernels.normalize(w, out):
        raise DegenerateFiringError("all rules fired with numerically zero strength")
    return out


def rule_outputs(net: NetworkState, x):
    """Affine consequent value of every rule at ``x``."""
    x = _as_input(net, x)
    f = np.empty(net.n_rules)
    _kernels.rule_outputs(x, net.a, net.b, f)
    return f


def infer(net: NetworkState, x) -> InferenceCache:
    """Forward pass returning the full intermediate cache.

    The output mixes the two normalized firing levels:
    ``y_n = q * sum(f * wt_lower) + (1 - q) * sum(f * wt_upper)``.
    Degenerate firing (no rule active at float precision) falls back to
    uniform weights rather than aborting, so long online runs survive
    inputs that leave the fuzzified range.
    """
    x = _as_input(net, x)
    mu_lo = np.empty_like(net.centers)
    mu_up = np.empty_like(net.centers)
    w_lo = np.empty(net.n_rules)
    w_up = np.empty(net.n_rules)
    wt_lo = np.empty(net.n_rules)
    wt_up = np.empty(net.n_rules)
    f = np.empty(net.n_rules)
    y_n, degen = _kernels.infer(x, net.centers, net.sigma_lower,
                                net.sigma_upper, net.a, net.b, net.q,
                                net.rule_index, mu_lo, mu_up, w_lo, w_up,
                                wt_lo, wt_up, f)
    return InferenceCache(mu_lo, mu_up, w_lo, w_up, wt_lo, wt_up, f,
                          float(y_n), int(degen))


def _as_input(net, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (net.n_inputs,):
        raise ValueError(f"expected input vector of length {net.n_inputs}, got shape {x.shape}")
    return x
