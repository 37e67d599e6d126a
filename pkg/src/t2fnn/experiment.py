"""Series-parallel identification experiments.

The harness drives a benchmark plant with its excitation signal, feeds the
identifier the regressor ``(u(k), y(k-1), y(k-2))`` built from measured
plant outputs, adapts online one sample at a time, and scores per-epoch
training RMSE plus a frozen-network test RMSE, averaged over independently
seeded runs.

An epoch is one full pass over the simulation horizon, re-simulated from
zero plant state; network parameters persist across epochs. All randomness
of a run flows from one generator seeded with ``base_seed + run_index``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels, plants
from .errors import EmptySequenceError, NonFiniteUpdateError
from .gradient import GdParams
from .network import NetworkState
from .smc import SmcParams

N_INPUTS = 3


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one identification experiment."""

    plant: str = "ex1"                 # ex1 (non-BIBO) | ex2 (time-varying)
    learner: str = "smc"               # smc | gd
    epochs: int = 30
    samples_per_epoch: int = 0         # 0 -> plant default (ex1: 10000, ex2: tv_period)
    runs: int = 10
    seed: int = 0
    train_fraction: float = 0.8        # ex2 only; ex1 tests on a phase-shifted excitation
    n_mfs: int = 3
    noise_std: float = 0.0             # additive Gaussian measurement noise on training data
    dry_run: bool = False              # freeze the network (no-learning baseline)
    skip_failed_runs: bool = False
    tv_period: int = plants.DEFAULT_TV_PERIOD
    plant_input: str = "excitation"    # excitation | const (simulate-plant only)
    plant_input_value: float = 0.0
    # network initialization: centers evenly spread over the observed range of
    # a warmup pass, jittered; upper widths scaled from range/n_mfs; lower
    # widths a random fraction of upper; consequents uniform in +-ab_init
    q_init: float = 0.5
    center_jitter: float = 0.1
    sigma_scale_min: float = 0.5
    sigma_scale_max: float = 1.5
    sigma_ratio_min: float = 0.5
    sigma_ratio_max: float = 1.0
    ab_init: float = 0.1
    smc: SmcParams = field(default_factory=SmcParams)
    gd: GdParams = field(default_factory=GdParams)

    def validate(self):
        if self.plant not in ("ex1", "ex2"):
            raise ValueError(f"unknown plant {self.plant!r}")
        if self.learner not in ("smc", "gd"):
            raise ValueError(f"unknown learner {self.learner!r}")
        for name in ("epochs", "runs", "n_mfs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.samples_per_epoch < 0:
            raise ValueError("samples_per_epoch must be nonnegative")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.noise_std < 0.0:
            raise ValueError("noise_std must be nonnegative")
        if self.tv_period <= 0:
            raise ValueError("tv_period must be positive")
        if self.plant_input not in ("excitation", "const"):
            raise ValueError(f"unknown plant_input {self.plant_input!r}")
        if not 0.0 <= self.q_init <= 1.0:
            raise ValueError("q_init must lie in [0, 1]")
        for name in ("center_jitter", "ab_init"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if not 0.0 < self.sigma_scale_min <= self.sigma_scale_max:
            raise ValueError("sigma scale range must be positive and ordered")
        if not 0.0 < self.sigma_ratio_min <= self.sigma_ratio_max <= 1.0:
            raise ValueError("sigma ratio range must lie in (0, 1] and be ordered")
        return self

    def horizon(self):
        if self.samples_per_epoch:
            return self.samples_per_epoch
        return 10000 if self.plant == "ex1" else self.tv_period


@dataclass
class Trace:
    """Per-step trace of one run's final epoch (columns of trace.csv)."""

    k: np.ndarray
    t: np.ndarray
    u: np.ndarray
    y: np.ndarray
    y_n: np.ndarray
    e: np.ndarray
    alpha: np.ndarray
    q: np.ndarray


@dataclass
class ExperimentReport:
    """Aggregated results of one experiment (all runs of one learner)."""

    config: ExperimentConfig
    epoch_rmse: np.ndarray          # (runs, epochs)
    train_rmse: np.ndarray          # (runs,) final-epoch training RMSE
    test_rmse: np.ndarray           # (runs,) frozen-network RMSE
    max_abs_error: np.ndarray       # (runs,)
    max_alpha: np.ndarray
    min_alpha: np.ndarray
    final_alpha: np.ndarray
    denom_guard_hits: np.ndarray
    sigma_projections: np.ndarray
    q_saturations: np.ndarray
    degenerate_firings: np.ndarray
    failed_runs: list
    wall_clock_seconds: float
    trace: Trace | None = None
    trace_paths: list = field(default_factory=list)

    @property
    def train_rmse_mean(self):
        return float(np.mean(self.train_rmse))

    @property
    def train_rmse_std(self):
        return _spread(self.train_rmse)

    @property
    def test_rmse_mean(self):
        return float(np.mean(self.test_rmse))

    @property
    def test_rmse_std(self):
        return _spread(self.test_rmse)


def _spread(values):
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def build_regressor(u_k: float, y_hist) -> np.ndarray:
    """Identifier input ``(u(k), y(k-1), y(k-2))``.

    ``y_hist`` lists past outputs most recent first and is zero-padded when
    fewer than two samples exist yet.
    """
    h = list(y_hist)[:2] + [0.0, 0.0]
    return np.array([u_k, h[0], h[1]], dtype=np.float64)


def rmse(errors) -> float:
    """Root-mean-square of an error sequence."""
    arr = np.asarray(errors, dtype=np.float64)
    if arr.size == 0:
        raise EmptySequenceError("rmse of an empty sequence")
    return float(np.sqrt(np.mean(arr * arr)))


def regressor_matrix(u, y):
    """Stack per-step regressors for a whole simulated trajectory."""
    u = np.asarray(u, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = u.shape[0]
    x = np.zeros((n, N_INPUTS))
    x[:, 0] = u
    x[1:, 1] = y[:-1]
    x[2:, 2] = y[:-2]
    return x


def backward_differences(x, dt):
    """Per-component backward differences of a regressor matrix; the first
    row (no predecessor) is zero."""
    xd = np.zeros_like(x)
    xd[1:] = (x[1:] - x[:-1]) / dt
    return xd


def initialize_network(rng, x, config: ExperimentConfig) -> NetworkState:
    """Random network initialization from observed regressor ranges.

    Centers are spread evenly over each input's observed range and jittered
    by up to ``center_jitter`` of that range; upper widths are drawn around
    ``range / n_mfs`` and lower widths as a random fraction of the upper
    ones; consequents start near zero.
    """
    k = config.n_mfs
    n_in = x.shape[1]
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    span = np.where(hi - lo > 0.0, hi - lo, 1.0)
    centers = np.empty((n_in, k))
    sig_lo = np.empty((n_in, k))
    sig_up = np.empty((n_in, k))
    floor = config.smc.sigma_floor
    for i in range(n_in):
        if k > 1:
            grid = np.linspace(lo[i], hi[i], k)
        else:
            grid = np.array([0.5 * (lo[i] + hi[i])])
        jitter = rng.uniform(-config.center_jitter, config.center_jitter, size=k)
        centers[i] = grid + jitter * span[i]
        scale = span[i] / k
        sig_up[i] = rng.uniform(config.sigma_scale_min, config.sigma_scale_max, size=k) * scale
        sig_lo[i] = sig_up[i] * rng.uniform(config.sigma_ratio_min, config.sigma_ratio_max, size=k)
    np.clip(sig_lo, floor, None, out=sig_lo)
    np.clip(sig_up, sig_lo, None, out=sig_up)
    n_rules = k ** n_in
    a = rng.uniform(-config.ab_init, config.ab_init, size=(n_rules, n_in))
    b = rng.uniform(-config.ab_init, config.ab_init, size=n_rules)
    return NetworkState(centers, sig_lo, sig_up, a, b, q=config.q_init,
                        alpha=config.smc.alpha_init)


class OnlineTrainer:
    """Sequential online training session over one network.

    Owns the working copies of the parameter arrays and the kernel
    workspaces; used by both the experiment harness and the estimator
    front end. Stepping is strictly sequential.
    """

    def __init__(self, net: NetworkState, learner: str,
                 smc_params: SmcParams, gd_params: GdParams):
        self._net = net.copy()
        self.learner = learner
        self.smc_params = smc_params
        self.gd_params = gd_params
        self.q = float(net.q)
        self.alpha = float(smc_params.alpha_init if learner == "smc" else gd_params.eta)
        shape = net.centers.shape
        n = net.n_rules
        self._cache = tuple(np.empty(shape) for _ in range(2)) + \
            tuple(np.empty(n) for _ in range(5))
        self._aad = (np.empty(shape), np.empty(shape))
        self._grads = (np.empty(shape), np.empty(shape), np.empty(shape),
                       np.empty((n, net.n_inputs)), np.empty(n), np.zeros(3))
        self._out = np.zeros(_kernels.OUT_SIZE)
        self.guard_hits = 0.0
        self.projections = 0.0
        self.q_saturations = 0.0
        self.degenerate = 0.0
        self.max_abs_e = 0.0
        self.max_alpha = self.alpha
        self.min_alpha = self.alpha

    def step(self, x, x_dot, y):
        """One adaptation step; returns the pre-update error ``e``.

        Returns nan when the step produced a non-finite parameter (the
        caller aborts the run).
        """
        net = self._net
        out = self._out
        if self.learner == "smc":
            p = self.smc_params
            status = _kernels.smc_step(
                x, x_dot, y, net.centers, net.sigma_lower, net.sigma_upper,
                net.a, net.b, self.q, self.alpha, net.rule_index,
                p.gamma, p.nu, p.delta_s, p.rho_ant, p.denom_guard, p.dt,
                p.sigma_floor, p.sigma_cap, *self._cache, *self._aad, out)
        else:
            p = self.gd_params
            status = _kernels.gd_step(
                x, y, net.centers, net.sigma_lower, net.sigma_upper,
                net.a, net.b, self.q, net.rule_index,
                p.eta, p.eta_ant, p.sigma_floor, p.sigma_cap,
                *self._cache, *self._grads, out)
        if status != _kernels.STATUS_OK:
            return float("nan")
        self.q = out[_kernels.OUT_Q_NEW]
        self.alpha = out[_kernels.OUT_ALPHA_NEW]
        self.guard_hits += out[_kernels.OUT_GUARD_HITS]
        self.projections += out[_kernels.OUT_SIGMA_PROJECTIONS]
        self.q_saturations += out[_kernels.OUT_Q_SATURATED]
        self.degenerate += out[_kernels.OUT_DEGENERATE]
        e = out[_kernels.OUT_E]
        ae = abs(e)
        if ae > self.max_abs_e:
            self.max_abs_e = ae
        if self.alpha > self.max_alpha:
            self.max_alpha = self.alpha
        elif self.alpha < self.min_alpha:
            self.min_alpha = self.alpha
        return e

    def predict(self, x):
        """Frozen forward pass (no adaptation)."""
        net = self._net
        y_n, _ = _kernels.infer(x, net.centers, net.sigma_lower,
                                net.sigma_upper, net.a, net.b, self.q,
                                net.rule_index, *self._cache)
        return y_n

    def state(self) -> NetworkState:
        """Snapshot of the current parameters as a fresh state object."""
        snap = self._net.copy()
        snap.q = float(self.q)
        snap.alpha = float(self.alpha)
        if self.learner == "smc":
            snap.alpha_ant = float(self.smc_params.rho_ant * self.alpha)
        return snap


def simulate_plant(config: ExperimentConfig, phase: float = 0.0):
    """Simulate the configured plant over one horizon.

    Returns ``(u, y)`` arrays; ``phase`` shifts the excitation of the
    non-BIBO plant (used to build the held-out test excitation).
    """
    n = config.horizon()
    dt = config.smc.dt
    if config.plant_input == "const":
        input_fn = lambda k: config.plant_input_value
    elif config.plant == "ex1":
        input_fn = lambda k: plants.input_ex1(k, dt, phase)
    else:
        input_fn = plants.input_ex2
    if config.plant == "ex1":
        u, y = plants.simulate_nonbibo(n, input_fn, t_o=dt)
    else:
        u, y = plants.simulate_timevarying(n, input_fn, period=config.tv_period, t_o=dt)
    return np.asarray(u), np.asarray(y)


def _run_once(config: ExperimentConfig, run_index: int, collect_trace: bool):
    """One seeded run: init, epoch loop, frozen test evaluation."""
    rng = np.random.default_rng(config.seed + run_index)
    dt = config.smc.dt
    u, y_true = simulate_plant(config)
    n = len(u)
    n_train = n if config.plant == "ex1" else int(round(config.train_fraction * n))

    x_clean = regressor_matrix(u, y_true)
    net0 = initialize_network(rng, x_clean, config)
    trainer = OnlineTrainer(net0, config.learner, config.smc, config.gd)

    epoch_rmse = np.empty(config.epochs)
    trace = None
    for epoch in range(config.epochs):
        if config.noise_std > 0.0:
            y_meas = y_true + rng.normal(0.0, config.noise_std, size=n)
            x = regressor_matrix(u, y_meas)
        else:
            y_meas = y_true
            x = x_clean
        x_dot = backward_differences(x, dt)
        tracing = collect_trace and epoch == config.epochs - 1
        if tracing:
            tr_y_n = np.empty(n_train)
            tr_alpha = np.empty(n_train)
            tr_q = np.empty(n_train)
        sq = 0.0
        for k in range(n_train):
            if config.dry_run:
                e = trainer.predict(x[k]) - y_meas[k]
            else:
                e = trainer.step(x[k], x_dot[k], y_meas[k])
                if e != e:  # nan: non-finite update
                    raise NonFiniteUpdateError(
                        f"non-finite update at epoch {epoch}, sample {k}")
            sq += e * e
            if tracing:
                tr_y_n[k] = y_meas[k] + e
                tr_alpha[k] = trainer.alpha
                tr_q[k] = trainer.q
        epoch_rmse[epoch] = np.sqrt(sq / n_train)
        if tracing:
            ks = np.arange(n_train)
            trace = Trace(ks, ks * dt, x[:n_train, 0].copy(),
                          y_meas[:n_train].copy(), tr_y_n,
                          tr_y_n - y_meas[:n_train], tr_alpha, tr_q)

    # frozen test evaluation on held-out data
    if config.plant == "ex1":
        u_test, y_test = simulate_plant(config, phase=1.0)
        x_test = regressor_matrix(u_test, y_test)
        first = 0
    else:
        x_test, y_test = x_clean, y_true
        first = n_train
    errs = [trainer.predict(x_test[k]) - y_test[k]
            for k in range(first, len(y_test))]
    test = rmse(errs)
    return trainer, epoch_rmse, test, trace


def run_experiment(config: ExperimentConfig, out_dir=None) -> ExperimentReport:
    """Run all seeded runs of one experiment and aggregate.

    A run failing with a non-finite update or plant divergence aborts the
    experiment (with the run index attached) unless
    ``config.skip_failed_runs`` is set, in which case the failed run is
    excluded from the aggregates. CSV outputs are written when ``out_dir``
    is given.
    """
    config.validate()
    t0 = time.perf_counter()
    rows = []
    failed = []
    trace = None
    for ri in range(config.runs):
        try:
            trainer, series, test, tr = _run_once(config, ri, collect_trace=(ri == 0))
        except Exception as err:
            err.run_index = ri
            if config.skip_failed_runs:
                failed.append(ri)
                continue
            raise
        if tr is not None:
            trace = tr
        rows.append((trainer, series, test))
    if not rows:
        raise RuntimeError("every run failed; nothing to aggregate")
    wall = time.perf_counter() - t0

    report = ExperimentReport(
        config=config,
        epoch_rmse=np.stack([r[1] for r in rows]),
        train_rmse=np.array([r[1][-1] for r in rows]),
        test_rmse=np.array([r[2] for r in rows]),
        max_abs_error=np.array([r[0].max_abs_e for r in rows]),
        max_alpha=np.array([r[0].max_alpha for r in rows]),
        min_alpha=np.array([r[0].min_alpha for r in rows]),
        final_alpha=np.array([r[0].alpha for r in rows]),
        denom_guard_hits=np.array([r[0].guard_hits for r in rows]),
        sigma_projections=np.array([r[0].projections for r in rows]),
        q_saturations=np.array([r[0].q_saturations for r in rows]),
        degenerate_firings=np.array([r[0].degenerate for r in rows]),
        failed_runs=failed,
        wall_clock_seconds=wall,
        trace=trace,
    )
    if out_dir is not None:
        from . import traceio
        report.trace_paths = traceio.write_experiment(report, out_dir)
    return report


def compare_learners(config: ExperimentConfig, out_dir=None):
    """Run both learners on identical seeds; returns ``{name: report}``."""
    reports = {}
    for learner in ("smc", "gd"):
        reports[learner] = run_experiment(replace(config, learner=learner), out_dir=None)
    if out_dir is not None:
        from . import traceio
        traceio.write_comparison(reports, out_dir)
    return reports
