"""Variable sample-size stochastic quasi-Newton solvers and baselines.

Eight schemes share one contract: an update x <- x - gamma_k H_k u_k where
u_k is a batch-average (possibly smoothed and/or regularized) gradient and
H_k is the limited-memory approximation rebuilt from curvature pairs formed
at odd iterations on replayed batches.  The schemes differ only in their
schedules, in what u_k is, and in how pairs are built:

  vs_sqn              strongly convex, smooth; geometric batches
  svs_sqn_moreau      strongly convex composite; envelope gradients, fixed eta
  svs_sqn_diminishing strongly convex smoothable; eta_k decreasing
  rvs_sqn             convex, smooth; vanishing quadratic regularization
  rsvs_sqn            convex, smoothable; constant horizon-tuned gamma/mu/eta
                      plus a weighted averaged iterate
  sgd, sqn_unit, apg_baseline   comparison baselines

Theorem-prescribed default schedules are built when the config leaves them
unset; explicit overrides are honored and the theoretical steplength is
recorded alongside the used one.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .core import (
    Array,
    BatchSchedule,
    RngStream,
    ScalarSchedule,
    assert_finite,
    evaluate_on_handle,
)
from .hessian import LbfgsMemory, collect_pair, theoretical_bounds
from .regularization import AlternationState, alternation_step
from .smoothing import eta_schedule_diminishing

SCHEMES = (
    "vs_sqn",
    "svs_sqn_moreau",
    "svs_sqn_diminishing",
    "rvs_sqn",
    "rsvs_sqn",
    "sgd",
    "sqn_unit",
    "apg_baseline",
)

_BATCH_KINDS_ALLOWED = {
    "vs_sqn": ("geometric", "constant"),
    "svs_sqn_moreau": ("geometric", "constant"),
    "svs_sqn_diminishing": ("polynomial", "constant"),
    "rvs_sqn": ("polynomial", "constant"),
    "rsvs_sqn": ("polynomial", "constant"),
    "sgd": ("constant",),
    "sqn_unit": ("constant",),
    "apg_baseline": ("geometric", "polynomial", "constant"),
}


class ConfigError(ValueError):
    """Invalid solver configuration; carries the offending field name."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class SolverConfig:
    scheme: str
    m: int = 5
    horizon: Optional[int] = None          # iteration count K
    sample_budget: Optional[int] = None    # stop once sum N_k reaches this
    batch: Optional[BatchSchedule] = None
    step: Optional[ScalarSchedule] = None
    mu: Optional[ScalarSchedule] = None
    eta: Union[None, float, ScalarSchedule] = None
    epsilon: float = 0.1
    c_gamma: float = 1.0
    delta: Optional[float] = None
    delta_bar: Optional[float] = None
    seed: int = 0
    x0: Optional[Array] = None
    max_iters: int = 2_000_000
    average_iterates: bool = False   # uniform averaging (sgd baseline)
    value_every: int = 1             # objective evaluation cadence in records
    record_trace: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError("scheme", f"unknown scheme {self.scheme!r}; "
                                        f"choose one of {', '.join(SCHEMES)}")
        if self.m < 1:
            raise ConfigError("m", "memory depth must be >= 1")
        if self.epsilon <= 0:
            raise ConfigError("epsilon", "must be > 0")
        if self.scheme == "rsvs_sqn" and self.horizon is None:
            raise ConfigError("horizon", "rsvs_sqn fixes its parameters from "
                                         "the horizon K; set horizon")
        if (self.horizon is None and self.sample_budget is None
                and self.max_iters >= 2_000_000):
            raise ConfigError("horizon", "set horizon or sample_budget")
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError("horizon", "must be >= 1")
        if self.sample_budget is not None and self.sample_budget < 1:
            raise ConfigError("sample_budget", "must be >= 1")
        if self.batch is not None:
            allowed = _BATCH_KINDS_ALLOWED[self.scheme]
            if self.batch.kind not in allowed:
                raise ConfigError(
                    "batch", f"{self.scheme} takes batch kinds {allowed}, "
                             f"got {self.batch.kind!r}")
        for name in ("delta", "delta_bar"):
            v = getattr(self, name)
            if v is not None and not (0 < v <= 1):
                raise ConfigError(name, "must lie in (0, 1]")
        if self.value_every < 1:
            raise ConfigError("value_every", "must be >= 1")


@dataclass
class IterateRecord:
    k: int
    samples_cum: int
    grad_evals_cum: int
    f_value: Optional[float]
    gap: Optional[float]
    grad_norm: float
    step_norm: float
    wall_time: float
    gamma_k: Optional[float] = None
    mu_k: Optional[float] = None
    eta_k: Optional[float] = None


@dataclass
class RunResult:
    scheme: str
    records: list
    x_final: Array
    x_averaged: Optional[Array]
    termination: str               # budget | horizon | zero-step
    theoretical_step: Optional[float] = None
    used_step: Optional[float] = None
    extras: dict = field(default_factory=dict)
    trace: Optional[list] = None

    @property
    def final_gap(self) -> Optional[float]:
        return self.records[-1].gap if self.records else None

    @property
    def total_samples(self) -> int:
        return self.records[-1].samples_cum if self.records else 0


def weighted_average(xs, weights) -> Array:
    """sum(w_i x_i) / sum(w_i) with strictly positive weights."""
    xs = [np.asarray(x, dtype=float) for x in xs]
    weights = [float(w) for w in weights]
    if len(xs) != len(weights):
        raise ValueError("xs and weights must have the same length")
    if not xs:
        raise ValueError("empty sequence")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    acc = np.zeros_like(xs[0])
    for x, w in zip(xs, weights):
        acc += w * x
    return acc / sum(weights)


# ---------------------------------------------------------------------------
# shared quasi-Newton loop
# ---------------------------------------------------------------------------


@dataclass
class _Plan:
    mode: str
    start_k: int
    gamma: Callable[[int], float]
    batch_n: Callable[[int], int]
    step_gradient: Callable[[Array, object, int], Array]
    pair_gradient: Optional[Callable[[Array, object, int], Array]]
    pair_mu: Callable[[int], Optional[float]] = lambda k: None
    pair_eta: Callable[[int], Optional[float]] = lambda k: None
    advance: Callable[[int], None] = lambda k: None
    mu_log: Callable[[int], Optional[float]] = lambda k: None
    eta_log: Callable[[int], Optional[float]] = lambda k: None
    weight: Optional[Callable[[int], float]] = None  # averaged-iterate weight
    delta: float = 1.0
    delta_bar: float = 1.0


def _initial_point(problem, config) -> Array:
    if config.x0 is not None:
        return assert_finite(config.x0, "x0").copy()
    return np.zeros(problem.meta.n)


def _value_of(problem, x) -> Optional[float]:
    fn = getattr(problem, "true_value", None)
    return None if fn is None else float(fn(x))


def _gap_of(problem, f_value) -> Optional[float]:
    f_star = problem.meta.f_star
    if f_value is None or f_star is None:
        return None
    return f_value - f_star


def _qn_loop(problem, config: SolverConfig, plan: _Plan,
             theoretical_step: Optional[float]) -> RunResult:
    x = _initial_point(problem, config)
    rng = RngStream(config.seed, stream_id=0)
    mem = LbfgsMemory(config.m, plan.mode, plan.delta, plan.delta_bar)
    records: list[IterateRecord] = []
    trace = [] if config.record_trace else None
    samples = 0
    grad_evals = 0
    prev: Optional[tuple] = None
    avg_acc = np.zeros_like(x)
    avg_weight = 0.0
    avg_count = 0
    t0 = time.perf_counter()
    k = plan.start_k
    iters = 0
    termination = "horizon"

    while True:
        if plan_horizon_reached(config, iters):
            termination = "horizon"
            break
        plan.advance(k)

        if plan.pair_gradient is not None and k % 2 == 1 and prev is not None:
            x_prev, h_prev, n_prev = prev
            # a step at rounding scale carries no curvature information:
            # y would be pure cancellation noise, so skip the pair
            s_scale = float(np.linalg.norm(x - x_prev))
            if s_scale > 1e-13 * (1.0 + float(np.linalg.norm(x))):
                g_hi = plan.pair_gradient(x, h_prev, k)
                g_lo = plan.pair_gradient(x_prev, h_prev, k)
                grad_evals += 2 * n_prev
                mem.push(collect_pair(
                    plan.mode, x, x_prev, g_hi, g_lo, k,
                    mu_i=plan.pair_mu(k), eta_i=plan.pair_eta(k),
                    delta=plan.delta, delta_bar=plan.delta_bar,
                ))

        n_k = plan.batch_n(k)
        handle = rng.next_handle(n_k)
        g = plan.step_gradient(x, handle, k)
        samples += n_k
        grad_evals += n_k
        gamma = plan.gamma(k)
        step_vec = gamma * mem.apply(g)

        if plan.weight is not None:
            w = plan.weight(k)
            avg_acc += w * x
            avg_weight += w
        elif config.average_iterates:
            avg_acc += x
            avg_count += 1

        want_value = iters % config.value_every == 0
        f_value = _value_of(problem, x) if want_value else None
        records.append(IterateRecord(
            k, samples, grad_evals, f_value, _gap_of(problem, f_value),
            float(np.linalg.norm(g)), float(np.linalg.norm(step_vec)),
            time.perf_counter() - t0, gamma_k=gamma,
            mu_k=plan.mu_log(k), eta_k=plan.eta_log(k),
        ))
        if trace is not None:
            trace.append({"k": k, "x": x.copy(), "handle": handle,
                          "gamma": gamma, "pairs": list(mem.pairs)})

        if not np.any(step_vec):
            termination = "zero-step"
            iters += 1
            k += 1
            break
        prev = (x, handle, n_k)
        x = x - step_vec
        iters += 1
        k += 1
        if config.sample_budget is not None and samples >= config.sample_budget:
            termination = "budget"
            break

    f_final = _value_of(problem, x)
    records.append(IterateRecord(
        k, samples, grad_evals, f_final, _gap_of(problem, f_final),
        float("nan"), 0.0, time.perf_counter() - t0,
    ))
    x_avg = None
    if plan.weight is not None and avg_weight > 0:
        x_avg = avg_acc / avg_weight
    elif config.average_iterates and avg_count > 0:
        x_avg = avg_acc / avg_count
    return RunResult(
        scheme=config.scheme, records=records, x_final=x, x_averaged=x_avg,
        termination=termination, theoretical_step=theoretical_step,
        used_step=records[0].gamma_k if records else None, trace=trace,
    )


def plan_horizon_reached(config: SolverConfig, iters: int) -> bool:
    if config.horizon is not None and iters >= config.horizon:
        return True
    return iters >= config.max_iters


# ---------------------------------------------------------------------------
# scheme setups
# ---------------------------------------------------------------------------


def _need_meta(problem, config, *names):
    for name in names:
        if getattr(problem.meta, name) is None:
            raise ConfigError(
                "step" if name in ("tau", "lipschitz_L") else name,
                f"{config.scheme} needs problem meta field {name!r} "
                f"(or an explicit override)")


def run_vs_sqn(problem, config: SolverConfig) -> RunResult:
    meta = problem.meta
    theoretical = None
    batch = config.batch or BatchSchedule("geometric", N0=1, rate=0.95)
    if meta.tau is not None and meta.lipschitz_L is not None:
        bounds = theoretical_bounds("SC-smooth", m=config.m, n=meta.n,
                                    L=meta.lipschitz_L, tau=meta.tau)
        theoretical = 1.0 / (meta.lipschitz_L * bounds.lambda_hi)
        if meta.nu1 is not None and meta.nu1 > 0:
            floor = 2 * meta.nu1**2 * bounds.lambda_hi / (
                meta.tau**2 * bounds.lambda_lo)
            if batch.N0 < floor:
                batch = replace(batch, N0=int(math.ceil(floor)))
    if config.step is None and theoretical is None:
        _need_meta(problem, config, "tau", "lipschitz_L")
    step = config.step or ScalarSchedule("constant", theoretical)

    plan = _Plan(
        mode="SC", start_k=0,
        gamma=lambda k: step.eval(k, horizon=config.horizon),
        batch_n=batch.eval,
        step_gradient=lambda x, h, k: evaluate_on_handle(problem, x, h),
        pair_gradient=lambda x, h, k: evaluate_on_handle(problem, x, h),
    )
    return _qn_loop(problem, config, plan, theoretical)


def run_svs_sqn(problem, config: SolverConfig) -> RunResult:
    """Dispatch between the fixed-eta envelope variant and the
    diminishing-eta smoothed variant."""
    if config.scheme == "svs_sqn_moreau":
        return _run_svs_moreau(problem, config)
    return _run_svs_diminishing(problem, config)


def _run_svs_moreau(problem, config: SolverConfig) -> RunResult:
    if not hasattr(problem, "envelope_gradient"):
        raise ConfigError("scheme", "svs_sqn_moreau needs a composite problem "
                                    "with an envelope_gradient oracle")
    meta = problem.meta
    tau = getattr(problem, "sample_tau", None) or meta.tau
    L = getattr(problem, "sample_L", None) or meta.lipschitz_L
    if tau is None or L is None:
        raise ConfigError("step", "svs_sqn_moreau needs tau and lipschitz_L")
    n = meta.n
    cap = min(2.0 / L, (4.0 * (n + 1) ** 2 / tau**2) ** (1.0 / 3.0))
    if config.eta is None:
        eta = 0.99 * cap
    else:
        eta = float(config.eta if not isinstance(config.eta, ScalarSchedule)
                    else config.eta.eval(0, horizon=config.horizon))
        if eta > cap:
            raise ConfigError(
                "eta", f"fixed envelope smoothing must satisfy eta <= "
                       f"min(2/L, (4(n+1)^2/tau^2)^(1/3)) = {cap:.6g}")
    bounds = theoretical_bounds("SC-Moreau", m=config.m, n=n, eta_k=eta, tau=tau)
    theoretical = eta / (4.0 * bounds.lambda_hi)
    step = config.step or ScalarSchedule("constant", theoretical)
    batch = config.batch or BatchSchedule("geometric", N0=1, rate=0.9)

    grad = lambda x, h, k: problem.envelope_gradient(x, h, eta)
    plan = _Plan(
        mode="SC", start_k=0,
        gamma=lambda k: step.eval(k, horizon=config.horizon),
        batch_n=batch.eval,
        step_gradient=grad,
        pair_gradient=grad,
        pair_eta=lambda k: eta,
        eta_log=lambda k: eta,
    )
    return _qn_loop(problem, config, plan, theoretical)


def _run_svs_diminishing(problem, config: SolverConfig) -> RunResult:
    if not hasattr(problem, "batch_gradient_smoothed"):
        raise ConfigError("scheme", "svs_sqn_diminishing needs a smoothable "
                                    "problem oracle")
    meta = problem.meta
    if meta.tau is None:
        raise ConfigError("step", "svs_sqn_diminishing needs tau")
    n, tau, m = meta.n, meta.tau, config.m

    if isinstance(config.eta, ScalarSchedule):
        eta_at = lambda k: config.eta.eval(k, horizon=config.horizon)
    elif config.eta is not None:
        eta_const = float(config.eta)
        eta_at = lambda k: eta_const
    else:
        eta_at = lambda k: eta_schedule_diminishing(n, tau, k)

    def lam_hi(eta):
        return ((n + m) / (eta * tau)) ** m

    if config.step is None:
        gamma_at = lambda k: eta_at(k) / lam_hi(eta_at(k))
    else:
        gamma_at = lambda k: config.step.eval(k, horizon=config.horizon)
    theoretical = eta_at(0) / lam_hi(eta_at(0))

    batch = config.batch
    if batch is None:
        n0 = 1
        if meta.nu1 is not None and meta.nu1 > 0:
            n0 = math.ceil(2 ** (4.0 / 3.0) * meta.nu1**2 * (n + 1) ** (1.0 / 3.0)
                           / tau ** (5.0 / 3.0))
        batch = BatchSchedule("polynomial", N0=max(1, n0),
                              exponent=1.5 + 2.0 / 3.0, offset=2)

    sg = lambda x, h, k: evaluate_on_handle(problem, x, h, eta=eta_at(k))
    plan = _Plan(
        mode="SC", start_k=0,
        gamma=gamma_at,
        batch_n=batch.eval,
        step_gradient=sg,
        pair_gradient=sg,
        pair_eta=eta_at,
        eta_log=eta_at,
    )
    return _qn_loop(problem, config, plan, theoretical)


def run_rvs_sqn(problem, config: SolverConfig) -> RunResult:
    meta = problem.meta
    if meta.lipschitz_L is None and config.step is None:
        raise ConfigError("step", "rvs_sqn needs lipschitz_L or a step override")
    n, m, eps = meta.n, config.m, config.epsilon
    delta_bar = config.delta_bar if config.delta_bar is not None else (
        eps / (2.0 * (n + m)))
    mu_sched = config.mu or ScalarSchedule("power", base=1.0,
                                           exponent=-(1.0 - 2.0 * eps / 3.0))
    mu0 = mu_sched.eval(1)
    L = meta.lipschitz_L
    bounds0 = None
    theoretical = None
    if L is not None:
        bounds0 = theoretical_bounds("C-smooth", m=m, n=n, L=L, mu0=mu0,
                                     mu_k=mu0, delta_bar=delta_bar)
        # steplength ceiling gamma <= lo/(hi^2 (L+mu0)) evaluated at k=1
        theoretical = bounds0.lambda_lo / (bounds0.lambda_hi**2 * (L + mu0))
    step = config.step or ScalarSchedule(
        "power", base=1.0 / (2.0 * L), exponent=-eps)
    batch = config.batch or BatchSchedule("polynomial", N0=1,
                                          exponent=2.0 + eps, offset=0)
    if (meta.nu1 is not None and meta.nu1 > 0 and L is not None
            and meta.alpha_growth is not None and bounds0 is not None):
        lam = bounds0.lambda_hi * mu0 ** (delta_bar * (n + m))
        floor = ((L + mu0) * lam**2 * meta.nu1**2 * step.eval(1)
                 / (meta.alpha_growth * bounds0.lambda_lo * mu0))
        if batch.N0 < floor:
            batch = replace(batch, N0=int(math.ceil(floor)))

    x0 = _initial_point(problem, config)
    state = AlternationState(mu_sched.eval(1), 1.0, last_update_k=1)
    holder = {"state": state, "k_seen": 0}

    def advance(k):
        if k > max(holder["k_seen"], 1):
            holder["state"] = alternation_step(holder["state"], k, mu_sched, None)
            holder["k_seen"] = k

    def step_gradient(x, h, k):
        g = evaluate_on_handle(problem, x, h)
        return g + mu_sched.eval(k) * (x - x0)

    plan = _Plan(
        mode="C", start_k=1,
        gamma=lambda k: step.eval(k, horizon=config.horizon),
        batch_n=batch.eval,
        step_gradient=step_gradient,
        pair_gradient=lambda x, h, k: evaluate_on_handle(problem, x, h),
        pair_mu=lambda k: holder["state"].mu_current,
        advance=advance,
        mu_log=lambda k: mu_sched.eval(k),
        delta=1.0, delta_bar=delta_bar,
    )
    result = _qn_loop(problem, config, plan, theoretical)
    result.extras["delta_bar"] = delta_bar
    return result


def run_rsvs_sqn(problem, config: SolverConfig) -> RunResult:
    if not hasattr(problem, "batch_gradient_smoothed"):
        raise ConfigError("scheme", "rsvs_sqn needs a smoothable problem oracle")
    meta = problem.meta
    n, m, eps = meta.n, config.m, config.epsilon
    K = config.horizon
    eps_bar = 5.0 * eps / 3.0
    mu = config.mu.eval(0, horizon=K) if config.mu else K ** (-1.0 / 3.0)
    if isinstance(config.eta, ScalarSchedule):
        eta = config.eta.eval(0, horizon=K)
    elif config.eta is not None:
        eta = float(config.eta)
    else:
        eta = K ** (-1.0 / 3.0)
    gamma = (config.step.eval(0, horizon=K) if config.step
             else config.c_gamma * K ** (-1.0 / 3.0 + eps_bar))
    delta = config.delta if config.delta is not None else eps / (n + m - 1)
    delta_bar = config.delta_bar if config.delta_bar is not None else (
        eps / (n + m))
    bounds = theoretical_bounds("C-smoothed", m=m, n=n, eta_k=eta, mu0=mu,
                                mu_k=mu, delta=delta, delta_bar=delta_bar)
    nu1 = meta.nu1 or 0.0
    alpha = meta.alpha_growth or meta.tau or 1.0
    C = 2.0 * (1.0 + mu * eta) * bounds.lambda_hi**2 * nu1**2 * gamma**2 / (
        alpha * eta)
    batch = config.batch or BatchSchedule("polynomial", N0=1,
                                          exponent=1.0 + eps, offset=1)
    ceiling = C / (bounds.lambda_lo * mu * gamma)
    if batch.N0 <= ceiling:
        raise ConfigError(
            "batch", f"averaging weights need N0 > C/(lo*mu*gamma) = "
                     f"{ceiling:.6g}; got N0 = {batch.N0}")

    x0 = _initial_point(problem, config)

    def step_gradient(x, h, k):
        g = evaluate_on_handle(problem, x, h, eta=eta)
        return g + mu * (x - x0)

    plan = _Plan(
        mode="C", start_k=0,
        gamma=lambda k: gamma,
        batch_n=batch.eval,
        step_gradient=step_gradient,
        pair_gradient=lambda x, h, k: evaluate_on_handle(
            problem, x, h, eta=eta**delta),
        pair_mu=lambda k: mu,
        pair_eta=lambda k: eta,
        mu_log=lambda k: mu,
        eta_log=lambda k: eta,
        weight=lambda k: bounds.lambda_lo * mu * gamma - C / batch.eval(k),
        delta=delta, delta_bar=delta_bar,
    )
    result = _qn_loop(problem, config, plan, None)
    result.extras.update(
        {"mu": mu, "eta": eta, "gamma": gamma, "delta": delta,
         "delta_bar": delta_bar, "noise_constant_C": C}
    )
    return result


def run_baseline(problem, config: SolverConfig) -> RunResult:
    if config.scheme == "sgd":
        return _run_sgd(problem, config)
    if config.scheme == "sqn_unit":
        return _run_sqn_unit(problem, config)
    return _run_apg(problem, config)


def _run_sqn_unit(problem, config: SolverConfig) -> RunResult:
    meta = problem.meta
    theoretical = None
    if meta.tau is not None and meta.lipschitz_L is not None:
        bounds = theoretical_bounds("SC-smooth", m=config.m, n=meta.n,
                                    L=meta.lipschitz_L, tau=meta.tau)
        theoretical = 2.0 / (meta.lipschitz_L * bounds.lambda_hi)
    if config.step is None and theoretical is None:
        raise ConfigError("step", "sqn_unit needs tau/lipschitz_L or a step")
    step = config.step or ScalarSchedule("power", base=theoretical, exponent=-1.0)
    plan = _Plan(
        mode="SC", start_k=1,
        gamma=lambda k: step.eval(k, horizon=config.horizon),
        batch_n=lambda k: 1,
        step_gradient=lambda x, h, k: evaluate_on_handle(problem, x, h),
        pair_gradient=lambda x, h, k: evaluate_on_handle(problem, x, h),
    )
    return _qn_loop(problem, config, plan, theoretical)


def _run_sgd(problem, config: SolverConfig) -> RunResult:
    meta = problem.meta
    if config.step is None and meta.lipschitz_L is None:
        raise ConfigError("step", "sgd needs lipschitz_L or a step schedule")
    step = config.step or ScalarSchedule("constant", 1.0 / meta.lipschitz_L)
    batch = config.batch or BatchSchedule("constant", N0=1)
    plan = _Plan(
        mode="SC", start_k=1,
        gamma=lambda k: step.eval(k, horizon=config.horizon),
        batch_n=batch.eval,
        step_gradient=lambda x, h, k: evaluate_on_handle(problem, x, h),
        pair_gradient=None,
    )
    return _qn_loop(problem, config, plan, None)


def _run_apg(problem, config: SolverConfig) -> RunResult:
    """Two-sequence accelerated gradient with the compared scheme's batch
    schedule; momentum from tau/L when strongly convex, otherwise the
    vanishing-momentum sequence."""
    meta = problem.meta
    if meta.lipschitz_L is None and config.step is None:
        raise ConfigError("step", "apg_baseline needs lipschitz_L or a step")
    step = config.step or ScalarSchedule("constant", 1.0 / meta.lipschitz_L)
    batch = config.batch or BatchSchedule("constant", N0=1)
    strongly = meta.tau is not None and meta.lipschitz_L is not None
    if strongly:
        root = math.sqrt(meta.lipschitz_L / meta.tau)
        beta_const = (root - 1.0) / (root + 1.0)

    x = _initial_point(problem, config)
    z = x.copy()
    rng = RngStream(config.seed, stream_id=0)
    records: list[IterateRecord] = []
    samples = 0
    t_mom = 1.0
    t0 = time.perf_counter()
    avg_acc = np.zeros_like(x)
    avg_count = 0
    termination = "horizon"
    k = 0
    while True:
        if plan_horizon_reached(config, k):
            termination = "horizon"
            break
        n_k = batch.eval(k)
        handle = rng.next_handle(n_k)
        g = evaluate_on_handle(problem, x, handle)
        samples += n_k
        gamma = step.eval(k, horizon=config.horizon)
        z_new = x - gamma * g
        if strongly:
            beta = beta_const
        else:
            t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_mom * t_mom))
            beta = (t_mom - 1.0) / t_next
            t_mom = t_next
        x = z_new + beta * (z_new - z)
        step_norm = float(np.linalg.norm(z_new - z))
        z = z_new
        if config.average_iterates:
            avg_acc += z
            avg_count += 1
        want_value = k % config.value_every == 0
        f_value = _value_of(problem, z) if want_value else None
        records.append(IterateRecord(
            k, samples, samples, f_value, _gap_of(problem, f_value),
            float(np.linalg.norm(g)), step_norm,
            time.perf_counter() - t0, gamma_k=gamma,
        ))
        k += 1
        if config.sample_budget is not None and samples >= config.sample_budget:
            termination = "budget"
            break
    f_final = _value_of(problem, z)
    records.append(IterateRecord(
        k, samples, samples, f_final, _gap_of(problem, f_final),
        float("nan"), 0.0, time.perf_counter() - t0,
    ))
    x_avg = avg_acc / avg_count if avg_count else None
    return RunResult(config.scheme, records, z, x_avg, termination,
                     None, records[0].gamma_k if records else None)


_RUNNERS = {
    "vs_sqn": run_vs_sqn,
    "svs_sqn_moreau": run_svs_sqn,
    "svs_sqn_diminishing": run_svs_sqn,
    "rvs_sqn": run_rvs_sqn,
    "rsvs_sqn": run_rsvs_sqn,
    "sgd": run_baseline,
    "sqn_unit": run_baseline,
    "apg_baseline": run_baseline,
}


def run(problem, config: SolverConfig) -> RunResult:
    """Run the configured scheme on a problem and return the full log."""
    return _RUNNERS[config.scheme](problem, config)
