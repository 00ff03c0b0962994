"""Smoothers for nonsmooth convex pieces.

Provides Moreau envelopes via proximal maps (closed form or an inner
solver), log-sum-exp smoothing of a max of affine forms, componentwise
Huber smoothing of the l1 norm, Euclidean-norm smoothing, squared-distance
smoothing of set indicators, and validity checks for the smoothing
inequalities used by the diminishing-parameter solvers.

Every smoother carries its scale constants: the gradient of an
eta-smoothed function is (alpha_smooth/eta)-Lipschitz, and
f_eta <= f <= f_eta + eta*beta pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Array, assert_finite

PROX_KINDS = ("closed_form_l1", "projection_set", "inner_solver")


class ProxSolverError(RuntimeError):
    """Inner proximal solve failed to reach its residual tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class ProxSpec:
    """How a proximal map is computed.

    For ``inner_solver`` the solve stops once the fixed-point residual of
    the inner objective satisfies residual <= tolerance * (1 + |x|).
    """

    kind: str = "inner_solver"
    tolerance: float = 1e-10
    max_inner_iters: int = 20_000

    def __post_init__(self):
        if self.kind not in PROX_KINDS:
            raise ValueError(f"unknown prox kind {self.kind!r}")
        if self.tolerance <= 0 or self.max_inner_iters < 1:
            raise ValueError("tolerance must be > 0 and max_inner_iters >= 1")


def prox_soft_threshold(x: Array, threshold: float) -> Array:
    """Componentwise sign(x_i) * max(|x_i| - threshold, 0)."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


class L1Function:
    """lam * |u|_1 with its closed-form prox."""

    def __init__(self, lam: float = 1.0):
        if lam < 0:
            raise ValueError("lam must be >= 0")
        self.lam = float(lam)

    def value(self, u: Array) -> float:
        return self.lam * float(np.sum(np.abs(u)))

    def prox(self, x: Array, t: float) -> Array:
        return prox_soft_threshold(x, t * self.lam)


class IndicatorFunction:
    """Indicator of a closed convex set given by its Euclidean projection."""

    def __init__(self, project: Callable[[Array], Array]):
        self.project = project

    def value(self, u: Array) -> float:
        p = self.project(np.asarray(u, float))
        return 0.0 if np.allclose(p, u, atol=1e-12) else math.inf

    def prox(self, x: Array, t: float) -> Array:
        return self.project(np.asarray(x, float))


class CompositeProxFunction:
    """f = h + g with h prox-friendly and g smooth; prox via inner solver.

    The inner problem  min_u h(u) + g(u) + |u - x|^2 / (2 eta)  is
    (tau_g + 1/eta)-strongly convex, so a proximal-gradient loop with the
    exact Lipschitz step converges linearly.  Residuals use the
    fixed-point map of that loop.
    """

    def __init__(self, h, smooth_value, smooth_grad, lipschitz_L, tau=0.0,
                 spec: ProxSpec = ProxSpec()):
        self.h = h
        self.smooth_value = smooth_value
        self.smooth_grad = smooth_grad
        self.lipschitz_L = float(lipschitz_L)
        self.tau = float(tau)
        self.spec = spec

    def value(self, u: Array) -> float:
        return self.h.value(u) + float(self.smooth_value(u))

    def prox(self, x: Array, eta: float) -> Array:
        x = np.asarray(x, dtype=float)
        step = 1.0 / (self.lipschitz_L + 1.0 / eta)
        tol = self.spec.tolerance * (1.0 + float(np.linalg.norm(x)))
        u = x.copy()
        residual = math.inf
        for _ in range(self.spec.max_inner_iters):
            grad = self.smooth_grad(u) + (u - x) / eta
            u_next = self.h.prox(u - step * grad, step)
            residual = float(np.linalg.norm(u_next - u)) / step
            u = u_next
            if residual <= tol:
                return u
        raise ProxSolverError(
            f"inner prox solve stalled at residual {residual:.3e} "
            f"(tolerance {tol:.3e}); widen ProxSpec limits",
            residual,
        )


def moreau_value_grad(f, x: Array, eta: float):
    """Envelope value and gradient at x for a function exposing a prox.

    value = f(u*) + |u* - x|^2/(2 eta) and grad = (x - u*)/eta where
    u* = prox_{eta, f}(x).
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    x = np.asarray(x, dtype=float)
    u = f.prox(x, eta)
    diff = x - u
    value = f.value(u) + float(diff @ diff) / (2.0 * eta)
    return value, diff / eta


def lse_smooth_max(A: Array, b: Array, x: Array, eta: float):
    """Smoothed max of affine forms a_i.x + b_i.

    value = eta*log(sum_i exp(z_i/eta)) - eta*log(count) with
    z_i = a_i.x + b_i, computed with max subtraction; the gradient is the
    softmax-weighted combination of the rows of A.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(A.shape[0])
    if A.shape[0] < 2:
        raise ValueError("need at least 2 affine terms")
    z = A @ np.asarray(x, dtype=float) + b
    zmax = float(np.max(z))
    w = np.exp((z - zmax) / eta)
    total = float(np.sum(w))
    value = zmax + eta * math.log(total) - eta * math.log(A.shape[0])
    w /= total
    return value, w @ A


def huber_l1(x: Array, eta: float):
    """Componentwise Huber smoothing of |x|_1.

    Per entry: x_i^2/(2 eta) on |x_i| <= eta, else |x_i| - eta/2.  The
    branch boundary goes to the quadratic side (both formulas coincide
    there).
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    quad = ax <= eta
    value = float(np.sum(np.where(quad, x * x / (2.0 * eta), ax - eta / 2.0)))
    grad = np.where(quad, x / eta, np.sign(x))
    return value, grad


def norm2_smooth(x: Array, eta: float):
    """sqrt(|x|^2 + eta^2) - eta and its gradient x/sqrt(|x|^2 + eta^2)."""
    if eta <= 0:
        raise ValueError("eta must be > 0")
    x = np.asarray(x, dtype=float)
    root = math.sqrt(float(x @ x) + eta * eta)
    return root - eta, x / root


def indicator_smooth(x: Array, project: Callable[[Array], Array], eta: float):
    """Squared-distance smoothing of a set indicator.

    value = |x - P(x)|^2/(2 eta), grad = (x - P(x))/eta with P the
    Euclidean projection onto the set.
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    x = np.asarray(x, dtype=float)
    diff = x - project(x)
    return float(diff @ diff) / (2.0 * eta), diff / eta


def eta_schedule_diminishing(n: int, tau: float, k: int) -> float:
    """Smoothing level (2(n+1)^2 / (tau^2 (k+2)))^(1/3); decreasing in k."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    if k < 0:
        raise ValueError("k must be >= 0")
    return (2.0 * (n + 1) ** 2 / (tau**2 * (k + 2))) ** (1.0 / 3.0)


@dataclass
class ChainReport:
    max_violation: float
    points_checked: int
    passed: bool


def check_smoothing_chain(f_pair, eta_k: float, eta_k1: float, B: float,
                          points: Sequence[Array]) -> ChainReport:
    """Check f_{eta'}(x) <= f_{eta}(x) + ((eta^2/eta') - eta) B^2 / 2
    over sampled points, for a consecutive pair of smoothing levels
    eta' <= eta.  Passes when the worst violation is at floating-point
    scale (<= 1e-12)."""
    if eta_k1 > eta_k:
        raise ValueError("smoothing levels must be non-increasing")
    f_eta, f_eta1 = f_pair
    slack = 0.5 * (eta_k**2 / eta_k1 - eta_k) * B * B
    worst = -math.inf
    count = 0
    for x in points:
        violation = f_eta1(x) - (f_eta(x) + slack)
        worst = max(worst, violation)
        count += 1
    return ChainReport(worst, count, worst <= 1e-12)


@dataclass
class SmoothedView:
    """A smoothed function with its scale certificates.

    The gradient is (alpha_smooth/eta)-Lipschitz and
    value(x) <= original(x) <= value(x) + eta*beta at every point.  ``prox``
    is present for Moreau-type views only.
    """

    eta: float
    alpha_smooth: float
    beta: float
    value: Callable[[Array], float]
    gradient: Callable[[Array], Array]
    prox: Optional[Callable[[Array], Array]] = None

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be > 0")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")

    @property
    def grad_lipschitz(self) -> float:
        return self.alpha_smooth / self.eta

    @staticmethod
    def norm2(eta: float) -> "SmoothedView":
        return SmoothedView(
            eta, 1.0, 1.0,
            lambda x: norm2_smooth(x, eta)[0],
            lambda x: norm2_smooth(x, eta)[1],
        )

    @staticmethod
    def lse(A: Array, b: Array, eta: float) -> "SmoothedView":
        count = np.atleast_2d(A).shape[0]
        alpha = float(np.linalg.eigvalsh(np.atleast_2d(A).T @ np.atleast_2d(A))[-1])
        return SmoothedView(
            eta, alpha, math.log(count),
            lambda x: lse_smooth_max(A, b, x, eta)[0],
            lambda x: lse_smooth_max(A, b, x, eta)[1],
        )

    @staticmethod
    def huber(eta: float, dim: int, weight: float = 1.0) -> "SmoothedView":
        return SmoothedView(
            eta, weight, weight * dim / 2.0,
            lambda x: weight * huber_l1(x, eta)[0],
            lambda x: weight * huber_l1(x, eta)[1],
        )

    @staticmethod
    def moreau(f, eta: float, subgradient_bound: float) -> "SmoothedView":
        return SmoothedView(
            eta, 1.0, subgradient_bound**2,
            lambda x: moreau_value_grad(f, x, eta)[0],
            lambda x: moreau_value_grad(f, x, eta)[1],
            prox=lambda x: f.prox(np.asarray(x, float), eta),
        )

    @staticmethod
    def indicator(project: Callable[[Array], Array], eta: float) -> "SmoothedView":
        # no finite smoothing gap exists for an indicator (beta formally inf)
        return SmoothedView(
            eta, 1.0, math.inf,
            lambda x: indicator_smooth(x, project, eta)[0],
            lambda x: indicator_smooth(x, project, eta)[1],
            prox=lambda x: project(np.asarray(x, float)),
        )
