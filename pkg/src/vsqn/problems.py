"""Experiment problems: synthetic stochastic quadratics with controlled
conditioning, logistic regression with l1/l2 terms, isotonic-constrained
least squares, an l1 location family for nonsmooth runs, a 2-D nonsmooth
benchmark with a known optimum, and a sparse text dataset loader.

All oracles draw their randomness from a replayable SampleHandle and reduce
in fixed index order, so replays are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Array, ProblemMeta, SampleHandle
from .smoothing import (
    CompositeProxFunction,
    ProxSpec,
    huber_l1,
    lse_smooth_max,
)


@dataclass
class BatchFunction:
    """A batch-average function frozen on one sample handle."""

    grad: Callable[[Array], Array]
    value: Optional[Callable[[Array], float]]
    lipschitz_L: float
    tau: float


# ---------------------------------------------------------------------------
# stochastic quadratics
# ---------------------------------------------------------------------------


class QuadraticEnsemble:
    """E[(1/2) x'Q(w)x + c(w)'x] with c(w) = -Q(w) x_true.

    The mean matrix has the requested spectrum (extremes pinned); each
    sample perturbs the eigenvalues multiplicatively with bounded mean-one
    noise, so every sample stays convex and the gradient noise scales with
    |x - x_true| (state-dependent).  Values are reported relative to the
    optimum, i.e. true_value(x) is exactly the optimality gap.
    """

    def __init__(self, frame: Array, eigs: Array, x_true: Array,
                 noise_half_width: float, convexity: str):
        self.frame = np.asarray(frame, dtype=float)
        self.eigs = np.asarray(eigs, dtype=float)
        self.x_true = np.asarray(x_true, dtype=float)
        self.noise = float(noise_half_width)
        self.convexity = convexity
        if not (0 <= self.noise < 1):
            raise ValueError("noise_half_width must lie in [0, 1)")
        n = self.eigs.size
        min_eig = float(self.eigs[0])
        max_eig = float(self.eigs[-1])
        positive = self.eigs[self.eigs > 0]
        self.meta = ProblemMeta(
            n=n,
            tau=min_eig if min_eig > 0 else None,
            lipschitz_L=max_eig,
            f_star=0.0,
            x_star=self.x_true.copy(),
            alpha_growth=float(positive[0]) if positive.size else None,
        )

    # per-sample curvature range (noise widens the mean spectrum)
    @property
    def sample_tau(self) -> Optional[float]:
        t = self.meta.tau
        return None if t is None else t * (1.0 - self.noise)

    @property
    def sample_L(self) -> float:
        return self.meta.lipschitz_L * (1.0 + self.noise)

    def _noise_factors(self, handle: SampleHandle) -> Array:
        gen = handle.generator()
        if self.noise == 0.0:
            return np.ones((handle.batch, self.eigs.size))
        return gen.uniform(1.0 - self.noise, 1.0 + self.noise,
                           size=(handle.batch, self.eigs.size))

    def batch_gradient(self, x: Array, handle: SampleHandle) -> Array:
        mean_factors = self._noise_factors(handle).mean(axis=0)
        w = self.frame.T @ (np.asarray(x, float) - self.x_true)
        return self.frame @ (self.eigs * mean_factors * w)

    def per_sample_gradients(self, x: Array, handle: SampleHandle) -> Array:
        factors = self._noise_factors(handle)
        w = self.frame.T @ (np.asarray(x, float) - self.x_true)
        return (factors * (self.eigs * w)) @ self.frame.T

    def batch_value(self, x: Array, handle: SampleHandle) -> float:
        mean_factors = self._noise_factors(handle).mean(axis=0)
        w = self.frame.T @ (np.asarray(x, float) - self.x_true)
        return 0.5 * float((self.eigs * mean_factors) @ (w * w))

    def frozen_batch(self, handle: SampleHandle) -> BatchFunction:
        mean_factors = self._noise_factors(handle).mean(axis=0)
        scaled = self.eigs * mean_factors

        def grad(u):
            w = self.frame.T @ (np.asarray(u, float) - self.x_true)
            return self.frame @ (scaled * w)

        def value(u):
            w = self.frame.T @ (np.asarray(u, float) - self.x_true)
            return 0.5 * float(scaled @ (w * w))

        return BatchFunction(grad, value, float(scaled[-1]),
                             float(scaled[0]) if scaled[0] > 0 else 0.0)

    def true_gradient(self, x: Array) -> Array:
        w = self.frame.T @ (np.asarray(x, float) - self.x_true)
        return self.frame @ (self.eigs * w)

    def true_value(self, x: Array) -> float:
        w = self.frame.T @ (np.asarray(x, float) - self.x_true)
        return 0.5 * float(self.eigs @ (w * w))


def quad_make(n: int, kappa: float, convexity: str, rng,
              noise_half_width: float = 0.5) -> QuadraticEnsemble:
    """Random quadratic ensemble with pinned extreme eigenvalues.

    Strongly convex: spectrum uniform in [1, kappa] with 1 and kappa pinned.
    Merely convex: spectrum uniform in [0, kappa] with 0 and kappa pinned.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    if convexity not in ("SC", "C"):
        raise ValueError("convexity must be 'SC' or 'C'")
    gen = rng.generator()
    lo = 1.0 if convexity == "SC" else 0.0
    if n == 2:
        inner = np.empty(0)
    else:
        inner = gen.uniform(lo, kappa, size=n - 2)
    eigs = np.sort(np.concatenate([[lo, kappa], inner]))
    raw = gen.standard_normal((n, n))
    q, r = np.linalg.qr(raw)
    q *= np.sign(np.diag(r))
    x_true = gen.standard_normal(n)
    return QuadraticEnsemble(q, eigs, x_true, noise_half_width, convexity)


# ---------------------------------------------------------------------------
# logistic regression
# ---------------------------------------------------------------------------


def _stable_sigmoid(t: Array) -> Array:
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class LogisticProblem:
    """Sampled-average logistic loss with optional l2 and (smoothed) l1
    terms.  Sampling is with replacement over the data rows."""

    def __init__(self, features: Array, labels: Array, mu_l2: float = 0.0,
                 lambda_l1: float = 0.0, l1_smoothing: str = "none",
                 l1_eta: float = 1e-3):
        self.features = np.asarray(features, dtype=float)
        self.labels = np.asarray(labels, dtype=float)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if set(np.unique(self.labels)) - {-1.0, 1.0}:
            raise ValueError("labels must be -1/+1")
        if l1_smoothing not in ("huber", "none"):
            raise ValueError("l1_smoothing must be 'huber' or 'none'")
        self.mu_l2 = float(mu_l2)
        self.lambda_l1 = float(lambda_l1)
        self.l1_smoothing = l1_smoothing
        self.l1_eta = float(l1_eta)
        self.N, n = self.features.shape
        row_norm_sq = float(np.max(np.sum(self.features**2, axis=1)))
        L = row_norm_sq / 4.0 + self.mu_l2
        if self.lambda_l1 > 0 and l1_smoothing == "huber":
            L += self.lambda_l1 / self.l1_eta
        self.meta = ProblemMeta(
            n=n,
            tau=self.mu_l2 if self.mu_l2 > 0 else None,
            lipschitz_L=L if L > 0 else None,
        )

    def _draw_rows(self, handle: SampleHandle) -> Array:
        return handle.generator().integers(0, self.N, size=handle.batch)

    def _penalty_grad(self, x: Array, l1_eta: Optional[float] = None) -> Array:
        g = self.mu_l2 * x
        if self.lambda_l1 > 0:
            eta = self.l1_eta if l1_eta is None else l1_eta
            if self.l1_smoothing == "huber" or l1_eta is not None:
                g = g + self.lambda_l1 * huber_l1(x, eta)[1]
            else:
                g = g + self.lambda_l1 * np.sign(x)
        return g

    def _penalty_value(self, x: Array, l1_eta: Optional[float] = None) -> float:
        v = 0.5 * self.mu_l2 * float(x @ x)
        if self.lambda_l1 > 0:
            eta = self.l1_eta if l1_eta is None else l1_eta
            if self.l1_smoothing == "huber" or l1_eta is not None:
                v += self.lambda_l1 * huber_l1(x, eta)[0]
            else:
                v += self.lambda_l1 * float(np.sum(np.abs(x)))
        return v

    def _loss_grad_rows(self, x: Array, rows: Array) -> Array:
        xb = self.features[rows]
        vb = self.labels[rows]
        s = _stable_sigmoid(-vb * (xb @ x))
        return -(xb * (vb * s)[:, None])

    def batch_gradient(self, x: Array, handle: SampleHandle) -> Array:
        x = np.asarray(x, dtype=float)
        rows = self._draw_rows(handle)
        return self._loss_grad_rows(x, rows).mean(axis=0) + self._penalty_grad(x)

    def batch_gradient_smoothed(self, x: Array, handle: SampleHandle,
                                eta: float) -> Array:
        x = np.asarray(x, dtype=float)
        rows = self._draw_rows(handle)
        return self._loss_grad_rows(x, rows).mean(axis=0) + self._penalty_grad(x, eta)

    def per_sample_gradients(self, x: Array, handle: SampleHandle) -> Array:
        x = np.asarray(x, dtype=float)
        rows = self._draw_rows(handle)
        return self._loss_grad_rows(x, rows) + self._penalty_grad(x)[None, :]

    def batch_value(self, x: Array, handle: SampleHandle) -> float:
        x = np.asarray(x, dtype=float)
        rows = self._draw_rows(handle)
        margins = -self.labels[rows] * (self.features[rows] @ x)
        return float(np.mean(np.logaddexp(0.0, margins))) + self._penalty_value(x)

    def full_gradient(self, x: Array) -> Array:
        x = np.asarray(x, dtype=float)
        rows = np.arange(self.N)
        return self._loss_grad_rows(x, rows).mean(axis=0) + self._penalty_grad(x)

    def true_value(self, x: Array) -> float:
        x = np.asarray(x, dtype=float)
        margins = -self.labels * (self.features @ x)
        return float(np.mean(np.logaddexp(0.0, margins))) + self._penalty_value(x)


def make_synthetic_sparse_logistic(n: int, num_samples: int, rng,
                                   support_frac: float = 0.1,
                                   density: float = 0.05,
                                   mu_l2: float = 0.0,
                                   lambda_l1: float = 0.0,
                                   l1_smoothing: str = "none",
                                   l1_eta: float = 1e-3):
    """Binary sparse features with a planted sparse ground truth.

    Returns (problem, x_true); labels follow the logistic model at x_true.
    """
    gen = rng.generator()
    features = (gen.random((num_samples, n)) < density).astype(float)
    support = round(support_frac * n)
    x_true = np.zeros(n)
    idx = gen.choice(n, size=support, replace=False)
    x_true[idx] = gen.uniform(1.0, 3.0, size=support) * gen.choice(
        [-1.0, 1.0], size=support
    )
    probs = _stable_sigmoid(features @ x_true)
    labels = np.where(gen.random(num_samples) < probs, 1.0, -1.0)
    problem = LogisticProblem(features, labels, mu_l2=mu_l2,
                              lambda_l1=lambda_l1, l1_smoothing=l1_smoothing,
                              l1_eta=l1_eta)
    return problem, x_true


def load_sparse_dataset(path, n: Optional[int] = None, **kwargs) -> LogisticProblem:
    """Parse 'label idx:val idx:val ...' rows (1-based indices).

    Labels must map onto {-1, +1}; 0/1 labels are mapped.  The dimension is
    inferred from the largest index unless given.
    """
    rows = []
    labels = []
    max_index = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                label = float(parts[0])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad label {parts[0]!r}") from exc
            entries = []
            for token in parts[1:]:
                try:
                    idx_str, val_str = token.split(":")
                    idx = int(idx_str)
                    val = float(val_str)
                except ValueError as exc:
                    raise ValueError(
                        f"line {lineno}: bad feature token {token!r}"
                    ) from exc
                if idx < 1:
                    raise ValueError(f"line {lineno}: indices are 1-based")
                entries.append((idx, val))
                max_index = max(max_index, idx)
            rows.append(entries)
            labels.append(label)
    if not rows:
        raise ValueError(f"{path}: no records")
    if n is None:
        n = max_index
    mapped = []
    for lineno, label in enumerate(labels, start=1):
        if label in (-1.0, 1.0):
            mapped.append(label)
        elif label == 0.0:
            mapped.append(-1.0)
        else:
            raise ValueError(f"record {lineno}: label {label} not in {{-1,+1,0,1}}")
    features = np.zeros((len(rows), n))
    for i, entries in enumerate(rows):
        for idx, val in entries:
            if idx > n:
                raise ValueError(f"record {i + 1}: index {idx} exceeds n={n}")
            features[i, idx - 1] = val
    return LogisticProblem(features, np.asarray(mapped), **kwargs)


def save_sparse_dataset(path, features: Array, labels: Array) -> None:
    """Write rows in the loader's text format (zeros omitted)."""
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        for row, label in zip(features, labels):
            nz = np.flatnonzero(row)
            tokens = " ".join(f"{j + 1}:{float(row[j])!r}" for j in nz)
            fh.write(f"{int(label):+d} {tokens}".rstrip() + "\n")


# ---------------------------------------------------------------------------
# isotonic-constrained least squares
# ---------------------------------------------------------------------------


def pava_project(x: Array) -> Array:
    """Euclidean projection onto {x_1 <= x_2 <= ... <= x_n} by pooling
    adjacent violating blocks."""
    x = np.asarray(x, dtype=float)
    means: list[float] = []
    counts: list[int] = []
    for v in x:
        means.append(float(v))
        counts.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, c2 = means.pop(), counts.pop()
            m1, c1 = means.pop(), counts.pop()
            means.append((m1 * c1 + m2 * c2) / (c1 + c2))
            counts.append(c1 + c2)
    out = np.empty_like(x)
    pos = 0
    for m, c in zip(means, counts):
        out[pos:pos + c] = m
        pos += c
    return out


def monotone_violation(x: Array) -> float:
    """max over i of (x_i - x_{i+1})_+ , zero when feasible."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return 0.0
    return float(np.maximum(x[:-1] - x[1:], 0.0).max())


class IsotonicLasso:
    """(1/2) sum_i |A_i x - b_i|^2 over the monotone cone, handled through
    squared-distance smoothing of the constraint indicator.

    Rows are sampled with replacement; the indicator penalty is
    deterministic and enters every sample, so per-sample functions remain
    convex with smoothness bounded by p*|A_i|^2 + 1/eta.
    """

    def __init__(self, A: Array, b: Array, eta: float = 1e-2):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.default_eta = float(eta)
        if self.default_eta <= 0:
            raise ValueError("eta must be > 0")
        self.p, n = self.A.shape
        gram_norm = float(np.linalg.eigvalsh(self.A.T @ self.A)[-1])
        self.data_lipschitz = gram_norm
        self.meta = ProblemMeta(n=n, lipschitz_L=gram_norm + 1.0 / self.default_eta)

    def _rows(self, handle: SampleHandle) -> Array:
        return handle.generator().integers(0, self.p, size=handle.batch)

    def _data_grad_rows(self, x: Array, rows: Array) -> Array:
        ab = self.A[rows]
        res = ab @ x - self.b[rows]
        return self.p * ab * res[:, None]

    def _penalty_grad(self, x: Array, eta: float) -> Array:
        return (x - pava_project(x)) / eta

    def batch_gradient(self, x: Array, handle: SampleHandle) -> Array:
        return self.batch_gradient_smoothed(x, handle, self.default_eta)

    def batch_gradient_smoothed(self, x: Array, handle: SampleHandle,
                                eta: float) -> Array:
        x = np.asarray(x, dtype=float)
        rows = self._rows(handle)
        return self._data_grad_rows(x, rows).mean(axis=0) + self._penalty_grad(x, eta)

    def per_sample_gradients(self, x: Array, handle: SampleHandle) -> Array:
        x = np.asarray(x, dtype=float)
        rows = self._rows(handle)
        return self._data_grad_rows(x, rows) + self._penalty_grad(x, self.default_eta)

    def true_value(self, x: Array, eta: Optional[float] = None) -> float:
        x = np.asarray(x, dtype=float)
        eta = self.default_eta if eta is None else eta
        res = self.A @ x - self.b
        d = x - pava_project(x)
        return 0.5 * float(res @ res) + float(d @ d) / (2.0 * eta)

    def data_value(self, x: Array) -> float:
        res = self.A @ np.asarray(x, float) - self.b
        return 0.5 * float(res @ res)

    def violation(self, x: Array) -> float:
        return monotone_violation(x)


def make_isotonic(n: int, p: int, rng, eta: float = 1e-2,
                  sigma: float = 0.01) -> IsotonicLasso:
    """Design with a planted monotone signal: the first and last quarters
    of x0 ascend over [-10,0] and [0,10], the middle is zero, and
    b = A(x0 + noise)."""
    if n < 4:
        raise ValueError("n must be >= 4")
    gen = rng.generator()
    quarter = n // 4
    x0 = np.zeros(n)
    x0[:quarter] = np.sort(gen.uniform(-10.0, 0.0, size=quarter))
    x0[n - quarter:] = np.sort(gen.uniform(0.0, 10.0, size=quarter))
    A = gen.standard_normal((p, n))
    noise = gen.normal(0.0, sigma, size=n)
    b = A @ (x0 + noise)
    return IsotonicLasso(A, b, eta=eta)


# ---------------------------------------------------------------------------
# l1 location family (nonsmooth, optionally strongly convex)
# ---------------------------------------------------------------------------


class L1LocationProblem:
    """f(x) = (sc/2)|x - c|^2 + E |x - c - u|_1 with u uniform noise.

    The optimum is exactly the center c with value n*w/2, so optimality
    gaps are analytic.  The Huber-smoothed sampled gradient has curvature
    at most sc + 1/eta, matching the smoothability contract exactly.
    """

    def __init__(self, center: Array, noise_half_width: float = 1.0,
                 sc_weight: float = 0.0):
        self.center = np.asarray(center, dtype=float)
        self.w = float(noise_half_width)
        self.sc = float(sc_weight)
        if self.w <= 0:
            raise ValueError("noise_half_width must be > 0")
        n = self.center.size
        self.smoothing_beta = n / 2.0
        self.subgradient_bound = math.sqrt(n)
        self.meta = ProblemMeta(
            n=n,
            tau=self.sc if self.sc > 0 else None,
            f_star=n * self.w / 2.0,
            x_star=self.center.copy(),
        )

    def _offsets(self, handle: SampleHandle) -> Array:
        gen = handle.generator()
        return gen.uniform(-self.w, self.w, size=(handle.batch, self.center.size))

    def batch_gradient_smoothed(self, x: Array, handle: SampleHandle,
                                eta: float) -> Array:
        x = np.asarray(x, dtype=float)
        diffs = (x - self.center)[None, :] - self._offsets(handle)
        quad = np.abs(diffs) <= eta
        grads = np.where(quad, diffs / eta, np.sign(diffs))
        return grads.mean(axis=0) + self.sc * (x - self.center)

    def batch_gradient(self, x: Array, handle: SampleHandle) -> Array:
        x = np.asarray(x, dtype=float)
        diffs = (x - self.center)[None, :] - self._offsets(handle)
        return np.sign(diffs).mean(axis=0) + self.sc * (x - self.center)

    def per_sample_gradients(self, x: Array, handle: SampleHandle) -> Array:
        x = np.asarray(x, dtype=float)
        diffs = (x - self.center)[None, :] - self._offsets(handle)
        return np.sign(diffs) + (self.sc * (x - self.center))[None, :]

    def value_smoothed(self, x: Array, handle: SampleHandle, eta: float) -> float:
        x = np.asarray(x, dtype=float)
        diffs = (x - self.center)[None, :] - self._offsets(handle)
        ad = np.abs(diffs)
        vals = np.where(ad <= eta, diffs**2 / (2 * eta), ad - eta / 2.0)
        anchor = 0.5 * self.sc * float(np.sum((x - self.center) ** 2))
        return float(vals.sum(axis=1).mean()) + anchor

    def true_value(self, x: Array) -> float:
        d = np.abs(np.asarray(x, float) - self.center)
        inside = d <= self.w
        per = np.where(inside, (d * d + self.w * self.w) / (2 * self.w), d)
        anchor = 0.5 * self.sc * float(np.sum((np.asarray(x, float) - self.center) ** 2))
        return float(per.sum()) + anchor


# ---------------------------------------------------------------------------
# 2-D nonsmooth benchmark with known optimum
# ---------------------------------------------------------------------------

LEWIS_OVERTON_A = np.array([[2.0, 1.0], [-2.0, 1.0], [0.0, 3.0]])
LEWIS_OVERTON_B = np.zeros(3)
LEWIS_OVERTON_OPT = np.array([0.0, -1.0])


def lewis_overton_oracle(x: Array, eta: float = 0.0):
    """(1/2)|x|^2 + max{2|x1| + x2, 3 x2}, written as a max of three affine
    forms and smoothed through log-sum-exp when eta > 0.

    eta = 0 returns the exact value and one subgradient (the gradient of a
    maximizing affine term)."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    x = np.asarray(x, dtype=float)
    if eta == 0.0:
        z = LEWIS_OVERTON_A @ x + LEWIS_OVERTON_B
        top = int(np.argmax(z))
        return 0.5 * float(x @ x) + float(z[top]), x + LEWIS_OVERTON_A[top]
    value, grad = lse_smooth_max(LEWIS_OVERTON_A, LEWIS_OVERTON_B, x, eta)
    return 0.5 * float(x @ x) + value, x + grad


class LewisOvertonProblem:
    """Deterministic smoothed view of the 2-D benchmark, exposed through
    the stochastic-oracle interface (draws are consumed but unused)."""

    def __init__(self, eta: float = 0.05):
        if eta <= 0:
            raise ValueError("eta must be > 0")
        self.eta = float(eta)
        gram = float(np.linalg.eigvalsh(LEWIS_OVERTON_A.T @ LEWIS_OVERTON_A)[-1])
        self.meta = ProblemMeta(
            n=2,
            tau=1.0,
            lipschitz_L=1.0 + gram / self.eta,
            f_star=-0.5,
            x_star=LEWIS_OVERTON_OPT.copy(),
        )

    def batch_gradient(self, x: Array, handle: SampleHandle) -> Array:
        return lewis_overton_oracle(x, self.eta)[1]

    def per_sample_gradients(self, x: Array, handle: SampleHandle) -> Array:
        return np.tile(self.batch_gradient(x, handle), (handle.batch, 1))

    def batch_gradient_smoothed(self, x: Array, handle: SampleHandle,
                                eta: float) -> Array:
        return lewis_overton_oracle(x, eta)[1]

    def true_value(self, x: Array) -> float:
        return lewis_overton_oracle(x, 0.0)[0]


# ---------------------------------------------------------------------------
# composite problems (prox-friendly nonsmooth piece + sampled smooth piece)
# ---------------------------------------------------------------------------


class CompositeProblem:
    """h + E[F(., w)] with h prox-friendly and F smooth and strongly convex
    per sample; envelope gradients of the sample-average composite are
    computed through an inner prox solve on the frozen batch."""

    def __init__(self, h, smooth, prox_spec: ProxSpec = ProxSpec(),
                 subgradient_bound: Optional[float] = None):
        self.h = h
        self.smooth = smooth
        self.prox_spec = prox_spec
        self.subgradient_bound = subgradient_bound
        base = smooth.meta
        self.meta = ProblemMeta(
            n=base.n,
            tau=base.tau,
            lipschitz_L=base.lipschitz_L,
        )

    @property
    def sample_tau(self):
        return getattr(self.smooth, "sample_tau", self.smooth.meta.tau)

    @property
    def sample_L(self):
        return getattr(self.smooth, "sample_L", self.smooth.meta.lipschitz_L)

    def _frozen(self, handle: SampleHandle) -> CompositeProxFunction:
        bf = self.smooth.frozen_batch(handle)
        return CompositeProxFunction(self.h, bf.value, bf.grad, bf.lipschitz_L,
                                     bf.tau, self.prox_spec)

    def envelope_gradient(self, x: Array, handle: SampleHandle, eta: float) -> Array:
        """(x - prox of the sample-average composite)/eta."""
        x = np.asarray(x, dtype=float)
        u = self._frozen(handle).prox(x, eta)
        return (x - u) / eta

    def per_sample_gradients(self, x: Array, handle: SampleHandle) -> Array:
        return self.smooth.per_sample_gradients(x, handle)

    def true_value(self, x: Array) -> float:
        return self.h.value(x) + self.smooth.true_value(x)

    def true_smooth_gradient(self, x: Array) -> Array:
        return self.smooth.true_gradient(x)
