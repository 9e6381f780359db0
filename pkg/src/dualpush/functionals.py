"""Variational objectives over empirical targets: KL, JS, and Wasserstein-1.

Each divergence ``F(p)`` is handled through its variational form

    F(p) = sup_f  E_p[f] - F*(f),

with the conjugate term ``F*`` estimated on samples from the target
distribution. The witness ``f`` is a shallow network (see :mod:`.vfm`);
its weight-ball constraint plays the role of the Lipschitz/boundedness
restriction that the conjugates assume.

Conjugate estimators on target values ``f_1..f_n``:

* KL:  ``log mean exp(f_j)`` (max-subtracted)
* JS:  ``-1/2 mean log(max(1 - exp(2 f_j)/2, eps)) - 1/2 log 2``; the clamp
  keeps the log finite when ``f_j`` exceeds the admissible range
  ``f < log(sqrt 2)`` and the number of clamped samples is reported
* W1:  ``mean f_j``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateError
from .geometry import Domain
from .vfm import ShallowNet, net_eval, net_grad_weights, net_grad_weights_sum

KL = "kl"
JS = "js"
W1 = "w1"

FUNCTIONAL_KINDS = (KL, JS, W1)


@dataclass(frozen=True)
class TargetSampleSet:
    """Samples from the target distribution, pinned to a domain."""

    samples: np.ndarray  # (n, d)
    domain: Domain

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 2 or samples.shape[0] == 0:
            raise DegenerateError("target sample set must be a non-empty (n, d) array")
        if samples.shape[1] != self.domain.dim:
            raise ValueError(f"target dim {samples.shape[1]} != domain dim {self.domain.dim}")
        if not np.all(self.domain.contains(samples)):
            raise ValueError("target samples must lie in the domain")

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class VariationalFunctional:
    """A divergence kind bound to a target sample set.

    ``conjugate_batch_size`` is the default minibatch size M for stochastic
    conjugate gradients (capped at the number of target samples; when it
    covers the whole set the full set is used deterministically).
    ``w1_lipschitz_bound`` is recorded for reporting; the witness class
    enforces boundedness through its weight ball rather than a hard
    Lipschitz projection.
    """

    kind: str
    target: TargetSampleSet
    conjugate_batch_size: int = 32
    js_clamp_eps: float = 1e-6
    w1_lipschitz_bound: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in FUNCTIONAL_KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if self.conjugate_batch_size < 1:
            raise ValueError("conjugate_batch_size must be >= 1")
        if self.js_clamp_eps <= 0.0:
            raise ValueError("js_clamp_eps must be positive")
        if self.w1_lipschitz_bound <= 0.0:
            raise ValueError("w1_lipschitz_bound must be positive")


def _as_values(f_on_target) -> np.ndarray:
    f = np.asarray(f_on_target, dtype=float).ravel()
    if f.size == 0:
        raise DegenerateError("empty evaluation array")
    return f


def conjugate_value(fun: VariationalFunctional, f_on_target) -> float:
    """Estimate ``F*(f)`` from the witness values on target samples."""
    f = _as_values(f_on_target)
    if fun.kind == KL:
        m = f.max()
        return float(np.log(np.mean(np.exp(f - m))) + m)
    if fun.kind == JS:
        t = np.maximum(1.0 - 0.5 * np.exp(2.0 * f), fun.js_clamp_eps)
        return float(-0.5 * np.mean(np.log(t)) - 0.5 * np.log(2.0))
    return float(f.mean())


def clamp_count(fun: VariationalFunctional, f_on_target) -> int:
    """Number of target values hitting the JS clamp (0 for KL/W1)."""
    if fun.kind != JS:
        return 0
    f = _as_values(f_on_target)
    return int(np.sum(1.0 - 0.5 * np.exp(2.0 * f) < fun.js_clamp_eps))


def target_minibatch(fun: VariationalFunctional, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform minibatch of target samples.

    A requested size covering the whole set returns the full set in stored
    order (no resampling), which makes small-target configurations exact.
    """
    samples = fun.target.samples
    m = fun.conjugate_batch_size if size is None else size
    if m < 1:
        raise ValueError("minibatch size must be >= 1")
    n = samples.shape[0]
    if m >= n:
        return samples
    return samples[rng.integers(0, n, size=m)]


def _conjugate_coefficients(fun: VariationalFunctional, f_batch: np.ndarray) -> np.ndarray:
    """Per-sample weights of the stochastic conjugate gradient."""
    m = f_batch.size
    if fun.kind == KL:
        e = np.exp(f_batch - f_batch.max())
        return e / e.sum()
    if fun.kind == JS:
        half = 0.5 * np.exp(2.0 * f_batch)
        t = 1.0 - half
        # Clamped samples sit on the flat part of the clamped conjugate, so
        # their derivative (and hence their weight) is exactly zero.
        return np.where(t > fun.js_clamp_eps, half / np.maximum(t, fun.js_clamp_eps), 0.0) / m
    return np.full(m, 1.0 / m)


def vfm_weight_gradient(
    fun: VariationalFunctional,
    net: ShallowNet,
    particle: np.ndarray,
    target_batch: np.ndarray,
) -> np.ndarray:
    """Stochastic weight gradient of ``F*(f_w) - f_w(particle)``.

    Descending this direction raises the witness at the particle and lowers
    the conjugate term estimated on the batch.
    """
    batch = np.atleast_2d(np.asarray(target_batch, dtype=float))
    f_batch = np.atleast_1d(net_eval(net, batch))
    coef = _conjugate_coefficients(fun, f_batch)
    return net_grad_weights_sum(net, batch, coef) - net_grad_weights(net, particle)


def objective_estimate(fun: VariationalFunctional, net: ShallowNet, particles) -> float:
    """Empirical variational objective: mean over particles minus conjugate."""
    pts = np.asarray(getattr(particles, "points", particles), dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise DegenerateError("objective needs a non-empty (n, d) particle array")
    f_particles = net_eval(net, pts)
    f_targets = net_eval(net, fun.target.samples)
    return float(np.mean(f_particles) - conjugate_value(fun, f_targets))
