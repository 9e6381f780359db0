"""Shallow random-sign witnesses and their one-pass projected-SGD maximizer.

The witness class is

    f(x) = (1 / sqrt(n_w)) * sum_i b_i * tanh(w_i . x),

with signs ``b_i`` drawn once and frozen; only the hidden weights ``w``
train, and they are kept inside a Frobenius ball of radius ``r_f`` around
their initialization ``w0``. That ball is what bounds the witness (and its
Lipschitz constant), so no output-layer training or weight decay is needed.

``vfm_run`` fits the witness with a single pass of projected SGD over the
particles: one step per particle at stepsize ``N^{-1/2}``, returning the
average of the iterates visited *before* each update. Averaging the ``N``
pre-update iterates is what the convergence argument for one-pass SGD on a
concave objective wants, and it makes ``N = 1`` return the initial weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateError


@dataclass
class ShallowNet:
    """Witness network state: trainable ``w``, anchor ``w0``, fixed signs ``b``."""

    w: np.ndarray  # (n_w, d)
    w0: np.ndarray  # (n_w, d) anchor of the weight ball
    b: np.ndarray  # (n_w,) entries in {-1.0, +1.0}
    r_f: float

    @property
    def n_w(self) -> int:
        return self.w.shape[0]

    @property
    def dim(self) -> int:
        return self.w.shape[1]


@dataclass
class VfmConfig:
    """Witness-fitting knobs.

    ``init_scale`` is the standard deviation of the Gaussian anchor init;
    ``None`` selects ``1/sqrt(d)`` at init time. ``conjugate_batch`` is the
    minibatch size M used for the stochastic conjugate gradient inside
    ``vfm_run``. ``seed`` only matters when no RNG is passed explicitly.
    """

    n_w: int = 256
    r_f: float = 10.0
    init_scale: float | None = None
    conjugate_batch: int = 32
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.n_w < 1:
            raise ValueError("n_w must be >= 1")
        if self.r_f <= 0.0:
            raise ValueError("r_f must be positive")
        if self.init_scale is not None and self.init_scale < 0.0:
            raise ValueError("init_scale must be >= 0")
        if self.conjugate_batch < 1:
            raise ValueError("conjugate_batch must be >= 1")


def net_init(cfg: VfmConfig, d: int, rng: np.random.Generator | None = None) -> ShallowNet:
    """Draw a fresh witness: Gaussian anchor weights, uniform signs."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    scale = cfg.init_scale if cfg.init_scale is not None else 1.0 / np.sqrt(d)
    w0 = rng.normal(0.0, scale, size=(cfg.n_w, d))
    b = rng.integers(0, 2, size=cfg.n_w).astype(float) * 2.0 - 1.0
    return ShallowNet(w=w0.copy(), w0=w0, b=b, r_f=cfg.r_f)


def net_eval(net: ShallowNet, x: np.ndarray):
    """Evaluate the witness at ``(d,)`` or ``(n, d)`` inputs."""
    x = np.asarray(x, dtype=float)
    return np.tanh(x @ net.w.T) @ net.b / np.sqrt(net.n_w)


def net_grad_input(net: ShallowNet, x: np.ndarray) -> np.ndarray:
    """Gradient of the witness in input space, shape matching ``x``."""
    x = np.asarray(x, dtype=float)
    s = 1.0 - np.tanh(x @ net.w.T) ** 2
    return (s * net.b) @ net.w / np.sqrt(net.n_w)


def net_grad_weights(net: ShallowNet, x: np.ndarray) -> np.ndarray:
    """Gradient of ``f(x)`` w.r.t. the hidden weights, shape (n_w, d)."""
    x = np.asarray(x, dtype=float)
    s = 1.0 - np.tanh(net.w @ x) ** 2
    return np.outer(net.b * s, x) / np.sqrt(net.n_w)


def net_grad_weights_sum(net: ShallowNet, xs: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """``sum_j coef_j * d f(x_j)/d w`` without materializing the per-sample stack."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    s = 1.0 - np.tanh(xs @ net.w.T) ** 2  # (m, n_w)
    weighted = s * np.asarray(coef, dtype=float)[:, None]
    return net.b[:, None] * (weighted.T @ xs) / np.sqrt(net.n_w)


def project_weights(w: np.ndarray, w0: np.ndarray, r_f: float) -> np.ndarray:
    """Radial projection onto the Frobenius ball of radius ``r_f`` around ``w0``."""
    delta = w - w0
    nrm = float(np.linalg.norm(delta))
    if nrm <= r_f:
        return w
    return w0 + delta * (r_f / nrm)


def vfm_run(
    particles,
    fun,
    cfg: VfmConfig,
    rng: np.random.Generator | None = None,
    net0: ShallowNet | None = None,
) -> ShallowNet:
    """One projected-SGD pass over the particles; returns the averaged witness.

    ``particles`` may be a ParticleSet or a plain ``(N, d)`` array. Particle
    order is shuffled once per call. Passing ``net0`` warm-starts from its
    weights, re-anchoring the weight ball there (signs are kept).
    """
    from .functionals import target_minibatch, vfm_weight_gradient

    pts = np.asarray(getattr(particles, "points", particles), dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise DegenerateError("vfm_run needs a non-empty (N, d) particle array")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    if net0 is None:
        net = net_init(cfg, pts.shape[1], rng)
    else:
        net = ShallowNet(w=net0.w.copy(), w0=net0.w.copy(), b=net0.b.copy(), r_f=cfg.r_f)

    n = pts.shape[0]
    order = rng.permutation(n)
    eta = 1.0 / np.sqrt(n)
    w_sum = np.zeros_like(net.w)
    for s in range(n):
        w_sum += net.w
        batch = target_minibatch(fun, rng, size=cfg.conjugate_batch)
        g = vfm_weight_gradient(fun, net, pts[order[s]], batch)
        net.w = project_weights(net.w - eta * g, net.w0, net.r_f)
        assert np.linalg.norm(net.w - net.w0) <= net.r_f * (1.0 + 1e-9) + 1e-12
    net.w = w_sum / n
    return net
