"""Particle pushers and the outer transport loop.

Every iteration fits a witness to the current particles (except in the
kernelized mode, which needs no witness) and then moves each particle one
step. The pushers:

* ``vt_step``: straight Euclidean step ``x - eta * grad f(x)``; no domain
  enforcement, so particles may leave the domain. Baseline.
* ``projvt_step``: the same step followed by Euclidean projection back
  onto the domain.
* ``mirrorvt_step``: maps particles to the mirror-dual space, moves them
  against the inverse-Hessian-preconditioned gradient, and maps back;
  particles stay strictly interior by construction.
* ``svmd_step``: kernelized dual-space ascent. Each particle follows the
  kernel average of the analytic dual score plus a kernel-gradient
  repulsion term, the particle form of the integral operator applied to
  the dual flow field. Needs an analytic dual score (KL with a Dirichlet
  mixture target), so no witness is fitted.

All steps are pure: they return a new ParticleSet with ``iteration``
advanced by one.
"""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .exceptions import BoundaryError, ConfigError
from .functionals import VariationalFunctional, clamp_count, conjugate_value
from .geometry import (
    BALL,
    IDENTITY,
    SIMPLEX,
    Domain,
    MirrorMap,
    grad_phi,
    grad_phi_star,
    inv_hessian_apply,
    project_ball,
    project_simplex,
)
from .metrics import Kernel, HistoryRow, RunHistory, RunStatus, median_heuristic, mmd2, should_stop
from .vfm import ShallowNet, VfmConfig, net_eval, net_grad_input, vfm_run

logger = logging.getLogger(__name__)

VT = "vt"
PROJVT = "projvt"
MIRRORVT = "mirrorvt"
SVMD = "svmd"

ALGORITHMS = (VT, PROJVT, MIRRORVT, SVMD)

# Algorithms that push in the mirror-dual space and need a non-trivial map.
_DUAL_ALGOS = (MIRRORVT, SVMD)


class StepSizeWarning(UserWarning):
    """The mirror step-size upper bound cannot be checked (field smoothness
    is unobservable), so the configured eta is taken on faith."""


@dataclass(frozen=True)
class ParticleSet:
    """Particle positions on a domain at a given outer iteration."""

    points: np.ndarray
    domain: Domain
    iteration: int = 0

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2:
            raise ValueError("points must be a (n, d) array")
        if pts.shape[1] != self.domain.dim:
            raise ValueError(f"points dim {pts.shape[1]} != domain dim {self.domain.dim}")

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass
class TransportConfig:
    """Outer-loop configuration.

    ``functional`` and ``map`` are echoed into run records; ``map`` is
    required for the dual-space algorithms. ``warm_start`` reuses the
    previous iteration's witness weights as the next fit's anchor.
    """

    algorithm: str
    eta: float
    T: int = 500
    patience: int = 20
    vfm: VfmConfig = field(default_factory=VfmConfig)
    functional: str = "kl"
    map: MirrorMap | None = None
    snapshot_every: int = 25
    seed: int = 0
    warm_start: bool = False

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if not self.eta > 0.0:
            raise ConfigError("eta must be positive")
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be >= 1")
        if self.algorithm in _DUAL_ALGOS and self.map is None:
            raise ConfigError(f"{self.algorithm} needs a mirror map")


def vt_step(particles: ParticleSet, net: ShallowNet, eta: float) -> ParticleSet:
    """Euclidean descent step on the witness; may exit the domain."""
    moved = particles.points - eta * net_grad_input(net, particles.points)
    return replace(particles, points=moved, iteration=particles.iteration + 1)


def projvt_step(particles: ParticleSet, net: ShallowNet, eta: float) -> ParticleSet:
    """Euclidean step followed by projection back onto the domain."""
    stepped = vt_step(particles, net, eta)
    project = project_ball if particles.domain.kind == BALL else project_simplex
    return replace(stepped, points=project(stepped.points))


def _reduce_gradient(mirror_map: MirrorMap, g: np.ndarray) -> np.ndarray:
    """Restrict a primal gradient to the dual dimensionality.

    On the simplex the dual space drops the constrained last coordinate,
    so the last gradient component is dropped with it.
    """
    if mirror_map.domain.kind == SIMPLEX and mirror_map.kind != IDENTITY:
        return g[..., :-1]
    return g


def mirrorvt_step(particles: ParticleSet, net: ShallowNet, eta: float, mirror_map: MirrorMap) -> ParticleSet:
    """Preconditioned descent in the dual space; output is strictly interior."""
    x = particles.points
    g = _reduce_gradient(mirror_map, net_grad_input(net, x))
    y = grad_phi(mirror_map, x)
    v = inv_hessian_apply(mirror_map, x, g)
    moved = grad_phi_star(mirror_map, y - eta * v)
    return replace(particles, points=moved, iteration=particles.iteration + 1)


def _dual_kernel_grad_pullback(mirror_map: MirrorMap, y_src: np.ndarray, x_src: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Pull primal kernel gradients back to the dual coordinates of the source.

    ``g[i, j]`` is the gradient of ``k(x_i, .)`` at the source point ``x_j``;
    the return value applies the transposed Jacobian of ``grad_phi_star`` at
    ``y_j``, giving the gradient with respect to the dual coordinate ``y_j``.
    """
    if mirror_map.kind == IDENTITY:
        return g
    if mirror_map.domain.kind == SIMPLEX:
        # Jacobian rows: dx_i/dy_m = x_i (delta_im - x_m), dx_d/dy_m = -x_d x_m,
        # which contracts to (J^T g)_m = x_m (g_m - <x, g>).
        dots = np.einsum("ijd,jd->ij", g, x_src)
        return x_src[None, :, :-1] * (g[..., :-1] - dots[..., None])
    # Ball: J = I/(1+s) - y y^T / (s (1+s)^2) with s = ||y||; symmetric.
    s = np.linalg.norm(y_src, axis=-1)
    term1 = g / (1.0 + s)[None, :, None]
    yg = np.einsum("ijd,jd->ij", g, y_src)
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(s > 1e-12, yg / (s * (1.0 + s) ** 2)[None, :], 0.0)
    return term1 - y_src[None, :, :] * coef[..., None]


def svmd_direction(
    mirror_map: MirrorMap,
    kernel: Kernel,
    dual_score: Callable[[np.ndarray], np.ndarray],
    y_eval: np.ndarray,
    y_src: np.ndarray,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """Kernelized ascent field at ``y_eval`` from source measure ``(y_src, weights)``.

    u(y) = sum_j w_j [ k_phi(y, y_j) * dual_score(y_j) + grad_{y_j} k_phi(y, y_j) ]

    with ``k_phi(y, y') = k(grad_phi_star(y), grad_phi_star(y'))``. Uniform
    weights ``1/n`` give the particle update; quadrature weights evaluate
    the underlying integral operator directly.
    """
    y_eval = np.atleast_2d(np.asarray(y_eval, dtype=float))
    y_src = np.atleast_2d(np.asarray(y_src, dtype=float))
    if weights is None:
        w = np.full(y_src.shape[0], 1.0 / y_src.shape[0])
    else:
        w = np.asarray(weights, dtype=float)
    x_eval = grad_phi_star(mirror_map, y_eval)
    x_src = grad_phi_star(mirror_map, y_src)
    scores = np.atleast_2d(np.asarray(dual_score(y_src), dtype=float))

    gram = kernel.gram(x_eval, x_src)
    attract = (gram * w) @ scores
    # grad of k(x_eval, .) at x_src, per pair.
    g = (x_eval[:, None, :] - x_src[None, :, :]) * (gram / kernel.bandwidth**2)[..., None]
    repulse = np.einsum("ijm,j->im", _dual_kernel_grad_pullback(mirror_map, y_src, x_src, g), w)
    return attract + repulse


def svmd_step(
    particles: ParticleSet,
    mirror_map: MirrorMap,
    kernel: Kernel,
    dual_score: Callable[[np.ndarray], np.ndarray],
    eta: float,
) -> ParticleSet:
    """Kernelized dual ascent: particles interact through the kernel."""
    y = grad_phi(mirror_map, particles.points)
    u = svmd_direction(mirror_map, kernel, dual_score, y, y)
    moved = grad_phi_star(mirror_map, y + eta * u)
    return replace(particles, points=moved, iteration=particles.iteration + 1)


def _validate_initial(config: TransportConfig, initial: ParticleSet) -> None:
    if len(initial) == 0:
        raise ConfigError("cannot run transport with an empty particle set")
    if config.algorithm in _DUAL_ALGOS and config.map.kind != IDENTITY:
        if not np.all(initial.domain.contains(initial.points, strict=True)):
            raise BoundaryError(f"{config.algorithm} requires strictly interior initial particles")
    elif config.algorithm == PROJVT:
        if not np.all(initial.domain.contains(initial.points)):
            raise BoundaryError("projvt requires initial particles in the domain closure")


def run(
    config: TransportConfig,
    initial: ParticleSet,
    fun: VariationalFunctional,
    rng: np.random.Generator,
    dual_score: Callable[[np.ndarray], np.ndarray] | None = None,
) -> RunHistory:
    """Drive the configured pusher for up to T iterations with early stopping.

    The MMD bandwidth is fixed once from the initial particles and the
    target samples; the same kernel drives the svmd interaction. Rows are
    recorded every iteration (iteration 0 is the pre-update baseline);
    snapshots are kept at iteration 0, every ``snapshot_every``-th
    iteration, and the final iteration. On a step error the partial
    history (status aborted) is attached to the raised exception as
    ``run_history``.
    """
    if config.functional != fun.kind:
        raise ConfigError(f"config says functional {config.functional!r} but got {fun.kind!r}")
    if config.algorithm == SVMD:
        if fun.kind != "kl":
            raise ConfigError("svmd supports only the KL functional")
        if dual_score is None:
            raise ConfigError("svmd needs an analytic dual score for the target")
    _validate_initial(config, initial)
    if config.algorithm in _DUAL_ALGOS:
        warnings.warn(
            f"eta={config.eta} is not checked against the mirror smoothness bound",
            StepSizeWarning,
            stacklevel=2,
        )

    bandwidth = median_heuristic(initial.points, fun.target.samples)
    kernel = Kernel("rbf", bandwidth)
    history = RunHistory(config=describe_config(config), bandwidth=bandwidth)

    particles = initial
    targets = fun.target.samples
    net: ShallowNet | None = None

    def record(elapsed_ms: float) -> None:
        if config.algorithm == SVMD:
            obj, clamps = float("nan"), 0
        else:
            f_targets = net_eval(net, targets) if net is not None else np.zeros(len(fun.target))
            f_particles = net_eval(net, particles.points) if net is not None else np.zeros(len(particles))
            obj = float(np.mean(f_particles)) - conjugate_value(fun, f_targets)
            clamps = clamp_count(fun, f_targets)
        mmd = mmd2(particles.points, targets, kernel)
        history.rows.append(HistoryRow(particles.iteration, mmd, obj, clamps, elapsed_ms))
        frac = float(np.mean(initial.domain.contains(particles.points, strict=True)))
        history.interior_fraction_min = min(history.interior_fraction_min, frac)

    t_start = time.perf_counter()
    record((time.perf_counter() - t_start) * 1e3)
    history.snapshots.append((0, particles.points.copy()))

    status = RunStatus.completed()
    try:
        for t in range(1, config.T + 1):
            tic = time.perf_counter()
            if config.algorithm != SVMD:
                net = vfm_run(particles, fun, config.vfm, rng, net0=net if config.warm_start else None)
            if config.algorithm == VT:
                particles = vt_step(particles, net, config.eta)
            elif config.algorithm == PROJVT:
                particles = projvt_step(particles, net, config.eta)
            elif config.algorithm == MIRRORVT:
                particles = mirrorvt_step(particles, net, config.eta, config.map)
            else:
                particles = svmd_step(particles, config.map, kernel, dual_score, config.eta)
            record((time.perf_counter() - tic) * 1e3)
            if t % config.snapshot_every == 0:
                history.snapshots.append((t, particles.points.copy()))
            if should_stop(history, config.patience):
                status = RunStatus.early_stopped(at=t)
                break
    except Exception as exc:
        history.status = RunStatus.aborted(reason=f"{type(exc).__name__}: {exc}")
        history.final_points = particles.points.copy()
        exc.run_history = history
        raise

    if history.snapshots[-1][0] != particles.iteration:
        history.snapshots.append((particles.iteration, particles.points.copy()))
    history.status = status
    history.final_points = particles.points.copy()
    logger.debug(
        "run finished: %s after %d iterations, final mmd %.3e",
        history.status.kind,
        particles.iteration,
        history.final_mmd,
    )
    return history


def describe_config(config: TransportConfig) -> dict:
    """Flatten a TransportConfig into plain JSON-friendly values."""
    out = {
        "algorithm": config.algorithm,
        "eta": config.eta,
        "T": config.T,
        "patience": config.patience,
        "functional": config.functional,
        "snapshot_every": config.snapshot_every,
        "seed": config.seed,
        "warm_start": config.warm_start,
        "n_w": config.vfm.n_w,
        "r_f": config.vfm.r_f,
        "init_scale": config.vfm.init_scale,
        "conjugate_batch": config.vfm.conjugate_batch,
    }
    if config.map is not None:
        out["map"] = config.map.kind
        out["domain"] = config.map.domain.kind
        out["dim"] = config.map.domain.dim
    return out
