"""Seeded samplers for targets and initial particles.

Targets: a truncated Gaussian mixture on the unit ball (rejection, with
survivor counts reported rather than resampled) and a Dirichlet mixture on
the simplex. Initial particles: a small uniform disk at the ball center,
or a mildly concentrated symmetric Dirichlet.

Also provides the Dirichlet-mixture density in mirror-dual coordinates:
``log q(y) = logsumexp_c [ log w_c + log B(alpha_c) + sum_i alpha_ci log x_i(y) ]``
(change of variables; the Jacobian determinant ``prod_i x_i`` merges the
``alpha - 1`` exponents into ``alpha``), and its gradient
``sum_c resp_c(y) (alpha_c[:d-1] - sum(alpha_c) * x(y)[:d-1])``, which is
what the kernelized pusher consumes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, softmax

from .exceptions import DegenerateError
from .functionals import TargetSampleSet
from .geometry import BALL, Domain, MirrorMap, grad_phi_star
from .transport import ParticleSet


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Isotropic Gaussian components truncated to the unit ball."""

    means: np.ndarray  # (c, d)
    stds: np.ndarray  # (c,)
    weights: np.ndarray  # (c,), recorded; sampling draws per component
    truncation: Domain

    def __post_init__(self) -> None:
        object.__setattr__(self, "means", np.atleast_2d(np.asarray(self.means, dtype=float)))
        object.__setattr__(self, "stds", np.asarray(self.stds, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.truncation.kind != BALL:
            raise ValueError("truncation domain must be the unit ball")
        if self.means.shape[0] != self.stds.shape[0] or self.means.shape[0] != self.weights.shape[0]:
            raise ValueError("means, stds and weights must agree on component count")
        if not np.all(self.stds > 0.0):
            raise ValueError("stds must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-12 or np.any(self.weights < 0.0):
            raise ValueError("weights must form a simplex vector")

    @classmethod
    def two_lobes(cls, d: int = 2, offset: float = 1.0, std: float = 0.2) -> "GaussianMixtureSpec":
        """Two symmetric components centered at +/- offset on the first axis."""
        mu = np.zeros((2, d))
        mu[0, 0] = -offset
        mu[1, 0] = offset
        return cls(mu, np.full(2, std), np.full(2, 0.5), Domain.unit_ball(d))


@dataclass(frozen=True)
class DirichletMixtureSpec:
    """Mixture of Dirichlet components on the simplex."""

    alphas: np.ndarray  # (c, d)
    weights: np.ndarray  # (c,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", np.atleast_2d(np.asarray(self.alphas, dtype=float)))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if np.any(self.alphas <= 0.0):
            raise ValueError("all concentration entries must be positive")
        if self.weights.shape[0] != self.alphas.shape[0]:
            raise ValueError("weights must match component count")
        if abs(self.weights.sum() - 1.0) > 1e-12 or np.any(self.weights < 0.0):
            raise ValueError("weights must form a simplex vector")

    @property
    def dim(self) -> int:
        return self.alphas.shape[1]

    @classmethod
    def three_corners(cls, d: int = 5, peak: float = 50.0) -> "DirichletMixtureSpec":
        """Three components, each concentrated near one vertex."""
        alphas = np.ones((3, d))
        for c in range(3):
            alphas[c, c] = peak
        return cls(alphas, np.full(3, 1.0 / 3.0))


@dataclass(frozen=True)
class InitSpec:
    """Initial-particle distribution knobs."""

    ball_radius: float = 0.5
    simplex_alpha: float = 5.0

    def __post_init__(self) -> None:
        if not 0.0 < self.ball_radius <= 1.0:
            raise ValueError("ball_radius must lie in (0, 1]")
        if self.simplex_alpha <= 0.0:
            raise ValueError("simplex_alpha must be positive")


def sample_truncated_gaussian_mixture(
    spec: GaussianMixtureSpec, n_per_component: int, rng: np.random.Generator
) -> tuple[TargetSampleSet, list[int]]:
    """Draw per component and reject points outside the ball.

    Returns the surviving samples and the per-component survivor counts.
    Survivors are not topped up, so the total is at most
    ``n_per_component * n_components``.
    """
    kept = []
    counts = []
    for mean, std in zip(spec.means, spec.stds):
        draws = rng.normal(loc=mean, scale=std, size=(n_per_component, mean.shape[0]))
        inside = np.linalg.norm(draws, axis=1) <= 1.0
        kept.append(draws[inside])
        counts.append(int(inside.sum()))
    samples = np.vstack(kept)
    if samples.shape[0] == 0:
        raise DegenerateError("no samples survived ball truncation")
    return TargetSampleSet(samples, spec.truncation), counts


def sample_dirichlet(alpha: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n simplex points from Dirichlet(alpha)."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0.0):
        raise ValueError("all concentration entries must be positive")
    return rng.dirichlet(alpha, size=n)


def sample_dirichlet_mixture(
    spec: DirichletMixtureSpec, n_per_component: int, rng: np.random.Generator
) -> TargetSampleSet:
    """Equal-count draws from each component, concatenated."""
    parts = [sample_dirichlet(alpha, n_per_component, rng) for alpha in spec.alphas]
    return TargetSampleSet(np.vstack(parts), Domain.simplex(spec.dim))


def init_particles(
    domain: Domain, n: int, rng: np.random.Generator, spec: InitSpec = InitSpec()
) -> ParticleSet:
    """Initial particles: uniform small disk (ball) or Dirichlet (simplex)."""
    if n == 0:
        warnings.warn("initializing an empty particle set", stacklevel=2)
        return ParticleSet(np.empty((0, domain.dim)), domain)
    if domain.kind == BALL:
        d = domain.dim
        directions = rng.standard_normal((n, d))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = spec.ball_radius * rng.uniform(size=n) ** (1.0 / d)
        return ParticleSet(directions * radii[:, None], domain)
    pts = sample_dirichlet(np.full(domain.dim, spec.simplex_alpha), n, rng)
    return ParticleSet(pts, domain)


def _dual_component_logps(spec: DirichletMixtureSpec, mirror_map: MirrorMap, y: np.ndarray):
    """Per-component log densities of the mixture in dual coordinates."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    x = grad_phi_star(mirror_map, y)
    consts = (
        np.log(spec.weights)
        + gammaln(spec.alphas.sum(axis=1))
        - gammaln(spec.alphas).sum(axis=1)
    )
    logps = np.log(x) @ spec.alphas.T + consts  # (n, c)
    return x, logps


def dirichlet_mixture_dual_log_density(spec: DirichletMixtureSpec, mirror_map: MirrorMap):
    """Callable: dual points (n, d-1) -> log density of the pushed-forward mixture."""

    def log_density(y: np.ndarray) -> np.ndarray:
        _, logps = _dual_component_logps(spec, mirror_map, y)
        return logsumexp(logps, axis=1)

    return log_density


def dirichlet_mixture_dual_score(spec: DirichletMixtureSpec, mirror_map: MirrorMap):
    """Callable: dual points (n, d-1) -> gradient of the dual log density.

    Each component contributes ``alpha[:d-1] - sum(alpha) * x[:d-1]``,
    blended by the posterior component responsibilities.
    """
    alpha_head = spec.alphas[:, :-1]  # (c, d-1)
    alpha_sum = spec.alphas.sum(axis=1)  # (c,)

    def score(y: np.ndarray) -> np.ndarray:
        x, logps = _dual_component_logps(spec, mirror_map, y)
        resp = softmax(logps, axis=1)
        return resp @ alpha_head - (resp @ alpha_sum)[:, None] * x[:, :-1]

    return score
