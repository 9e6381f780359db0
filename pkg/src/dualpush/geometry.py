"""Constrained domains and the mirror maps that uncoil them.

Two domains are supported: the closed unit ball ``{x : ||x||_2 <= 1}`` and
the probability simplex ``{x : x_i >= 0, sum_i x_i = 1}``. Each carries a
strongly convex potential ``phi`` whose gradient maps the open interior
onto an unconstrained dual space; the inverse gradient pulls dual points
back strictly inside. Pushing particles in the dual space therefore keeps
them feasible without any explicit projection.

Potentials:

* ball:    ``phi(x) = -log(1 - ||x||) - ||x||``
* simplex: ``phi(x) = sum_i x_i log x_i`` (negative entropy)
* identity: ``phi(x) = ||x||^2 / 2`` (dual space equals primal space)

Simplex points always carry all ``d`` coordinates, but the simplex dual
space has ``d - 1`` coordinates: the sum constraint pins the last one, so
the map works on the reduced parameterization.

All operations accept a single point of shape ``(d,)`` or a batch of shape
``(n, d)`` and act along the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BoundaryError

# Points closer than this to a singular boundary are rejected.
BOUNDARY_TOL = 1e-12

# Slack for non-strict membership checks (norm and simplex-sum).
MEMBERSHIP_TOL = 1e-12

BALL = "ball"
SIMPLEX = "simplex"

BALL_LOG = "ball_log"
ENTROPIC_SIMPLEX = "entropic_simplex"
IDENTITY = "identity"


@dataclass(frozen=True)
class Domain:
    """A constrained support: the unit ball or the probability simplex."""

    kind: str
    dim: int

    def __post_init__(self) -> None:
        if self.kind not in (BALL, SIMPLEX):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        min_dim = 2 if self.kind == SIMPLEX else 1
        if self.dim < min_dim:
            raise ValueError(f"{self.kind} domain needs dim >= {min_dim}")

    @classmethod
    def unit_ball(cls, dim: int) -> "Domain":
        return cls(BALL, dim)

    @classmethod
    def simplex(cls, dim: int) -> "Domain":
        return cls(SIMPLEX, dim)

    @property
    def dual_dim(self) -> int:
        """Dimension of the mirror-dual space for this domain."""
        return self.dim - 1 if self.kind == SIMPLEX else self.dim

    def contains(self, x: np.ndarray, strict: bool = False):
        """Membership test; ``strict`` demands the open interior.

        Returns a scalar bool for a single point, a bool array for a batch.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected last axis {self.dim}, got {x.shape}")
        if self.kind == BALL:
            r = np.linalg.norm(x, axis=-1)
            ok = r < 1.0 if strict else r <= 1.0 + MEMBERSHIP_TOL
        else:
            sum_ok = np.abs(x.sum(axis=-1) - 1.0) <= MEMBERSHIP_TOL
            if strict:
                ok = sum_ok & np.all(x > 0.0, axis=-1)
            else:
                ok = sum_ok & np.all(x >= -MEMBERSHIP_TOL, axis=-1)
        return bool(ok) if ok.ndim == 0 else ok


@dataclass(frozen=True)
class MirrorMap:
    """A mirror map over a domain, plus convexity/smoothness metadata.

    ``alpha`` (strong convexity) and ``beta`` (smoothness, ``inf`` when the
    Hessian is unbounded near the boundary) are reported for step-size
    guidance only; no operation computes with them.
    """

    kind: str
    domain: Domain
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.kind not in (BALL_LOG, ENTROPIC_SIMPLEX, IDENTITY):
            raise ValueError(f"unknown mirror map kind {self.kind!r}")
        if self.kind == BALL_LOG and self.domain.kind != BALL:
            raise ValueError("ball_log map requires a ball domain")
        if self.kind == ENTROPIC_SIMPLEX and self.domain.kind != SIMPLEX:
            raise ValueError("entropic_simplex map requires a simplex domain")
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")


def ball_log_map(dim: int) -> MirrorMap:
    """Mirror map for the unit ball, ``phi(x) = -log(1 - ||x||) - ||x||``."""
    return MirrorMap(BALL_LOG, Domain.unit_ball(dim), alpha=1.0, beta=np.inf)


def entropic_simplex_map(dim: int) -> MirrorMap:
    """Negative-entropy mirror map for the probability simplex."""
    return MirrorMap(ENTROPIC_SIMPLEX, Domain.simplex(dim), alpha=1.0, beta=np.inf)


def identity_map(dim: int) -> MirrorMap:
    """Trivial map whose dual space equals the primal space."""
    return MirrorMap(IDENTITY, Domain.unit_ball(dim), alpha=1.0, beta=1.0)


def _check_last_axis(x: np.ndarray, expected: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != expected:
        raise ValueError(f"{what}: expected last axis {expected}, got {x.shape}")
    return x


def _require_ball_interior(x: np.ndarray) -> np.ndarray:
    """Norms of x, after rejecting points within BOUNDARY_TOL of the sphere."""
    r = np.linalg.norm(x, axis=-1)
    if np.any(r >= 1.0 - BOUNDARY_TOL):
        raise BoundaryError("point on or outside the unit sphere")
    return r

def _require_simplex_interior(x: np.ndarray) -> None:
    if np.any(x <= BOUNDARY_TOL):
        raise BoundaryError("simplex point on or outside a face")


def potential(mirror_map: MirrorMap, x: np.ndarray):
    """Evaluate ``phi`` at interior points. Returns a scalar or ``(n,)``."""
    x = _check_last_axis(x, mirror_map.domain.dim, "potential")
    if mirror_map.kind == BALL_LOG:
        r = _require_ball_interior(x)
        return -np.log1p(-r) - r
    if mirror_map.kind == ENTROPIC_SIMPLEX:
        _require_simplex_interior(x)
        return np.sum(x * np.log(x), axis=-1)
    return 0.5 * np.sum(x * x, axis=-1)


def grad_phi(mirror_map: MirrorMap, x: np.ndarray) -> np.ndarray:
    """Map interior primal points to the dual space.

    Ball: ``y = x / (1 - ||x||)``. Simplex: ``y_i = log x_i - log x_d`` for
    ``i < d`` (the dual point has d-1 coordinates). Identity: ``y = x``.
    """
    x = _check_last_axis(x, mirror_map.domain.dim, "grad_phi")
    if mirror_map.kind == BALL_LOG:
        r = _require_ball_interior(x)
        return x / (1.0 - r[..., None])
    if mirror_map.kind == ENTROPIC_SIMPLEX:
        _require_simplex_interior(x)
        logx = np.log(x)
        return logx[..., :-1] - logx[..., -1:]
    return x.copy()


def grad_phi_star(mirror_map: MirrorMap, y: np.ndarray) -> np.ndarray:
    """Map dual points back to the strict interior of the domain.

    Ball: ``x = y / (1 + ||y||)``. Simplex:
    ``x_i = exp(y_i) / (1 + sum_j exp(y_j))`` for ``i < d`` and
    ``x_d = 1 / (1 + sum_j exp(y_j))``, evaluated with the max subtracted
    so large coordinates cannot overflow.
    """
    y = _check_last_axis(y, mirror_map.domain.dual_dim, "grad_phi_star")
    if mirror_map.kind == BALL_LOG:
        s = np.linalg.norm(y, axis=-1)
        return y / (1.0 + s[..., None])
    if mirror_map.kind == ENTROPIC_SIMPLEX:
        # The pinned last coordinate behaves like an extra dual entry at 0,
        # so the stabilizing shift must never drop below 0.
        m = np.maximum(np.max(y, axis=-1, keepdims=True), 0.0)
        e = np.exp(y - m)
        e_last = np.exp(-m)
        denom = e_last + e.sum(axis=-1, keepdims=True)
        return np.concatenate([e / denom, e_last / denom], axis=-1)
    return y.copy()


def inv_hessian_apply(mirror_map: MirrorMap, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply ``(grad^2 phi(x))^{-1}`` to dual-space vectors ``v`` in O(d).

    Both Hessians are diagonal-plus-rank-one, so the inverse action has a
    closed form:

    * ball:    ``(1 - r) (v - (x . v / r) x)`` with ``r = ||x||``; at the
      center the Hessian is the identity, so ``v`` passes through.
    * simplex: ``diag(xt) v - (xt . v) xt`` where ``xt`` is the first
      ``d - 1`` coordinates of ``x``.
    """
    x = _check_last_axis(x, mirror_map.domain.dim, "inv_hessian_apply")
    v = _check_last_axis(v, mirror_map.domain.dual_dim, "inv_hessian_apply")
    if mirror_map.kind == BALL_LOG:
        r = _require_ball_interior(x)
        rs = r[..., None]
        xv = np.sum(x * v, axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = (1.0 - rs) * (v - xv / rs * x)
        at_center = r < BOUNDARY_TOL
        if np.any(at_center):
            out = np.where(at_center[..., None], np.broadcast_to(v, out.shape), out)
        return out
    if mirror_map.kind == ENTROPIC_SIMPLEX:
        _require_simplex_interior(x)
        xt = x[..., :-1]
        xv = np.sum(xt * v, axis=-1, keepdims=True)
        return xt * v - xv * xt
    return np.asarray(v, dtype=float).copy()


def project_ball(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the closed unit ball: ``x / max(1, ||x||)``."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1, keepdims=True)
    return x / np.maximum(1.0, r)


def project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex.

    Sort-based threshold algorithm, O(d log d) per point: with ``u`` the
    coordinates sorted in decreasing order, find the largest ``rho`` with
    ``u_rho > (sum_{j<=rho} u_j - 1) / rho`` and clip at that threshold.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    u = np.flip(np.sort(x, axis=-1), axis=-1)
    css = np.cumsum(u, axis=-1) - 1.0
    ranks = np.arange(1, d + 1, dtype=float)
    above = u > css / ranks
    # above[..., 0] always holds, so the last True index is well defined.
    rho = d - 1 - np.argmax(np.flip(above, axis=-1), axis=-1)
    theta = np.take_along_axis(css, rho[..., None], axis=-1) / (rho + 1)[..., None]
    return np.maximum(x - theta, 0.0)
