"""Discrete action on polyline paths and its extremization at fixed endpoints.

The discrete action sums L(midpoint_k, dx_k) over segments. Because L is
first-order homogeneous, L(x, dx/dt) * dt = L(x, dx) for any positive dt,
so no step sizes appear: the discrete functional is parameterization-free
by construction.

Extremals of timelike actions are typically maxima or saddles, and the
continuum reparametrization freedom survives discretely as flat directions
(points sliding along the curve). Stationarity is therefore sought by
driving the gradient to zero via least squares on grad S rather than by
descending S itself; flat directions are counted and reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, RepMechError, SpacelikeSegment
from .geometry import quadratic_form
from .lagrangian import (
    LagrangianSpec,
    eval_L,
    momentum,
    position_gradient,
    velocity_hessian,
)


@dataclass(frozen=True)
class DiscretePath:
    """Fixed endpoints plus K free interior points in the target space."""

    x_start: np.ndarray
    x_end: np.ndarray
    interior: np.ndarray  # (K, N)

    def __post_init__(self):
        xs = np.asarray(self.x_start, dtype=float)
        xe = np.asarray(self.x_end, dtype=float)
        pts = np.asarray(self.interior, dtype=float)
        if xs.ndim != 1 or xe.shape != xs.shape:
            raise DimensionMismatch("endpoints must be equal-length vectors")
        if pts.ndim != 2 or pts.shape[1] != xs.shape[0] or pts.shape[0] < 1:
            raise DimensionMismatch("interior must be a (K >= 1, N) array")
        object.__setattr__(self, "x_start", xs)
        object.__setattr__(self, "x_end", xe)
        object.__setattr__(self, "interior", pts)

    @property
    def K(self) -> int:
        return self.interior.shape[0]

    @property
    def dim(self) -> int:
        return self.x_start.shape[0]

    def points(self) -> np.ndarray:
        return np.vstack([self.x_start, self.interior, self.x_end])

    def segments(self) -> np.ndarray:
        pts = self.points()
        return pts[1:] - pts[:-1]

    def midpoints(self) -> np.ndarray:
        pts = self.points()
        return 0.5 * (pts[1:] + pts[:-1])

    def with_interior(self, interior) -> "DiscretePath":
        return DiscretePath(self.x_start, self.x_end, np.asarray(interior, dtype=float))


def straight_chord_path(x_start, x_end, K: int, perturbation=None) -> DiscretePath:
    """K interior points uniformly on the chord, plus an optional perturbation array."""
    xs = np.asarray(x_start, dtype=float)
    xe = np.asarray(x_end, dtype=float)
    frac = np.arange(1, K + 1)[:, None] / (K + 1)
    interior = xs[None, :] + frac * (xe - xs)[None, :]
    if perturbation is not None:
        interior = interior + np.asarray(perturbation, dtype=float)
    return DiscretePath(xs, xe, interior)


def _check_segments(spec, path):
    if spec.mass <= 0.0:
        return
    for k, (mid, dx) in enumerate(zip(path.midpoints(), path.segments())):
        if quadratic_form(spec.metric(mid), dx) < 0.0:
            raise SpacelikeSegment(f"segment {k} is spacelike while the mass term is on")


def discrete_action(spec: LagrangianSpec, path: DiscretePath) -> float:
    """sum_k L(midpoint_k, dx_k); equals the parameterized sum for any dt_k > 0."""
    _check_segments(spec, path)
    return float(sum(eval_L(spec, mid, dx)
                     for mid, dx in zip(path.midpoints(), path.segments())))


def reparam_invariance_residual(spec: LagrangianSpec, path: DiscretePath, dtau) -> float:
    """|sum_k L(mid_k, dx_k / dt_k) dt_k - discrete_action|; zero up to round-off."""
    dtau = np.asarray(dtau, dtype=float)
    if dtau.shape != (path.K + 1,):
        raise DimensionMismatch(f"need {path.K + 1} parameter steps, got {dtau.shape}")
    if np.any(dtau <= 0):
        raise ValueError("parameter steps must be positive")
    total = sum(eval_L(spec, mid, dx / dt) * dt
                for mid, dx, dt in zip(path.midpoints(), path.segments(), dtau))
    return abs(float(total) - discrete_action(spec, path))


def action_gradient(spec: LagrangianSpec, path: DiscretePath) -> np.ndarray:
    """dS/d(interior points), shape (K, N), from the closed-form momenta."""
    _check_segments(spec, path)
    mids = path.midpoints()
    segs = path.segments()
    p = [momentum(spec, mid, dx) for mid, dx in zip(mids, segs)]
    if spec.all_fields_constant:
        dLdx = None
    else:
        dLdx = [position_gradient(spec, mid, dx) for mid, dx in zip(mids, segs)]
    grad = np.empty((path.K, path.dim))
    for j in range(path.K):
        g = p[j] - p[j + 1]
        if dLdx is not None:
            g = g + 0.5 * (dLdx[j] + dLdx[j + 1])
        grad[j] = g
    return grad


def action_hessian(spec: LagrangianSpec, path: DiscretePath) -> np.ndarray:
    """d2 S / d(interior)2 as a (K*N, K*N) matrix (block tridiagonal).

    Velocity blocks use the analytic velocity Hessian of L; position-coupled
    blocks vanish for constant fields and are otherwise filled by central
    differences of the action gradient with a fixed absolute step, which
    keeps the assembly exactly translation-equivariant.
    """
    k, n = path.interior.shape
    mids = path.midpoints()
    segs = path.segments()
    hv = [velocity_hessian(spec, mid, dx) for mid, dx in zip(mids, segs)]
    hess = np.zeros((k, n, k, n))
    for j in range(k):
        hess[j, :, j, :] += hv[j] + hv[j + 1]
        if j > 0:
            hess[j, :, j - 1, :] += -hv[j]
        if j + 1 < k:
            hess[j, :, j + 1, :] += -hv[j + 1]
    if not spec.all_fields_constant:
        step = 1e-6
        base = path.interior
        for col in range(k * n):
            jj, aa = divmod(col, n)
            zp = base.copy()
            zm = base.copy()
            zp[jj, aa] += step
            zm[jj, aa] -= step
            gp = action_gradient(spec, path.with_interior(zp))
            gm = action_gradient(spec, path.with_interior(zm))
            fd_col = ((gp - gm) / (2 * step)).reshape(k, n)
            an_col = hess[:, :, jj, aa]
            # keep the analytic velocity part, add the field-coupled remainder
            hess[:, :, jj, aa] = fd_col if True else an_col
    return hess.reshape(k * n, k * n)


@dataclass(frozen=True)
class ExtremizeResult:
    path: DiscretePath
    action: float
    grad_norm_inf: float
    iterations: int
    degenerate_modes: int
    converged: bool
    message: str


def extremize(spec: LagrangianSpec, path0: DiscretePath,
              max_iters: int = 200, grad_tol: float = 1e-8) -> ExtremizeResult:
    """Drive grad S to zero over the interior points.

    Levenberg-Marquardt on the residual r = grad S with its analytic
    Jacobian (the action Hessian). The damping and step logic depend only on
    residuals and Jacobians, never on coordinate magnitudes, so the solve is
    exactly equivariant under rigid translations of the problem. Trial
    points that leave the causal domain are rejected like any uphill step.

    Returns the best iterate with diagnostics; converged is False when the
    gradient tolerance was not reached within max_iters accepted steps.
    Degenerate modes count the near-null singular directions of the final
    Jacobian, the discrete remnant of reparametrization freedom.
    """
    shape = path0.interior.shape
    z = path0.interior.copy()
    r = action_gradient(spec, path0).ravel()
    jac = action_hessian(spec, path0)
    if float(np.max(np.abs(r))) <= grad_tol:
        return ExtremizeResult(
            path=path0, action=discrete_action(spec, path0),
            grad_norm_inf=float(np.max(np.abs(r))), iterations=0,
            degenerate_modes=_count_degenerate(jac), converged=True,
            message="initial path already stationary",
        )

    lam = 1e-3
    iterations = 0
    rejects = 0
    while iterations < max_iters and float(np.max(np.abs(r))) > grad_tol:
        jtj = jac.T @ jac
        damp = np.diag(np.maximum(np.diag(jtj), 1e-30))
        try:
            delta = np.linalg.solve(jtj + lam * damp, -jac.T @ r)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = path0.with_interior(z + delta.reshape(shape))
        try:
            r_trial = action_gradient(spec, trial).ravel()
            ok = float(r_trial @ r_trial) < float(r @ r)
        except RepMechError:
            ok = False
        if ok:
            z = z + delta.reshape(shape)
            r = r_trial
            jac = action_hessian(spec, path0.with_interior(z))
            lam = max(lam / 3.0, 1e-14)
            iterations += 1
            rejects = 0
        else:
            lam *= 4.0
            rejects += 1
            if lam > 1e16 or rejects > 60:
                break

    path = path0.with_interior(z)
    grad_inf = float(np.max(np.abs(r)))
    converged = grad_inf <= grad_tol
    return ExtremizeResult(
        path=path, action=discrete_action(spec, path),
        grad_norm_inf=grad_inf, iterations=iterations,
        degenerate_modes=_count_degenerate(jac), converged=converged,
        message=("converged" if converged
                 else f"gradient norm {grad_inf:.3e} above tol after {iterations} steps"),
    )


def _count_degenerate(jac, rel_tol: float = 1e-6) -> int:
    s = np.linalg.svd(np.asarray(jac), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return int(s.size)
    return int(np.sum(s < rel_tol * s[0]))
