"""First-order homogeneous Lagrangian in canonical form and its calculus.

    L(x, v) = q A_a(x) v^a + m sqrt(g_ab(x) v^a v^b)
              + sum_n Q_n * (S_n(x; v, ..., v))^(1/n)

Every term is positively homogeneous of degree one in v, which forces the
Euler identity p.v - L = 0 and makes pi.pi = m^2 an algebraic identity for
the generalized momentum pi = m g v / sqrt(g(v,v)).

Derivatives come in two modes: closed-form term-wise formulas (primary) and
central finite differences of eval_L (independent oracle).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEvenRadicand,
    NotOneTimeMetric,
    NullVelocity,
    SpacelikeVelocity,
    ZeroRadicand,
)
from .fields import SymmetricTensorField, VectorPotentialField, zero_potential
from .geometry import MetricField, quadratic_form


@dataclass(frozen=True)
class LagrangianSpec:
    """Couplings plus background fields; the single source of truth for all terms."""

    metric: MetricField
    mass: float = 0.0
    charge: float = 0.0
    potential: VectorPotentialField = None
    extra_terms: Tuple[Tuple[float, SymmetricTensorField], ...] = ()

    def __post_init__(self):
        if self.mass < 0:
            raise DimensionMismatch("mass must be nonnegative")
        if self.potential is None:
            object.__setattr__(self, "potential", zero_potential(self.metric.dim))
        if self.potential.dim != self.metric.dim:
            raise DimensionMismatch("potential and metric dimensions differ")
        terms = tuple((float(q), s) for q, s in self.extra_terms)
        ranks = [s.rank for _, s in terms]
        if len(set(ranks)) != len(ranks):
            raise DimensionMismatch("extra-term ranks must be distinct")
        for _, s in terms:
            if s.dim != self.metric.dim:
                raise DimensionMismatch("tensor term dimension differs from metric")
        object.__setattr__(self, "extra_terms", terms)

    @property
    def dim(self) -> int:
        return self.metric.dim

    def _check_point(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if x.shape != (self.dim,) or v.shape != (self.dim,):
            raise DimensionMismatch(
                f"position/velocity must have length {self.dim}, got {x.shape}, {v.shape}"
            )
        return x, v

    @property
    def all_fields_constant(self) -> bool:
        return (self.metric.is_constant
                and self.potential.kind in ("zero", "constant")
                and all(s.is_constant for _, s in self.extra_terms))


def signed_root(value: float, n: int) -> float:
    """Real n-th root; odd ranks use the signed root, even ranks require value >= 0."""
    if n % 2 == 0:
        if value < 0:
            raise NegativeEvenRadicand(f"rank-{n} radicand is negative ({value})")
        return value ** (1.0 / n)
    if value < 0:
        return -((-value) ** (1.0 / n))
    return value ** (1.0 / n)


def eval_L(spec: LagrangianSpec, x, v) -> float:
    """Evaluate the canonical Lagrangian at (x, v)."""
    x, v = spec._check_point(x, v)
    total = 0.0
    if spec.charge != 0.0:
        total += spec.charge * float(spec.potential(x) @ v)
    if spec.mass > 0.0:
        gvv = quadratic_form(spec.metric(x), v)
        if gvv < 0.0:
            raise SpacelikeVelocity(f"g(v,v) = {gvv} < 0 with a mass term present")
        total += spec.mass * np.sqrt(gvv)
    for q_n, tensor in spec.extra_terms:
        total += q_n * signed_root(tensor.contraction(x, v), tensor.rank)
    return total


def _mass_term_data(spec, x, v):
    g = spec.metric(x)
    gvv = quadratic_form(g, v)
    if gvv < 0.0:
        raise SpacelikeVelocity(f"g(v,v) = {gvv} < 0")
    if gvv == 0.0:
        raise NullVelocity("momentum of the mass term is undefined on the light cone")
    return g, gvv


def _tensor_radicand(tensor, x, v):
    c = tensor.contraction(x, v)
    if tensor.rank % 2 == 0 and c < 0.0:
        raise NegativeEvenRadicand(f"rank-{tensor.rank} radicand is negative ({c})")
    if c == 0.0:
        raise ZeroRadicand(f"rank-{tensor.rank} contraction vanishes; derivative undefined")
    return c


def momentum(spec: LagrangianSpec, x, v) -> np.ndarray:
    """Canonical momentum p_a = dL/dv^a, term-wise closed form."""
    x, v = spec._check_point(x, v)
    p = np.zeros(spec.dim)
    if spec.charge != 0.0:
        p += spec.charge * spec.potential(x)
    if spec.mass > 0.0:
        g, gvv = _mass_term_data(spec, x, v)
        p += spec.mass * (g @ v) / np.sqrt(gvv)
    for q_n, tensor in spec.extra_terms:
        n = tensor.rank
        c = _tensor_radicand(tensor, x, v)
        s_contr = tensor.contraction_gradient(x, v) / n  # S_{a b...} v...v
        p += q_n * s_contr / abs(c) ** (1.0 - 1.0 / n)
    return p


def momentum_fd(spec: LagrangianSpec, x, v, step: float = 1e-5) -> np.ndarray:
    """Independent oracle: central finite differences of eval_L in v."""
    x, v = spec._check_point(x, v)
    p = np.empty(spec.dim)
    for a in range(spec.dim):
        h = step * max(1.0, abs(v[a]))
        vp = v.copy()
        vm = v.copy()
        vp[a] += h
        vm[a] -= h
        p[a] = (eval_L(spec, x, vp) - eval_L(spec, x, vm)) / (2.0 * h)
    return p


def generalized_momentum(spec: LagrangianSpec, x, v, mode: str = "analytic") -> np.ndarray:
    """pi_a = p_a minus the potential and tensor contributions = m g v / sqrt(g(v,v)).

    mode="fd" recomputes pi as the finite-difference momentum of the stripped
    (mass-only) Lagrangian, keeping the oracle route independent.
    """
    x, v = spec._check_point(x, v)
    if spec.mass == 0.0:
        return np.zeros(spec.dim)
    if mode == "fd":
        stripped = LagrangianSpec(metric=spec.metric, mass=spec.mass)
        return momentum_fd(stripped, x, v)
    g, gvv = _mass_term_data(spec, x, v)
    return spec.mass * (g @ v) / np.sqrt(gvv)


def hamiltonian_residual(spec: LagrangianSpec, x, v, mode: str = "analytic",
                         fd_step: float = 1e-5) -> float:
    """p.v - L; identically zero by Euler's theorem for degree-1 homogeneity."""
    p = momentum(spec, x, v) if mode == "analytic" else momentum_fd(spec, x, v, fd_step)
    return float(p @ np.asarray(v, dtype=float)) - eval_L(spec, x, v)


def mass_shell_residual(spec: LagrangianSpec, x, v, mode: str = "analytic") -> float:
    """pi . g^{-1} . pi - m^2; an algebraic identity whenever the mass term is on."""
    x, v = spec._check_point(x, v)
    pi = generalized_momentum(spec, x, v, mode=mode)
    g = spec.metric(x)
    return float(pi @ np.linalg.solve(g, pi)) - spec.mass ** 2


def homogeneity_residual(spec: LagrangianSpec, x, v, lam: float) -> float:
    """L(x, lam*v) - lam*L(x, v) for lam > 0."""
    if lam <= 0:
        raise DimensionMismatch("homogeneity scale must be positive")
    x, v = spec._check_point(x, v)
    return eval_L(spec, x, lam * v) - lam * eval_L(spec, x, v)


# ---------------------------------------------------------------------------
# second derivatives and position derivatives (used by the dynamics modules)
# ---------------------------------------------------------------------------

def velocity_hessian(spec: LagrangianSpec, x, v) -> np.ndarray:
    """d2 L / dv dv. Singular along v (degree-0 homogeneity of the momentum)."""
    x, v = spec._check_point(x, v)
    H = np.zeros((spec.dim, spec.dim))
    if spec.mass > 0.0:
        g, gvv = _mass_term_data(spec, x, v)
        s = np.sqrt(gvv)
        gv = g @ v
        H += spec.mass * (g / s - np.outer(gv, gv) / s ** 3)
    for q_n, tensor in spec.extra_terms:
        n = tensor.rank
        c = _tensor_radicand(tensor, x, v)
        s_a = tensor.contraction_gradient(x, v) / n
        s_ab = tensor.contraction_hessian(x, v) / (n * (n - 1))
        H += q_n * (n - 1) * (
            s_ab * abs(c) ** (1.0 / n - 1.0)
            - np.sign(c) * np.outer(s_a, s_a) * abs(c) ** (1.0 / n - 2.0)
        )
    return H


def position_gradient(spec: LagrangianSpec, x, v) -> np.ndarray:
    """dL/dx_c at fixed v; exact for constant fields, FD-backed field gradients otherwise."""
    x, v = spec._check_point(x, v)
    out = np.zeros(spec.dim)
    if spec.charge != 0.0 and spec.potential.kind not in ("zero", "constant"):
        out += spec.charge * (v @ spec.potential.jacobian(x))
    if spec.mass > 0.0 and not spec.metric.is_constant:
        g, gvv = _mass_term_data(spec, x, v)
        dg = spec.metric.gradient(x)  # [c, a, b]
        out += spec.mass * np.einsum("cab,a,b->c", dg, v, v) / (2.0 * np.sqrt(gvv))
    for q_n, tensor in spec.extra_terms:
        if tensor.is_constant:
            continue
        n = tensor.rank
        c = _tensor_radicand(tensor, x, v)
        dc = tensor.position_gradient_of_contraction(x, v)
        out += q_n * dc * abs(c) ** (1.0 / n - 1.0) / n
    return out


def momentum_position_directional(spec: LagrangianSpec, x, v, direction) -> np.ndarray:
    """(dp_a / dx^c) w^c for a position direction w; used to expand d/dtau p(x, v)."""
    x, v = spec._check_point(x, v)
    w = np.asarray(direction, dtype=float)
    out = np.zeros(spec.dim)
    if spec.charge != 0.0 and spec.potential.kind not in ("zero", "constant"):
        out += spec.charge * (spec.potential.jacobian(x) @ w)
    if spec.mass > 0.0 and not spec.metric.is_constant:
        g, gvv = _mass_term_data(spec, x, v)
        s = np.sqrt(gvv)
        dg_w = np.einsum("cab,c->ab", spec.metric.gradient(x), w)
        out += spec.mass * (dg_w @ v / s - (g @ v) * (v @ dg_w @ v) / (2.0 * s ** 3))
    for q_n, tensor in spec.extra_terms:
        if tensor.is_constant:
            continue
        # directional FD of this term's momentum contribution in x
        n = tensor.rank
        h = 1e-6

        def term_p(xx):
            c = _tensor_radicand(tensor, xx, v)
            return q_n * (tensor.contraction_gradient(xx, v) / n) / abs(c) ** (1.0 - 1.0 / n)

        out += (term_p(x + h * w) - term_p(x - h * w)) / (2.0 * h)
    return out


# ---------------------------------------------------------------------------
# non-relativistic expansion in the one-time chart
# ---------------------------------------------------------------------------

def _check_one_time_chart(g, tol=1e-10):
    off = g - np.diag(np.diag(g))
    if np.max(np.abs(off)) > tol:
        raise NotOneTimeMetric("expansion chart requires a diagonal metric")
    d = np.diag(g)
    if abs(d[0] - 1.0) > tol or np.any(d[1:] >= 0.0):
        raise NotOneTimeMetric(
            "expansion chart requires g_00 = 1 and negative spatial diagonal"
        )
    return d


def nonrelativistic_expansion(spec: LagrangianSpec, x, omega_space) -> Tuple[float, float]:
    """Exact L at v = (1, omega) and its small-velocity quadratic model.

    quadratic = q A_0 + q A_i omega^i + m (1 - 0.5 |g_ii| omega^i omega^i);
    both values are returned so callers can measure the quartic remainder.
    """
    omega = np.asarray(omega_space, dtype=float)
    x = np.asarray(x, dtype=float)
    if omega.shape != (spec.dim - 1,):
        raise DimensionMismatch(f"expected {spec.dim - 1} spatial velocity components")
    g = spec.metric(x)
    d = _check_one_time_chart(g)
    if float(omega @ omega) >= 1.0:
        raise SpacelikeVelocity("expansion requires |omega| < 1")
    v = np.concatenate(([1.0], omega))
    exact = eval_L(spec, x, v)
    a = spec.potential(x)
    quadratic = (spec.charge * (a[0] + float(a[1:] @ omega))
                 + spec.mass * (1.0 - 0.5 * float(np.abs(d[1:]) @ (omega * omega))))
    return exact, quadratic
