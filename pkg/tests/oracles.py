"""Independent numerical oracles shared by the test modules.

Everything here is derived from first principles (closed forms, dense
enumeration, plain finite differences, generic quadrature) without touching
the code paths under test.
"""

import itertools
import math

import numpy as np


class CyclotronOracle:
    """Closed-form relativistic orbit in a uniform magnetic field.

    Conventions match uniform_magnetic_potential(dim, B, plane=(1, 2)):
    A_1 = +B/2 x^2, A_2 = -B/2 x^1. A particle of charge q, mass m and
    in-plane speed u then rotates clockwise with omega = qB/(gamma m) on a
    circle of radius gamma m u / (qB).
    """

    def __init__(self, q=1.0, m=1.0, B=1.0, u0=(0.6, 0.0), x0=(0.0, 0.0)):
        self.q = q
        self.m = m
        self.B = B
        self.u0 = np.asarray(u0, dtype=float)
        self.x0 = np.asarray(x0, dtype=float)
        self.speed = float(np.linalg.norm(self.u0))
        self.gamma = 1.0 / math.sqrt(1.0 - self.speed ** 2)
        self.omega = q * B / (self.gamma * m)
        self.radius = self.gamma * m * self.speed / (q * B)

    def _rot(self, t):
        w = self.omega
        return np.array([[math.cos(w * t), math.sin(w * t)],
                         [-math.sin(w * t), math.cos(w * t)]])

    def velocity(self, t):
        return self._rot(t) @ self.u0

    def position(self, t):
        w = self.omega
        integral = np.array([
            [math.sin(w * t) / w, (1.0 - math.cos(w * t)) / w],
            [(math.cos(w * t) - 1.0) / w, math.sin(w * t) / w],
        ])
        return self.x0 + integral @ self.u0

    def acceleration(self, t):
        return self.omega * np.array([[0.0, 1.0], [-1.0, 0.0]]) @ self.velocity(t)

    def state4(self, t):
        """(x, v, a) as 4-vectors in the coordinate-time gauge."""
        p = self.position(t)
        u = self.velocity(t)
        a = self.acceleration(t)
        return (np.array([t, p[0], p[1], 0.0]),
                np.array([1.0, u[0], u[1], 0.0]),
                np.array([0.0, a[0], a[1], 0.0]))

    def lagrangian(self, t):
        """q A . v + m sqrt(1 - u^2) along the orbit."""
        p = self.position(t)
        u = self.velocity(t)
        a_dot_v = 0.5 * self.B * (p[1] * u[0] - p[0] * u[1])
        return self.q * a_dot_v + self.m * math.sqrt(1.0 - self.speed ** 2)

    def action(self, t0, t1, n=20001):
        """Composite-Simpson quadrature of the on-shell Lagrangian."""
        if n % 2 == 0:
            n += 1
        ts = np.linspace(t0, t1, n)
        vals = np.array([self.lagrangian(t) for t in ts])
        h = (t1 - t0) / (n - 1)
        return h / 3.0 * (vals[0] + vals[-1] + 4 * vals[1::2].sum() + 2 * vals[2:-1:2].sum())


def fit_circle(points):
    """Kasa least-squares circle fit; returns (center, radius)."""
    pts = np.asarray(points, dtype=float)
    a = np.column_stack([2.0 * pts, np.ones(len(pts))])
    b = (pts ** 2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    center = sol[:2]
    radius = math.sqrt(sol[2] + float(center @ center))
    return center, radius


def fd_gradient(fn, x, step=1e-6):
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.size)
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        out[i] = (fn(xp) - fn(xm)) / (2.0 * h)
    return out


def dense_symmetric_tensor(rank, dim, entries):
    """Expand sorted-index storage into the full dense symmetric array."""
    t = np.zeros((dim,) * rank)
    for idx, val in entries.items():
        for perm in set(itertools.permutations(idx)):
            t[perm] = val
    return t


def dense_contraction(tensor, v):
    """Full n-fold contraction of a dense tensor by repeated tensordot."""
    out = np.asarray(tensor, dtype=float)
    for _ in range(out.ndim):
        out = np.tensordot(out, v, axes=([0], [0]))
    return float(out)


def lateral_deviation(points, x_start, x_end):
    """Max distance of points from the straight line through the endpoints."""
    chord = np.asarray(x_end, dtype=float) - np.asarray(x_start, dtype=float)
    chord = chord / np.linalg.norm(chord)
    worst = 0.0
    for pt in np.atleast_2d(points):
        rel = pt - x_start
        lat = rel - (rel @ chord) * chord
        worst = max(worst, float(np.linalg.norm(lat)))
    return worst
