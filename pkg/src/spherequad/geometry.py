"""Exact spherical geometry: distances, arcs, simplexes, projections.

Everything here is a pure function of its inputs; arrays are never mutated
after construction.  Closed-form trigonometric identities from this module
are what the rest of the toolkit is tested against.
"""

import numpy as np

from . import config
from .errors import (
    AntipodalPointsError,
    DegenerateDirectionError,
    OrthogonalityViolatedError,
    PointOutsideSimplexError,
    ZeroVectorError,
)
from .polytopes import min_norm_point


def unit_vector(coords):
    """Renormalize `coords` onto the sphere; rejects near-zero input."""
    v = np.asarray(coords, dtype=float)
    n = np.linalg.norm(v)
    if n <= 1e-12:
        raise ZeroVectorError("cannot normalize a near-zero vector", norm=float(n))
    return v / n


def radial_project(x):
    """g(x) = x / ||x||, the radial projection onto the sphere."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return unit_vector(x)
    n = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(n <= 1e-12):
        raise ZeroVectorError("radial projection of a near-zero vector")
    return x / n


def geodesic_distance(x, y):
    """arccos(x . y), elementwise over trailing batch dimensions."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dot = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
    return np.arccos(dot)


class GeodesicArc:
    """Arc gamma(t) = x cos(theta t) + xi sin(theta t), t in [0, 1]."""

    def __init__(self, start, direction, angle):
        self.start = np.asarray(start, dtype=float)
        self.direction = np.asarray(direction, dtype=float)
        self.angle = float(angle)
        if abs(self.direction @ self.start) > config.ORTHOGONALITY_TOL and self.angle > 0:
            raise OrthogonalityViolatedError(
                "arc direction must be tangent at the start point",
                dot=float(self.direction @ self.start))

    @classmethod
    def between(cls, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        theta = float(geodesic_distance(x, y))
        if theta >= np.pi - config.ANTIPODAL_TOL:
            raise AntipodalPointsError("no unique arc between antipodal points",
                                       distance=theta)
        if theta == 0.0:
            return cls(x, np.zeros_like(x), 0.0)
        xi = (y - x * np.cos(theta)) / np.sin(theta)
        return cls(x, xi, theta)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        if self.angle == 0.0:
            shape = t.shape + self.start.shape
            return np.broadcast_to(self.start, shape).copy()
        a = self.angle * t
        return (np.cos(a)[..., None] * self.start
                + np.sin(a)[..., None] * self.direction)

    def endpoint(self):
        return self.eval(1.0)

    def derivative(self, t):
        if self.angle == 0.0:
            return np.zeros_like(self.start)
        a = self.angle * t
        return self.angle * (-np.sin(a) * self.start + np.cos(a) * self.direction)


def arc(x, y):
    return GeodesicArc.between(x, y)


def arc_displacement_identity(z, xi1, xi2, theta1, theta2, t):
    """Squared distance between two arcs leaving z, and its closed form.

    lhs = ||gamma_1(t) - gamma_2(t)||^2 with gamma_i(t) = z cos(theta_i t) +
    xi_i sin(theta_i t); rhs = 4 sin^2((theta1-theta2) t / 2) +
    sin(theta1 t) sin(theta2 t) ||xi1 - xi2||^2.
    """
    z = np.asarray(z, dtype=float)
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    for xi in (xi1, xi2):
        if abs(xi @ z) > config.ORTHOGONALITY_TOL:
            raise OrthogonalityViolatedError("xi must be orthogonal to z",
                                             dot=float(xi @ z))
    g1 = z * np.cos(theta1 * t) + xi1 * np.sin(theta1 * t)
    g2 = z * np.cos(theta2 * t) + xi2 * np.sin(theta2 * t)
    lhs = float(np.sum((g1 - g2) ** 2))
    rhs = float(4.0 * np.sin((theta1 - theta2) * t / 2.0) ** 2
                + np.sin(theta1 * t) * np.sin(theta2 * t)
                * np.sum((xi1 - xi2) ** 2))
    return lhs, rhs


def distance_split_identity(theta1, theta2, dxi):
    """sin^2(dist/2) for x = xi cos(t1) + eta1 sin(t1), y likewise.

    Returns the closed form sin^2((t1-t2)/2) + sin(t1) sin(t2) sin^2(dxi/2);
    dxi is the distance between the two tangent directions.
    """
    return (np.sin((theta1 - theta2) / 2.0) ** 2
            + np.sin(theta1) * np.sin(theta2) * np.sin(dxi / 2.0) ** 2)


def tangential_gradient(grad, x):
    """Project an ambient gradient onto the tangent space at unit x.

    `grad` is either a gradient vector at x or a callable returning one.
    """
    g = grad(x) if callable(grad) else np.asarray(grad, dtype=float)
    x = np.asarray(x, dtype=float)
    if g.ndim == 1:
        return g - (x @ g) * x
    return g - np.sum(x * g, axis=-1, keepdims=True) * x


class SurfaceSimplex:
    """Flat convex hull of d unit vectors, living on its hyperplane H_T."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        d = v.shape[1]
        if v.shape[0] != d:
            raise ValueError("surface simplex needs exactly d spanning vectors")
        sv = np.linalg.svd(v, compute_uv=False)
        if sv[-1] <= config.LINEAR_INDEPENDENCE_TOL:
            raise ZeroVectorError("spanning vectors are linearly dependent",
                                  smallest_singular_value=float(sv[-1]))
        self.vertices = v
        # hyperplane through the vertices: normal n, offset h with n.x = h > 0
        diffs = v[1:] - v[0]
        q, _ = np.linalg.qr(np.vstack([diffs, np.ones(d)]).T)
        n = q[:, -1]
        h = n @ v[0]
        if h < 0:
            n, h = -n, -h
        self.normal = n
        self.offset = float(h)
        self.a_min = float(np.linalg.norm(min_norm_point(v)))

    def contains_plane_point(self, y, tol=1e-10):
        """Membership for a point already on H_T (barycentric sign test)."""
        t = np.linalg.solve(self.vertices.T, np.asarray(y, dtype=float))
        return bool(np.all(t >= -tol))

    def barycentric(self, y):
        return np.linalg.solve(self.vertices.T, np.asarray(y, dtype=float))

    def jacobian(self, y):
        """Radial-projection density a / ||y||^d pulling sphere integrals to T.

        Exact whenever the perpendicular foot of the origin lies inside T, in
        which case a equals the hyperplane offset; true for every simplex the
        partition pipeline produces.
        """
        y = np.asarray(y, dtype=float)
        single = y.ndim == 1
        ys = y[None, :] if single else y
        d = self.vertices.shape[1]
        if single and not self.contains_plane_point(y, tol=1e-9):
            raise PointOutsideSimplexError("jacobian queried outside the simplex")
        out = self.offset / np.linalg.norm(ys, axis=1) ** d
        return float(out[0]) if single else out

    def geodesic(self):
        return GeodesicSimplex(self.vertices)


def _separation(vertices):
    """min_j dist(eta_j, span of the others): the strong-separation margin."""
    v = np.asarray(vertices, dtype=float)
    d = len(v)
    eps = np.inf
    for j in range(d):
        others = np.delete(v, j, axis=0)
        q, _ = np.linalg.qr(others.T)
        resid = v[j] - q @ (q.T @ v[j])
        eps = min(eps, float(np.linalg.norm(resid)))
    return eps


def _is_admissible(vertices, tol=None):
    """xi_2..xi_d mutually orthogonal, xi_1 . xi_j = 0 for j >= 3, and the
    angle between xi_1 and xi_2 within [pi/6, pi/2]."""
    tol = config.ADMISSIBLE_TOL if tol is None else tol
    v = np.asarray(vertices, dtype=float)
    d = len(v)
    for i in range(1, d):
        for j in range(i + 1, d):
            if abs(v[i] @ v[j]) > tol:
                return False
    for j in range(2, d):
        if abs(v[0] @ v[j]) > tol:
            return False
    ang = geodesic_distance(v[0], v[1])
    return (np.pi / 6 - tol <= ang <= np.pi / 2 + tol) if d >= 2 else True


class GeodesicSimplex:
    """Radial projection of a surface simplex: conv_S{xi_1, ..., xi_d}."""

    def __init__(self, spanning, check=True):
        v = np.asarray(spanning, dtype=float)
        if check:
            sv = np.linalg.svd(v, compute_uv=False)
            if sv[-1] <= config.LINEAR_INDEPENDENCE_TOL:
                raise ZeroVectorError("spanning vectors are linearly dependent",
                                      smallest_singular_value=float(sv[-1]))
        self.spanning = v
        self.admissible = _is_admissible(v)
        self.separation = _separation(v)

    @property
    def matrix(self):
        """Columns are the spanning vectors."""
        return self.spanning.T

    def contains(self, x, tol=1e-10):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.linalg.solve(self.spanning.T, x.T).T
        ok = np.all(t >= -tol, axis=1)
        return ok if len(ok) > 1 else bool(ok[0])

    def surface(self):
        return SurfaceSimplex(self.spanning)


def supporting_point(cell, y, x0=None, refine=True):
    """argmax of z . y over a convex cell; the maximizer sits on the boundary.

    Works on the cell's planar-polytope preimage: vertex/edge enumeration with
    a golden-section polish on the best boundary piece.
    """
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(y) < config.DEGENERATE_DIRECTION_TOL:
        raise DegenerateDirectionError("support direction is numerically zero")

    base = cell.base
    score = lambda U: cell.apply(np.atleast_2d(U)) @ y

    best_val, best_pt = -np.inf, None
    bverts = base.verts
    vals = score(bverts)
    i = int(np.argmax(vals))
    best_val, best_pt = float(vals[i]), bverts[i]

    for a, b in base.edges():
        ts = np.linspace(0.0, 1.0, 65)
        pts = a + ts[:, None] * (b - a)
        vals = score(pts)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_pt = float(vals[j]), pts[j]
        if refine:
            lo, hi = max(0, j - 1), min(64, j + 1)
            from scipy.optimize import minimize_scalar
            res = minimize_scalar(
                lambda t: -float(score((a + t * (b - a))[None, :])[0]),
                bounds=(ts[lo], ts[hi]), method="bounded",
                options={"xatol": 1e-14})
            if -res.fun > best_val:
                best_val, best_pt = -float(res.fun), a + res.x * (b - a)
    if base.k == 3:
        bpts = base.boundary_points(64)
        vals = score(bpts)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_pt = float(vals[j]), bpts[j]
    return cell.apply(best_pt[None, :])[0]
