"""Convex cells: planar base polytopes realized on the sphere by transform chains.

Every cell the partition algorithms produce is born as a convex chart polytope
pushed through a chain of maps (affine chart, linear map by a spanning matrix,
radial projection, angular dilation, rotation, suspension).  Each transform
carries its exact Jacobian density, so cell measures, membership tests and
sampling never approximate the geometry.
"""

import numpy as np

from . import config
from .errors import AntipodalToPoleError, PoleSingularityError
from .polytopes import Polytope
from .quadrature import (
    integrate_interval_poly,
    integrate_polygon,
    integrate_polytope3,
)


def h_alpha(alpha, t):
    """Angle rescaling profile: (2/pi) atan(tan(alpha)/|t|), and 1 at t = 0."""
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    nz = np.abs(t) > 0
    out[nz] = (2.0 / np.pi) * np.arctan(np.tan(alpha) / np.abs(t[nz]))
    return out if out.ndim else float(out)


def h_alpha_prime(alpha, t):
    """Derivative of h_alpha for t in (0, 1]."""
    t = np.asarray(t, dtype=float)
    return -(2.0 / np.pi) * np.tan(alpha) / (t ** 2 + np.tan(alpha) ** 2)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

class AffineChart:
    """Orthonormal chart of a hyperplane: u -> origin + frame @ u."""

    tag = "affine_chart"

    def __init__(self, origin, frame):
        self.origin = np.asarray(origin, dtype=float)
        self.frame = np.asarray(frame, dtype=float)  # (d, k), orthonormal columns

    def apply(self, U):
        return self.origin + U @ self.frame.T

    def invert(self, X):
        return (X - self.origin) @ self.frame, np.ones(len(X), dtype=bool)

    def density(self, U):
        return np.ones(len(U))

    def pull_linear(self, normal, offset):
        return self.frame.T @ normal, offset - normal @ self.origin

    def to_dict(self):
        return {"tag": self.tag, "origin": self.origin.tolist(),
                "frame": self.frame.tolist()}


class CircleChart:
    """Angle coordinate on S^1: u -> (cos u, sin u); arc-length density 1."""

    tag = "circle_chart"

    def __init__(self, window_start=0.0):
        self.window_start = float(window_start)

    def apply(self, U):
        u = U[:, 0]
        return np.column_stack([np.cos(u), np.sin(u)])

    def invert(self, X):
        ang = np.arctan2(X[:, 1], X[:, 0])
        ang = self.window_start + np.mod(ang - self.window_start, 2.0 * np.pi)
        return ang[:, None], np.ones(len(X), dtype=bool)

    def density(self, U):
        return np.ones(len(U))

    def pull_linear(self, normal, offset):
        return None  # trig, handled by root scanning

    def to_dict(self):
        return {"tag": self.tag, "window_start": self.window_start}


class LinearMap:
    """y -> A y between hyperplanes, with the exact surface-volume scaling."""

    tag = "linear_map"

    def __init__(self, matrix, source_normal):
        self.matrix = np.asarray(matrix, dtype=float)
        self.source_normal = np.asarray(source_normal, dtype=float)
        d = self.matrix.shape[0]
        # orthonormal direction basis of the source hyperplane
        q, _ = np.linalg.qr(np.column_stack([self.source_normal, np.eye(d)]))
        v = q[:, 1:d]
        av = self.matrix @ v
        self.jac = float(np.sqrt(np.linalg.det(av.T @ av)))

    def apply(self, X):
        return X @ self.matrix.T

    def invert(self, X):
        return np.linalg.solve(self.matrix, X.T).T, np.ones(len(X), dtype=bool)

    def density(self, X):
        return np.full(len(X), self.jac)

    def pull_linear(self, normal, offset):
        return self.matrix.T @ normal, offset

    def to_dict(self):
        return {"tag": self.tag, "matrix": self.matrix.tolist(),
                "source_normal": self.source_normal.tolist()}


class RadialProjection:
    """y -> y/||y|| from the hyperplane {n . y = h} with density h / ||y||^d."""

    tag = "radial_projection"

    def __init__(self, normal, offset):
        self.normal = np.asarray(normal, dtype=float)
        self.offset = float(offset)

    def apply(self, X):
        return X / np.linalg.norm(X, axis=1, keepdims=True)

    def invert(self, X):
        t = X @ self.normal
        ok = t > 1e-12
        scale = np.where(ok, self.offset / np.where(ok, t, 1.0), np.nan)
        return X * scale[:, None], ok

    def density(self, X):
        d = X.shape[1]
        return self.offset / np.linalg.norm(X, axis=1) ** d

    def pull_linear(self, normal, offset):
        if abs(offset) > 1e-14:
            return None  # only central planes survive the projection
        return normal, 0.0

    def to_dict(self):
        return {"tag": self.tag, "normal": self.normal.tolist(),
                "offset": self.offset}


class DilationMap:
    """Angular dilation about the first coordinate axis, S(0,pi/2) -> S(0,alpha).

    x(phi, xi) -> x(h_alpha(xi_1) phi, xi); its density is the change-of
    variables factor omega(x) = h * (sin(h phi)/sin(phi))^(d-2).
    """

    tag = "dilation"

    def __init__(self, alpha):
        if not 0.0 < alpha < np.pi / 2:
            raise ValueError("dilation angle must be in (0, pi/2)")
        self.alpha = float(alpha)

    def _decompose(self, X):
        phi = np.arccos(np.clip(X[:, 0], -1.0, 1.0))
        s = np.sin(phi)
        safe = s > 1e-14
        xi = np.zeros_like(X[:, 1:])
        xi[safe] = X[safe, 1:] / s[safe, None]
        return phi, s, xi, safe

    def apply(self, X):
        X = np.atleast_2d(X)
        if np.any(X[:, 0] < -1.0 + 1e-12):
            raise AntipodalToPoleError("dilation undefined at the antipode of e_1")
        phi, s, xi, safe = self._decompose(X)
        h = np.ones(len(X))
        h[safe] = h_alpha(self.alpha, xi[safe, 0])
        out = np.empty_like(X)
        hp = h * phi
        out[:, 0] = np.cos(hp)
        out[:, 1:] = xi * np.sin(hp)[:, None]
        out[~safe] = X[~safe]
        return out

    def invert(self, X):
        X = np.atleast_2d(X)
        phi, s, xi, safe = self._decompose(X)
        h = np.ones(len(X))
        h[safe] = h_alpha(self.alpha, xi[safe, 0])
        out = np.empty_like(X)
        p = phi / h
        out[:, 0] = np.cos(p)
        out[:, 1:] = xi * np.sin(p)[:, None]
        out[~safe] = X[~safe]
        return out, p <= np.pi

    def density(self, X):
        X = np.atleast_2d(X)
        d = X.shape[1]
        phi, s, xi, safe = self._decompose(X)
        h = np.ones(len(X))
        h[safe] = h_alpha(self.alpha, xi[safe, 0])
        ratio = np.where(safe, np.sin(h * phi) / np.where(safe, s, 1.0), h)
        return h * ratio ** (d - 2)

    def pull_linear(self, normal, offset):
        n = np.asarray(normal, dtype=float)
        # coordinate zero sets are preserved except around the pole axis
        if abs(offset) <= 1e-14 and abs(n[0]) <= 1e-14:
            return n, 0.0
        return None

    def to_dict(self):
        return {"tag": self.tag, "alpha": self.alpha}


class RotationMap:
    tag = "rotation"

    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=float)

    def apply(self, X):
        return X @ self.matrix.T

    def invert(self, X):
        return X @ self.matrix, np.ones(len(X), dtype=bool)

    def density(self, X):
        return np.ones(len(X))

    def pull_linear(self, normal, offset):
        return self.matrix.T @ np.asarray(normal, dtype=float), offset

    def to_dict(self):
        return {"tag": self.tag, "matrix": self.matrix.tolist()}


class SuspensionMap:
    """Cone extension: (u, theta) -> embed(inner(u) sin(theta); cos(theta)).

    axis='last' realizes S(E) = {(x sin t, cos t)}; axis='first' realizes the
    polar suspension {(cos t, x sin t)}.  Density is
    inner_density(u) * sin^(D-2)(theta) with D the new ambient dimension.
    """

    tag = "suspension"

    def __init__(self, inner_chain, axis="last"):
        self.inner_chain = list(inner_chain)
        self.axis = axis

    def _inner_apply(self, U):
        X = U
        for t in self.inner_chain:
            X = t.apply(X)
        return X

    def _inner_density(self, U):
        out = np.ones(len(U))
        X = U
        for t in self.inner_chain:
            out = out * t.density(X)
            X = t.apply(X)
        return out

    def apply(self, U):
        U = np.atleast_2d(U)
        theta = U[:, -1]
        x = self._inner_apply(U[:, :-1])
        st, ct = np.sin(theta), np.cos(theta)
        if self.axis == "last":
            return np.column_stack([x * st[:, None], ct])
        return np.column_stack([ct, x * st[:, None]])

    def invert(self, X):
        X = np.atleast_2d(X)
        if self.axis == "last":
            c = X[:, -1]
            rest = X[:, :-1]
        else:
            c = X[:, 0]
            rest = X[:, 1:]
        theta = np.arccos(np.clip(c, -1.0, 1.0))
        st = np.sin(theta)
        safe = st > 1e-12
        x = np.zeros_like(rest)
        x[safe] = rest[safe] / st[safe, None]
        x[~safe, 0] = 1.0  # pole: inner direction immaterial
        u = x
        ok = np.ones(len(X), dtype=bool)
        for t in reversed(self.inner_chain):
            u, good = t.invert(u)
            ok &= good
        return np.column_stack([u, theta]), ok

    def density(self, U):
        U = np.atleast_2d(U)
        theta = U[:, -1]
        inner = self._inner_density(U[:, :-1])
        d_new = None
        x = self._inner_apply(U[:1, :-1])
        d_new = x.shape[1] + 1
        return inner * np.sin(theta) ** (d_new - 2)

    def pull_linear(self, normal, offset):
        n = np.asarray(normal, dtype=float)
        if abs(offset) > 1e-14:
            return None
        if self.axis == "last":
            axis_comp, rest = n[-1], n[:-1]
        else:
            axis_comp, rest = n[0], n[1:]
        if abs(axis_comp) <= 1e-14:
            # (n_inner . x) sin(theta) = 0 <=> inner zero set
            nin, off = rest, 0.0
            for t in reversed(self.inner_chain):
                res = t.pull_linear(nin, off)
                if res is None:
                    return None
                nin, off = res
            return np.concatenate([nin, [0.0]]), off
        if np.max(np.abs(rest)) <= 1e-14:
            # cos(theta) = 0 <=> theta = pi/2: a chart line in the last coord
            return "theta", np.pi / 2
        return None

    def to_dict(self):
        return {"tag": self.tag, "axis": self.axis,
                "inner_chain": [t.to_dict() for t in self.inner_chain]}


_TRANSFORM_TAGS = {}
for _cls in (AffineChart, CircleChart, LinearMap, RadialProjection, DilationMap,
             RotationMap, SuspensionMap):
    _TRANSFORM_TAGS[_cls.tag] = _cls


def transform_from_dict(data):
    tag = data["tag"]
    if tag == "affine_chart":
        return AffineChart(np.array(data["origin"]), np.array(data["frame"]))
    if tag == "circle_chart":
        return CircleChart(data["window_start"])
    if tag == "linear_map":
        return LinearMap(np.array(data["matrix"]), np.array(data["source_normal"]))
    if tag == "radial_projection":
        return RadialProjection(np.array(data["normal"]), data["offset"])
    if tag == "dilation":
        return DilationMap(data["alpha"])
    if tag == "rotation":
        return RotationMap(np.array(data["matrix"]))
    if tag == "suspension":
        return SuspensionMap([transform_from_dict(t) for t in data["inner_chain"]],
                             data["axis"])
    raise ValueError(f"unknown transform tag {tag!r}")


# ---------------------------------------------------------------------------
# cells
# ---------------------------------------------------------------------------

class ConvexCell:
    """A geodesically convex region: base polytope + transform chain.

    Geodesic convexity is guaranteed by construction (each chain element maps
    convex sets to geodesically convex sets) and spot-checked by randomized
    midpoint tests in the test suite, not proven symbolically.
    """

    def __init__(self, base, chain, multiplicity=1, measure=None):
        self.base = base
        self.chain = list(chain)
        self.multiplicity = int(multiplicity)
        self.measure = measure
        self.inball = None      # (center, radius in radians)
        self.circumball = None

    # -- chain plumbing -----------------------------------------------------

    def apply(self, U):
        X = np.atleast_2d(np.asarray(U, dtype=float))
        for t in self.chain:
            X = t.apply(X)
        return X

    def density(self, U):
        U = np.atleast_2d(np.asarray(U, dtype=float))
        out = np.ones(len(U))
        X = U
        for t in self.chain:
            out = out * t.density(X)
            X = t.apply(X)
        return out

    def invert(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ok = np.ones(len(X), dtype=bool)
        for t in reversed(self.chain):
            X, good = t.invert(X)
            ok &= good
        return X, ok

    @property
    def ambient_dim(self):
        probe = self.base.centroid()[None, :]
        return self.apply(probe).shape[1]

    def contains(self, X, tol=1e-9):
        U, ok = self.invert(X)
        inside = np.zeros(len(U), dtype=bool)
        if np.any(ok):
            inside[ok] = self.base.contains(U[ok], tol=tol)
        res = inside
        return res if len(res) > 1 else bool(res[0])

    def sample(self, rng, size):
        return self.apply(self.base.sample(rng, size))

    def center(self):
        if self.inball is not None:
            return self.inball[0]
        return self.apply(self.base.centroid()[None, :])[0]

    def boundary_points(self, per_edge=32):
        return self.apply(self.base.boundary_points(per_edge))

    def compute_balls(self, per_edge=64):
        """Measured inball/circumball about the mapped base centroid."""
        from .geometry import geodesic_distance
        c = self.apply(self.base.centroid()[None, :])[0]
        bd = self.boundary_points(per_edge)
        dists = geodesic_distance(bd, c)
        self.inball = (c, float(np.min(dists)))
        self.circumball = (c, float(np.max(dists)))
        return self.inball, self.circumball

    # -- singular geometry for the measure layer -----------------------------

    def pull_coordinate_plane(self, j):
        """Chart preimage of the plane {x_j = 0}.

        Returns ('linear', normal, offset), ('nonlinear', g) with g a chart
        root function, or ('outside', None) when the plane misses the cell.
        """
        d = self.ambient_dim
        n = np.zeros(d)
        n[j] = 1.0
        off = 0.0
        cur = (n, off)
        for t in reversed(self.chain):
            res = t.pull_linear(cur[0], cur[1])
            if res is None:
                cell = self

                def g(U, _j=j, _cell=cell):
                    return _cell.apply(U)[:, _j]

                return ("nonlinear", g)
            if isinstance(res[0], str) and res[0] == "theta":
                # theta = const line in the last chart coordinate
                k = self.base.k
                nn = np.zeros(k)
                nn[-1] = 1.0
                return ("linear", nn, res[1])
            cur = res
        nrm = np.linalg.norm(cur[0])
        if nrm <= 1e-14:
            return ("outside", None)
        return ("linear", cur[0] / nrm, cur[1] / nrm)

    # -- integration ----------------------------------------------------------

    def integrate(self, fn, tol=None, singular_coords=(), order=10, depth=44):
        """Integral over the realized cell of fn (vectorized on sphere points).

        `singular_coords`: (coordinate index, exponent) pairs; fn behaves like
        |x_j|^alpha near the plane {x_j = 0}, and panels split/grade toward the
        chart preimage of each plane.  Returns (value, error_bound).
        """

        def integrand(U):
            return fn(self.apply(U)) * self.density(U)

        lines, roots = [], []
        for j, alpha in singular_coords:
            kind, *info = self.pull_coordinate_plane(j)
            if kind == "linear":
                lines.append((info[0], info[1], alpha))
            elif kind == "nonlinear":
                roots.append((info[0], alpha))
        k = self.base.k
        if k == 1:
            crossings = [(c / n[0], a) for n, c, a in lines]
            lo, hi = self.base.verts[0, 0], self.base.verts[-1, 0]
            for g, a in roots:
                ss = np.linspace(lo, hi, 65)
                gv = g(ss[:, None])
                sgn = np.sign(gv)
                for i in range(64):
                    if sgn[i] * sgn[i + 1] < 0:
                        from scipy.optimize import brentq
                        crossings.append((brentq(
                            lambda s: float(g(np.array([[s]]))[0]),
                            ss[i], ss[i + 1], xtol=1e-15), a))
            return integrate_interval_poly(integrand, self.base,
                                           crossings=crossings, tol=tol,
                                           order=order + 2, depth=depth)
        if k == 2:
            return integrate_polygon(integrand, self.base, singular_lines=lines,
                                     tol=tol, order=order, depth=depth,
                                     root_fns=roots)
        return integrate_polytope3(integrand, self.base, singular_planes=lines,
                                   tol=tol, order=max(6, order - 2), depth=depth)

    # -- serialization --------------------------------------------------------

    def to_dict(self):
        out = {
            "base": self.base.to_dict(),
            "chain": [t.to_dict() for t in self.chain],
            "multiplicity": self.multiplicity,
            "measure": self.measure,
        }
        if self.inball is not None:
            out["inball"] = {"center": self.inball[0].tolist(),
                             "radius": self.inball[1]}
        if self.circumball is not None:
            out["circumball"] = {"center": self.circumball[0].tolist(),
                                 "radius": self.circumball[1]}
        return out

    @classmethod
    def from_dict(cls, data):
        cell = cls(Polytope.from_dict(data["base"]),
                   [transform_from_dict(t) for t in data["chain"]],
                   multiplicity=data.get("multiplicity", 1),
                   measure=data.get("measure"))
        if "inball" in data:
            cell.inball = (np.array(data["inball"]["center"]),
                           data["inball"]["radius"])
        if "circumball" in data:
            cell.circumball = (np.array(data["circumball"]["center"]),
                               data["circumball"]["radius"])
        return cell

    def tessellate(self, resolution=4):
        """Triangle mesh of the realized cell (for OBJ export)."""
        verts, faces = [], []
        for tri in self.base.triangulate():
            if self.base.k != 2:
                continue
            n = resolution
            idx = {}
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    u = tri[0] + (i / n) * (tri[1] - tri[0]) + (j / n) * (tri[2] - tri[0])
                    idx[(i, j)] = len(verts)
                    verts.append(u)
            for i in range(n):
                for j in range(n - i):
                    faces.append((idx[(i, j)], idx[(i + 1, j)], idx[(i, j + 1)]))
                    if j < n - i - 1:
                        faces.append((idx[(i + 1, j)], idx[(i + 1, j + 1)], idx[(i, j + 1)]))
        if not verts:
            return np.empty((0, self.ambient_dim)), []
        return self.apply(np.array(verts)), faces


def reference_simplex_chart(d):
    """Chart of the hyperplane through e_1..e_d plus T_0's chart vertices."""
    verts = np.eye(d)
    origin = verts.mean(axis=0)
    ones = np.ones(d) / np.sqrt(d)
    q, _ = np.linalg.qr(np.column_stack([ones, np.eye(d)]))
    frame = q[:, 1:d]
    chart = AffineChart(origin, frame)
    base_verts = (verts - origin) @ frame
    return chart, Polytope(base_verts)


def simplex_cell(spanning, base=None, multiplicity=1):
    """Cell realizing the geodesic simplex conv_S{rows of spanning}.

    `base` restricts to a sub-polytope of the reference simplex chart.
    """
    spanning = np.asarray(spanning, dtype=float)
    d = spanning.shape[0]
    chart, full_base = reference_simplex_chart(d)
    A = spanning.T
    src_normal = np.ones(d) / np.sqrt(d)
    lin = LinearMap(A, src_normal)
    # hyperplane through the spanning vectors
    from .geometry import SurfaceSimplex
    surf = SurfaceSimplex(spanning)
    proj = RadialProjection(surf.normal, surf.offset)
    return ConvexCell(base if base is not None else full_base,
                      [chart, lin, proj], multiplicity=multiplicity)


def circle_cell(lo, hi, multiplicity=1):
    """Arc cell on S^1 with angles in [lo, hi]."""
    base = Polytope(np.array([[lo], [hi]]))
    return ConvexCell(base, [CircleChart(window_start=lo)],
                      multiplicity=multiplicity)


def suspend_cell(inner, theta_lo, theta_hi, axis="last", multiplicity=1):
    """Suspension of a lower-dimensional cell over the pole axis."""
    susp = SuspensionMap(inner.chain, axis=axis)
    iv = inner.base.verts
    lo_col = np.full((len(iv), 1), theta_lo)
    hi_col = np.full((len(iv), 1), theta_hi)
    verts = np.vstack([np.hstack([iv, lo_col]), np.hstack([iv, hi_col])])
    return ConvexCell(Polytope(verts), [susp], multiplicity=multiplicity)
