"""Convex chart polytopes (dim 1..3) used as cell base domains.

A polytope lives in the flat chart coordinates of a hyperplane; cells realize
it on the sphere through a transform chain.  Operations here are purely
affine: membership, clipping, triangulation, sampling.
"""

import numpy as np

try:
    from scipy.spatial import ConvexHull, QhullError
except ImportError:  # older scipy layouts
    from scipy.spatial import ConvexHull
    from scipy.spatial.qhull import QhullError


def _dedupe(verts, tol):
    out = []
    for v in verts:
        if not any(np.linalg.norm(v - u) <= tol for u in out):
            out.append(v)
    return np.array(out)


def min_norm_point(points):
    """Minimum-norm point of the convex hull of `points` (rows in R^d).

    Enumerates faces; fine for the <= 4 vertices a surface simplex carries.
    """
    pts = np.asarray(points, dtype=float)
    m = len(pts)
    best = None
    for mask in range(1, 2 ** m):
        idx = [i for i in range(m) if mask >> i & 1]
        sub = pts[idx]
        g = sub @ sub.T
        try:
            t = np.linalg.solve(g, np.ones(len(idx)))
        except np.linalg.LinAlgError:
            continue
        t = t / np.sum(t)
        if np.any(t < -1e-12):
            continue
        p = t @ sub
        n = np.linalg.norm(p)
        if best is None or n < best[0]:
            best = (n, p)
    return best[1]


class Polytope:
    """Convex polytope in chart dimension k in {1, 2, 3}."""

    def __init__(self, verts):
        verts = np.atleast_2d(np.asarray(verts, dtype=float))
        if verts.ndim == 1:
            verts = verts[:, None]
        self.k = verts.shape[1]
        scale = max(1.0, np.max(np.abs(verts)))
        verts = _dedupe(verts, 1e-13 * scale)
        if self.k == 1:
            order = np.argsort(verts[:, 0])
            self.verts = verts[order][[0, -1]] if len(verts) > 1 else verts
        elif self.k == 2:
            self.verts = self._order_ccw(verts)
        else:
            self.verts = verts
        self._hull = None

    @staticmethod
    def _order_ccw(verts):
        if len(verts) <= 2:
            return verts
        c = verts.mean(axis=0)
        ang = np.arctan2(verts[:, 1] - c[1], verts[:, 0] - c[0])
        verts = verts[np.argsort(ang)]
        # drop collinear slivers
        keep = []
        m = len(verts)
        for i in range(m):
            a, b, c2 = verts[i - 1], verts[i], verts[(i + 1) % m]
            if abs(np.cross(b - a, c2 - a)) > 1e-15 or m <= 3:
                keep.append(i)
        return verts[keep] if len(keep) >= 3 else verts

    def hull(self):
        if self._hull is None:
            try:
                self._hull = ConvexHull(self.verts)
            except QhullError:
                self._hull = ConvexHull(self.verts, qhull_options="QJ")
        return self._hull

    # -- basic queries ------------------------------------------------------

    def volume(self):
        if self.k == 1:
            return float(self.verts[-1, 0] - self.verts[0, 0]) if len(self.verts) > 1 else 0.0
        if len(self.verts) <= self.k:
            return 0.0
        if self.k == 2:
            x, y = self.verts[:, 0], self.verts[:, 1]
            return 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        return float(self.hull().volume)

    def centroid(self):
        tris = self.triangulate()
        if len(tris) == 0:
            return self.verts.mean(axis=0)
        vols = np.array([_simplex_volume(t) for t in tris])
        cents = np.array([t.mean(axis=0) for t in tris])
        tot = vols.sum()
        if tot <= 0:
            return self.verts.mean(axis=0)
        return (vols[:, None] * cents).sum(axis=0) / tot

    def bounding_box(self):
        return self.verts.min(axis=0), self.verts.max(axis=0)

    def contains(self, pts, tol=1e-10):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.k == 1:
            lo, hi = self.verts[0, 0], self.verts[-1, 0]
            return (pts[:, 0] >= lo - tol) & (pts[:, 0] <= hi + tol)
        if self.k == 2:
            ok = np.ones(len(pts), dtype=bool)
            v = self.verts
            m = len(v)
            for i in range(m):
                a, b = v[i], v[(i + 1) % m]
                e = b - a
                ok &= (e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])) >= -tol
            return ok
        eqs = self.hull().equations
        return np.all(pts @ eqs[:, :-1].T + eqs[:, -1] <= tol, axis=1)

    # -- constructive ops ---------------------------------------------------

    def clip(self, normal, offset, tol=1e-13):
        """Intersect with the halfspace {u : normal . u <= offset}."""
        n = np.asarray(normal, dtype=float)
        if self.k == 1:
            lo, hi = self.verts[0, 0], self.verts[-1, 0]
            if n[0] > 0:
                hi = min(hi, offset / n[0])
            elif n[0] < 0:
                lo = max(lo, offset / n[0])
            elif offset < 0:
                return None
            if hi - lo <= tol:
                return None
            return Polytope(np.array([[lo], [hi]]))
        if self.k == 2:
            out = []
            v = self.verts
            m = len(v)
            for i in range(m):
                a, b = v[i], v[(i + 1) % m]
                da, db = n @ a - offset, n @ b - offset
                if da <= tol:
                    out.append(a)
                if (da < -tol and db > tol) or (da > tol and db < -tol):
                    t = da / (da - db)
                    out.append(a + t * (b - a))
            if len(out) < 3:
                return None
            p = Polytope(np.array(out))
            return p if p.volume() > tol else None
        # 3D: keep inside vertices plus edge intersections, rebuild hull
        v = self.verts
        side = v @ n - offset
        keep = [v[i] for i in range(len(v)) if side[i] <= tol]
        hull = self.hull()
        edges = set()
        for simplex in hull.simplices:
            for i in range(len(simplex)):
                e = tuple(sorted((simplex[i], simplex[(i + 1) % len(simplex)])))
                edges.add(e)
        for i, j in edges:
            if (side[i] < -tol and side[j] > tol) or (side[i] > tol and side[j] < -tol):
                t = side[i] / (side[i] - side[j])
                keep.append(v[i] + t * (v[j] - v[i]))
        if len(keep) < 4:
            return None
        p = Polytope(np.array(keep))
        return p if p.volume() > tol else None

    def triangulate(self):
        """Decompose into simplices; returns list of (k+1, k) arrays."""
        v = self.verts
        if self.k == 1:
            return [v] if len(v) > 1 else []
        if self.k == 2:
            return [np.array([v[0], v[i], v[i + 1]]) for i in range(1, len(v) - 1)]
        try:
            from scipy.spatial import Delaunay
            tri = Delaunay(v)
        except QhullError:
            from scipy.spatial import Delaunay
            tri = Delaunay(v, qhull_options="QJ")
        out = []
        for s in tri.simplices:
            t = v[s]
            if _simplex_volume(t) > 1e-15:
                out.append(t)
        return out

    def sample(self, rng, size):
        """Uniform samples; used for convexity spot checks and coverage tests."""
        tris = self.triangulate()
        vols = np.array([_simplex_volume(t) for t in tris])
        probs = vols / vols.sum()
        counts = rng.multinomial(size, probs)
        chunks = []
        for t, c in zip(tris, counts):
            if c == 0:
                continue
            bary = rng.dirichlet(np.ones(self.k + 1), size=c)
            chunks.append(bary @ t)
        return np.vstack(chunks) if chunks else np.empty((0, self.k))

    def boundary_points(self, per_edge=32):
        """Deterministic net on the boundary."""
        v = self.verts
        if self.k == 1:
            return v.copy()
        if self.k == 2:
            ts = np.linspace(0.0, 1.0, per_edge, endpoint=False)
            pts = []
            m = len(v)
            for i in range(m):
                a, b = v[i], v[(i + 1) % m]
                pts.append(a + ts[:, None] * (b - a))
            return np.vstack(pts)
        hull = self.hull()
        pts = []
        grid = np.linspace(0.05, 0.95, max(3, per_edge // 8))
        for s in hull.simplices:
            tri = v[s]
            for a in grid:
                for b in grid:
                    if a + b < 1.0:
                        pts.append(tri[0] + a * (tri[1] - tri[0]) + b * (tri[2] - tri[0]))
        return np.array(pts)

    def edges(self):
        v = self.verts
        if self.k == 1:
            return [(v[0], v[-1])]
        if self.k == 2:
            m = len(v)
            return [(v[i], v[(i + 1) % m]) for i in range(m)]
        hull = self.hull()
        seen = set()
        out = []
        for simplex in hull.simplices:
            for i in range(len(simplex)):
                e = tuple(sorted((simplex[i], simplex[(i + 1) % len(simplex)])))
                if e not in seen:
                    seen.add(e)
                    out.append((v[e[0]], v[e[1]]))
        return out

    def scale_about(self, point, s):
        p = np.asarray(point, dtype=float)
        return Polytope(p + s * (self.verts - p))

    def to_dict(self):
        return {"vertices": self.verts.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data["vertices"]))


def _simplex_volume(t):
    t = np.asarray(t)
    d = t.shape[1]
    if len(t) != d + 1:
        return 0.0
    m = t[1:] - t[0]
    from math import factorial
    return abs(np.linalg.det(m)) / factorial(d)
