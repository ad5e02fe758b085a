"""Graded-panel Gauss quadrature over intervals, boxes and convex polygons.

Singular integrands (the |x_j|^alpha factors of product-power weights) are
handled by splitting at known singular loci, grading panels geometrically
toward them, and integrating the innermost strip analytically from a local
power-law extrapolation.  The analytic head sidesteps the double-precision
wall that pure refinement hits when a singular locus sits at an O(1)
coordinate.  Error estimates come from comparing two panelizations.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureFailureError
from .polytopes import Polytope

_GL_CACHE = {}

EPS = np.finfo(float).eps


def gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = leggauss(order)
    return _GL_CACHE[order]


def graded_edges(lo, hi, grade_lo=False, grade_hi=False, base=4, depth=54,
                 min_width=None):
    """Panel edges on [lo, hi], geometrically refined toward graded ends.

    Panels never shrink below `min_width` (default: a safe multiple of the
    endpoint ulp), so Gauss nodes stay numerically distinguishable from the
    singular endpoint.
    """
    length = hi - lo
    if length <= 0:
        return np.array([lo, hi])
    if min_width is None:
        min_width = 64.0 * EPS * max(1.0, abs(lo), abs(hi))
    kmax = max(1, int(np.floor(np.log2(length / min_width)))) if min_width < length else 1
    depth = min(depth, kmax)

    def stack(a, span):
        return a + span * np.concatenate(([0.0], 2.0 ** -np.arange(depth, -1, -1.0)))

    if grade_lo and grade_hi:
        mid = 0.5 * (lo + hi)
        left = stack(lo, mid - lo)
        right = hi - (stack(0.0, hi - mid))
        return np.unique(np.concatenate([left, right]))
    pieces = []
    a, b = lo, hi
    if grade_lo:
        cut = lo + 0.5 * length
        pieces.append(stack(lo, cut - lo))
        a = cut
    if grade_hi:
        cut = hi - 0.5 * length
        pieces.append(hi - stack(0.0, hi - cut))
        b = cut
    if b > a:
        pieces.append(np.linspace(a, b, base + 1))
    if not pieces:
        pieces.append(np.array([lo, hi]))
    return np.unique(np.concatenate(pieces))


def composite_gl(edges, order):
    """Nodes and weights of a composite Gauss-Legendre rule over panels."""
    x, w = gauss_legendre(order)
    lo = edges[:-1]
    half = 0.5 * (edges[1:] - lo)
    mid = lo + half
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return nodes, wts


def segment_rule(lo, hi, breaks=(), grade_points=(), order=8, base=4, depth=54,
                 min_width=None):
    """Composite rule on [lo, hi] split at `breaks`, graded toward `grade_points`."""
    eps = 1e-14 * max(1.0, abs(hi - lo), abs(lo), abs(hi))
    gset = [g for g in grade_points if lo - eps <= g <= hi + eps]
    cuts = sorted({lo, hi, *[b for b in breaks if lo + eps < b < hi - eps],
                   *[g for g in gset if lo + eps < g < hi - eps]})
    all_nodes, all_wts = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= eps:
            continue
        g_lo = any(abs(a - g) <= eps for g in gset)
        g_hi = any(abs(b - g) <= eps for g in gset)
        edges = graded_edges(a, b, g_lo, g_hi, base=base, depth=depth,
                             min_width=min_width)
        n, w = composite_gl(edges, order)
        all_nodes.append(n)
        all_wts.append(w)
    if not all_nodes:
        return np.array([]), np.array([])
    return np.concatenate(all_nodes), np.concatenate(all_wts)


def integrate_1d(f, lo, hi, breaks=(), grade_points=(), tol=None, order=10,
                 base=6, depth=54, max_retries=2):
    """Integrate a vectorized scalar integrand with an a-posteriori estimate.

    Returns (value, error_bound, evaluations).
    """
    if hi <= lo:
        return 0.0, 0.0, 0
    nev = 0
    v2 = err = 0.0
    for attempt in range(max_retries + 1):
        o = order + 6 * attempt
        d = depth + 14 * attempt
        n1, w1 = segment_rule(lo, hi, breaks, grade_points, order=o, base=base, depth=d)
        n2, w2 = segment_rule(lo, hi, breaks, grade_points, order=o + 5, base=base + 2, depth=d)
        v1 = float(w1 @ f(n1))
        v2 = float(w2 @ f(n2))
        nev += len(n1) + len(n2)
        err = abs(v1 - v2)
        if tol is None or err <= tol:
            return v2, err, nev
    return v2, err, nev


class Cumulative1D:
    """Cumulative integral t -> int_lo^t f of a vectorized 1D density.

    Panel sums are precomputed once; point evaluations add a partial-panel
    Gauss rule.  Backs every mass-splitting continuity argument (wedge
    splits, slab splits, equal-mass cuts).
    """

    def __init__(self, f, lo, hi, breaks=(), grade_points=(), order=12, base=8,
                 depth=54):
        self.f = f
        self.lo = lo
        self.hi = hi
        self.order = order
        eps = 1e-14 * max(1.0, abs(hi - lo), abs(lo), abs(hi))
        gset = [g for g in grade_points if lo - eps <= g <= hi + eps]
        cuts = sorted({lo, hi, *[b for b in breaks if lo + eps < b < hi - eps],
                       *[g for g in gset if lo + eps < g < hi - eps]})
        edge_list = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= eps:
                continue
            g_lo = any(abs(a - g) <= eps for g in gset)
            g_hi = any(abs(b - g) <= eps for g in gset)
            edge_list.append(graded_edges(a, b, g_lo, g_hi, base=base, depth=depth))
        self.edges = np.unique(np.concatenate(edge_list)) if edge_list else np.array([lo, hi])
        nodes, wts = composite_gl(self.edges, order)
        vals = f(nodes)
        per_panel = (wts * vals).reshape(len(self.edges) - 1, order).sum(axis=1)
        self.prefix = np.concatenate(([0.0], np.cumsum(per_panel)))

    def total(self):
        return float(self.prefix[-1])

    def __call__(self, t):
        t = float(np.clip(t, self.lo, self.hi))
        i = int(np.searchsorted(self.edges, t, side="right") - 1)
        i = min(max(i, 0), len(self.edges) - 2)
        a = self.edges[i]
        val = self.prefix[i]
        if t > a:
            x, w = gauss_legendre(self.order)
            half = 0.5 * (t - a)
            mid = a + half
            val = val + half * float(w @ self.f(mid + half * x))
        return float(val)

    def invert(self, target, t_lo=None, t_hi=None):
        """Smallest t with cumulative(t) = target (cumulative nondecreasing)."""
        from scipy.optimize import brentq
        a = self.lo if t_lo is None else t_lo
        b = self.hi if t_hi is None else t_hi
        fa, fb = self(a) - target, self(b) - target
        if fa >= 0:
            return a
        if fb <= 0:
            return b
        return brentq(lambda t: self(t) - target, a, b, xtol=1e-15, rtol=8.9e-16)


def nested_integrate(f, axes, prefix=(), order=10, base=4, depth=54):
    """Iterated integral over up to 3 axes; innermost axis is vectorized.

    Each axis is a callable prefix -> (lo, hi, breaks, grade_points) evaluated
    at the fixed outer coordinates.  `f` maps an (m, naxes) array to values.
    """
    lo, hi, breaks, grades = axes[0](prefix)
    if hi <= lo:
        return 0.0
    nodes, wts = segment_rule(lo, hi, breaks, grades, order=order, base=base, depth=depth)
    if len(nodes) == 0:
        return 0.0
    if len(axes) == 1:
        pts = np.empty((len(nodes), len(prefix) + 1))
        for j, p in enumerate(prefix):
            pts[:, j] = p
        pts[:, -1] = nodes
        return float(wts @ f(pts))
    tot = 0.0
    for t, w in zip(nodes, wts):
        tot += w * nested_integrate(f, axes[1:], prefix + (t,), order=order,
                                    base=base, depth=depth)
    return tot


def nested_integrate_est(f, axes, tol=None, order=10, base=4, depth=54, max_retries=2):
    """nested_integrate with order-comparison error estimate and retries."""
    v2 = err = 0.0
    for attempt in range(max_retries + 1):
        o = order + 4 * attempt
        d = depth + 10 * attempt
        v1 = nested_integrate(f, axes, order=o, base=base, depth=d)
        v2 = nested_integrate(f, axes, order=o + 4, base=base + 1, depth=d)
        err = abs(v1 - v2)
        if tol is None or err <= tol:
            return v2, err
    return v2, err


# ---------------------------------------------------------------------------
# 1D segments with algebraic singular points: graded panels + analytic heads
# ---------------------------------------------------------------------------

_HEAD_FRACTION = 1e-8   # truncated strip, relative to segment span
_SAFE_FRACTION = 1e-6   # offsets used to extrapolate the local power-law


def singular_segment(f, lo, hi, crossings, breaks=(), order=10, base=4, depth=40):
    """Integrate f over [lo, hi] with known algebraic singular points.

    crossings: list of (s, alpha) where the integrand behaves like
    c(s') |s' - s|^alpha; alpha=None means grade only (kink of unknown type).
    The strip within ~1e-8 of each singular point is integrated analytically
    from a two-point extrapolation of c, which keeps the contribution accurate
    even when |s' - s| is far below the ulp of s.
    """
    span = hi - lo
    if span <= 0:
        return 0.0
    eps = 1e-13 * max(1.0, abs(lo), abs(hi))
    head_w = _HEAD_FRACTION * span
    cross = sorted((float(s), a) for s, a in crossings if lo - eps <= s <= hi + eps)
    gpts = [s for s, _ in cross]
    total = 0.0
    # analytic heads around each crossing with a known exponent
    carve = []
    for idx, (s, a) in enumerate(cross):
        near_other = any(abs(s - s2) < 4 * head_w for k, (s2, _) in enumerate(cross) if k != idx)
        if a is None or a >= 0 and float(a).is_integer() or near_other:
            continue
        for side in (+1.0, -1.0):
            inner = s + side * head_w
            if not (lo - eps <= inner <= hi + eps) or not (lo - eps <= s <= hi + eps):
                continue
            if side > 0 and s >= hi - eps:
                continue
            if side < 0 and s <= lo + eps:
                continue
            sa = _SAFE_FRACTION * span
            va, vb = f(np.array([s + side * sa, s + side * 2 * sa]))
            ha = va * sa ** (-a)
            hb = vb * (2 * sa) ** (-a)
            h0 = 2.0 * ha - hb
            if np.isfinite(h0):
                total += h0 * head_w ** (1.0 + a) / (1.0 + a)
                carve.append((min(s, inner), max(s, inner)))
    # panel integration over the remainder
    cuts = sorted({lo, hi, *[b for b in breaks if lo + eps < b < hi - eps],
                   *[g for g in gpts if lo + eps < g < hi - eps],
                   *[c for pair in carve for c in pair if lo + eps < c < hi - eps]})
    carve_arr = carve
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= eps:
            continue
        mid = 0.5 * (a + b)
        if any(c0 - eps <= mid <= c1 + eps for c0, c1 in carve_arr):
            continue  # covered by an analytic head
        g_lo = any(abs(a - g) <= eps for g in gpts) or any(abs(a - c1) <= eps for _, c1 in carve_arr) or any(abs(a - c0) <= eps for c0, _ in carve_arr)
        g_hi = any(abs(b - g) <= eps for g in gpts) or any(abs(b - c0) <= eps for c0, _ in carve_arr) or any(abs(b - c1) <= eps for _, c1 in carve_arr)
        edges = graded_edges(a, b, g_lo, g_hi, base=base, depth=depth,
                             min_width=max(1e-14 * span, 16 * EPS * max(1.0, abs(a), abs(b))))
        n, w = composite_gl(edges, order)
        vals = f(n)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            # nodes inside the fp noise zone of a singular locus; their true
            # contribution is below the head truncation level
            vals = np.where(bad, 0.0, vals)
        total += float(w @ vals)
    return total


# ---------------------------------------------------------------------------
# convex polygon integration with singular lines
# ---------------------------------------------------------------------------

def _slice_bounds(verts, t, eps):
    """Intersection of the vertical line {u0 = t} with a convex polygon."""
    m = len(verts)
    ss = []
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        if abs(a[0] - b[0]) <= eps:
            if abs(t - a[0]) <= eps:
                ss.extend([a[1], b[1]])
            continue
        u = (t - a[0]) / (b[0] - a[0])
        if -1e-12 <= u <= 1 + 1e-12:
            ss.append(a[1] + u * (b[1] - a[1]))
    if not ss:
        return None
    return min(ss), max(ss)


def _pick_outer_direction(singular_lines, root_dirs=()):
    """Outer axis such that no singular line is parallel to the inner slices."""
    if not singular_lines and not root_dirs:
        return None
    dirs = []
    for n, c, a in singular_lines:
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        dirs.append(np.array([-n[1], n[0]]))
    dirs.extend(root_dirs)
    best, best_val = None, -1.0
    for theta in np.linspace(0.0, np.pi, 61, endpoint=False):
        e_t = np.array([np.cos(theta), np.sin(theta)])
        val = min(abs(v @ e_t) for v in dirs)
        if val > best_val:
            best_val, best = val, e_t
    return best


def integrate_polygon(f, poly, singular_lines=(), tol=None, order=10, base=4,
                      depth=44, root_fns=(), max_retries=2):
    """Integrate f over a convex 2D polytope.

    singular_lines: iterable of (normal, offset, alpha) chart lines along which
    the integrand behaves like |n.u - c|^alpha (alpha=None: unknown kink).
    root_fns: (g, alpha) pairs whose zero level sets are curved singular loci,
    located per inner slice by sign scanning.  Returns (value, error_bound).
    """
    verts = poly.verts
    scale = max(1.0, np.max(np.abs(verts)))
    eps = 1e-12 * scale
    lines = [(np.asarray(n, dtype=float) / np.linalg.norm(n),
              c / np.linalg.norm(n), a) for n, c, a in singular_lines]
    e_t = _pick_outer_direction(lines)
    if e_t is None:
        ext = verts.max(axis=0) - verts.min(axis=0)
        e_t = np.array([1.0, 0.0]) if ext[0] >= ext[1] else np.array([0.0, 1.0])
    rot = np.array([[e_t[0], e_t[1]], [-e_t[1], e_t[0]]])
    rverts = verts @ rot.T
    rlines = [(rot @ n, c, a) for n, c, a in lines]

    # outer breaks: vertices, singular/edge intersections, line/line crossings;
    # the slice integral kinks like |t - t*|^(1+alpha) at singular-related
    # breaks, so panels grade toward those
    t_vals = set(np.round(rverts[:, 0], 13))
    t_grade = set()
    m = len(rverts)
    for n, c, a in rlines:
        for i in range(m):
            p, q = rverts[i], rverts[(i + 1) % m]
            dp, dq = n @ p - c, n @ q - c
            if (dp < -eps and dq > eps) or (dp > eps and dq < -eps):
                u = dp / (dp - dq)
                tv = round(p[0] + u * (q[0] - p[0]), 13)
                t_vals.add(tv)
                t_grade.add(tv)
            elif abs(dp) <= eps:
                t_vals.add(round(p[0], 13))
                t_grade.add(round(p[0], 13))
    for i in range(len(rlines)):
        for j in range(i + 1, len(rlines)):
            n1, c1, _ = rlines[i]
            n2, c2, _ = rlines[j]
            det = n1[0] * n2[1] - n1[1] * n2[0]
            if abs(det) > 1e-12:
                x = np.linalg.solve(np.array([n1, n2]), np.array([c1, c2]))
                t_vals.add(round(x[0], 13))
                t_grade.add(round(x[0], 13))
    t_lo, t_hi = rverts[:, 0].min(), rverts[:, 0].max()
    t_breaks = sorted(v for v in t_vals if t_lo + eps < v < t_hi - eps)
    if root_fns:
        t_grade.update([t_lo, t_hi])
    t_grades = sorted(v for v in t_grade if t_lo - eps <= v <= t_hi + eps)

    outer_min_width = 1e-9 * max(t_hi - t_lo, 1e-9)

    def run(o, dep):
        nodes, wts = segment_rule(t_lo, t_hi, t_breaks, t_grades, order=o,
                                  base=base, depth=dep, min_width=outer_min_width)
        tot = 0.0
        for t, w in zip(nodes, wts):
            sb = _slice_bounds(rverts, t, eps)
            if sb is None:
                continue
            s_lo, s_hi = sb
            if s_hi - s_lo <= eps:
                continue
            crossings = []
            for n, c, a in rlines:
                if abs(n[1]) > 1e-12:
                    s_star = (c - n[0] * t) / n[1]
                    if s_lo - eps <= s_star <= s_hi + eps:
                        crossings.append((s_star, a))
            for g, a in root_fns:
                ss = np.linspace(s_lo, s_hi, 33)
                pts = np.column_stack([np.full_like(ss, t), ss]) @ rot
                gv = np.asarray(g(pts))
                sgn = np.sign(gv)
                for i in range(32):
                    if sgn[i] * sgn[i + 1] < 0:
                        from scipy.optimize import brentq
                        r = brentq(lambda s: float(g((np.array([[t, s]]) @ rot))[0]),
                                   ss[i], ss[i + 1], xtol=1e-15)
                        crossings.append((r, a))

            def f1(ss, _t=t):
                pts = np.column_stack([np.full(len(ss), _t), ss]) @ rot
                return f(pts)

            if crossings:
                tot += w * singular_segment(f1, s_lo, s_hi, crossings,
                                            order=o, base=base, depth=dep)
            else:
                innodes, inwts = segment_rule(s_lo, s_hi, (), (), order=o, base=base)
                tot += w * float(inwts @ f1(innodes))
        return tot

    v2 = err = 0.0
    for attempt in range(max_retries + 1):
        o = order + 4 * attempt
        dep = depth + 8 * attempt
        v1 = run(o, dep)
        v2 = run(o + 4, dep)
        err = abs(v1 - v2)
        if tol is None or err <= tol:
            return v2, err
    return v2, err


def integrate_interval_poly(f, poly, crossings=(), tol=None, order=12, base=8,
                            depth=44, max_retries=2):
    """1D counterpart of integrate_polygon for interval base polytopes.

    crossings: (position, alpha) singular points of the 1D integrand.
    """
    lo, hi = poly.verts[0, 0], poly.verts[-1, 0]

    def f1(ts):
        return f(ts[:, None])

    v2 = err = 0.0
    for attempt in range(max_retries + 1):
        o = order + 5 * attempt
        dep = depth + 10 * attempt
        v1 = singular_segment(f1, lo, hi, crossings, order=o, base=base, depth=dep)
        v2 = singular_segment(f1, lo, hi, crossings, order=o + 5, base=base + 2, depth=dep)
        err = abs(v1 - v2)
        if tol is None or err <= tol:
            return v2, err
    return v2, err


def integrate_polytope3(f, poly, singular_planes=(), tol=None, order=8, base=3,
                        depth=36):
    """Integrate over a 3D chart polytope by slicing into polygons.

    Slices are taken along the longest axis; each slice reduces to
    integrate_polygon with the singular planes traced into slice lines.
    Heavier than the 2D path; only exercised for S^3 partitions.
    """
    verts = poly.verts
    ext = verts.max(axis=0) - verts.min(axis=0)
    u = np.eye(3)[int(np.argmax(ext))]
    # avoid slicing parallel to a singular plane
    for n, c, a in singular_planes:
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        if abs(n @ u) > 0.99:
            u = np.eye(3)[int(np.argsort(ext)[1])]
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(3)]))
    if q[:, 0] @ u < 0:
        q[:, 0] = -q[:, 0]
    rverts = verts @ q
    ts = rverts[:, 0]
    t_lo, t_hi = float(ts.min()), float(ts.max())
    t_breaks = np.unique(np.round(ts, 12))[1:-1]

    def run(o, dep):
        nodes, wts = segment_rule(t_lo, t_hi, t_breaks, (), order=o, base=base)
        tot = 0.0
        for t, w in zip(nodes, wts):
            sliced = _slice_polytope3(poly, q[:, 0], t)
            if sliced is None:
                continue
            verts2 = sliced @ q[:, 1:]
            if len(verts2) < 3:
                continue
            p2 = Polytope(verts2)
            if p2.volume() <= 1e-14:
                continue
            lines2 = []
            for n, c, a in singular_planes:
                n = np.asarray(n, dtype=float)
                n2 = q[:, 1:].T @ n
                nn = np.linalg.norm(n2)
                if nn > 1e-9:
                    lines2.append((n2, c - (n @ q[:, 0]) * t, a))

            def f2(uv, _t=t):
                pts3 = np.column_stack([np.full(len(uv), _t), uv]) @ q.T
                return f(pts3)

            v, _ = integrate_polygon(f2, p2, lines2, tol=None, order=o,
                                     base=base, depth=dep, max_retries=0)
            tot += w * v
        return tot

    v1 = run(order, depth)
    v2 = run(order + 3, depth)
    err = abs(v1 - v2)
    if tol is not None and err > tol:
        v1 = run(order + 5, depth + 8)
        v2 = run(order + 8, depth + 8)
        err = abs(v1 - v2)
        if err > tol:
            raise QuadratureFailureError("3d polytope integral missed tolerance",
                                         error=err, tol=tol)
    return v2, err


def _slice_polytope3(poly, normal, t):
    verts = poly.verts
    side = verts @ normal - t
    pts = [verts[i] for i in range(len(verts)) if abs(side[i]) <= 1e-12]
    for a, b in poly.edges():
        da, db = a @ normal - t, b @ normal - t
        if (da < -1e-12 and db > 1e-12) or (da > 1e-12 and db < -1e-12):
            s = da / (da - db)
            pts.append(a + s * (b - a))
    if len(pts) < 3:
        return None
    return np.array(pts)
