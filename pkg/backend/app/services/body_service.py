"""Service for symmetric convex bodies: representations, gauges, polarity, slices."""
import itertools
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog, minimize_scalar
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from app.core.config import settings
from app.core.exceptions import (
    DegenerateBodyError,
    DimensionMismatchError,
    GeometryError,
    InternalSolverError,
    NormalizationError,
    SingularTransformError,
    UnboundedBodyError,
)
from app.models.geometry import Body, BodyOracle, HPolytope, VPolytope
from app.utils.lp_utils import (
    DUPLICATE_RTOL,
    HIGHS_OPTIONS,
    chebyshev_center,
    essential_rows,
    maximize_linear,
    mirror_indices,
    unique_rows,
)
from app.utils.random_utils import make_rng

logger = logging.getLogger(__name__)

# Coefficients at or below this magnitude count as zero along a fiber axis
ZERO_COEFF_TOL = 1e-12
BOUNDARY_TOL = 1e-9
MAX_CONDITION = 1e12


def _lexsorted(rows: np.ndarray) -> np.ndarray:
    return np.lexsort(rows.T[::-1])


def _merge_points(points: np.ndarray, tol: float) -> np.ndarray:
    """Collapse points closer than tol (sup norm) into one representative."""
    merged = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in merged):
            merged.append(p)
    return np.asarray(merged, dtype=float)


def _check_dim(expected: int, got: int) -> None:
    if expected != got:
        raise DimensionMismatchError(f"dimension mismatch: {expected} != {got}")


class BodyService:
    """Service for body construction and the geometry of single bodies."""

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    def make_hpolytope(
        self,
        normals,
        offsets=None,
        symmetric: Optional[bool] = None,
        reduce: bool = True
    ) -> HPolytope:
        """Canonical H-polytope: duplicates and redundant rows removed, rows sorted."""
        A = np.atleast_2d(np.asarray(normals, dtype=float))
        m, n = A.shape
        if n < 1:
            raise GeometryError("dimension must be at least 1")
        c = np.ones(m) if offsets is None else np.asarray(offsets, dtype=float).copy()
        _check_dim(m, c.shape[0])
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(c))):
            raise GeometryError("halfspaces must be finite")

        zero_rows = np.max(np.abs(A), axis=1) <= 1e-15
        if np.any(c[zero_rows] < 0):
            raise DegenerateBodyError("a constant constraint excludes every point")
        A, c = A[~zero_rows], c[~zero_rows]

        idx = unique_rows(A, c)
        A, c = A[idx].copy(), c[idx].copy()
        normalized = bool(np.all(c == 1.0))

        mirror = mirror_indices(A) if normalized else None
        if symmetric is None:
            symmetric = mirror is not None
        if symmetric:
            if mirror is None:
                raise GeometryError("normal set is not closed under negation")
            for i, j in enumerate(mirror):
                if i < j:
                    A[j] = -A[i]

        if A.shape[0] == 0:
            raise UnboundedBodyError("no constraints")
        if symmetric:
            if np.linalg.matrix_rank(A) < n:
                raise UnboundedBodyError("normals do not span the space")
            interior = np.zeros(n)
        else:
            self._require_bounded(A, c)
            radius, interior = chebyshev_center(A, c)
            if not radius > 1e-12:
                raise DegenerateBodyError("halfspace system has empty interior")

        if reduce and A.shape[0] > 1:
            keep = essential_rows(A, c, mirror=mirror if symmetric else None, interior=interior)
            A, c = A[keep], c[keep]

        order = _lexsorted(np.hstack([A, c[:, None]]))
        return HPolytope(normals=A[order], offsets=c[order], symmetric=bool(symmetric))

    def make_vpolytope(self, vertices, symmetric: Optional[bool] = None, reduce: bool = True) -> VPolytope:
        """Canonical V-polytope: full-dimensional, extreme points only, rows sorted."""
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        k, n = V.shape
        if not np.all(np.isfinite(V)):
            raise GeometryError("vertices must be finite")
        V = V[unique_rows(V, np.zeros(k))]
        if V.shape[0] <= n or np.linalg.matrix_rank(V - V.mean(axis=0)) < n:
            raise DegenerateBodyError("vertices do not span a full-dimensional body")

        mirror = mirror_indices(V)
        if symmetric is None:
            symmetric = mirror is not None
        if symmetric:
            if mirror is None:
                raise GeometryError("vertex set is not closed under negation")
            V = V.copy()
            for i, j in enumerate(mirror):
                if i < j:
                    V[j] = -V[i]

        if reduce:
            if symmetric:
                # x_i is extreme iff the row x_i·y <= 1 is essential for the polar
                keep = essential_rows(V, np.ones(V.shape[0]), mirror=mirror, interior=np.zeros(n))
            elif n == 1:
                keep = np.array([np.argmin(V[:, 0]), np.argmax(V[:, 0])])
            else:
                keep = np.sort(ConvexHull(V).vertices)
            V = V[keep]

        return VPolytope(vertices=V[_lexsorted(V)], symmetric=bool(symmetric))

    def make_box(self, half_widths: Sequence[float]) -> HPolytope:
        """Axis-aligned box prod [-h_i, h_i]."""
        h = np.asarray(half_widths, dtype=float)
        if np.any(h <= 0):
            raise DegenerateBodyError("box half-widths must be positive")
        eye = np.diag(1.0 / h)
        return self.make_hpolytope(np.vstack([eye, -eye]), symmetric=True)

    def make_cube(self, n: int, half_width: float = 1.0) -> HPolytope:
        return self.make_box(np.full(n, half_width))

    def make_cross_polytope(self, n: int, radius: float = 1.0) -> HPolytope:
        """Diamond {sum |x_i| <= radius} as H-polytope."""
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
        return self.make_hpolytope(signs / radius, symmetric=True)

    def make_regular_polygon(self, k: int, circumradius: float = 1.0, phase: float = 0.0) -> VPolytope:
        """Regular k-gon (k even) centered at the origin."""
        if k < 4 or k % 2:
            raise GeometryError("a centrally symmetric regular polygon needs an even k >= 4")
        angles = phase + 2.0 * np.pi * np.arange(k) / k
        V = circumradius * np.column_stack([np.cos(angles), np.sin(angles)])
        return self.make_vpolytope(V, symmetric=True)

    def make_ball(self, n: int, radius: float = 1.0) -> BodyOracle:
        """Euclidean ball of the given radius as an oracle with closed-form fibers."""
        if radius <= 0:
            raise DegenerateBodyError("radius must be positive")

        def fiber(axis: int, point: np.ndarray) -> Optional[Tuple[float, float]]:
            rest = np.delete(np.asarray(point, dtype=float), axis)
            s = radius * radius - float(np.dot(rest, rest))
            if s < 0:
                return None
            half = float(np.sqrt(s))
            return -half, half

        return BodyOracle(
            dim=n,
            gauge=lambda x: float(np.linalg.norm(x)) / radius,
            box=np.tile([-radius, radius], (n, 1)),
            kind="ball",
            gauge_batch=lambda X: np.linalg.norm(X, axis=1) / radius,
            fiber=fiber,
            polar_gauge=lambda x: float(np.linalg.norm(x)) * radius,
            radius=float(radius),
            unconditional=True
        )

    def random_symmetric_polytope(self, n: int, m: int, seed: int) -> VPolytope:
        """2m vertices ±v_i, v_i uniform on spheres of log-uniform radius in [0.5, 2]."""
        if m < n:
            raise GeometryError(f"need at least {n} vertex pairs, got {m}")
        for sub_seed in range(100):
            rng = make_rng(seed, sub_seed)
            directions = rng.standard_normal((m, n))
            directions /= np.linalg.norm(directions, axis=1)[:, None]
            radii = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=m))
            v = directions * radii[:, None]
            try:
                return self.make_vpolytope(np.vstack([v, -v]), symmetric=True)
            except DegenerateBodyError:
                logger.debug(f"Degenerate hull for seed {seed}/{sub_seed}, resampling")
        raise InternalSolverError(f"could not generate a full-dimensional body for seed {seed}")

    # ------------------------------------------------------------------
    # Gauges and membership
    # ------------------------------------------------------------------

    def gauge_h(self, H: HPolytope, x) -> float:
        """max_i a_i·x clamped at 0."""
        x = np.asarray(x, dtype=float)
        _check_dim(H.dim, x.shape[-1])
        if not H.normalized:
            raise NormalizationError("gauge requires offsets normalized to 1")
        return max(0.0, float(np.max(H.normals @ x)))

    def gauge_v(self, V: VPolytope, x) -> float:
        """min sum(lambda) subject to sum lambda_i v_i = x, lambda >= 0."""
        x = np.asarray(x, dtype=float)
        _check_dim(V.dim, x.shape[0])
        res = linprog(
            np.ones(V.n_vertices),
            A_eq=V.vertices.T,
            b_eq=x,
            bounds=(0, None),
            method="highs",
            options=HIGHS_OPTIONS
        )
        if res.status != 0:
            raise InternalSolverError(f"gauge LP failed: {res.message}")
        return float(res.fun)

    def gauge(self, body: Body, x) -> float:
        """Minkowski functional of any body representation."""
        if isinstance(body, HPolytope):
            return self.gauge_h(body, x)
        if isinstance(body, VPolytope):
            return self.gauge_v(body, x)
        return float(body.gauge(np.asarray(x, dtype=float)))

    def gauge_many(self, body: Body, X: np.ndarray) -> np.ndarray:
        """Gauges of a batch of points."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if isinstance(body, HPolytope):
            if not body.normalized:
                raise NormalizationError("gauge requires offsets normalized to 1")
            return np.maximum(0.0, np.max(X @ body.normals.T, axis=1))
        if isinstance(body, BodyOracle) and body.gauge_batch is not None:
            return np.asarray(body.gauge_batch(X), dtype=float)
        return np.array([self.gauge(body, x) for x in X])

    def polar_gauge_many(self, body: Body, X: np.ndarray) -> np.ndarray:
        """Gauges of the polar body, i.e. support function values of `body`."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if isinstance(body, HPolytope):
            body = self.vertices_of(body)
        if isinstance(body, VPolytope):
            return np.maximum(0.0, np.max(X @ body.vertices.T, axis=1))
        if body.polar_gauge is None:
            raise GeometryError(f"{body.kind} body has no polar gauge")
        return np.array([body.polar_gauge(x) for x in X])

    def contains(self, body: Body, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
        """Boolean membership of each point."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        _check_dim(body.dim, X.shape[1])
        if isinstance(body, HPolytope):
            return np.all(X @ body.normals.T <= body.offsets + tol, axis=1)
        if isinstance(body, VPolytope):
            return self.contains(self.to_hpolytope(body), X, tol)
        return self.gauge_many(body, X) <= 1.0 + tol

    # ------------------------------------------------------------------
    # Representation changes and polarity
    # ------------------------------------------------------------------

    def vertices_of(self, H: HPolytope) -> VPolytope:
        """Vertex enumeration of a bounded H-polytope."""
        n = H.dim
        if n > settings.MAX_EXACT_DIM:
            raise GeometryError(f"vertex enumeration is capped at dimension {settings.MAX_EXACT_DIM}")
        A, c = H.normals, H.offsets
        if n == 1:
            a = A[:, 0]
            upper = np.min(c[a > 0] / a[a > 0])
            lower = np.max(c[a < 0] / a[a < 0])
            return VPolytope(vertices=np.array([[lower], [upper]]), symmetric=H.symmetric)
        if H.normalized:
            interior = np.zeros(n)
        else:
            _, interior = chebyshev_center(A, c)
            if interior is None:
                raise DegenerateBodyError("no interior point")
        try:
            hs = HalfspaceIntersection(np.hstack([A, -c[:, None]]), interior)
        except QhullError as exc:
            raise DegenerateBodyError(f"vertex enumeration failed: {exc}") from exc
        scale = max(1.0, float(np.max(np.abs(hs.intersections))))
        V = _merge_points(hs.intersections, 1e-9 * scale)
        if H.symmetric:
            mirror = mirror_indices(V, rtol=1e-9)
            if mirror is not None:
                for i, j in enumerate(mirror):
                    if i < j:
                        V[j] = -V[i]
        return VPolytope(vertices=V[_lexsorted(V)], symmetric=H.symmetric)

    def to_hpolytope(self, V: VPolytope) -> HPolytope:
        """Facet description of conv(V); requires the origin in the interior."""
        n = V.dim
        if n == 1:
            lo, hi = float(np.min(V.vertices)), float(np.max(V.vertices))
            if not (lo < 0 < hi):
                raise DegenerateBodyError("origin is not interior")
            return self.make_hpolytope([[1.0 / hi], [1.0 / lo]], symmetric=V.symmetric)
        hull = ConvexHull(V.vertices)
        normal, offset = hull.equations[:, :-1], -hull.equations[:, -1]
        if np.any(offset <= 1e-12):
            raise DegenerateBodyError("origin is not interior")
        return self.make_hpolytope(normal / offset[:, None], symmetric=V.symmetric)

    def polar_v_to_h(self, V: VPolytope) -> HPolytope:
        """V^o = {y : v_i·y <= 1 for every vertex}."""
        try:
            return self.make_hpolytope(V.vertices, symmetric=V.symmetric)
        except UnboundedBodyError as exc:
            raise DegenerateBodyError("polar of a degenerate V-polytope is unbounded") from exc

    def polar_h_to_v(self, H: HPolytope) -> VPolytope:
        """H^o = conv(normals)."""
        if not H.normalized:
            raise NormalizationError("polarity requires offsets normalized to 1")
        return self.make_vpolytope(H.normals, symmetric=H.symmetric)

    def polar_h(self, H: HPolytope) -> HPolytope:
        """Facet description of H^o."""
        if not H.normalized:
            raise NormalizationError("polarity requires offsets normalized to 1")
        return self.polar_v_to_h(self.vertices_of(H))

    def polar(self, body: Body) -> Body:
        """Polar body in the most useful representation for integration."""
        if isinstance(body, HPolytope):
            return self.polar_h(body)
        if isinstance(body, VPolytope):
            return self.polar_v_to_h(body)
        if body.kind == "ball":
            return self.make_ball(body.dim, 1.0 / body.radius)
        raise GeometryError(f"no polar available for {body.kind} bodies")

    def as_integrable(self, body: Body) -> Body:
        """H-polytope for V-input, otherwise the body unchanged."""
        if isinstance(body, VPolytope):
            return self.to_hpolytope(body)
        return body

    # ------------------------------------------------------------------
    # Derived bodies
    # ------------------------------------------------------------------

    def intersect(self, H1: HPolytope, H2: HPolytope) -> HPolytope:
        """Concatenated halfspaces, redundancy removed."""
        _check_dim(H1.dim, H2.dim)
        return self.make_hpolytope(
            np.vstack([H1.normals, H2.normals]),
            np.concatenate([H1.offsets, H2.offsets])
        )

    def intersect_oracle(self, parts: Sequence[Body]) -> BodyOracle:
        """Intersection of arbitrary bodies as an oracle (kind oracle-composite)."""
        parts = tuple(self.as_integrable(p) for p in parts)
        if not parts:
            raise GeometryError("composite body needs at least one part")
        n = parts[0].dim
        for part in parts:
            _check_dim(n, part.dim)
        boxes = np.array([self.enclosing_box(p) for p in parts])
        box = np.column_stack([boxes[:, :, 0].max(axis=0), boxes[:, :, 1].min(axis=0)])

        def fiber(axis: int, point: np.ndarray) -> Optional[Tuple[float, float]]:
            lo, hi = -np.inf, np.inf
            for part in parts:
                interval = self.fiber(part, axis, point)
                if interval is None:
                    return None
                lo, hi = max(lo, interval[0]), min(hi, interval[1])
            return (lo, hi) if lo <= hi else None

        return BodyOracle(
            dim=n,
            gauge=lambda x: max(self.gauge(p, x) for p in parts),
            box=box,
            kind="oracle-composite",
            gauge_batch=lambda X: np.max([self.gauge_many(p, X) for p in parts], axis=0),
            fiber=fiber,
            parts=parts,
            unconditional=all(self.is_unconditional(p) for p in parts)
        )

    def slice_h(self, H: HPolytope, axis: int, height: float) -> Optional[HPolytope]:
        """
        Section {x : x_axis = height} as an (n-1)-dimensional polytope.

        Returns None when the slice is empty or has empty interior. Offsets are
        normalized to 1 when the chart origin is interior to the slice, and
        kept general otherwise.
        """
        n = H.dim
        if n < 2:
            raise GeometryError("slicing needs dimension at least 2")
        self._check_axis(n, axis)
        A = np.delete(H.normals, axis, axis=1)
        c = H.offsets - H.normals[:, axis] * height
        flat = np.max(np.abs(A), axis=1) <= 1e-15
        if np.any(c[flat] < -BOUNDARY_TOL):
            return None
        A, c = A[~flat], c[~flat]
        if A.shape[0] == 0:
            return None
        radius, _ = chebyshev_center(A, c)
        if not radius > 1e-12:
            return None
        if np.all(c > 0):
            return self.make_hpolytope(A / c[:, None])
        return self.make_hpolytope(A, c)

    def linear_image(self, body: Body, M) -> Body:
        """Image M·B; normals map by M^{-T}, vertices by M."""
        M = np.asarray(M, dtype=float)
        _check_dim(body.dim, M.shape[0])
        if M.shape != (body.dim, body.dim):
            raise DimensionMismatchError("transformation must be square")
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise SingularTransformError(f"matrix is singular or ill-conditioned (cond={cond:.3g})")
        if isinstance(body, HPolytope):
            return self.make_hpolytope(body.normals @ np.linalg.inv(M), body.offsets, symmetric=body.symmetric)
        if isinstance(body, VPolytope):
            return self.make_vpolytope(body.vertices @ M.T, symmetric=body.symmetric)
        raise GeometryError(f"linear images of {body.kind} bodies are not supported")

    def scale(self, body: Body, t: float) -> Body:
        """Dilation t·B for t > 0."""
        if t <= 0:
            raise GeometryError("dilation factor must be positive")
        if isinstance(body, HPolytope):
            return HPolytope(normals=body.normals / t, offsets=body.offsets, symmetric=body.symmetric)
        if isinstance(body, VPolytope):
            return VPolytope(vertices=body.vertices * t, symmetric=body.symmetric)
        if body.kind == "ball":
            return self.make_ball(body.dim, body.radius * t)

        def fiber(axis: int, point: np.ndarray) -> Optional[Tuple[float, float]]:
            interval = self.fiber(body, axis, np.asarray(point) / t)
            return None if interval is None else (interval[0] * t, interval[1] * t)

        return BodyOracle(
            dim=body.dim,
            gauge=lambda x: body.gauge(np.asarray(x) / t),
            box=body.box * t,
            kind=body.kind,
            fiber=fiber,
            polar_gauge=None if body.polar_gauge is None else (lambda x: body.polar_gauge(np.asarray(x) * t)),
            unconditional=body.unconditional
        )

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def is_unconditional(self, body: Body, tol: float = DUPLICATE_RTOL) -> bool:
        """Closed under every coordinate sign flip (normals for H, vertices for V)."""
        if isinstance(body, BodyOracle):
            return body.unconditional
        rows = body.normals if isinstance(body, HPolytope) else body.vertices
        if isinstance(body, HPolytope) and not body.normalized:
            return False
        row_scale = np.max(np.abs(rows), axis=1)
        for signs in itertools.product((1.0, -1.0), repeat=body.dim):
            flipped = rows * np.asarray(signs)
            for row, scale in zip(flipped, row_scale):
                diffs = np.max(np.abs(rows - row), axis=1)
                if not np.any(diffs <= tol * np.maximum(row_scale, scale)):
                    return False
        return True

    def enclosing_box(self, body: Body) -> np.ndarray:
        """Per-axis [lo, hi] bounds: exact LPs for H, vertex ranges for V, stored box for oracles."""
        if isinstance(body, BodyOracle):
            return np.array(body.box)
        if isinstance(body, VPolytope):
            return np.column_stack([body.vertices.min(axis=0), body.vertices.max(axis=0)])
        n = body.dim
        box = np.empty((n, 2))
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            upper, _ = maximize_linear(e, body.normals, body.offsets)
            lower, _ = maximize_linear(-e, body.normals, body.offsets)
            if upper is None or lower is None:
                raise UnboundedBodyError(f"body is unbounded along axis {i}")
            box[i] = (-lower, upper)
        return box

    def fiber_bounds(self, H: HPolytope, axis: int, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Vectorized fibers of H along `axis` through full-length points.

        The coordinate at `axis` is ignored. Returns (lower, upper, empty).
        """
        X = np.atleast_2d(np.asarray(points, dtype=float))
        b = H.normals[:, axis]
        rest = H.normals.copy()
        rest[:, axis] = 0.0
        R = H.offsets[None, :] - X @ rest.T
        pos = b > ZERO_COEFF_TOL
        neg = b < -ZERO_COEFF_TOL
        flat = ~(pos | neg)
        k = X.shape[0]
        upper = np.min(R[:, pos] / b[pos], axis=1) if np.any(pos) else np.full(k, np.inf)
        lower = np.max(R[:, neg] / b[neg], axis=1) if np.any(neg) else np.full(k, -np.inf)
        empty = lower > upper
        if np.any(flat):
            empty |= np.any(R[:, flat] < -ZERO_COEFF_TOL, axis=1)
        return lower, upper, empty

    def fiber(self, body: Body, axis: int, point) -> Optional[Tuple[float, float]]:
        """Fiber {t : point + (t - point_axis) e_axis in body} as (lo, hi), or None."""
        point = np.asarray(point, dtype=float)
        _check_dim(body.dim, point.shape[0])
        if isinstance(body, VPolytope):
            body = self.to_hpolytope(body)
        if isinstance(body, HPolytope):
            lower, upper, empty = self.fiber_bounds(body, axis, point[None, :])
            return None if empty[0] else (float(lower[0]), float(upper[0]))
        if body.fiber is not None:
            return body.fiber(axis, point)
        return self._fiber_by_bisection(body, axis, point)

    def _fiber_by_bisection(self, body: BodyOracle, axis: int, point: np.ndarray) -> Optional[Tuple[float, float]]:
        """Fiber of a gauge-only oracle: innermost point by line search, ends by bisection."""
        lo_box, hi_box = body.box[axis]
        trial = point.copy()

        def along(t: float) -> float:
            trial[axis] = t
            return body.gauge(trial)

        best = minimize_scalar(along, bounds=(lo_box, hi_box), method="bounded", options={"xatol": 1e-12})
        if along(best.x) > 1.0:
            return None

        def boundary(inside: float, outside: float) -> float:
            if along(outside) <= 1.0:
                return outside
            for _ in range(settings.FIBER_BISECT_ITERS):
                mid = 0.5 * (inside + outside)
                if along(mid) <= 1.0:
                    inside = mid
                else:
                    outside = mid
            return inside

        return boundary(best.x, lo_box), boundary(best.x, hi_box)

    def same_body(self, H1: HPolytope, H2: HPolytope, tol: float = 1e-9) -> bool:
        """Equal canonical halfspace sets up to tol per coordinate."""
        if H1.dim != H2.dim or H1.n_facets != H2.n_facets:
            return False
        rows1 = np.hstack([H1.normals, H1.offsets[:, None]])
        rows2 = np.hstack([H2.normals, H2.offsets[:, None]])
        return all(np.any(np.max(np.abs(rows2 - row), axis=1) <= tol) for row in rows1)

    # ------------------------------------------------------------------

    def _check_axis(self, n: int, axis: int) -> None:
        if not 0 <= axis < n:
            raise GeometryError(f"axis {axis} out of range for dimension {n}")

    def _require_bounded(self, A: np.ndarray, c: np.ndarray) -> None:
        n = A.shape[1]
        for i in range(n):
            for sign in (1.0, -1.0):
                e = np.zeros(n)
                e[i] = sign
                optimum, _ = maximize_linear(e, A, c)
                if optimum is None:
                    raise UnboundedBodyError(f"halfspace system is unbounded along axis {i}")
                if optimum == float("-inf"):
                    raise DegenerateBodyError("halfspace system is infeasible")


body_service = BodyService()
