"""Service for volumes and measures of bodies: exact, quadrature and Monte Carlo."""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial import ConvexHull

from app.core.config import settings
from app.core.exceptions import GeometryError, MeasureError, UnsupportedMeasureError
from app.models.geometry import Body, BodyOracle, HPolytope, VPolytope
from app.models.measure import LogConcaveMeasure
from app.schemas.estimate_schema import EstimateMethod, VolumeEstimate
from app.services.body_service import body_service
from app.utils.quadrature import (
    adaptive_gauss_legendre,
    adaptive_gauss_legendre_batch,
    exact_integrand,
)
from app.utils.random_utils import block_generators

logger = logging.getLogger(__name__)

# Tolerance for the radial integral of general-dimension Gaussian balls
RADIAL_TOL = 1e-12


def kappa(n: int) -> float:
    """Volume of the unit ball in R^n by the recursion kappa_n = kappa_{n-2} 2 pi / n."""
    if n < 0:
        raise ValueError("dimension must be nonnegative")
    values = [1.0, 2.0]
    for k in range(2, n + 1):
        values.append(values[k - 2] * 2.0 * math.pi / k)
    return values[n]


@dataclass
class _QuadratureContext:
    """State shared by the nested levels of one Fubini integration."""
    mu: LogConcaveMeasure
    body: Body
    outer: List[int]
    inner: int
    tol: float
    clip: Optional[np.ndarray]
    vertices: Optional[np.ndarray] = None
    converged: bool = True
    panels: int = 0
    notes: List[str] = field(default_factory=list)


class IntegrationService:
    """Service for Lebesgue volumes and log-concave measures of bodies."""

    # ------------------------------------------------------------------
    # Exact volume
    # ------------------------------------------------------------------

    def volume_exact(self, body: Body) -> VolumeEstimate:
        """Lebesgue volume by a fan of simplices from an interior point over the triangulated facets."""
        if isinstance(body, BodyOracle):
            if body.kind == "ball":
                return VolumeEstimate.exact(kappa(body.dim) * body.radius ** body.dim)
            raise GeometryError(f"no exact volume for {body.kind} bodies")
        V = body_service.vertices_of(body).vertices if isinstance(body, HPolytope) else body.vertices
        n = V.shape[1]
        if n == 1:
            return VolumeEstimate.exact(float(V.max() - V.min()))
        origin_inside = body.symmetric or (isinstance(body, HPolytope) and body.normalized)
        apex = np.zeros(n) if origin_inside else V.mean(axis=0)
        hull = ConvexHull(V)
        simplices = V[hull.simplices] - apex
        volume = np.sum(np.abs(np.linalg.det(simplices))) / math.factorial(n)
        return VolumeEstimate.exact(float(volume))

    # ------------------------------------------------------------------
    # Quadrature
    # ------------------------------------------------------------------

    def measure_quadrature(self, mu: LogConcaveMeasure, body: Body, tol: Optional[float] = None) -> VolumeEstimate:
        """
        mu(body) by nested adaptive Gauss-Legendre quadrature.

        Outer axes are integrated on bisected panels whose breakpoints are the
        vertex projections of the current section; the innermost axis (largest
        extent) is integrated over exact fiber intervals, so the indicator of
        the body never enters a panel.
        """
        tol = tol or settings.QUAD_TOL
        n = mu.dim
        if body.dim != n:
            raise GeometryError(f"body dimension {body.dim} does not match measure dimension {n}")
        if n > settings.MAX_QUADRATURE_DIM:
            raise GeometryError(f"quadrature is capped at dimension {settings.MAX_QUADRATURE_DIM}")

        domain = self._restrict_to_support(mu, body_service.as_integrable(body))
        box = body_service.enclosing_box(domain)
        clip = None if mu.support_box is None else np.array(mu.support_box)
        if clip is not None:
            box = np.column_stack([np.maximum(box[:, 0], clip[:, 0]), np.minimum(box[:, 1], clip[:, 1])])
            if np.any(box[:, 0] >= box[:, 1]):
                return VolumeEstimate(value=0.0, method=EstimateMethod.QUADRATURE)

        inner = int(np.argmax(box[:, 1] - box[:, 0]))
        ctx = _QuadratureContext(
            mu=mu,
            body=domain,
            outer=[i for i in range(n) if i != inner],
            inner=inner,
            tol=tol,
            clip=clip
        )
        if isinstance(domain, HPolytope):
            ctx.vertices = body_service.vertices_of(domain).vertices

        if n == 1:
            values, errs = self._fiber_integrals(ctx, np.zeros((1, 1)))
            value, err = float(values[0]), float(errs[0])
        else:
            value, err = self._integrate_level(ctx, 0, np.zeros(n))

        if not ctx.converged:
            logger.warning(
                f"Quadrature of {mu.measure_id} over {body!r} did not reach tol {tol:g}; "
                f"best estimate {value:.12g} ± {err:.3g}"
            )
        return VolumeEstimate(
            value=max(value, 0.0),
            method=EstimateMethod.QUADRATURE,
            err=err,
            converged=ctx.converged
        )

    def _restrict_to_support(self, mu: LogConcaveMeasure, body: Body) -> Body:
        if mu.support is None:
            return body
        if isinstance(body, HPolytope):
            return body_service.intersect(body, mu.support)
        return body_service.intersect_oracle([body, mu.support])

    def _integrate_level(self, ctx: _QuadratureContext, level: int, base: np.ndarray) -> Tuple[float, float]:
        axis = ctx.outer[level]
        bounds = self._axis_range(ctx, level, base)
        if bounds is None:
            return 0.0, 0.0
        lo, hi, cuts = bounds
        last = level == len(ctx.outer) - 1

        def integrand(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            points = np.repeat(base[None, :], x.shape[0], axis=0)
            points[:, axis] = x
            if last:
                return self._fiber_integrals(ctx, points)
            nested = [self._integrate_level(ctx, level + 1, p) for p in points]
            return np.array([v for v, _ in nested]), np.array([e for _, e in nested])

        result = adaptive_gauss_legendre(
            integrand, lo, hi, ctx.tol,
            breakpoints=cuts,
            max_depth=settings.QUAD_MAX_DEPTH,
            max_panels=settings.QUAD_MAX_PANELS
        )
        ctx.converged = ctx.converged and result.converged
        ctx.panels += result.panels
        return result.value, result.err

    def _axis_range(self, ctx: _QuadratureContext, level: int, base: np.ndarray):
        """Projection of the current section onto the next outer axis, with kink locations."""
        axis = ctx.outer[level]
        body = ctx.body
        if isinstance(body, HPolytope):
            if level == 0:
                verts = ctx.vertices
            else:
                verts = self._section_vertices(body, ctx.outer[:level], base)
            if verts.shape[0] == 0:
                return None
            coords = verts[:, axis]
            lo, hi = float(coords.min()), float(coords.max())
            cuts = [*np.unique(coords), 0.0]
        else:
            if body.unconditional:
                anchor = base.copy()
                anchor[ctx.outer[level:]] = 0.0
                anchor[ctx.inner] = 0.0
                interval = body_service.fiber(body, axis, anchor)
                if interval is None:
                    return None
                lo, hi = interval
            else:
                lo, hi = body.box[axis]
            cuts = [0.0]
        if ctx.clip is not None:
            lo, hi = max(lo, ctx.clip[axis, 0]), min(hi, ctx.clip[axis, 1])
        if not hi > lo:
            return None
        return float(lo), float(hi), cuts

    def _section_vertices(self, H: HPolytope, fixed_axes: List[int], base: np.ndarray) -> np.ndarray:
        """Vertices of H intersected with {x_k = base_k for k in fixed_axes}, by enumerating bases."""
        n = H.dim
        free = [i for i in range(n) if i not in fixed_axes]
        A_free = H.normals[:, free]
        c_free = H.offsets - H.normals[:, fixed_axes] @ base[fixed_axes]
        d = len(free)
        combos = np.array(list(itertools.combinations(range(H.n_facets), d)), dtype=int)
        if combos.size == 0:
            return np.empty((0, n))
        mats = A_free[combos]
        rhs = c_free[combos]
        regular = np.abs(np.linalg.det(mats)) > 1e-12
        if not np.any(regular):
            return np.empty((0, n))
        sol = np.linalg.solve(mats[regular], rhs[regular][..., None])[..., 0]
        feasible = np.all(sol @ A_free.T <= c_free + 1e-9 * np.maximum(1.0, np.abs(c_free)), axis=1)
        verts = np.repeat(base[None, :], int(np.sum(feasible)), axis=0)
        verts[:, free] = sol[feasible]
        return verts

    def _fiber_integrals(self, ctx: _QuadratureContext, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Integrals of the density over the inner fibers through each point."""
        body, inner = ctx.body, ctx.inner
        if isinstance(body, HPolytope):
            lower, upper, empty = body_service.fiber_bounds(body, inner, points)
        else:
            intervals = [body_service.fiber(body, inner, p) for p in points]
            empty = np.array([iv is None for iv in intervals])
            lower = np.array([0.0 if iv is None else iv[0] for iv in intervals])
            upper = np.array([0.0 if iv is None else iv[1] for iv in intervals])
        if ctx.clip is not None:
            lower = np.maximum(lower, ctx.clip[inner, 0])
            upper = np.minimum(upper, ctx.clip[inner, 1])
        upper = np.where(empty | (upper < lower), lower, upper)

        n = points.shape[1]
        log_density = ctx.mu.log_density

        def density(owners: np.ndarray, nodes: np.ndarray) -> np.ndarray:
            k, q = nodes.shape
            grid = np.repeat(points[owners][:, None, :], q, axis=1)
            grid[:, :, inner] = nodes
            return np.exp(log_density(grid.reshape(-1, n))).reshape(k, q)

        values, errs, converged = adaptive_gauss_legendre_batch(
            density, lower, upper, ctx.tol,
            breakpoints=(0.0,),
            max_depth=settings.QUAD_MAX_DEPTH
        )
        ctx.converged = ctx.converged and converged
        return values, errs

    # ------------------------------------------------------------------
    # Monte Carlo
    # ------------------------------------------------------------------

    def measure_mc(
        self,
        mu: LogConcaveMeasure,
        body: Body,
        samples: Optional[int] = None,
        seed: int = 0,
        antithetic: Optional[bool] = None
    ) -> VolumeEstimate:
        """
        mu(body) = total_mass * P(X in body) with X drawn from the normalized measure.

        Samples are drawn in fixed-size blocks, one seed stream per block, so the
        estimate depends only on (seed, samples). For unconditional measures each
        draw is paired with a random sign flip of itself and the error bar comes
        from the spread of the pair means.
        """
        samples = samples or settings.MC_SAMPLES
        if samples < 1000:
            raise MeasureError("Monte Carlo needs at least 1000 samples")
        if mu.sampler is None:
            raise MeasureError(f"measure {mu.measure_id} has no sampler")
        if mu.total_mass is None:
            raise MeasureError(f"measure {mu.measure_id} has no finite total mass")
        if body.dim != mu.dim:
            raise GeometryError(f"body dimension {body.dim} does not match measure dimension {mu.dim}")
        if antithetic is None:
            antithetic = settings.MC_ANTITHETIC
        antithetic = antithetic and mu.flags.unconditional
        domain = body_service.as_integrable(body)

        block = settings.MC_BLOCK_SIZE
        n_blocks = math.ceil(samples / block)
        total = 0.0
        total_sq = 0.0
        units = 0
        drawn = 0
        for index, rng in enumerate(block_generators(seed, n_blocks)):
            size = min(block, samples - index * block)
            if antithetic:
                pairs = (size + 1) // 2
                X = mu.sampler(rng, pairs)
                signs = rng.choice([-1.0, 1.0], size=X.shape)
                hits = 0.5 * (
                    body_service.contains(domain, X).astype(float)
                    + body_service.contains(domain, X * signs).astype(float)
                )
                drawn += 2 * pairs
            else:
                hits = body_service.contains(domain, mu.sampler(rng, size)).astype(float)
                drawn += size
            total += float(np.sum(hits))
            total_sq += float(np.sum(hits * hits))
            units += hits.shape[0]

        p_hat = total / units
        variance = max(total_sq / units - p_hat * p_hat, 0.0)
        if antithetic:
            err = math.sqrt(variance / units)
        else:
            err = math.sqrt(p_hat * (1.0 - p_hat) / units)
        return VolumeEstimate(
            value=mu.total_mass * p_hat,
            method=EstimateMethod.MONTE_CARLO,
            err=mu.total_mass * err,
            samples=drawn,
            seed=seed
        )

    # ------------------------------------------------------------------
    # Balls
    # ------------------------------------------------------------------

    def ball_measure_radial(self, mu: LogConcaveMeasure, radius: float) -> VolumeEstimate:
        """Closed-form mu(rB) for isotropic Gaussians and box-Lebesgue measures."""
        if radius <= 0:
            raise GeometryError("radius must be positive")
        profile = mu.radial
        n = mu.dim
        if profile is None:
            raise UnsupportedMeasureError(f"measure {mu.measure_id} has no radial closed form")
        if profile.kind == "lebesgue":
            if radius > profile.scale:
                raise UnsupportedMeasureError(f"box does not contain the ball of radius {radius:g}")
            return VolumeEstimate.exact(kappa(n) * radius ** n)
        if profile.kind != "gaussian":
            raise UnsupportedMeasureError(f"unknown radial profile {profile.kind}")

        s = radius / profile.scale
        if n == 2:
            return VolumeEstimate.exact(-math.expm1(-0.5 * s * s))
        surface = n * kappa(n)
        log_scale = -0.5 * n * math.log(2.0 * math.pi)

        def radial(rho: np.ndarray) -> np.ndarray:
            return surface * np.exp(log_scale - 0.5 * rho * rho) * rho ** (n - 1)

        result = adaptive_gauss_legendre(
            exact_integrand(radial), 0.0, s, RADIAL_TOL,
            max_depth=settings.QUAD_MAX_DEPTH,
            max_panels=settings.QUAD_MAX_PANELS
        )
        return VolumeEstimate(
            value=min(max(result.value, 0.0), 1.0),
            method=EstimateMethod.QUADRATURE,
            err=result.err,
            converged=result.converged
        )

    def ball_measure(self, mu: LogConcaveMeasure, radius: float = 1.0, tol: Optional[float] = None) -> VolumeEstimate:
        """mu(rB): radial closed form when available, quadrature over the ball oracle otherwise."""
        try:
            return self.ball_measure_radial(mu, radius)
        except UnsupportedMeasureError:
            return self.measure_quadrature(mu, body_service.make_ball(mu.dim, radius), tol)

    def measure(
        self,
        mu: Optional[LogConcaveMeasure],
        body: Body,
        tol: Optional[float] = None,
        engine: EstimateMethod = EstimateMethod.QUADRATURE,
        samples: Optional[int] = None,
        seed: int = 0
    ) -> VolumeEstimate:
        """mu(body), or the exact Lebesgue volume when mu is None."""
        if mu is None:
            return self.volume_exact(body)
        if engine == EstimateMethod.MONTE_CARLO:
            return self.measure_mc(mu, body, samples, seed)
        if isinstance(body, BodyOracle) and body.kind == "ball":
            return self.ball_measure(mu, body.radius, tol)
        return self.measure_quadrature(mu, body, tol)


integration_service = IntegrationService()
