"""Service for volume products and numerical checks of Santaló-type inequalities."""
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import ConfigError, GeometryError, MeasureError
from app.models.geometry import Body, BodyOracle, HPolytope
from app.models.measure import LogConcaveMeasure
from app.schemas.estimate_schema import EstimateMethod, VerificationReport, VolumeEstimate
from app.schemas.experiment_schema import CheckName, CheckOptions, MeasureSpec, Tolerances
from app.services.body_service import body_service
from app.services.geometric_mean_service import geometric_mean_service
from app.services.integration_service import integration_service, kappa
from app.services.measure_service import measure_service
from app.services.storage_service import storage_service
from app.services.symmetrization_service import symmetrization_service
from app.utils.quadrature import adaptive_gauss_legendre, exact_integrand
from app.utils.random_utils import derive_seed, make_rng

logger = logging.getLogger(__name__)

COROLLARY_TOL = 1e-9
GRID_SPACING_TOL = 1e-9
MAX_REJECTION_ROUNDS = 200


def _measure_id(mu: Optional[LogConcaveMeasure]) -> str:
    return "lebesgue" if mu is None else mu.measure_id


def _require_unconditional_measure(mu: LogConcaveMeasure) -> None:
    if not mu.flags.unconditional:
        raise MeasureError(f"measure {mu.measure_id} is not unconditional")


def _check_grid(t_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(t_grid, dtype=float)
    if grid.shape[0] < 3:
        raise ConfigError("grid needs at least 3 points")
    steps = np.diff(grid)
    if np.any(steps <= 0) or np.max(np.abs(steps - steps[0])) > GRID_SPACING_TOL * max(1.0, abs(steps[0])):
        raise ConfigError("grid must be increasing and equally spaced")
    return grid


class VerificationService:
    """Service for volume products and inequality reports."""

    # ------------------------------------------------------------------
    # Volume products
    # ------------------------------------------------------------------

    def volume_product(
        self,
        K: Body,
        mu: Optional[LogConcaveMeasure] = None,
        L: Optional[Body] = None,
        tol: Optional[float] = None,
        engine: EstimateMethod = EstimateMethod.QUADRATURE,
        samples: Optional[int] = None,
        seed: int = 0
    ) -> VolumeEstimate:
        """
        P(K) = |K| |K^o|, P_mu(K) = mu(K) mu(K^o), or P_L(K) = |K ∩ L| |K^o ∩ L|.

        Lebesgue products are exact; the error of a product adds the relative
        errors of its factors. Monte Carlo factors use independent seed streams.
        """
        K = body_service.as_integrable(K)
        polar = body_service.polar(K)
        if L is not None:
            return self._section_volume(K, L, tol).times(self._section_volume(polar, L, tol))
        return integration_service.measure(mu, K, tol, engine, samples, derive_seed(seed, 0)).times(
            integration_service.measure(mu, polar, tol, engine, samples, derive_seed(seed, 1))
        )

    def _section_volume(self, body: Body, L: Body, tol: Optional[float]) -> VolumeEstimate:
        L = body_service.as_integrable(L)
        if isinstance(body, HPolytope) and isinstance(L, HPolytope):
            return integration_service.volume_exact(body_service.intersect(body, L))
        box = body_service.enclosing_box(L)
        lebesgue = measure_service.make_lebesgue(np.max(np.abs(box), axis=1))
        return integration_service.measure_quadrature(lebesgue, body_service.intersect_oracle([body, L]), tol)

    # ------------------------------------------------------------------
    # Inequalities
    # ------------------------------------------------------------------

    def verify_santalo_lebesgue(self, K: Body, body_id: str = "") -> VerificationReport:
        """P(K) <= P(B) = kappa_n^2."""
        n = K.dim
        return VerificationReport.compare(
            "santalo",
            self.volume_product(K),
            VolumeEstimate.exact(kappa(n) ** 2),
            n,
            body_id=body_id,
            measure_id="lebesgue"
        )

    def verify_claim1(
        self,
        mu: LogConcaveMeasure,
        K: Body,
        axis: int,
        tol: Optional[float] = None,
        body_id: str = ""
    ) -> List[VerificationReport]:
        """mu(S_u K) >= mu(K), mu((S_u K)^o) >= mu(K^o), and their product."""
        _require_unconditional_measure(mu)
        K = body_service.as_integrable(K)
        S = symmetrization_service.steiner(K, axis)
        body_k = integration_service.measure(mu, K, tol)
        body_s = integration_service.measure(mu, S, tol)
        polar_k = integration_service.measure(mu, body_service.polar_h(K), tol)
        polar_s = integration_service.measure(mu, body_service.polar_h(S), tol)
        suffix = f"_axis{axis + 1}"
        common = dict(n=K.dim, body_id=body_id, measure_id=mu.measure_id, context={"axis": axis + 1})
        return [
            VerificationReport.compare("claim1_body" + suffix, body_k, body_s, **common),
            VerificationReport.compare("claim1_polar" + suffix, polar_k, polar_s, **common),
            VerificationReport.compare(
                "claim1_product" + suffix, body_k.times(polar_k), body_s.times(polar_s), **common
            ),
        ]

    def verify_chain(
        self,
        mu: LogConcaveMeasure,
        K: Body,
        tol: Optional[float] = None,
        body_id: str = ""
    ) -> List[VerificationReport]:
        """P_mu nondecreasing along the unconditionalization pipeline, one report per step."""
        _require_unconditional_measure(mu)
        K = body_service.as_integrable(K)
        steps = symmetrization_service.unconditionalize_steps(K)
        reports = []
        previous = self.volume_product(K, mu, tol=tol)
        for index, (axis, body) in enumerate(steps, start=1):
            current = self.volume_product(body, mu, tol=tol)
            context = {"axis": axis + 1, "facets": body.n_facets}
            if index == len(steps):
                context["unconditional"] = body_service.is_unconditional(body)
            reports.append(VerificationReport.compare(
                f"chain_step{index}", previous, current, K.dim,
                body_id=body_id, measure_id=mu.measure_id, context=context
            ))
            previous = current
        return reports

    def verify_main(
        self,
        mu: LogConcaveMeasure,
        K: Body,
        tol: Optional[float] = None,
        body_id: str = ""
    ) -> VerificationReport:
        """P_mu(K) <= mu(B)^2 for the unit ball B."""
        _require_unconditional_measure(mu)
        lhs = self.volume_product(K, mu, tol=tol)
        rhs = integration_service.ball_measure(mu, 1.0, tol).squared()
        return VerificationReport.compare(
            "main", lhs, rhs, K.dim, body_id=body_id, measure_id=mu.measure_id
        )

    def verify_corollary_inclusion(
        self,
        K: Body,
        samples: int = 10_000,
        seed: int = 0,
        body_id: str = ""
    ) -> VerificationReport:
        """max over boundary pairs x of K, y of K^o of sum |x_i y_i| <= 1."""
        K = body_service.as_integrable(K)
        if not body_service.is_unconditional(K):
            raise GeometryError("the inclusion check requires an unconditional body")
        n = K.dim
        rng = make_rng(seed)
        U = rng.standard_normal((samples, n))
        W = rng.standard_normal((samples, n))
        X = U / body_service.gauge_many(K, U)[:, None]
        Y = W / body_service.polar_gauge_many(K, W)[:, None]
        sums = np.sum(np.abs(X * Y), axis=1)
        worst = int(np.argmax(sums))
        return VerificationReport.compare(
            "corollary",
            VolumeEstimate(value=float(sums[worst]), method=EstimateMethod.MONTE_CARLO, samples=samples, seed=seed),
            VolumeEstimate.exact(1.0),
            n,
            body_id=body_id,
            measure_id="none",
            seed=seed,
            context={"x": X[worst].tolist(), "y": Y[worst].tolist()}
        )

    def verify_meyer_pajor(
        self,
        K: Body,
        axis: int,
        z: float,
        samples: int = 10_000,
        seed: int = 0,
        body_id: str = "",
        label: Optional[str] = None
    ) -> VerificationReport:
        """Midpoints of K^o(z) and K^o(-z) lie in the slice (S_u K)^o(z)."""
        K = body_service.as_integrable(K)
        n = K.dim
        polar_k = body_service.polar_h(K)
        polar_s = body_service.polar_h(symmetrization_service.steiner(K, axis))
        inequality_id = label or f"meyer_pajor_axis{axis + 1}"
        upper = body_service.slice_h(polar_k, axis, z)
        lower = body_service.slice_h(polar_k, axis, -z)
        context: Dict[str, Any] = {"axis": axis + 1, "z": z}
        sampled = VolumeEstimate(value=0.0, method=EstimateMethod.MONTE_CARLO, err=settings.GAUGE_TOL / 3.0)
        if upper is None or lower is None:
            context["vacuous"] = True
            return VerificationReport.compare(
                inequality_id, sampled, VolumeEstimate.exact(1.0), n,
                body_id=body_id, measure_id="none", seed=seed, context=context
            )

        rng = make_rng(seed)
        p = self._sample_uniform(upper, samples, rng)
        q = self._sample_uniform(lower, samples, rng)
        count = min(p.shape[0], q.shape[0])
        midpoints = np.insert(0.5 * (p[:count] + q[:count]), axis, z, axis=1)
        gauges = body_service.gauge_many(polar_s, midpoints)
        context["samples"] = count
        lhs = VolumeEstimate(
            value=float(np.max(gauges)) if count else 0.0,
            method=EstimateMethod.MONTE_CARLO,
            err=settings.GAUGE_TOL / 3.0,
            samples=count,
            seed=seed
        )
        return VerificationReport.compare(
            inequality_id, lhs, VolumeEstimate.exact(1.0), n,
            body_id=body_id, measure_id="none", seed=seed, context=context
        )

    def verify_prop8(
        self,
        mu: LogConcaveMeasure,
        K: Body,
        L: Body,
        tol: Optional[float] = None,
        body_id: str = ""
    ) -> VerificationReport:
        """
        mu(K) mu(L) <= mu(K^{1/2} L^{1/2})^2.

        Fibers of the geometric-mean body come from a maximization that can only
        undershoot, so the right-hand side is a lower estimate.
        """
        _require_unconditional_measure(mu)
        if K.dim > 3:
            raise GeometryError("geometric-mean checks are limited to dimension 3")
        lhs = integration_service.measure(mu, K, tol).times(integration_service.measure(mu, L, tol))
        M = geometric_mean_service.geometric_mean_body(K, L)
        rhs = integration_service.measure_quadrature(mu, M, tol).squared()
        return VerificationReport.compare(
            "prop8", lhs, rhs, K.dim,
            body_id=body_id, measure_id=mu.measure_id,
            context={"rhs": "lower estimate"}
        )

    def verify_ball_logconcavity(
        self,
        mu: LogConcaveMeasure,
        t_grid: Sequence[float],
        tol: Optional[float] = None
    ) -> VerificationReport:
        """m(t) = mu(e^t B): m(t_{i+1})^2 >= m(t_i) m(t_{i+2}) on every triple; worst triple reported."""
        if not mu.flags.even:
            raise MeasureError(f"measure {mu.measure_id} is not even")
        grid = _check_grid(t_grid)
        values = [integration_service.ball_measure(mu, float(np.exp(t)), tol) for t in grid]
        report = self._worst_triple("ball_logconcavity", values, grid, mu.dim, "ball", mu.measure_id)
        report.context["m"] = [v.value for v in values]
        return report

    # ------------------------------------------------------------------
    # Supplemental checks
    # ------------------------------------------------------------------

    def verify_fiberwise(
        self,
        mu: LogConcaveMeasure,
        K: Body,
        axis: int,
        samples: int = 64,
        seed: int = 0,
        slices: int = 5,
        tol: Optional[float] = None,
        body_id: str = ""
    ) -> List[VerificationReport]:
        """
        The two one-dimensional inequalities behind the symmetral comparison.

        Lines: mu_y((S_u K)_y) >= mu_y(K_y) on sampled base points y. Slices:
        mu^z((S_u K)^o(z)) >= mu^z(K^o(z)) on sampled heights z. The sample with
        the smallest relative margin is reported for each.
        """
        _require_unconditional_measure(mu)
        tol = tol or settings.QUAD_TOL
        K = body_service.as_integrable(K)
        n = K.dim
        if n < 2:
            raise GeometryError("fiberwise checks need dimension at least 2")
        rng = make_rng(seed)
        suffix = f"_axis{axis + 1}"
        common = dict(body_id=body_id, measure_id=mu.measure_id, seed=seed)

        box = np.delete(body_service.enclosing_box(K), axis, axis=0)
        line_pairs = []
        for y in rng.uniform(box[:, 0], box[:, 1], (samples, n - 1)):
            interval = symmetrization_service.fiber_interval(K, axis, y)
            if interval is None:
                continue
            lo, hi = interval
            half = 0.5 * (hi - lo)
            fiber = measure_service.restrict_fiber(mu, axis, y, check=False)
            line_pairs.append((
                self._line_measure(fiber.density, lo, hi, tol),
                self._line_measure(fiber.density, -half, half, tol),
                y
            ))

        polar_k = body_service.polar_h(K)
        polar_s = body_service.polar_h(symmetrization_service.steiner(K, axis))
        extent = body_service.enclosing_box(polar_k)[axis, 1]
        slice_pairs = []
        for z in rng.uniform(-0.99 * extent, 0.99 * extent, slices):
            section_k = body_service.slice_h(polar_k, axis, z)
            if section_k is None:
                continue
            section_s = body_service.slice_h(polar_s, axis, z)
            slice_mu = measure_service.restrict_slice(mu, axis, z)
            before = integration_service.measure_quadrature(slice_mu, section_k, tol)
            after = (
                VolumeEstimate(value=0.0, method=EstimateMethod.QUADRATURE)
                if section_s is None else integration_service.measure_quadrature(slice_mu, section_s, tol)
            )
            slice_pairs.append((before, after, float(z)))

        return [
            self._worst_pair("fiberwise_line" + suffix, line_pairs, n, "y", common),
            self._worst_pair("fiberwise_slice" + suffix, slice_pairs, n, "z", common),
        ]

    def verify_b_property(
        self,
        mu: LogConcaveMeasure,
        K: Body,
        t_grid: Sequence[float],
        tol: Optional[float] = None,
        body_id: str = ""
    ) -> VerificationReport:
        """Midpoint log-concavity of t -> mu(e^t K) for unconditional mu and K."""
        _require_unconditional_measure(mu)
        K = body_service.as_integrable(K)
        if not body_service.is_unconditional(K):
            raise GeometryError("the dilation check requires an unconditional body")
        grid = _check_grid(t_grid)
        values = [integration_service.measure(mu, body_service.scale(K, float(np.exp(t))), tol) for t in grid]
        return self._worst_triple("b_property", values, grid, K.dim, body_id, mu.measure_id)

    def explore_even(
        self,
        mu: LogConcaveMeasure,
        K: Body,
        L: Optional[Body] = None,
        tol: Optional[float] = None,
        body_id: str = ""
    ) -> List[VerificationReport]:
        """Exploratory P_mu(K) vs P_mu(B) for even mu, and P_L(K) vs P_L(B) when L is given."""
        if not mu.flags.even:
            raise MeasureError(f"measure {mu.measure_id} is not even")
        n = K.dim
        reports = [VerificationReport.compare(
            "explore_main",
            self.volume_product(K, mu, tol=tol),
            integration_service.ball_measure(mu, 1.0, tol).squared(),
            n, body_id=body_id, measure_id=mu.measure_id
        )]
        if L is not None:
            ball = body_service.make_ball(n)
            reports.append(VerificationReport.compare(
                "explore_section",
                self.volume_product(K, L=L, tol=tol),
                self.volume_product(ball, L=L, tol=tol),
                n, body_id=body_id, measure_id="lebesgue"
            ))
        return reports

    # ------------------------------------------------------------------
    # Batch items
    # ------------------------------------------------------------------

    def run_item(self, payload: Dict[str, Any]) -> List[Dict[str, Any]]:
        """
        Run one check on one (body, measure) item described by a JSON payload.

        Keys: check, dim, seed, body (BodyDocument), body2 (for prop8),
        body_id, measure (MeasureSpec), options, tolerances. Returns reports
        as JSON-ready dicts.
        """
        check = CheckName(payload["check"])
        n = int(payload["dim"])
        seed = int(payload.get("seed", 0))
        options = CheckOptions(**payload.get("options", {}))
        tol = Tolerances(**payload.get("tolerances", {})).quad_tol
        body_id = payload.get("body_id", "")
        K = storage_service.body_from_document(payload["body"]) if payload.get("body") else None
        mu = None
        if payload.get("measure"):
            mu = measure_service.from_spec(MeasureSpec(**payload["measure"]), n)
        logger.info(f"Running {check.value} on body={body_id or '-'} measure={_measure_id(mu)} seed={seed}")

        reports: List[VerificationReport] = []
        if check == CheckName.SANTALO:
            reports.append(self.verify_santalo_lebesgue(K, body_id))
        elif check == CheckName.CLAIM1:
            for axis in range(n):
                reports.extend(self.verify_claim1(mu, K, axis, tol, body_id))
        elif check == CheckName.CHAIN:
            reports.extend(self.verify_chain(mu, K, tol, body_id))
        elif check == CheckName.MAIN:
            reports.append(self.verify_main(mu, K, tol, body_id))
        elif check == CheckName.COROLLARY:
            reports.append(self.verify_corollary_inclusion(self._unconditional(K), options.samples, seed, body_id))
        elif check == CheckName.MEYER_PAJOR:
            H = body_service.as_integrable(K)
            extents = body_service.enclosing_box(body_service.polar_h(H))[:, 1]
            for axis in range(n):
                for index, fraction in enumerate(options.z_fractions):
                    reports.append(self.verify_meyer_pajor(
                        H, axis, fraction * extents[axis], options.samples, seed, body_id,
                        label=f"meyer_pajor_axis{axis + 1}_z{index}"
                    ))
        elif check == CheckName.PROP8:
            L = storage_service.body_from_document(payload["body2"]) if payload.get("body2") else K
            reports.append(self.verify_prop8(mu, self._unconditional(K), self._unconditional(L), tol, body_id))
        elif check == CheckName.BALL_LOGCONCAVITY:
            reports.append(self.verify_ball_logconcavity(mu, options.t_grid, tol))
        elif check == CheckName.FIBERWISE:
            for axis in range(n):
                reports.extend(self.verify_fiberwise(mu, K, axis, options.fiber_samples, seed, tol=tol, body_id=body_id))
        elif check == CheckName.B_PROPERTY:
            reports.append(self.verify_b_property(mu, self._unconditional(K), options.t_grid, tol, body_id))

        for report in reports:
            if report.seed is None:
                report.seed = seed
        return [report.model_dump(mode="json") for report in reports]

    # ------------------------------------------------------------------

    def _unconditional(self, K: Body) -> Body:
        if isinstance(K, BodyOracle) or body_service.is_unconditional(K):
            return K
        return symmetrization_service.unconditionalize(body_service.as_integrable(K))

    def _sample_uniform(self, H: HPolytope, count: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform points of H by rejection from its enclosing box."""
        box = body_service.enclosing_box(H)
        accepted = []
        total = 0
        for _ in range(MAX_REJECTION_ROUNDS):
            batch = rng.uniform(box[:, 0], box[:, 1], (count, H.dim))
            batch = batch[body_service.contains(H, batch, tol=0.0)]
            accepted.append(batch)
            total += batch.shape[0]
            if total >= count:
                break
        if total < count:
            logger.warning(f"Rejection sampling produced {total} of {count} points")
        return np.vstack(accepted)[:count]

    def _line_measure(self, density, lo: float, hi: float, tol: float) -> VolumeEstimate:
        result = adaptive_gauss_legendre(exact_integrand(density), lo, hi, tol, breakpoints=(0.0,))
        return VolumeEstimate(
            value=max(result.value, 0.0),
            method=EstimateMethod.QUADRATURE,
            err=result.err,
            converged=result.converged
        )

    def _worst_pair(self, inequality_id: str, pairs, n: int, key: str, common: Dict[str, Any]) -> VerificationReport:
        """Report for the (lhs, rhs, where) pair with the smallest relative margin."""
        if not pairs:
            zero = VolumeEstimate.exact(0.0)
            return VerificationReport.compare(inequality_id, zero, zero, n, context={"vacuous": True}, **common)

        def relative_margin(pair) -> float:
            lhs, rhs, _ = pair
            return (rhs.value - lhs.value) / max(rhs.value, 1e-300)

        lhs, rhs, where = min(pairs, key=relative_margin)
        context = {key: np.asarray(where).tolist(), "samples": len(pairs)}
        return VerificationReport.compare(inequality_id, lhs, rhs, n, context=context, **common)

    def _worst_triple(
        self,
        inequality_id: str,
        values: List[VolumeEstimate],
        grid: np.ndarray,
        n: int,
        body_id: str,
        measure_id: str
    ) -> VerificationReport:
        """m_i m_{i+2} <= m_{i+1}^2 over consecutive triples; the worst one is reported."""
        triples = [
            (values[i].times(values[i + 2]), values[i + 1].squared(), float(grid[i + 1]))
            for i in range(len(values) - 2)
        ]
        lhs, rhs, t = min(triples, key=lambda tr: (tr[1].value - tr[0].value) / max(tr[1].value, 1e-300))
        return VerificationReport.compare(
            inequality_id, lhs, rhs, n,
            body_id=body_id, measure_id=measure_id,
            context={"t": t, "triples": len(triples)}
        )


verification_service = VerificationService()
