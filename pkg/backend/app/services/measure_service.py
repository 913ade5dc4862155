"""Service for log-concave measures: built-ins, custom densities, restrictions."""
import logging
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import MeasureError, MeasureValidationWarning
from app.models.geometry import HPolytope
from app.models.measure import FiberMeasure, LogConcaveMeasure, MeasureFlags, RadialProfile
from app.schemas.experiment_schema import MeasureKind, MeasureSpec
from app.services.body_service import body_service
from app.services.integration_service import integration_service
from app.services.storage_service import storage_service
from app.utils.random_utils import make_rng

logger = logging.getLogger(__name__)

MIDPOINT_TOL = 1e-9
FLIP_TOL = 1e-12
LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class MeasureValidation:
    """Counts of sampled invariant violations."""
    samples: int
    midpoint_failures: int = 0
    even_failures: int = 0
    flip_failures: int = 0

    @property
    def passed(self) -> bool:
        return self.midpoint_failures == 0 and self.even_failures == 0 and self.flip_failures == 0


def _per_axis(values, dim: Optional[int], name: str) -> np.ndarray:
    array = np.atleast_1d(np.asarray(values, dtype=float))
    if dim is not None and array.shape[0] == 1:
        array = np.full(dim, array[0])
    if dim is not None and array.shape[0] != dim:
        raise MeasureError(f"{name} needs {dim} entries, got {array.shape[0]}")
    if not np.all(np.isfinite(array)) or np.any(array <= 0):
        raise MeasureError(f"{name} entries must be positive")
    return array


def _label(kind: str, values: np.ndarray) -> str:
    return f"{kind}(" + ",".join(f"{v:g}" for v in values) + ")"


def _log_agree(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    """Elementwise |a - b| <= tol with -inf == -inf."""
    finite = np.isfinite(a) & np.isfinite(b)
    with np.errstate(invalid="ignore"):
        close = np.abs(a - b) <= tol
    return np.where(finite, close, a == b)


class MeasureService:
    """Service for constructing and checking log-concave measures."""

    def make_gaussian(self, sigma: Sequence[float], dim: Optional[int] = None) -> LogConcaveMeasure:
        """Centered product Gaussian with per-axis standard deviations."""
        sigma = _per_axis(sigma, dim, "sigma")
        n = sigma.shape[0]
        log_norm = float(np.sum(np.log(sigma)) + 0.5 * n * LOG_2PI)

        def log_density(X: np.ndarray) -> np.ndarray:
            return -0.5 * np.sum((X / sigma) ** 2, axis=1) - log_norm

        def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
            return rng.standard_normal((size, n)) * sigma

        isotropic = bool(np.all(sigma == sigma[0]))
        return LogConcaveMeasure(
            dim=n,
            log_density=log_density,
            flags=MeasureFlags(even=True, unconditional=True),
            sampler=sampler,
            total_mass=1.0,
            radial=RadialProfile("gaussian", float(sigma[0])) if isotropic else None,
            measure_id=_label("gaussian", sigma)
        )

    def make_product_exponential(self, lam: Sequence[float], dim: Optional[int] = None) -> LogConcaveMeasure:
        """Product of two-sided exponentials, density prod (lambda_i / 2) exp(-lambda_i |x_i|)."""
        lam = _per_axis(lam, dim, "lambda")
        n = lam.shape[0]
        log_norm = float(np.sum(np.log(lam / 2.0)))

        def log_density(X: np.ndarray) -> np.ndarray:
            return -np.sum(np.abs(X) * lam, axis=1) + log_norm

        def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
            return rng.laplace(0.0, 1.0, (size, n)) / lam

        return LogConcaveMeasure(
            dim=n,
            log_density=log_density,
            flags=MeasureFlags(even=True, unconditional=True),
            sampler=sampler,
            total_mass=1.0,
            measure_id=_label("product_exponential", lam)
        )

    def make_lebesgue(self, box, dim: Optional[int] = None) -> LogConcaveMeasure:
        """
        Lebesgue measure restricted to a centered box.

        `box` is either per-axis half-widths or an (n, 2) array of bounds; bounds
        must be symmetric about the origin.
        """
        bounds = np.asarray(box, dtype=float)
        if bounds.ndim == 2:
            if bounds.shape[1] != 2 or not np.allclose(bounds[:, 0], -bounds[:, 1], rtol=0.0, atol=1e-15):
                raise MeasureError("Lebesgue box must be symmetric about the origin")
            half = _per_axis(bounds[:, 1], dim, "box")
        else:
            half = _per_axis(bounds, dim, "box")
        n = half.shape[0]
        support = body_service.make_box(half)

        def log_density(X: np.ndarray) -> np.ndarray:
            inside = np.all(np.abs(X) <= half, axis=1)
            return np.where(inside, 0.0, -np.inf)

        def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
            return rng.uniform(-half, half, (size, n))

        return LogConcaveMeasure(
            dim=n,
            log_density=log_density,
            flags=MeasureFlags(even=True, unconditional=True),
            sampler=sampler,
            total_mass=float(np.prod(2.0 * half)),
            support_box=np.column_stack([-half, half]),
            support=support,
            radial=RadialProfile("lebesgue", float(np.min(half))),
            measure_id=_label("lebesgue_box", half)
        )

    def make_uniform_on_body(self, T: HPolytope, measure_id: str = "uniform_body") -> LogConcaveMeasure:
        """Lebesgue measure restricted to an unconditional polytope T."""
        if not isinstance(T, HPolytope):
            T = body_service.as_integrable(T)
        if not body_service.is_unconditional(T):
            raise MeasureError("uniform measure requires an unconditional body")
        box = body_service.enclosing_box(T)
        A, c = T.normals, T.offsets

        def log_density(X: np.ndarray) -> np.ndarray:
            inside = np.all(X @ A.T <= c + 1e-12, axis=1)
            return np.where(inside, 0.0, -np.inf)

        def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
            accepted = []
            count = 0
            while count < size:
                batch = rng.uniform(box[:, 0], box[:, 1], (max(size, 1024), T.dim))
                batch = batch[np.all(batch @ A.T <= c, axis=1)]
                accepted.append(batch)
                count += batch.shape[0]
            return np.vstack(accepted)[:size]

        return LogConcaveMeasure(
            dim=T.dim,
            log_density=log_density,
            flags=MeasureFlags(even=True, unconditional=True),
            sampler=sampler,
            total_mass=integration_service.volume_exact(T).value,
            support_box=box,
            support=T,
            measure_id=measure_id
        )

    def make_custom(
        self,
        log_density: Callable,
        flags: MeasureFlags,
        box=None,
        dim: Optional[int] = None,
        sampler=None,
        total_mass: Optional[float] = None,
        vectorized: bool = False,
        measure_id: str = "custom",
        validate: bool = True,
        seed: int = 0
    ) -> LogConcaveMeasure:
        """
        User density with caller-asserted flags.

        `log_density` maps one point to a real (or a batch to an array when
        `vectorized`). It must be pure and reentrant. A sampled validation pass
        warns on violated flags but never rejects the measure.
        """
        support_box = None
        support = None
        if box is not None:
            support_box = np.asarray(box, dtype=float)
            if support_box.ndim == 1:
                support_box = np.column_stack([-support_box, support_box])
            dim = support_box.shape[0] if dim is None else dim
            if np.allclose(support_box[:, 0], -support_box[:, 1], rtol=0.0, atol=1e-15):
                support = body_service.make_box(support_box[:, 1])
        if dim is None:
            raise MeasureError("custom measure needs a dimension or a box")

        def batch_density(X: np.ndarray) -> np.ndarray:
            if vectorized:
                values = np.asarray(log_density(X), dtype=float)
            else:
                values = np.array([float(log_density(x)) for x in X])
            if support_box is not None:
                inside = np.all((X >= support_box[:, 0]) & (X <= support_box[:, 1]), axis=1)
                values = np.where(inside, values, -np.inf)
            return values

        mu = LogConcaveMeasure(
            dim=dim,
            log_density=batch_density,
            flags=flags,
            sampler=sampler,
            total_mass=total_mass,
            support_box=support_box,
            support=support,
            measure_id=measure_id
        )
        if validate:
            self.validate(mu, seed=seed)
        return mu

    def make_correlated_gaussian(self, cov) -> LogConcaveMeasure:
        """Centered Gaussian with full covariance: even, unconditional only when diagonal."""
        cov = np.asarray(cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or not np.allclose(cov, cov.T):
            raise MeasureError("covariance must be a symmetric square matrix")
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise MeasureError("covariance must be positive definite") from exc
        n = cov.shape[0]
        log_norm = float(np.sum(np.log(np.diag(chol))) + 0.5 * n * LOG_2PI)
        chol_inv = np.linalg.inv(chol)

        def log_density(X: np.ndarray) -> np.ndarray:
            whitened = X @ chol_inv.T
            return -0.5 * np.sum(whitened ** 2, axis=1) - log_norm

        def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
            return rng.standard_normal((size, n)) @ chol.T

        diagonal = bool(np.all(cov[~np.eye(n, dtype=bool)] == 0.0))
        label = "correlated_gaussian(" + ",".join(f"{v:g}" for v in cov[np.triu_indices(n)]) + ")"
        return LogConcaveMeasure(
            dim=n,
            log_density=log_density,
            flags=MeasureFlags(even=True, unconditional=diagonal),
            sampler=sampler,
            total_mass=1.0,
            measure_id=label
        )

    # ------------------------------------------------------------------
    # Restrictions
    # ------------------------------------------------------------------

    def restrict_fiber(self, mu: LogConcaveMeasure, axis: int, y, check: bool = True) -> FiberMeasure:
        """Density of mu on the line through y (chart of e_axis^perp) along e_axis."""
        y = np.asarray(y, dtype=float)
        if y.shape != (mu.dim - 1,):
            raise MeasureError(f"base point must have {mu.dim - 1} coordinates")

        def log_density_1d(t: np.ndarray) -> np.ndarray:
            t = np.atleast_1d(np.asarray(t, dtype=float))
            points = np.repeat(np.insert(y, axis, 0.0)[None, :], t.shape[0], axis=0)
            points[:, axis] = t
            return mu.log_density(points)

        fiber = FiberMeasure(base_point=y, axis=axis, log_density_1d=log_density_1d)
        if check and mu.flags.unconditional:
            t = np.linspace(0.0, self._sample_radius(mu, axis), 33)
            if not np.all(_log_agree(log_density_1d(t), log_density_1d(-t), FLIP_TOL)):
                self._warn(f"fiber density of {mu.measure_id} along axis {axis} is not even")
        return fiber

    def restrict_slice(self, mu: LogConcaveMeasure, axis: int, z: float) -> LogConcaveMeasure:
        """Density of mu on the hyperplane x_axis = z, as a measure in dimension n-1."""
        if mu.dim < 2:
            raise MeasureError("slicing needs dimension at least 2")
        z = float(z)

        def log_density(Y: np.ndarray) -> np.ndarray:
            return mu.log_density(np.insert(Y, axis, z, axis=1))

        unconditional = mu.flags.unconditional
        even = unconditional or (mu.flags.even and z == 0.0)
        support = None
        if mu.support is not None:
            support = body_service.slice_h(mu.support, axis, z)
        return LogConcaveMeasure(
            dim=mu.dim - 1,
            log_density=log_density,
            flags=MeasureFlags(even=even, unconditional=unconditional),
            support_box=None if mu.support_box is None else np.delete(mu.support_box, axis, axis=0),
            support=support,
            measure_id=f"{mu.measure_id}|x{axis}={z:g}"
        )

    # ------------------------------------------------------------------
    # Validation
    # ------------------------------------------------------------------

    def validate(self, mu: LogConcaveMeasure, samples: Optional[int] = None, seed: int = 0) -> MeasureValidation:
        """Sampled checks of midpoint log-concavity, evenness and flip invariance."""
        count = samples or settings.VALIDATION_SAMPLES
        rng = make_rng(seed)
        X = self._validation_points(mu, rng, count)
        Y = self._validation_points(mu, rng, count)
        result = MeasureValidation(samples=count)

        lx, ly = mu.log_density_at(X), mu.log_density_at(Y)
        finite = np.isfinite(lx) & np.isfinite(ly)
        if mu.flags.log_concave_declared and np.any(finite):
            mid = mu.log_density_at(0.5 * (X + Y))
            result.midpoint_failures = int(np.sum(finite & ~(mid >= 0.5 * (lx + ly) - MIDPOINT_TOL)))
        if mu.flags.even:
            result.even_failures = int(np.sum(~_log_agree(lx, mu.log_density_at(-X), FLIP_TOL)))
        if mu.flags.unconditional:
            signs = rng.choice([-1.0, 1.0], size=X.shape)
            result.flip_failures = int(np.sum(~_log_agree(lx, mu.log_density_at(X * signs), FLIP_TOL)))

        if not result.passed:
            self._warn(
                f"measure {mu.measure_id} failed sampled checks: "
                f"midpoint={result.midpoint_failures} even={result.even_failures} "
                f"flip={result.flip_failures} of {count}"
            )
        return result

    def from_spec(self, spec: MeasureSpec, dim: int) -> LogConcaveMeasure:
        """Build a measure from its experiment-config description."""
        params = spec.params or [1.0]
        if spec.kind == MeasureKind.GAUSSIAN:
            mu = self.make_gaussian(params, dim)
        elif spec.kind == MeasureKind.PRODUCT_EXPONENTIAL:
            mu = self.make_product_exponential(params, dim)
        elif spec.kind == MeasureKind.LEBESGUE_BOX:
            mu = self.make_lebesgue(params, dim)
        elif spec.kind == MeasureKind.CORRELATED_GAUSSIAN:
            if spec.cov is None:
                raise MeasureError("correlated_gaussian needs a covariance matrix")
            mu = self.make_correlated_gaussian(spec.cov)
        else:
            if spec.body is None:
                raise MeasureError("uniform_body needs a body file")
            mu = self.make_uniform_on_body(storage_service.load_body(spec.body))
        if mu.dim != dim:
            raise MeasureError(f"measure dimension {mu.dim} does not match experiment dimension {dim}")
        if spec.id:
            mu = replace(mu, measure_id=spec.id)
        return mu

    # ------------------------------------------------------------------

    def _validation_points(self, mu: LogConcaveMeasure, rng: np.random.Generator, count: int) -> np.ndarray:
        if mu.sampler is not None:
            return mu.sampler(rng, count)
        if mu.support_box is not None:
            return rng.uniform(mu.support_box[:, 0], mu.support_box[:, 1], (count, mu.dim))
        return 2.0 * rng.standard_normal((count, mu.dim))

    def _sample_radius(self, mu: LogConcaveMeasure, axis: int) -> float:
        if mu.support_box is not None:
            return float(np.max(np.abs(mu.support_box[axis])))
        return 5.0

    def _warn(self, message: str) -> None:
        logger.warning(message)
        warnings.warn(message, MeasureValidationWarning, stacklevel=3)


measure_service = MeasureService()
