"""Exact Steiner symmetrization of H-polytopes along coordinate axes."""
import itertools
import logging
from typing import List, Optional, Tuple

import numpy as np

from app.core.exceptions import GeometryError, InternalSolverError, NormalizationError
from app.models.geometry import HPolytope
from app.services.body_service import ZERO_COEFF_TOL, body_service
from app.utils.file_utils import format_float
from app.utils.lp_utils import unique_rows

logger = logging.getLogger(__name__)

# Rows whose sign-flip images match within this tolerance are snapped onto one orbit
FLIP_SNAP_TOL = 1e-9

# Pairs whose fiber over the center is narrower than this contribute no rows
MIN_FIBER_WIDTH = 1e-12


class SymmetrizationService:
    """Service for Steiner symmetrals and the unconditionalization pipeline."""

    def fiber_interval(self, H: HPolytope, axis: int, y) -> Optional[Tuple[float, float]]:
        """Fiber of H over y, where y lists the n-1 coordinates other than `axis`."""
        y = np.asarray(y, dtype=float)
        if y.shape != (H.dim - 1,):
            raise GeometryError(f"base point must have {H.dim - 1} coordinates")
        body_service._check_axis(H.dim, axis)
        point = np.insert(y, axis, 0.0)
        lower, upper, empty = body_service.fiber_bounds(H, axis, point[None, :])
        if empty[0]:
            return None
        return float(lower[0]), float(upper[0])

    def steiner_rows(self, H: HPolytope, axis: int) -> Tuple[np.ndarray, int, int, int]:
        """
        Normalized halfspaces of S_u H before redundancy removal.

        Returns (rows, |Z|, |P|, |N|). Each pair (i in P, j in N) contributes
        the two rows of |x_u| <= (g_i(y) - f_j(y)) / 2, unless the pair's
        fiber over y = 0 is narrower than MIN_FIBER_WIDTH.
        """
        if not H.normalized:
            raise NormalizationError("Steiner symmetrization requires offsets normalized to 1")
        body_service._check_axis(H.dim, axis)
        A = H.normals
        b = A[:, axis]
        pos = np.flatnonzero(b > ZERO_COEFF_TOL)
        neg = np.flatnonzero(b < -ZERO_COEFF_TOL)
        zero = np.flatnonzero(np.abs(b) <= ZERO_COEFF_TOL)

        rest = A.copy()
        rest[:, axis] = 0.0
        rows = [A[zero]]
        skipped = 0
        for i, j in itertools.product(pos, neg):
            shift = 0.5 * (rest[i] / b[i] - rest[j] / b[j])
            height = 0.5 * (1.0 / b[i] - 1.0 / b[j])
            if 2.0 * height < MIN_FIBER_WIDTH:
                skipped += 1
                continue
            up = shift.copy()
            up[axis] = 1.0
            down = shift.copy()
            down[axis] = -1.0
            rows.append(np.vstack([up, down]) / height)
        if skipped:
            logger.debug(f"Steiner axis {axis}: skipped {skipped} degenerate pair(s)")
        return np.vstack(rows), len(zero), len(pos), len(neg)

    def steiner(self, H: HPolytope, axis: int) -> HPolytope:
        """Exact H-representation of the Steiner symmetral of H along e_axis."""
        rows, n_zero, n_pos, n_neg = self.steiner_rows(H, axis)
        result = body_service.make_hpolytope(rows, symmetric=H.symmetric or None)
        logger.debug(
            f"Steiner axis {axis}: |Z|={n_zero} |P|={n_pos} |N|={n_neg}, "
            f"{H.n_facets} -> {result.n_facets} facets"
        )
        return result

    def pipeline_axes(self, n: int) -> List[int]:
        """Axes symmetrized by the unconditionalization pipeline, in order."""
        # e_n first, down to e_2; central symmetry makes the e_1 step redundant
        return list(range(n - 1, 0, -1))

    def unconditionalize_steps(self, H: HPolytope) -> List[Tuple[int, HPolytope]]:
        """Intermediate symmetrals (axis, body) along the pipeline; last entry is snapped."""
        if not H.symmetric:
            raise GeometryError("unconditionalization requires a centrally symmetric body")
        steps = []
        current = H
        for axis in self.pipeline_axes(H.dim):
            current = self.steiner(current, axis)
            steps.append((axis, current))
        if steps:
            axis, last = steps[-1]
            steps[-1] = (axis, self._snap_to_flip_orbits(last))
        return steps

    def unconditionalize(self, H: HPolytope) -> HPolytope:
        """Symmetrize along every pipeline axis; output is exactly flip-closed."""
        steps = self.unconditionalize_steps(H)
        result = steps[-1][1] if steps else self._snap_to_flip_orbits(H)
        if not body_service.is_unconditional(result):
            raise InternalSolverError("pipeline output is not unconditional")
        return result

    def _snap_to_flip_orbits(self, H: HPolytope) -> HPolytope:
        """Replace rows by exact sign-flip orbits of their absolute values."""
        A = H.normals
        for signs in itertools.product((1.0, -1.0), repeat=H.dim):
            flipped = A * np.asarray(signs)
            for row in flipped:
                if not np.any(np.max(np.abs(A - row), axis=1) <= FLIP_SNAP_TOL * max(1.0, np.max(np.abs(row)))):
                    raise InternalSolverError(
                        f"row {[format_float(v) for v in row]} has no sign-flip partner"
                    )
        magnitudes = np.abs(A)
        representatives = magnitudes[unique_rows(magnitudes, np.zeros(len(magnitudes)), rtol=FLIP_SNAP_TOL)]
        orbit = np.vstack([
            representatives * np.asarray(signs)
            for signs in itertools.product((1.0, -1.0), repeat=H.dim)
        ])
        orbit = orbit[unique_rows(orbit, np.zeros(len(orbit)), rtol=0.0)]
        return body_service.make_hpolytope(orbit, symmetric=True)


symmetrization_service = SymmetrizationService()
