"""Geometric-mean body K^{1/2} L^{1/2} of two unconditional bodies."""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from app.core.config import settings
from app.core.exceptions import DimensionMismatchError, GeometryError
from app.models.geometry import Body, BodyOracle, HPolytope
from app.services.body_service import body_service

logger = logging.getLogger(__name__)

MEMBERSHIP_TOL = 1e-6
START_STEP = 0.5
INFEASIBLE_PENALTY = 1e6


@dataclass
class GMCertificate:
    """Outcome of a membership query; `x`, `y` witness membership when `member`."""
    member: bool
    value: float
    w: np.ndarray
    x: Optional[np.ndarray] = None
    y: Optional[np.ndarray] = None
    inconclusive: bool = False


def _starts(d: int) -> List[np.ndarray]:
    starts = [np.zeros(d)]
    for i in range(d):
        for sign in (1.0, -1.0):
            w = np.zeros(d)
            w[i] = sign * START_STEP
            starts.append(w)
    return starts


def _simplex(w0: np.ndarray) -> np.ndarray:
    return np.vstack([w0, w0 + START_STEP * np.eye(w0.shape[0])])


class GeometricMeanService:
    """Service for the membership oracle and body of K^{1/2} L^{1/2}."""

    def gm_gauge(self, K: Body, L: Body, z, iters: Optional[int] = None) -> Tuple[float, np.ndarray, bool]:
        """
        min over w of max(gauge_K(|z| e^w), gauge_L(|z| e^-w)).

        Coordinates where z vanishes drop out of the search. Returns
        (value, full-length w, every start converged).
        """
        z = np.abs(np.asarray(z, dtype=float))
        if z.shape[0] != K.dim or K.dim != L.dim:
            raise DimensionMismatchError("K, L and z must share one dimension")
        iters = iters or settings.GM_ITERS
        active = np.flatnonzero(z > 0)
        w_full = np.zeros(z.shape[0])
        if active.size == 0:
            return 0.0, w_full, True

        def objective(w: np.ndarray) -> float:
            scale = np.zeros_like(z)
            scale[active] = w
            return max(body_service.gauge(K, z * np.exp(scale)), body_service.gauge(L, z * np.exp(-scale)))

        best_value, best_w, all_converged = np.inf, None, True
        for w0 in _starts(active.size):
            res = minimize(
                objective,
                w0,
                method="Nelder-Mead",
                options={
                    "maxiter": iters,
                    "xatol": 1e-10,
                    "fatol": 1e-12,
                    "initial_simplex": _simplex(w0),
                }
            )
            all_converged = all_converged and bool(res.success)
            if res.fun < best_value:
                best_value, best_w = float(res.fun), res.x
        w_full[active] = best_w
        return best_value, w_full, all_converged

    def gm_membership(self, K: Body, L: Body, z, iters: Optional[int] = None) -> GMCertificate:
        """Decide z in K^{1/2} L^{1/2}; membership is certified by the witness pair."""
        z = np.asarray(z, dtype=float)
        value, w, converged = self.gm_gauge(K, L, z, iters)
        member = value <= 1.0 + MEMBERSHIP_TOL
        if not member:
            return GMCertificate(member=False, value=value, w=w, inconclusive=not converged)
        return GMCertificate(
            member=True,
            value=value,
            w=w,
            x=np.abs(z) * np.exp(w),
            y=np.abs(z) * np.exp(-w)
        )

    def geometric_mean_body(self, K: Body, L: Body, iters: Optional[int] = None) -> BodyOracle:
        """Oracle for K^{1/2} L^{1/2}; box is the coordinatewise geometric mean of the boxes."""
        K = body_service.as_integrable(K)
        L = body_service.as_integrable(L)
        if K.dim != L.dim:
            raise DimensionMismatchError("K and L must share one dimension")
        if not (body_service.is_unconditional(K) and body_service.is_unconditional(L)):
            raise GeometryError("geometric mean body requires unconditional K and L")
        box_k = body_service.enclosing_box(K)
        box_l = body_service.enclosing_box(L)
        half = np.sqrt(box_k[:, 1] * box_l[:, 1])
        box = np.column_stack([-half, half])

        def gauge(z: np.ndarray) -> float:
            return self.gm_gauge(K, L, z, iters)[0]

        if isinstance(K, HPolytope) and isinstance(L, HPolytope):
            def fiber(axis: int, point: np.ndarray):
                return self._polytope_fiber(K, L, axis, point, iters)
        else:
            def fiber(axis: int, point: np.ndarray):
                return self._bisected_fiber(gauge, half[axis], axis, point)

        return BodyOracle(
            dim=K.dim,
            gauge=gauge,
            box=box,
            kind="geometric-mean",
            fiber=fiber,
            parts=(K, L),
            unconditional=True
        )

    def _polytope_fiber(self, K: HPolytope, L: HPolytope, axis: int, point: np.ndarray, iters: Optional[int]):
        """
        Half-length g with g^2 = max over w of h_K(|y| e^w) h_L(|y| e^-w).

        h_K is the fiber half-length of K along `axis` over a base point; the
        search runs over the nonzero base coordinates only.
        """
        base = np.abs(np.asarray(point, dtype=float))
        base[axis] = 0.0
        active = np.flatnonzero(base > 0)

        def half_lengths(w: np.ndarray) -> Tuple[float, float, float]:
            scale = np.zeros_like(base)
            scale[active] = w
            a, b = base * np.exp(scale), base * np.exp(-scale)
            lo_k, hi_k, empty_k = body_service.fiber_bounds(K, axis, a[None, :])
            lo_l, hi_l, empty_l = body_service.fiber_bounds(L, axis, b[None, :])
            excess = max(body_service.gauge_h(K, a), body_service.gauge_h(L, b))
            h_k = 0.0 if empty_k[0] else 0.5 * float(hi_k[0] - lo_k[0])
            h_l = 0.0 if empty_l[0] else 0.5 * float(hi_l[0] - lo_l[0])
            return h_k, h_l, excess

        def objective(w: np.ndarray) -> float:
            h_k, h_l, excess = half_lengths(w)
            if h_k <= 0.0 or h_l <= 0.0:
                return INFEASIBLE_PENALTY * (1.0 + excess)
            return -(np.log(h_k) + np.log(h_l))

        if active.size == 0:
            h_k, h_l, _ = half_lengths(np.zeros(0))
        else:
            w0 = np.zeros(active.size)
            res = minimize(
                objective,
                w0,
                method="Nelder-Mead",
                options={
                    "maxiter": iters or settings.GM_ITERS,
                    "xatol": 1e-10,
                    "fatol": 1e-13,
                    "initial_simplex": _simplex(w0),
                }
            )
            h_k, h_l, _ = half_lengths(res.x)
        if h_k <= 0.0 or h_l <= 0.0:
            return None
        g = float(np.sqrt(h_k * h_l))
        return -g, g

    def _bisected_fiber(self, gauge, limit: float, axis: int, point: np.ndarray):
        """Symmetric fiber [-g, g] of an unconditional body by bisection on its gauge."""
        trial = np.asarray(point, dtype=float).copy()
        trial[axis] = 0.0
        if gauge(trial) > 1.0:
            return None
        inside, outside = 0.0, float(limit)
        trial[axis] = outside
        if gauge(trial) <= 1.0:
            return -outside, outside
        for _ in range(settings.FIBER_BISECT_ITERS):
            mid = 0.5 * (inside + outside)
            trial[axis] = mid
            if gauge(trial) <= 1.0:
                inside = mid
            else:
                outside = mid
        return -inside, inside


geometric_mean_service = GeometricMeanService()
