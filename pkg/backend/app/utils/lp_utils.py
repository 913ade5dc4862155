"""Linear programming helpers built on scipy's HiGHS backend."""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection, QhullError

from app.core.exceptions import InternalSolverError

logger = logging.getLogger(__name__)

HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}

# Redundancy threshold on LP optima, and relative tolerance for duplicate rows
REDUNDANCY_TOL = 1e-9
DUPLICATE_RTOL = 1e-12

# Relative residual under which a vertex counts as lying on a row's hyperplane
TIGHT_RTOL = 1e-7

# Box used to keep LPs bounded; optima beyond half of it count as unbounded
_LP_BOX = 1e9


def maximize_linear(
    objective: np.ndarray,
    A_ub: np.ndarray,
    b_ub: np.ndarray
) -> Tuple[Optional[float], Optional[np.ndarray]]:
    """
    Maximize objective·x subject to A_ub x <= b_ub.

    Returns (None, None) when the program is unbounded and (-inf, None) when
    it is infeasible.
    """
    objective = np.asarray(objective, dtype=float)
    n = objective.shape[0]
    if A_ub.shape[0] == 0:
        return None, None
    res = linprog(
        -objective,
        A_ub=A_ub,
        b_ub=b_ub,
        bounds=[(-_LP_BOX, _LP_BOX)] * n,
        method="highs",
        options=HIGHS_OPTIONS
    )
    if res.status == 2:
        return float("-inf"), None
    if res.status != 0:
        raise InternalSolverError(f"LP failed (status {res.status}): {res.message}")
    if np.max(np.abs(res.x)) > 0.5 * _LP_BOX:
        return None, None
    return float(-res.fun), res.x


def chebyshev_center(A: np.ndarray, c: np.ndarray) -> Tuple[float, Optional[np.ndarray]]:
    """Largest inscribed ball of {x : A x <= c}: (radius, center)."""
    m, n = A.shape
    norms = np.linalg.norm(A, axis=1)
    # variables (x, r); maximize r
    A_aug = np.hstack([A, norms[:, None]])
    objective = np.zeros(n + 1)
    objective[-1] = 1.0
    A_full = np.vstack([A_aug, -objective[None, :]])
    b_full = np.concatenate([c, [0.0]])
    radius, sol = maximize_linear(objective, A_full, b_full)
    if radius is None:
        return float("inf"), None
    if sol is None:
        return float("-inf"), None
    return radius, sol[:n]


def unique_rows(A: np.ndarray, c: np.ndarray, rtol: float = DUPLICATE_RTOL) -> np.ndarray:
    """Indices of rows of (A, c) with duplicates (relative tolerance) dropped."""
    M = np.hstack([A, c[:, None]])
    keep = []
    for i in range(M.shape[0]):
        row = M[i]
        scale = np.max(np.abs(row))
        duplicate = False
        for j in keep:
            other = M[j]
            bound = rtol * max(scale, np.max(np.abs(other)))
            if np.max(np.abs(row - other)) <= bound:
                duplicate = True
                break
        if not duplicate:
            keep.append(i)
    return np.asarray(keep, dtype=int)


def mirror_indices(A: np.ndarray, rtol: float = DUPLICATE_RTOL) -> Optional[np.ndarray]:
    """For each row a_i the index of the row equal to -a_i, or None if some row lacks one."""
    m = A.shape[0]
    mirror = np.empty(m, dtype=int)
    for i in range(m):
        diffs = np.max(np.abs(A + A[i]), axis=1)
        scale = rtol * np.maximum(np.max(np.abs(A), axis=1), np.max(np.abs(A[i])))
        hits = np.flatnonzero(diffs <= scale)
        if hits.size == 0:
            return None
        mirror[i] = hits[0]
    return mirror


def facet_candidates(A: np.ndarray, c: np.ndarray, interior: np.ndarray) -> np.ndarray:
    """
    Mask of rows whose hyperplane holds an (n-1)-dimensional set of vertices.

    Vertices come from one halfspace intersection around `interior`. Rows
    outside the mask cannot define facets. Falls back to all rows when qhull
    rejects the system.
    """
    m, n = A.shape
    try:
        V = HalfspaceIntersection(np.hstack([A, -c[:, None]]), interior).intersections
    except QhullError as exc:
        logger.debug(f"Vertex prefilter skipped: {exc}")
        return np.ones(m, dtype=bool)
    residual = np.abs(V @ A.T - c)
    bound = TIGHT_RTOL * (np.abs(V) @ np.abs(A).T + np.abs(c))
    tight = residual <= bound
    mask = np.zeros(m, dtype=bool)
    for i in range(m):
        P = V[tight[:, i]]
        if P.shape[0] >= n and np.linalg.matrix_rank(P[1:] - P[0]) >= n - 1:
            mask[i] = True
    return mask


def essential_rows(
    A: np.ndarray,
    c: np.ndarray,
    tol: float = REDUNDANCY_TOL,
    mirror: Optional[np.ndarray] = None,
    interior: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Indices of the facet-defining rows of {x : A x <= c}.

    Row i is redundant when max a_i·x over the remaining rows is at most
    c_i + tol, which also drops rows that only touch the body in a
    lower-dimensional face. Rows are removed one at a time. With `mirror`
    given (centrally symmetric systems) a row and its negation are tested and
    removed together. With a strictly interior point given, rows that hold
    too few vertices are dropped before any LP is solved.
    """
    m, n = A.shape
    keep = np.ones(m, dtype=bool)
    if interior is not None and n >= 2:
        keep = facet_candidates(A, c, interior)
        if mirror is not None:
            keep |= keep[mirror]
        if keep.sum() <= n:
            keep[:] = True
        logger.debug(f"Vertex prefilter kept {int(keep.sum())} of {m} rows")
    for i in range(m):
        if not keep[i]:
            continue
        if mirror is not None and mirror[i] < i:
            continue
        others = keep.copy()
        others[i] = False
        optimum, _ = maximize_linear(A[i], A[others], c[others])
        if optimum is None:
            continue
        if optimum <= c[i] + tol * max(1.0, abs(c[i])):
            keep[i] = False
            if mirror is not None:
                keep[mirror[i]] = False
    return np.flatnonzero(keep)
