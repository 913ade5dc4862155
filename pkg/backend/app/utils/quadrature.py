"""Adaptive Gauss-Legendre quadrature on bisected panels."""
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Tuple

import numpy as np

logger = logging.getLogger(__name__)

GL_ORDER = 15
GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)

# Integrand: nodes -> (values, error bounds carried in from nested integrals)
PanelIntegrand = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclass
class QuadratureResult:
    """Outcome of an adaptive integration."""
    value: float
    err: float
    converged: bool
    panels: int


def exact_integrand(func: Callable[[np.ndarray], np.ndarray]) -> PanelIntegrand:
    """Wrap a vectorized integrand that carries no error of its own."""
    def wrapped(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        values = np.asarray(func(x), dtype=float)
        return values, np.zeros_like(values)
    return wrapped


def gauss_legendre_nodes(a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the 15-point rule on [a, b]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return mid + half * GL_NODES, half * GL_WEIGHTS


def gauss_legendre(func: PanelIntegrand, a: float, b: float) -> Tuple[float, float]:
    """Single-panel rule; returns (value, propagated error)."""
    x, w = gauss_legendre_nodes(a, b)
    values, errs = func(x)
    return float(np.dot(w, values)), float(np.dot(w, errs))


def adaptive_gauss_legendre(
    func: PanelIntegrand,
    a: float,
    b: float,
    rel_tol: float,
    breakpoints: Iterable[float] = (),
    max_depth: int = 48,
    max_panels: int = 20000,
    abs_floor: float = 1e-14
) -> QuadratureResult:
    """
    Integrate func over [a, b], bisecting panels until each panel pair agrees
    with its parent to within its share of rel_tol times the running estimate.

    Breakpoints strictly inside (a, b) split the domain before refinement, so
    known kinks of the integrand sit on panel edges.
    """
    if not b > a:
        return QuadratureResult(0.0, 0.0, True, 0)

    cuts = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    pieces = [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]
    coarse = [gauss_legendre(func, lo, hi) for lo, hi in pieces]
    estimate = sum(v for v, _ in coarse)
    tol_abs = max(rel_tol * abs(estimate), abs_floor)
    total_width = b - a

    stack = [(lo, hi, v, e, 0) for (lo, hi), (v, e) in zip(pieces, coarse)]
    value = 0.0
    err = 0.0
    panels = len(pieces)
    converged = True
    while stack:
        lo, hi, whole, _, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, left_err = gauss_legendre(func, lo, mid)
        right, right_err = gauss_legendre(func, mid, hi)
        panels += 2
        diff = abs(left + right - whole)
        local_tol = tol_abs * (hi - lo) / total_width
        budget_spent = depth >= max_depth or panels >= max_panels
        if diff <= local_tol or budget_spent:
            if diff > local_tol:
                converged = False
            value += left + right
            err += diff + left_err + right_err
        else:
            stack.append((lo, mid, left, left_err, depth + 1))
            stack.append((mid, hi, right, right_err, depth + 1))

    if not converged:
        logger.debug(f"Quadrature on [{a}, {b}] stopped at {panels} panels, err {err:.3g}")
    return QuadratureResult(value, err, converged, panels)


# Batched integrand: (owner indices (k,), nodes (k, 15)) -> values (k, 15)
BatchIntegrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _batch_panels(func: BatchIntegrand, owners: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * GL_NODES[None, :]
    values = func(owners, nodes)
    return np.sum(values * GL_WEIGHTS[None, :], axis=1) * half


def adaptive_gauss_legendre_batch(
    func: BatchIntegrand,
    lower: np.ndarray,
    upper: np.ndarray,
    rel_tol: float,
    breakpoints: Iterable[float] = (),
    max_depth: int = 48,
    abs_floor: float = 1e-14
) -> Tuple[np.ndarray, np.ndarray, bool]:
    """
    Many independent 1D integrals over [lower_j, upper_j], refined together.

    Same acceptance rule as adaptive_gauss_legendre, applied per integral.
    Returns (values, error bounds, converged).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m = lower.shape[0]
    value = np.zeros(m)
    err = np.zeros(m)
    width = upper - lower

    owners, starts, ends = [], [], []
    points = sorted(float(p) for p in breakpoints)
    for j in np.flatnonzero(width > 0):
        cuts = [lower[j], *(p for p in points if lower[j] < p < upper[j]), upper[j]]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            owners.append(j)
            starts.append(lo)
            ends.append(hi)
    if not owners:
        return value, err, True

    owners = np.asarray(owners, dtype=int)
    a = np.asarray(starts)
    b = np.asarray(ends)
    whole = _batch_panels(func, owners, a, b)
    coarse = np.zeros(m)
    np.add.at(coarse, owners, whole)
    tol = np.maximum(rel_tol * np.abs(coarse), abs_floor)

    converged = True
    depth = 0
    while owners.size:
        mid = 0.5 * (a + b)
        left = _batch_panels(func, owners, a, mid)
        right = _batch_panels(func, owners, mid, b)
        diff = np.abs(left + right - whole)
        done = diff <= tol[owners] * (b - a) / width[owners]
        if depth >= max_depth:
            converged = converged and bool(np.all(done))
            done[:] = True
        np.add.at(value, owners[done], (left + right)[done])
        np.add.at(err, owners[done], diff[done])
        refine = ~done
        owners = np.concatenate([owners[refine], owners[refine]])
        a, b = np.concatenate([a[refine], mid[refine]]), np.concatenate([mid[refine], b[refine]])
        whole = np.concatenate([left[refine], right[refine]])
        depth += 1
    return value, err, converged
