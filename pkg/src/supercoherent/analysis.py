"""Quantitative studies over the one- and three-parameter operator families.

The one-parameter family K(theta) = [[1, cos(theta)], [sin(theta), 1]] hits
all three regions as theta varies: degenerate exactly at multiples of pi/2,
generic with bounded uncertainties on (0, pi/2), generic with unbounded
uncertainties on (pi/2, pi), repeating with period pi.  This module sweeps
mixture uncertainties over (theta, |z|) grids, fits the power-law divergence
rate of the product in the unbounded region, searches for the bounded-region
maximum, detects canonical (single-ray, minimum-uncertainty) states, and
classifies voxel grids of the (k2, k3, k4) parameter space at k1 = 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, RegionError, SupercoherentError
from .observables import uncertainty
from .states import SuperState, mixed_state, to_fock
from .susy_core import (
    DEFAULT_CLASSIFY_TOL,
    KMatrix,
    Region,
    classify,
    theta_operator,
)

__all__ = [
    "SweepSpec",
    "SweepRow",
    "DivergenceFit",
    "MaxUncertainty",
    "ParamGrid",
    "theta_grid",
    "sweep",
    "fit_divergence",
    "find_max_uncertainty",
    "canonical_scs_check",
    "param_grid_classify",
]


def theta_grid(start: float, stop: float, count: int) -> np.ndarray:
    """Linearly spaced theta values, nudged off the degenerate lines.

    Any point within a quarter step of a multiple of pi/2 is shifted by half
    a step toward the window midpoint, so closed-form generic constructors
    are usable at every grid point.  A zero-width window yields one point.
    """
    start = float(start)
    stop = float(stop)
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ValueError("theta window must be finite")
    if start == stop or count == 1:
        pts = np.array([0.5 * (start + stop)])
        step = math.pi / 360.0
    else:
        pts = np.linspace(start, stop, count)
        step = abs(stop - start) / (count - 1)
    mid = 0.5 * (start + stop)
    half = math.pi / 2.0
    out = pts.copy()
    for i, th in enumerate(pts):
        frac = th / half
        dist = abs(frac - round(frac)) * half
        if dist <= 0.25 * step:
            direction = 1.0 if mid >= th else -1.0
            if th == mid:
                direction = 1.0
            out[i] = th + direction * 0.5 * step
    return out


@dataclass(frozen=True)
class SweepSpec:
    """Grid description for a (theta, |z|) uncertainty sweep.

    Ranges are (start, stop, count) with count >= 2; the theta axis is laid
    out by ``theta_grid`` and therefore avoids the degenerate lines.
    """

    theta_range: tuple[float, float, int]
    zmag_range: tuple[float, float, int]
    zarg: float = 0.0
    eta: float = 0.0
    lam: float = 0.0
    t: float = 0.0

    def __post_init__(self) -> None:
        for name, rng in (("theta_range", self.theta_range), ("zmag_range", self.zmag_range)):
            lo, hi, n = rng
            if int(n) < 2:
                raise ValueError(f"{name} count must be >= 2")
            if not (math.isfinite(float(lo)) and math.isfinite(float(hi))):
                raise ValueError(f"{name} must be finite")
        if float(self.zmag_range[0]) < 0.0:
            raise ValueError("zmag must be nonnegative")


@dataclass(frozen=True)
class SweepRow:
    """One grid point of a sweep; ok=False marks a failed evaluation."""

    theta: float
    zmag: float
    zarg: float
    var_xi: float
    var_mu: float
    product: float
    ok: bool = True


def _mixture_report(
    theta: float,
    zmag: float,
    zarg: float,
    eta: float,
    lam: float,
    t: float,
    classify_tol: float,
):
    k = theta_operator(theta)
    z0 = zmag * cmath.exp(1j * zarg)
    s = mixed_state(k, z0, t, eta, lam, classify_tol=classify_tol)
    return uncertainty(s)


def sweep(
    spec: SweepSpec, *, classify_tol: float = DEFAULT_CLASSIFY_TOL
) -> list[SweepRow]:
    """Mixture uncertainties over the full (theta, |z|) grid.

    Rows are ordered theta-major, then |z|; each grid point is evaluated
    independently.  Evaluations that fail numerically produce a row with NaN
    values and ok=False instead of aborting the sweep.
    """
    t_lo, t_hi, t_n = spec.theta_range
    z_lo, z_hi, z_n = spec.zmag_range
    thetas = theta_grid(float(t_lo), float(t_hi), int(t_n))
    zmags = np.linspace(float(z_lo), float(z_hi), int(z_n))
    rows: list[SweepRow] = []
    for th in thetas:
        for zm in zmags:
            try:
                rep = _mixture_report(
                    float(th), float(zm), spec.zarg, spec.eta, spec.lam, spec.t, classify_tol
                )
                rows.append(
                    SweepRow(
                        float(th), float(zm), spec.zarg, rep.var_xi, rep.var_mu, rep.product
                    )
                )
            except SupercoherentError:
                nan = math.nan
                rows.append(SweepRow(float(th), float(zm), spec.zarg, nan, nan, nan, ok=False))
    return rows


@dataclass(frozen=True)
class DivergenceFit:
    """Power-law fit of the variance product against |z|.

    slope/intercept describe log(product) = slope*log(|z|) + intercept over
    the fitted window; r_squared is the coefficient of determination.
    """

    theta: float
    zarg: float
    slope: float
    intercept: float
    r_squared: float
    zmag_window: tuple[float, float]
    points: int


def fit_divergence(
    theta: float,
    zarg: float,
    zmag_window: tuple[float, float] = (10.0, 100.0),
    points: int = 20,
    eta: float = math.pi / 4.0,
    lam: float = math.pi / 4.0,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> DivergenceFit:
    """Least-squares slope of log(product) vs log(|z|), log-spaced points.

    Only defined where the product actually diverges, i.e. the operator at
    ``theta`` classifies as generic with equal eigenvalue magnitudes; other
    regions raise.  The mixture angles default to the equal-weight quarter
    phase mixture whose divergence rate depends on arg(z): slope 2 when the
    oscillatory factor kills one variance, otherwise 4.
    """
    points = int(points)
    if points < 5:
        raise ValueError("points must be >= 5")
    lo, hi = float(zmag_window[0]), float(zmag_window[1])
    if not (0.0 < lo < hi and math.isfinite(hi)):
        raise ValueError("zmag_window must satisfy 0 < min < max")
    k = theta_operator(float(theta))
    region = classify(k, classify_tol)
    if region.tag is not Region.GENERIC_UNBOUNDED:
        raise RegionError("no divergence to fit")
    zmags = np.geomspace(lo, hi, points)
    prods = np.empty(points)
    for i, zm in enumerate(zmags):
        rep = _mixture_report(float(theta), float(zm), float(zarg), eta, lam, 0.0, classify_tol)
        prods[i] = rep.product
    x = np.log(zmags)
    y = np.log(prods)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 and ss_res <= 1e-24 else 1.0 - ss_res / ss_tot
    return DivergenceFit(
        theta=float(theta),
        zarg=float(zarg),
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r2),
        zmag_window=(lo, hi),
        points=points,
    )


@dataclass(frozen=True)
class MaxUncertainty:
    """Argmax of the variance product over a (theta, |z|) window.

    unbounded_window flags that the searched window touched the unbounded
    region, where the reported maximum is only a grid value, not a supremum.
    """

    theta: float
    zmag: float
    zarg: float
    product: float
    eta: float
    lam: float
    unbounded_window: bool


def find_max_uncertainty(
    theta_window: tuple[float, float],
    zmag_max: float,
    zarg: float,
    eta: float,
    lam: float,
    *,
    coarse: int = 25,
    refine: int = 3,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> MaxUncertainty:
    """Coarse grid scan plus local grid refinement of the variance product.

    The refinement re-grids a shrinking window around the incumbent best
    point; the reported value never decreases below the coarse-grid maximum.
    """
    t_lo, t_hi = float(theta_window[0]), float(theta_window[1])
    zmag_max = float(zmag_max)
    if zmag_max < 0.0:
        raise ValueError("zmag_max must be nonnegative")
    if coarse < 2:
        raise ValueError("coarse grid must have >= 2 points per axis")

    def scan(th_lo: float, th_hi: float, z_lo: float, z_hi: float, n: int):
        thetas = theta_grid(th_lo, th_hi, n)
        zmags = np.linspace(z_lo, z_hi, n) if z_lo != z_hi else np.array([z_lo])
        best = (-math.inf, thetas[0], zmags[0])
        touched = False
        for th in thetas:
            if classify(theta_operator(float(th)), classify_tol).tag is Region.GENERIC_UNBOUNDED:
                touched = True
            for zm in zmags:
                try:
                    rep = _mixture_report(
                        float(th), float(zm), float(zarg), eta, lam, 0.0, classify_tol
                    )
                except SupercoherentError:
                    continue
                if rep.product > best[0]:
                    best = (rep.product, float(th), float(zm))
        return best, touched

    best, unbounded = scan(t_lo, t_hi, 0.0, zmag_max, coarse)
    step_t = (t_hi - t_lo) / max(coarse - 1, 1)
    step_z = zmag_max / max(coarse - 1, 1)
    for _ in range(int(refine)):
        _, th_b, zm_b = best
        w_t = (max(th_b - step_t, t_lo), min(th_b + step_t, t_hi))
        w_z = (max(zm_b - step_z, 0.0), min(zm_b + step_z, zmag_max))
        cand, touched = scan(w_t[0], w_t[1], w_z[0], w_z[1], 11)
        unbounded = unbounded or touched
        if cand[0] > best[0]:
            best = cand
        step_t *= 0.2
        step_z *= 0.2
    if not math.isfinite(best[0]):
        raise NumericalError("no evaluable grid point in the search window")
    return MaxUncertainty(
        theta=best[1],
        zmag=best[2],
        zarg=float(zarg),
        product=best[0],
        eta=float(eta),
        lam=float(lam),
        unbounded_window=unbounded,
    )


def canonical_scs_check(s: SuperState, tol: float = 1e-8) -> bool:
    """True iff both components are scalar multiples of one coherent state.

    Works on the Fock coefficients: a coherent sequence satisfies
    sqrt(m+1)*v[m+1] = alpha*v[m] for a single alpha, so each component is
    tested against its least-squares alpha and the alphas must agree across
    components.  A component with negligible norm is vacuous (the zero
    multiple); a state with both components negligible fails.
    """
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    f = to_fock(s, 1e-14)
    comps = [np.asarray(f.a_coeffs), np.asarray(f.c_coeffs[1:])]
    norms = [float(np.linalg.norm(v)) for v in comps]
    total = math.hypot(*norms)
    alphas: list[complex] = []
    for v, nv in zip(comps, norms):
        if nv <= 1e-12 * total or v.size < 2:
            continue
        shifted = np.sqrt(np.arange(1, v.size)) * v[1:]
        den = float(np.sum(np.abs(v[:-1]) ** 2))
        if den == 0.0:
            return False
        alpha = complex(np.vdot(v[:-1], shifted)) / den
        resid = float(np.linalg.norm(shifted - alpha * v[:-1])) / nv
        if resid > tol:
            return False
        alphas.append(alpha)
    if not alphas:
        return False
    ref = alphas[0]
    return all(abs(a - ref) <= tol * (1.0 + abs(ref)) for a in alphas[1:])


@dataclass(frozen=True)
class ParamGrid:
    """Classified voxel grid of (k2, k3, k4) at k1 = 1.

    tags[i, j, l] is the region name at (k2_vals[i], k3_vals[j], k4_vals[l]).
    The two stored surfaces sample, on the same (k3, k4) lattice, the level
    sets where the discriminant vanishes (degenerate) and where the
    determinant vanishes (singular), each as rows (k2, k3, k4) restricted to
    the grid's k2 range.
    """

    k2_vals: np.ndarray
    k3_vals: np.ndarray
    k4_vals: np.ndarray
    tags: np.ndarray
    degenerate_surface: np.ndarray
    singular_surface: np.ndarray

    def __post_init__(self) -> None:
        for name in ("k2_vals", "k3_vals", "k4_vals", "tags", "degenerate_surface", "singular_surface"):
            arr = getattr(self, name)
            arr.setflags(write=False)


def _axis(rng, resolution: int) -> np.ndarray:
    vals = tuple(float(x) for x in rng[:2])
    n = int(rng[2]) if len(rng) == 3 else int(resolution)
    if n < 1:
        raise ValueError("axis count must be >= 1")
    lo, hi = vals
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("axis range must be finite")
    return np.linspace(lo, hi, n)


def param_grid_classify(
    k2_range,
    k3_range,
    k4_range,
    resolution: int = 16,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> ParamGrid:
    """Classify every voxel of a (k2, k3, k4) grid with k1 fixed at 1.

    Ranges are (lo, hi) pairs, optionally (lo, hi, count) to override the
    shared ``resolution`` per axis.  Alongside the voxel tags, the level-set
    surfaces k2 = -(1-k4)**2/(4*k3) (repeated eigenvalues) and k2 = k4/k3
    (zero determinant) are sampled where they cross the k2 range.
    """
    k2_vals = _axis(k2_range, resolution)
    k3_vals = _axis(k3_range, resolution)
    k4_vals = _axis(k4_range, resolution)
    tags = np.empty((k2_vals.size, k3_vals.size, k4_vals.size), dtype="U16")
    for i, k2 in enumerate(k2_vals):
        for j, k3 in enumerate(k3_vals):
            for l, k4 in enumerate(k4_vals):
                rc = classify(KMatrix(1.0, k2, k3, k4), classify_tol)
                tags[i, j, l] = rc.tag.value
    k2_lo, k2_hi = float(np.min(k2_vals)), float(np.max(k2_vals))
    deg_pts: list[tuple[float, float, float]] = []
    sing_pts: list[tuple[float, float, float]] = []
    for k3 in k3_vals:
        if abs(k3) < 1e-12:
            continue
        for k4 in k4_vals:
            k2d = -((1.0 - k4) ** 2) / (4.0 * k3)
            if k2_lo <= k2d <= k2_hi:
                deg_pts.append((k2d, float(k3), float(k4)))
            k2s = k4 / k3
            if k2_lo <= k2s <= k2_hi:
                sing_pts.append((k2s, float(k3), float(k4)))
    deg = np.array(deg_pts, dtype=float).reshape(-1, 3)
    sing = np.array(sing_pts, dtype=float).reshape(-1, 3)
    return ParamGrid(
        k2_vals=k2_vals,
        k3_vals=k3_vals,
        k4_vals=k4_vals,
        tags=tags,
        degenerate_surface=deg,
        singular_surface=sing,
    )
