"""Supercoherent states of the SUSY oscillator and the Fock-space machinery.

A supercoherent state is a two-component eigenstate of the lowering operator,
A_hat |Z> = z |Z| with z = z0 * exp(-i*omega*t).  States are kept symbolically
as weighted sums of coherent kets ``|b>`` and derivative kets ``a+|b>`` per
component; the constructors below build the closed forms for each region of
parameter space.  ``to_fock`` expands a symbolic state into truncated
energy-basis coefficients with a certified tail bound, ``fock_solve`` builds
the same coefficients directly from the level-by-level lowering conditions
without ever touching the closed forms (so the two routes check each other),
and ``apply_sao`` applies the lowering operator exactly in the truncated
basis.

Component conventions: the upper (bosonic) component is sum_n a_n |n> and the
lower (fermionic) component is sum_{n>=1} c_n |n-1>; both coefficients evolve
as exp(-i*n*omega*t) because the lower level |n-1> sits at energy n*omega.
A coherent term (w, b) in the lower component therefore means the ordinary
boson-space vector w*|b> expanded over |m> with m = n-1.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import (
    NoEigenstateError,
    RegionError,
    TruncationOverflowError,
)
from .susy_core import (
    DEFAULT_CLASSIFY_TOL,
    KMatrix,
    Region,
    Spectrum,
    eigen_decompose,
)

__all__ = [
    "DEFAULT_N_CAP",
    "ENV_N_CAP",
    "CoherentTerm",
    "SuperState",
    "FockExpansion",
    "apply_sao",
    "degenerate_basis",
    "degenerate_mus",
    "eigen_residual",
    "fock_solve",
    "generic_basis",
    "generic_mus_basis",
    "mixed_state",
    "singular_state",
    "to_fock",
]

DEFAULT_N_CAP = 200
ENV_N_CAP = "SUPERCOHERENT_NMAX"

# Relative threshold below which an entry of K counts as structurally zero
# when choosing between equivalent construction branches.
_TINY = 1e-13


def _truncation_cap() -> int:
    raw = os.environ.get(ENV_N_CAP)
    if raw is None:
        return DEFAULT_N_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_N_CAP} must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise ValueError(f"{ENV_N_CAP} must be >= 2, got {cap}")
    return cap


@dataclass(frozen=True)
class CoherentTerm:
    """One weighted ket in a component: ``weight * |beta>``.

    With ``derivative=True`` the ket is ``a+|beta>``, whose Fock coefficients
    are n * beta**(n-1) / sqrt(n!).
    """

    weight: complex
    beta: complex
    derivative: bool = False

    def __post_init__(self) -> None:
        w = complex(self.weight)
        b = complex(self.beta)
        if not (cmath.isfinite(w) and cmath.isfinite(b)):
            raise ValueError("coherent term entries must be finite")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "derivative", bool(self.derivative))


def _prune(terms) -> tuple[CoherentTerm, ...]:
    return tuple(t for t in terms if t.weight != 0.0)


@dataclass(frozen=True)
class SuperState:
    """Symbolic two-component state: tuples of coherent terms per component.

    States are unnormalized.  ``z0`` is the eigenvalue at t = 0; the evolved
    state is an eigenstate of the lowering operator with eigenvalue
    ``z = z0 * exp(-i*omega*t)``, and every stored beta is derived from that
    z, so evolving in t is the same as rotating z0.
    """

    upper: tuple[CoherentTerm, ...]
    lower: tuple[CoherentTerm, ...]
    z0: complex
    t: float
    omega: float
    k: KMatrix
    label: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))
        object.__setattr__(self, "z0", complex(self.z0))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "omega", float(self.omega))
        if not (self.upper or self.lower):
            raise ValueError("state has no nonzero terms")

    @property
    def z(self) -> complex:
        """Evaluated eigenvalue z0 * exp(-i*omega*t)."""
        return self.z0 * cmath.exp(-1j * self.omega * self.t)

    def max_beta_sq(self) -> float:
        vals = [abs(t.beta) ** 2 for t in self.upper + self.lower]
        return max(vals) if vals else 0.0


@dataclass(frozen=True)
class FockExpansion:
    """Truncated energy-basis coefficients of a two-component state.

    ``a_coeffs[n]`` multiplies |n> in the upper component for n = 0..n_trunc;
    ``c_coeffs[n]`` multiplies |n-1> in the lower component for n = 1..n_trunc
    (slot 0 is kept and fixed at zero so indices match the level number).
    ``trunc_err`` bounds the squared norm that the truncation discarded.
    ``c1_overridden`` flags that a singular-region solve ignored the supplied
    free parameter c1 and derived it instead.
    """

    a_coeffs: np.ndarray
    c_coeffs: np.ndarray
    n_trunc: int
    trunc_err: float
    c1_overridden: bool = False

    def __post_init__(self) -> None:
        a = np.array(self.a_coeffs, dtype=complex)
        c = np.array(self.c_coeffs, dtype=complex)
        n = int(self.n_trunc)
        if n < 0 or a.shape != (n + 1,) or c.shape != (n + 1,):
            raise ValueError("coefficient arrays must both have length n_trunc + 1")
        if c[0] != 0.0:
            raise ValueError("c_coeffs[0] is not a state coefficient and must stay 0")
        if not (np.all(np.isfinite(a.view(float))) and np.all(np.isfinite(c.view(float)))):
            raise ValueError("coefficients must be finite")
        a.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "a_coeffs", a)
        object.__setattr__(self, "c_coeffs", c)
        object.__setattr__(self, "n_trunc", n)
        object.__setattr__(self, "trunc_err", float(self.trunc_err))
        object.__setattr__(self, "c1_overridden", bool(self.c1_overridden))

    def norm(self) -> float:
        return math.sqrt(
            float(np.sum(np.abs(self.a_coeffs) ** 2) + np.sum(np.abs(self.c_coeffs) ** 2))
        )


# ---------------------------------------------------------------------------
# coefficient sequences and tail bounds


def _coherent_seq(beta: complex, n: int) -> np.ndarray:
    """Coefficients beta**m / sqrt(m!) for m = 0..n, built multiplicatively."""
    out = np.empty(n + 1, dtype=complex)
    out[0] = 1.0
    for m in range(1, n + 1):
        out[m] = out[m - 1] * beta / math.sqrt(m)
    return out


def _deriv_seq(beta: complex, n: int) -> np.ndarray:
    """Coefficients m * beta**(m-1) / sqrt(m!) of a+|beta> for m = 0..n."""
    plain = _coherent_seq(beta, max(n - 1, 0))
    out = np.zeros(n + 1, dtype=complex)
    for m in range(1, n + 1):
        out[m] = math.sqrt(m) * plain[m - 1]
    return out


def _log_tail_plain(x: float, n: np.ndarray) -> np.ndarray:
    """log of sum_{m>n} x**m / m!  (elementwise over the n array)."""
    if x <= 0.0:
        return np.full(np.shape(n), -np.inf)
    with np.errstate(divide="ignore"):
        return x + np.log(special.gammainc(np.asarray(n, dtype=float) + 1.0, x))


def _log_tail_deriv(x: float, n: np.ndarray) -> np.ndarray:
    """log of sum_{m>n} m**2 x**(m-1) / m!  =  log(x*T(n-2) + T(n-1))."""
    if x <= 0.0:
        return np.full(np.shape(n), -np.inf)
    n = np.asarray(n, dtype=float)
    return np.logaddexp(math.log(x) + _log_tail_plain(x, n - 2.0), _log_tail_plain(x, n - 1.0))


def _choose_truncation(
    terms: list[tuple[CoherentTerm, int]], tol: float, n_cap: int, n_min: int
) -> tuple[int, float]:
    """Smallest n with discarded squared norm certified below tol.

    ``terms`` pairs each CoherentTerm with its level offset: 0 for the upper
    component, 1 for the lower (whose c_n coefficient sits on level |n-1|, so
    truncating at n keeps one fewer term of its coherent series).  The bound
    is (sum_i |w_i| sqrt(tail_i))**2: triangle inequality on the term sum, so
    it holds for arbitrary mixtures of plain and derivative kets.
    """
    lo = max(2, n_min)
    if lo > n_cap:
        raise ValueError("n_min exceeds the truncation cap")
    if not terms:
        return lo, 0.0
    ns = np.arange(lo, n_cap + 1, dtype=float)
    log_amps = []
    for t, offset in terms:
        x = abs(t.beta) ** 2
        shifted = ns - float(offset)
        lt = _log_tail_deriv(x, shifted) if t.derivative else _log_tail_plain(x, shifted)
        w = abs(t.weight)
        log_amps.append((math.log(w) if w > 0 else -np.inf) + 0.5 * lt)
    stacked = np.stack(log_amps)
    peak = np.max(stacked, axis=0)
    with np.errstate(invalid="ignore"):
        log_bound = 2.0 * (peak + np.log(np.sum(np.exp(stacked - peak), axis=0)))
    log_bound = np.where(np.isneginf(peak), -np.inf, log_bound)
    ok = np.flatnonzero(log_bound <= math.log(tol))
    if ok.size == 0:
        raise TruncationOverflowError("truncation overflow; reduce |z0|")
    idx = int(ok[0])
    err = float(np.exp(log_bound[idx])) if np.isfinite(log_bound[idx]) else 0.0
    return int(ns[idx]), err


def to_fock(
    s: SuperState,
    tol: float = 1e-14,
    *,
    n_min: int = 2,
    n_cap: int | None = None,
) -> FockExpansion:
    """Expand a symbolic state into truncated Fock coefficients.

    The truncation order is the smallest n whose certified tail bound falls
    below ``tol``; it is capped at ``n_cap`` (default 200, overridable via the
    SUPERCOHERENT_NMAX environment variable), beyond which the expansion
    refuses with a truncation-overflow error.  ``n_min`` forces a floor on the
    order, which is useful when comparing coefficient ranges across states.
    """
    if not (tol > 0.0 and math.isfinite(tol)):
        raise ValueError(f"tol must be a positive real, got {tol!r}")
    cap = _truncation_cap() if n_cap is None else int(n_cap)
    if cap < 2:
        raise ValueError("n_cap must be >= 2")
    terms = [(t, 0) for t in s.upper] + [(t, 1) for t in s.lower]
    n, err = _choose_truncation(terms, tol, cap, n_min)
    a = np.zeros(n + 1, dtype=complex)
    c = np.zeros(n + 1, dtype=complex)
    for t in s.upper:
        seq = _deriv_seq(t.beta, n) if t.derivative else _coherent_seq(t.beta, n)
        a += t.weight * seq
    for t in s.lower:
        seq = _deriv_seq(t.beta, n - 1) if t.derivative else _coherent_seq(t.beta, n - 1)
        c[1:] += t.weight * seq
    return FockExpansion(a, c, n, err)


# ---------------------------------------------------------------------------
# level-by-level solver (the oracle route)


def _nonsingular_chain(
    k: KMatrix, z0: complex, a0: complex, c1: complex, n: int
) -> tuple[np.ndarray, np.ndarray]:
    k1, k2, k3, k4 = k.entries()
    scale = k.norm
    a = np.zeros(n + 1, dtype=complex)
    c = np.zeros(n + 1, dtype=complex)
    a[0] = a0
    if abs(k1) <= _TINY * scale:
        # level 0 reads k2*c1 = z0*a0: a constraint, not an equation for a_1.
        # The minimum-norm continuation sets a_1 = 0.
        resid = abs(k2 * c1 - z0 * a0)
        if resid > 1e-10 * scale * max(1.0, abs(z0)) * max(1.0, abs(a0), abs(c1)):
            raise NoEigenstateError("no eigenstate with these free parameters")
        c[1] = c1
    else:
        a[1] = (z0 * a0 - k2 * c1) / k1
        c[1] = c1
    for m in range(1, n):
        rp = math.sqrt(m + 1.0)
        r = math.sqrt(m)
        m11 = k1 * rp
        m12 = k2
        m21 = k3 * r * rp
        m22 = k4 * r
        det = m11 * m22 - m12 * m21  # = sqrt(m(m+1)) * det(K), nonzero here
        rhs1 = z0 * a[m]
        rhs2 = z0 * c[m]
        a[m + 1] = (rhs1 * m22 - m12 * rhs2) / det
        c[m + 1] = (m11 * rhs2 - m21 * rhs1) / det
    return a, c


def _lookahead_row(k: KMatrix, step_idx: int) -> np.ndarray | None:
    """Row w with w.(a_m, c_m) = 0 forced by solvability of step ``step_idx``.

    The step-m system M_m (a_{m+1}, c_{m+1}) = z0 (a_m, c_m) is solvable for
    singular K only when the right side lies in range(M_m), whose orthogonal
    complement is spanned by (k3*sqrt(m), -k1) (parallel to (k4*sqrt(m), -k2)
    because det(K) = 0); the larger of the two is returned, normalized, or
    None when both vanish.
    """
    k1, k2, k3, k4 = k.entries()
    s = math.sqrt(step_idx)
    row_a = np.array([k3 * s, -k1], dtype=complex)
    row_b = np.array([k4 * s, -k2], dtype=complex)
    na, nb = np.linalg.norm(row_a), np.linalg.norm(row_b)
    row, nr = (row_a, na) if na >= nb else (row_b, nb)
    if nr == 0.0:
        return None
    return row / nr


def _singular_chain(
    k: KMatrix, z0: complex, a0: complex, c1_in: complex, n: int, classify_tol: float
) -> tuple[np.ndarray, np.ndarray, bool]:
    k1, k2, k3, k4 = k.entries()
    scale = k.norm
    tr = k.trace
    a = np.zeros(n + 1, dtype=complex)
    c = np.zeros(n + 1, dtype=complex)
    a[0] = a0
    overridden = False

    if abs(tr) <= classify_tol * scale:
        # Nilpotent K: eigenstates exist only at z0 = 0 and have finite support.
        if abs(z0) > 0.0:
            raise NoEigenstateError("no eigenstate with these free parameters")
        if abs(k1) > _TINY * scale:
            a[1] = -(k2 * c1_in) / k1
            c[1] = c1_in
        elif abs(k2) > _TINY * scale:
            if abs(c1_in) > 0.0:
                raise NoEigenstateError("no eigenstate with these free parameters")
        else:
            c[1] = c1_in
        return a, c, overridden

    if max(abs(k1), abs(k2)) <= _TINY * scale:
        # Upper row of K vanishes: the family is pure lower component and the
        # free parameter is c1; level 0 demands z0*a0 = 0.
        if abs(z0) * abs(a0) > 1e-10 * scale * max(1.0, abs(z0)):
            raise NoEigenstateError("no eigenstate with these free parameters")
        c[1] = c1_in
    else:
        # Level 0 plus the solvability constraint of step 1 pin (a1, c1).
        # The constraint row is chosen so the combined determinant is
        # -k1*(k1+k4) resp. -k2*(k1+k4), maximal for the larger of k1, k2.
        if abs(k1) >= abs(k2):
            row = (k3, -k1)
        else:
            row = (k4, -k2)
        det = k1 * row[1] - k2 * row[0]
        a[1] = z0 * a0 * row[1] / det
        c[1] = -row[0] * z0 * a0 / det
        overridden = True

    for m in range(1, n):
        rp = math.sqrt(m + 1.0)
        r = math.sqrt(m)
        step = np.array(
            [[k1 * rp, k2], [k3 * r * rp, k4 * r]], dtype=complex
        )
        rhs2 = np.array([z0 * a[m], z0 * c[m]], dtype=complex)
        rows = [step]
        rhs_rows = [rhs2]
        if abs(z0) > 0.0:
            row = _lookahead_row(k, m + 1)
            if row is not None:
                rows.append(row[None, :] * np.linalg.norm(step))
                rhs_rows.append(np.zeros(1, dtype=complex))
        mat = np.vstack(rows)
        rhs = np.concatenate(rhs_rows)
        sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        resid = np.linalg.norm(step @ sol - rhs2)
        tol_resid = 1e-9 * (
            np.linalg.norm(step) * np.linalg.norm(sol) + np.linalg.norm(rhs2) + _TINY * scale
        )
        if resid > tol_resid:
            raise NoEigenstateError("no eigenstate with these free parameters")
        a[m + 1], c[m + 1] = sol
    return a, c, overridden


def fock_solve(
    k: KMatrix,
    z0: complex,
    a0: complex = 1.0,
    c1: complex = 0.0,
    t: float = 0.0,
    n: int = 64,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> FockExpansion:
    """Solve the lowering conditions level by level up to truncation n.

    The two free parameters of the eigenvalue problem are a0 (upper |0>
    coefficient) and c1 (lower |0> coefficient); every higher level follows
    from the 2x2 step system

        k1*sqrt(m+1)*a_{m+1} + k2*c_{m+1}            = z0*a_m
        k3*sqrt(m(m+1))*a_{m+1} + k4*sqrt(m)*c_{m+1} = z0*c_m.

    Away from the singular region the steps are uniquely solvable.  For
    singular K the step matrices are rank one and the solution family is one
    dimensional: the supplied c1 is ignored, derived from a0 instead, and the
    result is flagged through ``c1_overridden``.  Inconsistent singular steps
    raise an error rather than silently projecting.

    This routine deliberately never consults the closed-form constructors; it
    is the independent check on them.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    z0 = complex(z0)
    a0 = complex(a0)
    c1 = complex(c1)
    spec = eigen_decompose(k, classify_tol)
    overridden = False
    if spec.region.tag is Region.SINGULAR:
        a, c, overridden = _singular_chain(k, z0, a0, c1, n, classify_tol)
    else:
        a, c = _nonsingular_chain(k, z0, a0, c1, n)

    if t != 0.0:
        phases = np.exp(-1j * k.omega * float(t) * np.arange(n + 1))
        a = a * phases
        c = c * phases

    trunc = _solver_tail_estimate(spec, z0, a, c, n, k.norm, classify_tol)
    return FockExpansion(a, c, n, trunc, c1_overridden=overridden)


def _solver_tail_estimate(
    spec: Spectrum,
    z0: complex,
    a: np.ndarray,
    c: np.ndarray,
    n: int,
    k_norm: float,
    classify_tol: float,
) -> float:
    """Geometric-decay estimate of the discarded norm of a solver chain.

    Uses the largest coherent amplitude |z0| / min|chi| the solution can
    contain.  This is an estimate, not the certified bound ``to_fock``
    computes; comparisons that need a certified tail go through ``to_fock``.
    """
    if spec.region.tag is Region.SINGULAR:
        if abs(spec.trace) <= classify_tol * k_norm:
            return 0.0  # nilpotent chains terminate
        bmax = abs(z0 / spec.trace)
    else:
        low = min(abs(spec.chi_plus), abs(spec.chi_minus))
        if low == 0.0:
            return math.inf
        bmax = abs(z0) / low
    q = bmax * bmax / (n + 1.0)
    if q >= 1.0:
        return math.inf
    head = float(abs(a[n]) ** 2 + abs(c[n]) ** 2)
    return head * q / (1.0 - q)


# ---------------------------------------------------------------------------
# closed-form constructors


def _require(spec: Spectrum, allowed: tuple[Region, ...]) -> None:
    if spec.region.tag not in allowed:
        raise RegionError("wrong region")


def generic_basis(
    k: KMatrix,
    z0: complex,
    t: float = 0.0,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> tuple[SuperState, SuperState]:
    """Spanning pair (Z_A, Z_C) of the generic two-dimensional eigenspace.

    Both members are combinations of the two coherent rays |z/chi_plus> and
    |z/chi_minus> with weights built from the eigenvalues; the pair is
    symmetric under relabeling chi_plus <-> chi_minus, so it is insensitive to
    the eigenvalue ordering.  Leading coefficients: Z_A has (a0, c1) = (k1, 0)
    and Z_C has (a0, c1) = (0, k1*z).
    """
    z0 = complex(z0)
    spec = eigen_decompose(k, classify_tol)
    _require(spec, (Region.GENERIC_BOUNDED, Region.GENERIC_UNBOUNDED))
    k1, k2, k3, k4 = k.entries()
    z = z0 * cmath.exp(-1j * k.omega * float(t))
    chip, chim = spec.chi_plus, spec.chi_minus
    dchi = chip - chim
    bp, bm = z / chip, z / chim
    za = SuperState(
        upper=_prune(
            [
                CoherentTerm(chip * (chip - k4) / dchi, bp),
                CoherentTerm(-chim * (chim - k4) / dchi, bm),
            ]
        ),
        lower=_prune(
            [CoherentTerm(k3 * z / dchi, bp), CoherentTerm(-k3 * z / dchi, bm)]
        ),
        z0=z0,
        t=t,
        omega=k.omega,
        k=k,
        label="ZA",
    )
    aconst = k1 * k1 + k2 * k3
    zc = SuperState(
        upper=_prune(
            [
                CoherentTerm(chip * chim * k2 / dchi, bp),
                CoherentTerm(-chip * chim * k2 / dchi, bm),
            ]
        ),
        lower=_prune(
            [
                CoherentTerm(z * (chip * k1 - aconst) / dchi, bp),
                CoherentTerm(-z * (chim * k1 - aconst) / dchi, bm),
            ]
        ),
        z0=z0,
        t=t,
        omega=k.omega,
        k=k,
        label="ZC",
    )
    return za, zc


def _canonical_ray(
    k: KMatrix, chi: complex, z: complex
) -> tuple[complex, complex]:
    """Component weights (u, v) with (u|b>, v|b>) an eigenstate, b = z/chi.

    Null ray of [[k1*b - z, k2], [k3*b**2, k4*b - z]]; the determinant of that
    matrix vanishes identically because b solves the characteristic condition.
    """
    k1, k2, k3, k4 = k.entries()
    b = z / chi
    row1 = (k1 * b - z, k2)
    row2 = (k3 * b * b, k4 * b - z)
    n1 = abs(row1[0]) + abs(row1[1])
    n2 = abs(row2[0]) + abs(row2[1])
    floor = _TINY * k.norm * (1.0 + abs(b)) ** 2
    if max(n1, n2) <= floor:
        # Both rows vanish (k2 ~ 0 with z ~ 0, or scalar K): the limit rays
        # attach the upper slot to the k1-eigenvalue and the lower to k4's.
        return (1.0, 0.0) if abs(chi - k1) <= abs(chi - k4) else (0.0, 1.0)
    row = row1 if n1 >= n2 else row2
    return row[1], -row[0]


def generic_mus_basis(
    k: KMatrix,
    z0: complex,
    t: float = 0.0,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> tuple[SuperState, SuperState]:
    """Canonical basis (Z_plus, Z_minus): single-coherent-ray eigenstates.

    Z_pm = (k2*chi_pm |b_pm>, (chi_pm - k1)*z |b_pm>) with b_pm = z/chi_pm.
    Both components ride one coherent state, so each member saturates the
    uncertainty product at exactly 1/4 for every z and t.  If the standard
    weights collapse to zero (k2 = 0 with chi = k1) the same ray is recovered
    from the eigenvector condition directly.
    """
    z0 = complex(z0)
    spec = eigen_decompose(k, classify_tol)
    _require(spec, (Region.GENERIC_BOUNDED, Region.GENERIC_UNBOUNDED))
    k1, k2, _, _ = k.entries()
    z = z0 * cmath.exp(-1j * k.omega * float(t))
    out = []
    for chi, label in ((spec.chi_plus, "Zplus"), (spec.chi_minus, "Zminus")):
        b = z / chi
        w_up = k2 * chi
        w_low = (chi - k1) * z
        if max(abs(w_up), abs(w_low)) <= _TINY * k.norm * (1.0 + abs(z)):
            w_up, w_low = _canonical_ray(k, chi, z)
        out.append(
            SuperState(
                upper=_prune([CoherentTerm(w_up, b)]),
                lower=_prune([CoherentTerm(w_low, b)]),
                z0=z0,
                t=t,
                omega=k.omega,
                k=k,
                label=label,
            )
        )
    return out[0], out[1]


def _degenerate_spec(k: KMatrix, classify_tol: float) -> tuple[Spectrum, complex]:
    spec = eigen_decompose(k, classify_tol)
    if spec.region.tag is Region.SINGULAR and spec.region.also_degenerate:
        raise RegionError("nilpotent K: only finite Fock solutions; use fock_solve")
    _require(spec, (Region.DEGENERATE,))
    chi = spec.trace / 2.0
    if abs(chi) <= classify_tol * k.norm:
        raise RegionError("nilpotent K: only finite Fock solutions; use fock_solve")
    return spec, chi


def degenerate_basis(
    k: KMatrix,
    z0: complex,
    t: float = 0.0,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> tuple[SuperState, SuperState]:
    """Basis (Z_A^d, Z_C^d) at a doubly degenerate eigenvalue chi.

    Obtained as the coalescence limit of the generic basis: each weight
    g(chi_pm)/(chi_plus - chi_minus) difference turns into the derivative pair

        g'(chi) |b>  -  g(chi) * b/chi * a+|b>,      b = z/chi.

    The weights are evaluated from that derivative rule (with g read off the
    generic numerators), not from a fixed table, so they stay consistent with
    the generic forms as the discriminant shrinks.
    """
    z0 = complex(z0)
    spec, chi = _degenerate_spec(k, classify_tol)
    k1, k2, k3, k4 = k.entries()
    z = z0 * cmath.exp(-1j * k.omega * float(t))
    b = z / chi
    # g-functions of the generic numerators and their chi-derivatives.
    g_a1 = chi * chi - k4 * chi
    dg_a1 = 2.0 * chi - k4
    g_a2 = k3 * z
    dg_a2 = 0.0
    g_c1 = chi * chi * k2
    dg_c1 = 0.0
    aconst = k1 * k1 + k2 * k3
    g_c2 = z * (chi * k1 - aconst)
    dg_c2 = z * k1
    zad = SuperState(
        upper=_prune(
            [CoherentTerm(dg_a1, b), CoherentTerm(-g_a1 * b / chi, b, derivative=True)]
        ),
        lower=_prune(
            [CoherentTerm(dg_a2, b), CoherentTerm(-g_a2 * b / chi, b, derivative=True)]
        ),
        z0=z0,
        t=t,
        omega=k.omega,
        k=k,
        label="ZAd",
    )
    zcd = SuperState(
        upper=_prune(
            [CoherentTerm(dg_c1, b), CoherentTerm(-g_c1 * b / chi, b, derivative=True)]
        ),
        lower=_prune(
            [CoherentTerm(dg_c2, b), CoherentTerm(-g_c2 * b / chi, b, derivative=True)]
        ),
        z0=z0,
        t=t,
        omega=k.omega,
        k=k,
        label="ZCd",
    )
    return zad, zcd


def degenerate_mus(
    k: KMatrix,
    z0: complex,
    t: float = 0.0,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> SuperState:
    """The canonical member of the degenerate eigenspace.

    Standard weights (-k1*k2*chi, k1*(k1**2 - k4**2)/4 * b) on the single ray
    |b>, b = z/chi.  When those collapse to the zero vector (k1 or k2
    structurally zero) the same ray is recovered from the eigenvector
    condition.  Saturates the uncertainty product at 1/4.
    """
    z0 = complex(z0)
    spec, chi = _degenerate_spec(k, classify_tol)
    k1, k2, _, k4 = k.entries()
    z = z0 * cmath.exp(-1j * k.omega * float(t))
    b = z / chi
    w_up = -k1 * k2 * chi
    w_low = k1 * (k1 * k1 - k4 * k4) / 4.0 * b
    if max(abs(w_up), abs(w_low)) <= _TINY * k.norm ** 2 * (1.0 + abs(b)):
        w_up, w_low = _canonical_ray(k, chi, z)
    return SuperState(
        upper=_prune([CoherentTerm(w_up, b)]),
        lower=_prune([CoherentTerm(w_low, b)]),
        z0=z0,
        t=t,
        omega=k.omega,
        k=k,
        label="ZMUSd",
    )


def singular_state(
    k: KMatrix,
    z0: complex,
    t: float = 0.0,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> SuperState:
    """The unique (up to scale) eigenstate ray for singular K.

    Z_s = (k2 |b>, k4*b |b>) with b = z/(k1 + k4); when the right column of K
    vanishes the equivalent form (k1 |b>, k3*b |b>) is used.  Both components
    ride one coherent state, so the uncertainty product is exactly 1/4.
    """
    z0 = complex(z0)
    spec = eigen_decompose(k, classify_tol)
    _require(spec, (Region.SINGULAR,))
    k1, k2, k3, k4 = k.entries()
    if abs(k.trace) <= classify_tol * k.norm:
        raise NoEigenstateError("nilpotent K: only finite Fock solutions; use fock_solve")
    z = z0 * cmath.exp(-1j * k.omega * float(t))
    b = z / k.trace
    if max(abs(k2), abs(k4)) <= _TINY * k.norm:
        w_up, w_low = k1, k3 * b
    else:
        w_up, w_low = k2, k4 * b
    if max(abs(w_up), abs(w_low)) <= _TINY * k.norm * (1.0 + abs(b)):
        # Both weights collapse (upper row of K zero with z = 0): the limit of
        # the ray direction as z -> 0 is the lower-component vacuum.
        w_up, w_low = 0.0, 1.0
    return SuperState(
        upper=_prune([CoherentTerm(w_up, b)]),
        lower=_prune([CoherentTerm(w_low, b)]),
        z0=z0,
        t=t,
        omega=k.omega,
        k=k,
        label="Zs",
    )


def mixed_state(
    k: KMatrix,
    z0: complex,
    t: float = 0.0,
    eta: float = 0.0,
    lam: float = 0.0,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> SuperState:
    """Two-parameter mixture cos(eta)*Z_plus + exp(i*lam)*sin(eta)*Z_minus.

    Term weights (z factors included):

        upper: k2*chi_plus*cos(eta),        k2*chi_minus*exp(i*lam)*sin(eta)
        lower: (chi_plus - k1)*z*cos(eta),  (chi_minus - k1)*z*exp(i*lam)*sin(eta)

    eta = 0 reduces to Z_plus; eta = pi/2, lam = 0 to Z_minus.  Mixtures are
    the states whose uncertainties can grow without bound when the eigenvalue
    magnitudes coincide.
    """
    z0 = complex(z0)
    spec = eigen_decompose(k, classify_tol)
    _require(spec, (Region.GENERIC_BOUNDED, Region.GENERIC_UNBOUNDED))
    k1, k2, _, _ = k.entries()
    eta = float(eta)
    lam = float(lam)
    z = z0 * cmath.exp(-1j * k.omega * float(t))
    chip, chim = spec.chi_plus, spec.chi_minus
    cp = math.cos(eta)
    sm = cmath.exp(1j * lam) * math.sin(eta)
    rays = []
    for chi, mix in ((chip, cp), (chim, sm)):
        w_up = k2 * chi
        w_low = (chi - k1) * z
        if max(abs(w_up), abs(w_low)) <= _TINY * k.norm * (1.0 + abs(z)):
            # Same fallback as the canonical basis: k2 ~ 0 kills the printed
            # weights, recover the ray from the eigenvector condition.
            w_up, w_low = _canonical_ray(k, chi, z)
        rays.append((mix * w_up, mix * w_low, z / chi))
    return SuperState(
        upper=_prune([CoherentTerm(w, b) for w, _, b in rays]),
        lower=_prune([CoherentTerm(w, b) for _, w, b in rays]),
        z0=z0,
        t=t,
        omega=k.omega,
        k=k,
        label="Mixed",
    )


# ---------------------------------------------------------------------------
# operator application and residuals


def apply_sao(k: KMatrix, f: FockExpansion) -> FockExpansion:
    """Apply the lowering operator to truncated coefficients, exactly.

    The a**2 entry consumes two levels, so the output is reported at
    truncation n - 2; within that window the application is exact for input
    that is itself truncated.
    """
    n = f.n_trunc
    if n < 2:
        raise ValueError("need truncation >= 2 to apply the operator")
    k1, k2, k3, k4 = k.entries()
    m_out = n - 2
    a, c = f.a_coeffs, f.c_coeffs
    m = np.arange(0, m_out + 1)
    out_a = k1 * np.sqrt(m + 1.0) * a[m + 1] + k2 * c[m + 1]
    out_c = np.zeros(m_out + 1, dtype=complex)
    mi = np.arange(1, m_out + 1)
    out_c[1:] = k3 * np.sqrt(mi * (mi + 1.0)) * a[mi + 1] + k4 * np.sqrt(mi) * c[mi + 1]
    # Crude but finite propagation of the input tail bound.
    trunc = f.trunc_err * (k.norm ** 2) * (n + 1.0) * (n + 2.0)
    return FockExpansion(out_a, out_c, m_out, trunc, c1_overridden=f.c1_overridden)


def eigen_residual(s: SuperState, tol: float = 1e-14, *, n_cap: int | None = None) -> float:
    """Relative eigenvalue residual ||A_hat F - z F|| / ||F|| on the window n-2.

    F is the truncated expansion of s at tail tolerance ``tol`` and z its
    evaluated eigenvalue.  Small residual certifies that the symbolic state
    solves the lowering conditions.
    """
    f = to_fock(s, tol, n_cap=n_cap)
    g = apply_sao(s.k, f)
    z = s.z
    m = g.n_trunc
    da = g.a_coeffs - z * f.a_coeffs[: m + 1]
    dc = g.c_coeffs - z * f.c_coeffs[: m + 1]
    num = math.sqrt(float(np.sum(np.abs(da) ** 2) + np.sum(np.abs(dc) ** 2)))
    den = f.norm()
    if den == 0.0:
        return 0.0
    return num / den
