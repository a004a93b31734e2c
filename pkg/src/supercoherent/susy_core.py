"""Parameter matrix of the generalized SUSY lowering operator.

The operator family acts on two-component states of the supersymmetric
harmonic oscillator (hbar = m = 1) and is fixed by four complex constants

    A_hat = [[k1*a, k2], [k3*a**2, k4*a]],      K = [[k1, k2], [k3, k4]],

where ``a`` is the boson annihilation operator.  Everything downstream is
organized by the spectrum of K: two equal eigenvalues (degenerate region), a
vanishing determinant (singular region), or two distinct nonzero eigenvalues
(generic region, further split by whether the eigenvalue magnitudes coincide,
which controls whether mixture uncertainties stay bounded as |z| grows).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_CLASSIFY_TOL",
    "KMatrix",
    "TwoByTwo",
    "Region",
    "RegionClass",
    "Spectrum",
    "classify",
    "eigen_decompose",
    "gauge_normalize",
    "theta_operator",
]

DEFAULT_CLASSIFY_TOL = 1e-9


def _as_complex(value) -> complex:
    z = complex(value)
    if not cmath.isfinite(z):
        raise ValueError(f"entries must be finite, got {value!r}")
    return z


class Region(enum.Enum):
    """Tags for the three-parameter operator family."""

    DEGENERATE = "Degenerate"
    SINGULAR = "Singular"
    GENERIC_BOUNDED = "GenericBounded"
    GENERIC_UNBOUNDED = "GenericUnbounded"


@dataclass(frozen=True)
class KMatrix:
    """Constants of the lowering operator (row-major) plus oscillator frequency.

    Parameters
    ----------
    k1, k2, k3, k4:
        Complex entries of K.  At least one must be nonzero.
    omega:
        Oscillator frequency, a positive real.  It only enters through the
        time evolution z = z0 * exp(-i*omega*t).
    """

    k1: complex
    k2: complex
    k3: complex
    k4: complex
    omega: float = 1.0

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3", "k4"):
            object.__setattr__(self, name, _as_complex(getattr(self, name)))
        if max(abs(self.k1), abs(self.k2), abs(self.k3), abs(self.k4)) == 0.0:
            raise ValueError("null operator")
        omega = float(self.omega)
        if not (math.isfinite(omega) and omega > 0.0):
            raise ValueError(f"omega must be a positive real, got {self.omega!r}")
        object.__setattr__(self, "omega", omega)

    def entries(self) -> tuple[complex, complex, complex, complex]:
        return (self.k1, self.k2, self.k3, self.k4)

    @property
    def trace(self) -> complex:
        return self.k1 + self.k4

    @property
    def det(self) -> complex:
        return self.k1 * self.k4 - self.k2 * self.k3

    @property
    def norm(self) -> float:
        """Frobenius norm of K, scaled so it cannot underflow to zero."""
        mags = (abs(self.k1), abs(self.k2), abs(self.k3), abs(self.k4))
        peak = max(mags)
        return peak * math.sqrt(sum((m / peak) ** 2 for m in mags))

    def as_array(self) -> np.ndarray:
        return np.array([[self.k1, self.k2], [self.k3, self.k4]], dtype=complex)

    def scaled(self, s: complex) -> "KMatrix":
        s = _as_complex(s)
        return KMatrix(self.k1 * s, self.k2 * s, self.k3 * s, self.k4 * s, self.omega)


@dataclass(frozen=True)
class TwoByTwo:
    """Plain 2x2 complex matrix value (row-major)."""

    a11: complex
    a12: complex
    a21: complex
    a22: complex

    def entries(self) -> tuple[complex, complex, complex, complex]:
        return (self.a11, self.a12, self.a21, self.a22)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=complex)


@dataclass(frozen=True)
class RegionClass:
    """Outcome of the region classification.

    ``also_degenerate`` marks the nilpotent corner: a singular K whose
    repeated eigenvalue is zero.  Singular wins the tag there.
    """

    tag: Region
    discriminant: complex
    classify_tol: float
    also_degenerate: bool = False


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues chi_plus/chi_minus of K, eigenvector matrix, and region.

    Ordering convention: Re(chi_plus) >= Re(chi_minus), ties broken by
    Im(chi_plus) >= Im(chi_minus).  The eigenvector matrix columns are
    (chi - k4, k3); it is rank-deficient in the degenerate region, where the
    dedicated constructors take over.
    """

    chi_plus: complex
    chi_minus: complex
    s_matrix: TwoByTwo
    trace: complex
    det: complex
    region: RegionClass


def _eigvals(k: KMatrix) -> tuple[complex, complex]:
    half = k.trace / 2.0
    w = cmath.sqrt(half * half - k.det)
    chip, chim = half + w, half - w
    if (chip.real, chip.imag) < (chim.real, chim.imag):
        chip, chim = chim, chip
    return chip, chim


def classify(k: KMatrix, tol: float = DEFAULT_CLASSIFY_TOL) -> RegionClass:
    """Assign K to the degenerate / singular / generic regions.

    All tests are relative: the discriminant and determinant are compared
    against tol * ||K||**2 and the eigenvalue-magnitude split against
    tol * ||K||.  When both the singular and degenerate tests pass (repeated
    zero eigenvalue) the singular tag wins and ``also_degenerate`` is set.
    """
    if not (isinstance(tol, (int, float)) and tol > 0.0 and math.isfinite(tol)):
        raise ValueError(f"tol must be a positive real, got {tol!r}")
    disc = (k.k1 - k.k4) ** 2 + 4.0 * k.k2 * k.k3
    norm = k.norm
    norm2 = norm * norm
    is_singular = abs(k.det) <= tol * norm2
    is_degenerate = abs(disc) <= tol * norm2
    if is_singular:
        return RegionClass(Region.SINGULAR, disc, tol, also_degenerate=is_degenerate)
    if is_degenerate:
        return RegionClass(Region.DEGENERATE, disc, tol)
    chip, chim = _eigvals(k)
    if abs(abs(chip) - abs(chim)) <= tol * norm:
        return RegionClass(Region.GENERIC_UNBOUNDED, disc, tol)
    return RegionClass(Region.GENERIC_BOUNDED, disc, tol)


def eigen_decompose(k: KMatrix, tol: float = DEFAULT_CLASSIFY_TOL) -> Spectrum:
    """Spectral data of K: eigenvalues, eigenvector matrix, and region tag.

    The eigenvalues come from the half-trace formula
    chi = tr(K)/2 +- sqrt((tr(K)/2)**2 - det(K)) with the principal branch of
    the square root, then the ordering convention is enforced.
    """
    chip, chim = _eigvals(k)
    s = TwoByTwo(chip - k.k4, chim - k.k4, k.k3, k.k3)
    return Spectrum(chip, chim, s, k.trace, k.det, classify(k, tol))


def theta_operator(theta: float, omega: float = 1.0) -> KMatrix:
    """One-angle family K = [[1, cos(theta)], [sin(theta), 1]].

    Degenerate exactly at multiples of pi/2; generic-bounded on (0, pi/2);
    generic-unbounded on (pi/2, pi); never singular (det = 1 - sin(2*theta)/2
    stays in [1/2, 3/2]).
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    return KMatrix(1.0, math.cos(theta), math.sin(theta), 1.0, omega)


def gauge_normalize(k: KMatrix) -> tuple[KMatrix, complex]:
    """Divide K by its largest-magnitude entry; return (normalized, scale).

    Ties pick the first maximal entry in (k1, k2, k3, k4) order, so the result
    is deterministic.  The scale is the complex entry itself, which makes the
    chosen slot exactly 1.
    """
    entries = k.entries()
    idx = int(np.argmax([abs(e) for e in entries]))
    scale = entries[idx]
    normalized = KMatrix(
        k.k1 / scale, k.k2 / scale, k.k3 / scale, k.k4 / scale, k.omega
    )
    return normalized, scale
