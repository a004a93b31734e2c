"""Position and momentum statistics of supercoherent states.

Quadratures (hbar = m = 1):

    xi = (a+ + a) / sqrt(2),    mu = i*(a+ - a) / sqrt(2).

Expectations are taken in the full two-component inner product; each
component contributes a diagonal block and the cross blocks vanish.  Every
bracket between coherent and derivative kets reduces to a polynomial times
exp(conj(alpha1)*alpha2), so the five needed operator kernels are closed
forms.  Pairwise sums over state terms are evaluated with a shared
exponential shift: |z| of order 100 stays inside double range.

``asymptotic_variances`` evaluates the large-|z| limit of the mixture
variances used in divergence-rate analysis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NumericalError, RegionError, ZeroNormError
from .states import CoherentTerm, SuperState
from .susy_core import DEFAULT_CLASSIFY_TOL, KMatrix, eigen_decompose

__all__ = [
    "OVERLAP",
    "XI",
    "XI2",
    "MU",
    "MU2",
    "Moment",
    "UncertaintyReport",
    "AsymptoticParams",
    "coherent_overlap",
    "coherent_moment",
    "braket_derivative",
    "expectation",
    "uncertainty",
    "asymptotic_params",
    "asymptotic_variances",
]

OVERLAP = "overlap"
XI = "xi"
XI2 = "xi2"
MU = "mu"
MU2 = "mu2"

# Imaginary-part leakage tolerated when realizing a Hermitian expectation.
_REALNESS_TOL = 1e-8


@dataclass(frozen=True)
class Moment:
    """A labeled bracket value: which quadrature kernel, and its number."""

    kind: str
    value: complex

    KINDS = (OVERLAP, XI, XI2, MU, MU2)

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown moment kind {self.kind!r}")
        object.__setattr__(self, "value", complex(self.value))


def _poly(kind: str, u: complex, v: complex) -> tuple[complex, complex, complex, complex]:
    """(F, dF/du, dF/dv, d2F/dudv) with <bra|op|ket> = F * exp(u*v).

    u = conj(alpha_bra), v = alpha_ket.  Each F is polynomial in u and v, so
    the derivatives are exact; they feed the derivative-ket reductions.
    """
    r = math.sqrt(0.5)
    if kind == OVERLAP:
        return 1.0, 0.0, 0.0, 0.0
    if kind == XI:
        return (u + v) * r, r, r, 0.0
    if kind == XI2:
        s = u + v
        return (s * s + 1.0) * 0.5, s, s, 1.0
    if kind == MU:
        d = v - u
        return -1j * d * r, 1j * r, -1j * r, 0.0
    if kind == MU2:
        d = v - u
        return (1.0 - d * d) * 0.5, d, -d, 1.0
    raise ValueError(f"unknown moment kind {kind!r}")


def coherent_overlap(alpha1: complex, alpha2: complex) -> complex:
    """<alpha1|alpha2> = exp(conj(alpha1)*alpha2), unnormalized kets."""
    return cmath.exp(complex(alpha1).conjugate() * complex(alpha2))


def coherent_moment(alpha1: complex, alpha2: complex, kind: str) -> complex:
    """<alpha1| op |alpha2> for op in {1, xi, xi**2, mu, mu**2}."""
    u = complex(alpha1).conjugate()
    v = complex(alpha2)
    f, _, _, _ = _poly(kind, u, v)
    return f * cmath.exp(u * v)


def braket_derivative(
    alpha1: complex, alpha2: complex, d1: bool, d2: bool, kind: str
) -> complex:
    """Bracket with either side optionally the derivative ket a+|alpha>.

    The derivative ket's coefficients are the alpha-derivatives of the
    coherent ones, so

        <a+ a1| op |a2>    = (dF/du + v*F) * exp(u*v)
        <a1| op |a+ a2>    = (dF/dv + u*F) * exp(u*v)
        <a+ a1| op |a+ a2> = (d2F/dudv + u*dF/du + v*dF/dv + (1+u*v)*F) * e.
    """
    u = complex(alpha1).conjugate()
    v = complex(alpha2)
    f, fu, fv, fuv = _poly(kind, u, v)
    if d1 and d2:
        poly = fuv + u * fu + v * fv + (1.0 + u * v) * f
    elif d1:
        poly = fu + v * f
    elif d2:
        poly = fv + u * f
    else:
        poly = f
    return poly * cmath.exp(u * v)


def _pair(kind: str, bra: CoherentTerm, ket: CoherentTerm) -> tuple[complex, complex]:
    """(prefactor, exponent): bracket = prefactor * exp(exponent).

    Splitting the exponent lets the caller shift a whole family by a common
    kappa before exponentiating.
    """
    u = complex(bra.beta).conjugate()
    v = complex(ket.beta)
    f, fu, fv, fuv = _poly(kind, u, v)
    if bra.derivative and ket.derivative:
        poly = fuv + u * fu + v * fv + (1.0 + u * v) * f
    elif bra.derivative:
        poly = fu + v * f
    elif ket.derivative:
        poly = fv + u * f
    else:
        poly = f
    w = complex(bra.weight).conjugate() * complex(ket.weight)
    return w * poly, u * v


def _component_sum(terms: tuple[CoherentTerm, ...], kind: str, kappa: float) -> complex:
    total = 0.0 + 0.0j
    for bra in terms:
        for ket in terms:
            pref, expo = _pair(kind, bra, ket)
            total += pref * cmath.exp(expo - kappa)
    return total


def _shifted_norm(s: SuperState) -> tuple[float, complex]:
    """(kappa, den) with squared norm = den * exp(kappa); raises on zero norm.

    kappa = max|beta|**2 dominates every pairwise Re(conj(b1)*b2), so all
    shifted exponentials are <= 1.  The largest diagonal term survives the
    shift at magnitude |w|**2, which keeps the zero-norm test meaningful even
    when exp(-kappa) underflows.
    """
    kappa = s.max_beta_sq()
    den = _component_sum(s.upper, OVERLAP, kappa) + _component_sum(s.lower, OVERLAP, kappa)
    weight_scale = sum(abs(t.weight) ** 2 for t in s.upper + s.lower)
    if weight_scale == 0.0 or abs(den) <= 1e-12 * weight_scale * math.exp(
        -min(kappa, 700.0)
    ):
        raise ZeroNormError("state has zero norm; no expectation values")
    return kappa, den


def _ratio(s: SuperState, kind: str, kappa: float, den: complex) -> float:
    num = _component_sum(s.upper, kind, kappa) + _component_sum(s.lower, kind, kappa)
    val = num / den
    if abs(val.imag) > _REALNESS_TOL * (1.0 + abs(val.real)):
        raise NumericalError(
            f"expectation of {kind} should be real, got imaginary part {val.imag:g}"
        )
    return val.real


def expectation(s: SuperState, kind: str) -> float:
    """<s| op |s> / <s|s> over both components, realized as a real number.

    The pairwise term sum reproduces the amplitude-weighted bracket structure
    of two-ray mixtures automatically and works for any number of terms.
    """
    if kind not in Moment.KINDS:
        raise ValueError(f"unknown moment kind {kind!r}")
    kappa, den = _shifted_norm(s)
    if kind == OVERLAP:
        return 1.0
    return _ratio(s, kind, kappa, den)


@dataclass(frozen=True)
class UncertaintyReport:
    """Quadrature moments, variances, their product, and the squared norm.

    ``norm`` is <Z|Z> of the unnormalized state and may overflow to inf for
    large |z|; the moments themselves are evaluated overflow-safe.
    """

    mean_xi: float
    mean_xi2: float
    mean_mu: float
    mean_mu2: float
    var_xi: float
    var_mu: float
    product: float
    norm: float


def uncertainty(s: SuperState) -> UncertaintyReport:
    """Variances of xi and mu and their product.

    Variances are clamped at zero from below: minimum-uncertainty states
    cancel the subtraction to rounding level and can dip slightly negative.
    """
    kappa, den = _shifted_norm(s)
    m_xi = _ratio(s, XI, kappa, den)
    m_xi2 = _ratio(s, XI2, kappa, den)
    m_mu = _ratio(s, MU, kappa, den)
    m_mu2 = _ratio(s, MU2, kappa, den)
    var_xi = max(m_xi2 - m_xi * m_xi, 0.0)
    var_mu = max(m_mu2 - m_mu * m_mu, 0.0)
    try:
        norm = abs(den) * math.exp(kappa)
    except OverflowError:
        norm = math.inf
    return UncertaintyReport(
        mean_xi=m_xi,
        mean_xi2=m_xi2,
        mean_mu=m_mu,
        mean_mu2=m_mu2,
        var_xi=var_xi,
        var_mu=var_mu,
        product=var_xi * var_mu,
        norm=norm,
    )


# ---------------------------------------------------------------------------
# large-|z| asymptotics of the mixture variances


@dataclass(frozen=True)
class AsymptoticParams:
    """Inputs of the large-|z| variance formulas for an equal-|chi| mixture.

    chi_mag: common magnitude of the two eigenvalues; phi_plus/phi_minus
    their phases; beta0 = |z|/chi_mag the shared coherent radius;
    gamma_plus/gamma_minus the squared mixture amplitudes
    |gamma1_pm|**2 + |gamma2_pm|**2*|z|**2.
    """

    chi_mag: float
    phi_plus: float
    phi_minus: float
    beta0: float
    gamma_plus: float
    gamma_minus: float


def asymptotic_params(
    k: KMatrix,
    zmag: float,
    eta: float,
    lam: float,
    *,
    classify_tol: float = DEFAULT_CLASSIFY_TOL,
) -> AsymptoticParams:
    """Asymptotic inputs for a mixture of both eigen-rays of k.

    Only |z| enters: each mixture weight depends on z through a single power,
    so the Gamma amplitudes are functions of |z| alone; the z phase reappears
    in the oscillatory factors of ``asymptotic_variances``.  Requires the two
    eigenvalue magnitudes to agree (the regime where the limit formula holds).
    """
    zmag = float(zmag)
    if zmag < 0.0:
        raise ValueError("zmag must be nonnegative")
    spec = eigen_decompose(k, classify_tol)
    chip, chim = spec.chi_plus, spec.chi_minus
    if abs(abs(chip) - abs(chim)) > 1e-6 * k.norm:
        raise RegionError("asymptotics require equal eigenvalue magnitudes")
    k1, k2, _, _ = k.entries()
    cp = math.cos(float(eta))
    sm = cmath.exp(1j * float(lam)) * math.sin(float(eta))
    gamma_p = abs(k2 * chip * cp) ** 2 + abs((chip - k1) * cp) ** 2 * zmag * zmag
    gamma_m = abs(k2 * chim * sm) ** 2 + abs((chim - k1) * sm) ** 2 * zmag * zmag
    chi_mag = math.sqrt(abs(chip) * abs(chim))
    return AsymptoticParams(
        chi_mag=chi_mag,
        phi_plus=cmath.phase(chip),
        phi_minus=cmath.phase(chim),
        beta0=zmag / chi_mag if chi_mag > 0.0 else 0.0,
        gamma_plus=gamma_p,
        gamma_minus=gamma_m,
    )


def asymptotic_variances(
    p: AsymptoticParams, t: float, omega: float = 1.0
) -> tuple[float, float]:
    """(var_xi, var_mu) in the large-|z| limit of an equal-|chi| mixture.

        var_xi = 1/2 + 8*beta0**2 * G * sin((phi_+ - phi_-)/2)**2
                                      * sin(omega*t + (phi_+ + phi_-)/2)**2
        var_mu = the same with cos in the last factor,
        G = Gamma_+ * Gamma_- / (Gamma_+ + Gamma_-)**2.

    Cross terms suppressed by exp(-beta0**2 * phase gap) are dropped; for
    distinct eigenvalue phases and beta0 >> 1 the result is exact to all
    relevant digits.  A state evolved from real z0 corresponds to omega*t
    here; at t = 0 the role is played by -arg(z) (even in these formulas).
    """
    gsum = p.gamma_plus + p.gamma_minus
    if gsum == 0.0:
        raise ZeroNormError("state has zero norm; no expectation values")
    g = p.gamma_plus * p.gamma_minus / (gsum * gsum)
    half_gap = 0.5 * (p.phi_plus - p.phi_minus)
    mid = omega * float(t) + 0.5 * (p.phi_plus + p.phi_minus)
    amp = 8.0 * p.beta0 * p.beta0 * g * math.sin(half_gap) ** 2
    var_xi = 0.5 + amp * math.sin(mid) ** 2
    var_mu = 0.5 + amp * math.cos(mid) ** 2
    return var_xi, var_mu
