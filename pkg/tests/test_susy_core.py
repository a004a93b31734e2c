"""Spectrum, classification, and gauge behavior of the parameter matrix."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from _oracles import _rand_complex, draw_degenerate, draw_singular, eig_oracle

from supercoherent import (
    KMatrix,
    Region,
    classify,
    eigen_decompose,
    gauge_normalize,
    theta_operator,
)


def test_eigenvalues_match_roots_oracle(rng):
    for _ in range(1000):
        e = _rand_complex(rng, 4)
        k = KMatrix(*e)
        spec = eigen_decompose(k)
        op, om = eig_oracle(k)
        scale = k.norm
        # both routes lose ~sqrt(eps) digits when the roots nearly coalesce,
        # so the cross-check tolerance is the loose one
        assert abs(spec.chi_plus - op) <= 1e-8 * scale
        assert abs(spec.chi_minus - om) <= 1e-8 * scale
        # trace / det identities are well conditioned regardless
        assert abs(spec.chi_plus + spec.chi_minus - k.trace) < 1e-12 * scale
        assert abs(spec.chi_plus * spec.chi_minus - k.det) < 1e-12 * scale * scale


def test_eigenvalue_ordering_convention(rng):
    for _ in range(200):
        k = KMatrix(*_rand_complex(rng, 4))
        spec = eigen_decompose(k)
        key_p = (spec.chi_plus.real, spec.chi_plus.imag)
        key_m = (spec.chi_minus.real, spec.chi_minus.imag)
        assert key_p >= key_m


def test_eigenvector_matrix_columns(rng):
    for _ in range(200):
        k = KMatrix(*_rand_complex(rng, 4))
        spec = eigen_decompose(k)
        m = k.as_array()
        s = spec.s_matrix.as_array()
        for col, chi in ((s[:, 0], spec.chi_plus), (s[:, 1], spec.chi_minus)):
            nc = np.linalg.norm(col)
            if nc < 1e-9 * k.norm:
                continue  # collapsed column (k3 = 0 with chi = k4); no claim made
            assert np.linalg.norm(m @ col - chi * col) <= 1e-10 * k.norm * nc


def test_theta_family_regions():
    for n in range(-2, 5):
        rc = classify(theta_operator(n * math.pi / 2.0))
        assert rc.tag is Region.DEGENERATE
    for th in np.linspace(0.05, math.pi / 2 - 0.05, 9):
        assert classify(theta_operator(th)).tag is Region.GENERIC_BOUNDED
    for th in np.linspace(math.pi / 2 + 0.05, math.pi - 0.05, 9):
        assert classify(theta_operator(th)).tag is Region.GENERIC_UNBOUNDED


def test_theta_operator_quarter_values():
    spec = eigen_decompose(theta_operator(math.pi / 4.0))
    r = math.sqrt(0.5)
    assert cmath.isclose(spec.chi_plus, 1.0 + r, rel_tol=1e-14)
    assert cmath.isclose(spec.chi_minus, 1.0 - r, rel_tol=1e-14)
    spec = eigen_decompose(theta_operator(3.0 * math.pi / 4.0))
    assert cmath.isclose(spec.chi_plus, 1.0 + 1j * r, rel_tol=1e-14)
    assert cmath.isclose(spec.chi_minus, 1.0 - 1j * r, rel_tol=1e-14)
    assert abs(abs(spec.chi_plus) - abs(spec.chi_minus)) < 1e-15


def test_singular_wins_over_degenerate(rng):
    for _ in range(50):
        k = draw_singular(rng, nilpotent=True)
        rc = classify(k)
        assert rc.tag is Region.SINGULAR
        assert rc.also_degenerate
    k = draw_singular(rng)
    rc = classify(k)
    assert rc.tag is Region.SINGULAR
    assert not rc.also_degenerate


def test_degenerate_draws_classify(rng):
    for _ in range(50):
        rc = classify(draw_degenerate(rng))
        assert rc.tag is Region.DEGENERATE
        assert not rc.also_degenerate


def test_null_operator_rejected():
    with pytest.raises(ValueError, match="null operator"):
        KMatrix(0.0, 0.0, 0.0, 0.0)


def test_entry_and_omega_validation():
    with pytest.raises(ValueError):
        KMatrix(math.inf, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        KMatrix(1.0, 0.0, 0.0, 1.0, omega=0.0)
    with pytest.raises(ValueError):
        KMatrix(1.0, 0.0, 0.0, 1.0, omega=-2.0)
    with pytest.raises(ValueError):
        classify(KMatrix(1.0, 0.0, 0.0, 1.0), tol=0.0)


def test_gauge_normalize_examples():
    k, s = gauge_normalize(KMatrix(2.0, 2.0, 0.0, 2.0))
    assert s == 2.0
    assert k.entries() == (1.0, 1.0, 0.0, 1.0)
    k, s = gauge_normalize(KMatrix(1.0, 1.0, 0.0, 1.0))
    assert s == 1.0
    assert k.entries() == (1.0, 1.0, 0.0, 1.0)
    k, s = gauge_normalize(KMatrix(0.0, 0.0, 3.0j, 0.0))
    assert s == 3.0j
    assert k.entries() == (0.0, 0.0, 1.0, 0.0)


# Entries are either structural zeros or live in a sane magnitude band:
# scale invariance cannot survive crossing the subnormal-underflow boundary,
# which is outside any physical parameter regime.
complex_entry = st.one_of(
    st.just(0j),
    st.complex_numbers(
        min_magnitude=1e-3, max_magnitude=10.0, allow_nan=False, allow_infinity=False
    ),
)
nonzero_scale = st.complex_numbers(
    min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False
)


@settings(max_examples=100, deadline=None)
@given(e=st.tuples(complex_entry, complex_entry, complex_entry, complex_entry), s=nonzero_scale)
def test_classification_is_scale_invariant(e, s):
    try:
        k = KMatrix(*e)
    except ValueError:
        return  # all-zero draw
    spec = eigen_decompose(k)
    n = k.norm
    # keep a factor-five band clear of every classification boundary, where
    # rounding in the rescaled entries could legitimately flip the tag
    for ratio in (
        abs(k.det) / (n * n),
        abs(spec.region.discriminant) / (n * n),
        abs(abs(spec.chi_plus) - abs(spec.chi_minus)) / n,
    ):
        assume(not 0.2e-9 < ratio < 5e-9)
    assume(abs(spec.region.discriminant) > 1e-6 * n * n or abs(spec.region.discriminant) == 0.0)
    ks = k.scaled(s)
    assert classify(ks).tag is classify(k).tag
    # eigenvalues scale as a set; the (Re, Im) ordering may relabel them
    a = sorted((spec.chi_plus * s, spec.chi_minus * s), key=lambda z: (z.real, z.imag))
    spec_s = eigen_decompose(ks)
    b = sorted((spec_s.chi_plus, spec_s.chi_minus), key=lambda z: (z.real, z.imag))
    for x, y in zip(a, b):
        assert abs(x - y) <= 1e-9 * (1.0 + abs(s) * n)
