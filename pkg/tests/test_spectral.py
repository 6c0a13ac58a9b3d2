"""Spectral measure tests: frozen examples, measure axioms, functional calculus."""

import numpy as np
import pytest

from awkit.core import AlgebraElement, Projection, adjoint, operator_norm
from awkit.errors import (
    IncompleteFunction,
    IncompleteOrdering,
    NotNormal,
    TooManyPoints,
    UnknownPoint,
)
from awkit.order import verify_certificate
from awkit.sampling import random_normal_element, random_signature
from awkit.spectral import (
    BorelSubset,
    SpectralFunction,
    check_regularity,
    integrate,
    is_normal,
    measure_of,
    order_convergent_integral,
    spectral_measure,
    spectrum_of,
)


def el(*blocks):
    return AlgebraElement([np.array(b, dtype=complex) for b in blocks])


def diag_el(*vals_per_block):
    return AlgebraElement([np.diag(np.array(v, dtype=complex)) for v in vals_per_block])


def test_is_normal_examples():
    rng = np.random.default_rng(2)
    from awkit.sampling import random_unitary

    assert is_normal(random_unitary((3,), rng))
    assert not is_normal(el([[0, 1], [0, 0]]))
    # both products equal 2*identity, by direct expansion
    assert is_normal(el([[1, 1], [-1, 1]]))


def test_spectrum_frozen_examples():
    s = spectrum_of(diag_el([1, 1j, 1j]))
    got = dict(zip(s.points, s.multiplicities))
    assert len(got) == 2
    near_one = min(s.points, key=lambda p: abs(p - 1))
    near_i = min(s.points, key=lambda p: abs(p - 1j))
    assert abs(near_one - 1) < 1e-12 and got[near_one] == 1
    assert abs(near_i - 1j) < 1e-12 and got[near_i] == 2

    # char poly of [[0,1],[1,0]] gives {-1, 1}
    s = spectrum_of(el([[0, 1], [1, 0]]))
    assert np.allclose(sorted(p.real for p in s.points), [-1.0, 1.0])

    alpha = 0.7 - 0.2j
    s = spectrum_of(alpha * AlgebraElement.identity((2, 3)))
    assert len(s.points) == 1
    assert abs(s.points[0] - alpha) < 1e-12
    assert s.multiplicities == (5,)


def test_spectrum_rejects_non_normal():
    with pytest.raises(NotNormal):
        spectrum_of(el([[0, 1], [0, 0]]))


def test_spectral_measure_frozen_examples():
    m = spectral_measure(diag_el([1j, 1j, 2]))
    pts = {p: m.atoms[p] for p in m.domain_spectrum.points}
    p_i = min(pts, key=lambda p: abs(p - 1j))
    p_2 = min(pts, key=lambda p: abs(p - 2))
    assert np.allclose(pts[p_i].element.blocks[0], np.diag([1.0, 1.0, 0.0]), atol=1e-12)
    assert np.allclose(pts[p_2].element.blocks[0], np.diag([0.0, 0.0, 1.0]), atol=1e-12)

    # eigenvectors (1, +-1)/sqrt(2), by hand
    m = spectral_measure(el([[0, 1], [1, 0]]))
    for p in m.domain_spectrum.points:
        sign = 1.0 if p.real > 0 else -1.0
        expect = 0.5 * np.array([[1, sign], [sign, 1]])
        assert np.allclose(m.atoms[p].element.blocks[0], expect, atol=1e-12)

    # a projection with both eigenvalues present splits into p and 1 - p
    proj = el([[0.5, 0.5], [0.5, 0.5]])
    m = spectral_measure(proj)
    one_atom = m.atom(min(m.domain_spectrum.points, key=lambda q: abs(q - 1)))
    zero_atom = m.atom(min(m.domain_spectrum.points, key=lambda q: abs(q)))
    assert np.allclose(one_atom.element.blocks[0], proj.blocks[0], atol=1e-12)
    assert np.allclose(
        zero_atom.element.blocks[0], np.eye(2) - proj.blocks[0], atol=1e-12
    )


def test_measure_of_examples():
    m = spectral_measure(diag_el([2.0, 0.5, 0.0]))
    pts = sorted(m.domain_spectrum.points, key=lambda p: p.real)
    assert measure_of(m, BorelSubset.of([])).element == AlgebraElement.zeros((3,))
    assert measure_of(m, BorelSubset.of(pts)).element == AlgebraElement.identity((3,))
    small = measure_of(m, BorelSubset.of(pts[:2]))  # {0, 1/2}
    assert np.allclose(small.element.blocks[0], np.diag([0.0, 1.0, 1.0]), atol=1e-12)
    with pytest.raises(UnknownPoint):
        measure_of(m, BorelSubset.of([3.0]))


def test_measure_additive_over_disjoint_unions():
    rng = np.random.default_rng(6)
    a = random_normal_element((4,), rng)
    m = spectral_measure(a)
    pts = list(m.domain_spectrum.points)
    left, right = pts[:2], pts[2:]
    total = measure_of(m, BorelSubset.of(pts)).element
    split = measure_of(m, BorelSubset.of(left)).element + measure_of(
        m, BorelSubset.of(right)
    ).element
    assert operator_norm(total - split) <= 1e-12


def test_integrate_reconstructs_and_is_multiplicative():
    rng = np.random.default_rng(8)
    for _ in range(10):
        sig = random_signature(rng, max_blocks=2, dims=(1, 5))
        a = random_normal_element(sig, rng)
        m = spectral_measure(a)
        ident = SpectralFunction.identity(m.domain_spectrum)
        assert operator_norm(integrate(ident, m) - a) <= 1e-9 * (1 + operator_norm(a))
        f = SpectralFunction.from_callable(lambda z: z * z - 2.0, m.domain_spectrum)
        g = SpectralFunction.from_callable(lambda z: 1.0 + 0.5j * z, m.domain_spectrum)
        fg = SpectralFunction.from_callable(
            lambda z: (z * z - 2.0) * (1.0 + 0.5j * z), m.domain_spectrum
        )
        lhs = integrate(fg, m)
        rhs = integrate(f, m) * integrate(g, m)
        assert operator_norm(lhs - rhs) <= 1e-9
        conj_f = SpectralFunction.from_callable(
            lambda z: np.conj(z * z - 2.0), m.domain_spectrum
        )
        assert operator_norm(integrate(conj_f, m) - adjoint(integrate(f, m))) <= 1e-9
        ones = SpectralFunction.from_callable(lambda z: 1.0, m.domain_spectrum)
        assert operator_norm(integrate(ones, m) - AlgebraElement.identity(sig)) <= 1e-9


def test_integrate_indicator_equals_measure_of():
    m = spectral_measure(diag_el([2.0, 0.5, 0.0]))
    pts = sorted(m.domain_spectrum.points, key=lambda p: p.real)
    subset = BorelSubset.of(pts[:2])
    chi = SpectralFunction.indicator(subset, m.domain_spectrum)
    assert operator_norm(integrate(chi, m) - measure_of(m, subset).element) <= 1e-12


def test_integrate_square_example():
    m = spectral_measure(diag_el([1.0, 2.0]))
    f = SpectralFunction.from_callable(lambda z: z * z, m.domain_spectrum)
    assert np.allclose(integrate(f, m).blocks[0], np.diag([1.0, 4.0]), atol=1e-12)


def test_integrate_rejects_incomplete_function():
    m = spectral_measure(diag_el([1.0, 2.0]))
    partial = SpectralFunction(values={m.domain_spectrum.points[0]: 1.0})
    with pytest.raises(IncompleteFunction):
        integrate(partial, m)


def test_atoms_commute_with_element_and_each_other():
    rng = np.random.default_rng(12)
    a = random_normal_element((5,), rng)
    m = spectral_measure(a)
    atoms = [m.atoms[p].element for p in m.domain_spectrum.points]
    for p in atoms:
        assert operator_norm(p * a - a * p) <= 1e-10 * (1 + operator_norm(a))
        for q in atoms:
            assert operator_norm(p * q - q * p) <= 1e-10


def test_atom_uniqueness_via_lagrange_oracle():
    # independent oracle: the atom at a point equals the Lagrange basis
    # polynomial of the element, computed with plain matrix products
    rng = np.random.default_rng(14)
    for _ in range(8):
        sig = (int(rng.integers(2, 5)),)
        a = random_normal_element(sig, rng, scale=1.0)
        m = spectral_measure(a)
        pts = m.domain_spectrum.points
        gaps = [abs(p - q) for p in pts for q in pts if p != q]
        if gaps and min(gaps) < 0.2:
            continue  # keep the interpolation well conditioned
        one = AlgebraElement.identity(sig)
        for p in pts:
            poly = one
            for q in pts:
                if q != p:
                    poly = poly * (a - q * one) / (p - q)
            assert operator_norm(poly - m.atoms[p].element) <= 1e-8


def test_check_regularity_degenerate_identities():
    assert check_regularity(spectral_measure(diag_el([1.0, 2.0])))
    assert check_regularity(spectral_measure(diag_el([5.0])))  # single atom
    rng = np.random.default_rng(16)
    for _ in range(5):
        a = random_normal_element(random_signature(rng, 2, (1, 5)), rng)
        assert check_regularity(spectral_measure(a))


def test_check_regularity_point_limit():
    vals = np.arange(13, dtype=float)
    m = spectral_measure(diag_el(vals))
    with pytest.raises(TooManyPoints):
        check_regularity(m)


def test_order_convergent_integral_certificates():
    m = spectral_measure(diag_el([1.0, 2.0]))
    f = SpectralFunction.identity(m.domain_spectrum)
    pts = sorted(m.domain_spectrum.points, key=lambda p: p.real)
    cert = order_convergent_integral(f, m, pts)
    assert len(cert.terms) == 2
    assert verify_certificate(cert).accepted

    rev = order_convergent_integral(f, m, list(reversed(pts)))
    assert verify_certificate(rev).accepted
    assert operator_norm(rev.limit - cert.limit) <= 1e-12

    rng = np.random.default_rng(18)
    a = random_normal_element((4,), rng)
    m = spectral_measure(a)
    f = SpectralFunction.identity(m.domain_spectrum)
    cert = order_convergent_integral(f, m, m.domain_spectrum.points)
    assert verify_certificate(cert).accepted

    with pytest.raises(IncompleteOrdering):
        order_convergent_integral(f, m, m.domain_spectrum.points[:-1])
