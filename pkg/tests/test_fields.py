import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drinfeld_heights import GF, Poly, RationalFunction
from drinfeld_heights.errors import (DivisionByZero, EmptyTerms, InvalidQ, MismatchedField,
                                     ZeroPolynomial)
from drinfeld_heights.fields import (additive_poly_preimage, additive_poly_roots, frobenius_q,
                                     is_irreducible, monic_irreducibles, nullspace_mod_p,
                                     poly_factor, rank_mod_p, solve_mod_p)

from conftest import field_and_elements, fields, polys, rationals


# --- finite fields -------------------------------------------------------------

@given(field_and_elements(3))
def test_field_axioms(data):
    F, (a, b, c) = data
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == F.zero()
    assert a * F.one() == a


@given(field_and_elements(1, nonzero=True))
def test_inverse(data):
    F, (a,) = data
    assert a * a.inverse() == F.one()
    assert a ** (F.q - 1) == F.one()


def test_inverse_of_zero_raises():
    with pytest.raises(DivisionByZero):
        GF(5).zero().inverse()


@given(field_and_elements(2))
def test_frobenius_is_additive(data):
    F, (a, b) = data
    p = F.p
    assert frobenius_q(a + b, p) == frobenius_q(a, p) + frobenius_q(b, p)
    assert frobenius_q(a, F.q) == a


def test_frobenius_rejects_bad_q():
    with pytest.raises(InvalidQ):
        frobenius_q(GF(3)(1), 4)


def test_invalid_field_parameters():
    with pytest.raises(ValueError, match="not prime"):
        GF(4)
    with pytest.raises(ValueError, match="reducible"):
        GF(2, 2, modulus=(1, 0, 1))  # t^2 + 1 = (t + 1)^2 over F_2


def test_mixed_fields_rejected():
    with pytest.raises(MismatchedField):
        GF(2, 2)(1) + GF(2, 3)(1)


def test_multiplicative_group_is_cyclic():
    for p, e in [(2, 3), (3, 2), (5, 1)]:
        F = GF(p, e)
        g = F.primitive()
        assert len({g ** k for k in range(F.q - 1)}) == F.q - 1


@pytest.mark.parametrize("p,e,k", [(2, 1, 3), (2, 2, 2), (3, 1, 2)])
def test_embedding_is_a_field_homomorphism(p, e, k):
    small = GF(p, e)
    big = small.extension(k)
    for a, b in itertools.product(small.elements(), repeat=2):
        assert (a * b).embed(big) == a.embed(big) * b.embed(big)
        assert (a + b).embed(big) == a.embed(big) + b.embed(big)


# --- linear algebra over F_p -------------------------------------------------

def _brute_rank(rows, p):
    ncols = len(rows[0])
    kernel = 0
    for x in itertools.product(range(p), repeat=ncols):
        if all(sum(r[j] * x[j] for j in range(ncols)) % p == 0 for r in rows):
            kernel += 1
    dim_ker = round(math.log(kernel, p))
    return ncols - dim_ker


@given(st.sampled_from([2, 3, 5]), st.data())
def test_rank_matches_kernel_count(p, data):
    nrows = data.draw(st.integers(1, 3))
    ncols = data.draw(st.integers(1, 3))
    rows = [[data.draw(st.integers(0, p - 1)) for _ in range(ncols)] for _ in range(nrows)]
    assert rank_mod_p(rows, p) == _brute_rank(rows, p)
    for v in nullspace_mod_p(rows, ncols, p):
        assert all(sum(a * b for a, b in zip(r, v)) % p == 0 for r in rows)


def test_solve_inconsistent_system():
    assert solve_mod_p([[1, 1], [1, 1]], [0, 1], 2) is None
    assert solve_mod_p([[1, 2], [0, 1]], [1, 1], 3) == [2, 1]


# --- additive polynomials ----------------------------------------------------

@given(fields([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)]), st.data())
def test_additive_roots_match_enumeration(F, data):
    p = F.p
    powers = sorted(data.draw(st.sets(st.sampled_from([1, p, p * p]), min_size=1)))
    coeffs = [F(data.draw(st.integers(1, F.q - 1))) for _ in powers]
    terms = list(zip(coeffs, powers))

    def ev(x):
        return sum((c * x ** Q for c, Q in terms), F.zero())

    assert additive_poly_roots(terms, F) == {x for x in F.elements() if ev(x) == F.zero()}
    target = F(data.draw(st.integers(0, F.q - 1)))
    assert additive_poly_preimage(terms, target, F) == {x for x in F.elements() if ev(x) == target}


def test_additive_terms_validated():
    F = GF(3)
    with pytest.raises(EmptyTerms):
        additive_poly_roots([], F)
    with pytest.raises(InvalidQ):
        additive_poly_roots([(F(1), 2)], F)


# --- polynomials and rational functions --------------------------------------

@given(fields([(2, 1), (3, 1), (2, 2), (5, 1)]), st.data())
def test_divmod(F, data):
    a = data.draw(polys(F, 6))
    b = data.draw(polys(F, 4, nonzero=True))
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(fields([(2, 1), (3, 1), (2, 2), (5, 1)]), st.data())
def test_factorization_reassembles(F, data):
    f = data.draw(polys(F, 7, nonzero=True))
    lead, facs = poly_factor(f)
    prod = Poly.constant(F, lead)
    for g, m in facs.items():
        assert is_irreducible(g) and g == g.monic()
        for _ in range(m):
            prod = prod * g
    assert prod == f


def test_factor_zero_raises():
    with pytest.raises(ZeroPolynomial):
        poly_factor(Poly(GF(2)))


@pytest.mark.parametrize("p,k,count", [(2, 1, 2), (2, 2, 1), (2, 3, 2), (2, 4, 3), (3, 2, 3), (5, 1, 5)])
def test_irreducible_counts(p, k, count):
    # necklace counts (1/k) sum_{d|k} mu(d) p^(k/d)
    assert len(monic_irreducibles(GF(p), k)) == count


@given(fields([(2, 1), (3, 1), (2, 2)]), st.data())
def test_rational_function_field_ops(F, data):
    a = data.draw(rationals(F))
    b = data.draw(rationals(F))
    assert (a * b) * b.inverse() == a
    assert a + b - b == a
    assert a.frobenius(F.p) == a ** F.p


@given(fields([(2, 1), (3, 1), (5, 1)]), st.data())
def test_valuations_are_additive(F, data):
    a = data.draw(rationals(F))
    b = data.draw(rationals(F))
    for prime in [None, Poly.t(F), Poly(F, [1, 1])]:
        assert (a * b).valuation(prime) == a.valuation(prime) + b.valuation(prime)


def test_zero_denominator():
    F = GF(2)
    with pytest.raises(DivisionByZero):
        RationalFunction(Poly(F, [1]), Poly(F))
