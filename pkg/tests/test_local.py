import pytest
from hypothesis import given
from hypothesis import strategies as st

from drinfeld_heights import GF, LocalElement, PlaceModel, Poly
from drinfeld_heights.errors import HenselConditionFailed, PrecisionExhausted
from drinfeld_heights.local import (embed_rational, max_precision, newton_lift, poly_eval,
                                    product_formula_sum)

from conftest import fields, rationals


def _series(F, draw, prec=20):
    start = draw(st.integers(-4, 4))
    coeffs = draw(st.lists(st.integers(0, F.q - 1), min_size=1, max_size=8))
    coeffs[0] = coeffs[0] or 1
    return LocalElement(F, start, coeffs, prec)


@given(fields([(2, 1), (3, 1), (2, 2)]), st.data())
def test_series_ring_laws(F, data):
    a = _series(F, data.draw)
    b = _series(F, data.draw)
    c = _series(F, data.draw)
    assert (a * (b + c)).agrees_with(a * b + a * c)
    assert ((a + b) - b).agrees_with(a)
    assert (a * a.inverse()).agrees_with(LocalElement.one(F))


@given(fields([(2, 1), (3, 1), (2, 2)]), st.data())
def test_valuation_and_angular_component_multiply(F, data):
    a = _series(F, data.draw)
    b = _series(F, data.draw)
    ab = a * b
    assert ab.valuation() == a.valuation() + b.valuation()
    assert ab.angular_component() == a.angular_component() * b.angular_component()


def test_precision_of_sum_is_the_minimum():
    F = GF(3)
    a = LocalElement(F, 0, [1, 2], prec=5)
    b = LocalElement(F, 1, [1], prec=9)
    assert (a + b).prec == 5
    assert (a * b).prec == 6


def test_cancellation_to_zero_within_precision():
    F = GF(2)
    a = LocalElement(F, 0, [1, 1], prec=4)
    s = a + a
    assert s.is_zero_within_precision() and not s.is_exact
    with pytest.raises(PrecisionExhausted):
        s.valuation()


@given(fields([(2, 1), (3, 1)]), st.data())
def test_frobenius_is_a_ring_map(F, data):
    a = _series(F, data.draw)
    b = _series(F, data.draw)
    q = F.p
    assert (a + b).frobenius(q).agrees_with(a.frobenius(q) + b.frobenius(q))
    assert (a * b).frobenius(q).agrees_with(a.frobenius(q) * b.frobenius(q))
    assert a.frobenius(q).valuation() == q * a.valuation()


PLACES = [
    lambda F: PlaceModel.infinity(F),
    lambda F: PlaceModel.infinity(F, e_ram=2),
    lambda F: PlaceModel.finite_unramified(Poly.t(F)),
    lambda F: PlaceModel.finite_unramified(Poly(F, [1, 1])),
    lambda F: PlaceModel.finite_ramified(Poly.t(F), 3),
]


@pytest.mark.parametrize("make", PLACES)
@given(data=st.data())
def test_embedding_is_a_ring_homomorphism(make, data):
    F = data.draw(st.sampled_from([GF(2), GF(3)]))
    model = make(F)
    a = data.draw(rationals(F, 3))
    b = data.draw(rationals(F, 3))
    ea, eb = embed_rational(a, model, 30), embed_rational(b, model, 30)
    assert embed_rational(a * b, model, 30).agrees_with(ea * eb)
    if not (a + b).is_zero():
        assert embed_rational(a + b, model, 30).agrees_with(ea + eb)
    assert ea.valuation() == model.valuation_of(a)


def test_degree_two_prime_image_satisfies_the_prime():
    F = GF(2)
    prime = Poly(F, [1, 1, 1])
    model = PlaceModel.finite_unramified(prime)
    t = model.t_image(20)
    lifted = [LocalElement(model.residue, 0, (model.embed_constant(F(c)).value,)) for c in prime.coeffs]
    assert poly_eval(lifted, t).agrees_with(LocalElement.pi(model.residue))
    assert model.residue.q == 4 and model.deg_v0 == 2


def test_newton_lift_square_root():
    # sqrt(1 + pi) over F_3
    F = GF(3)
    G = [LocalElement(F, 0, [2, 2]), LocalElement.zero(F), LocalElement.one(F)]
    root = newton_lift(G, LocalElement.one(F), 30)
    assert (root * root).agrees_with(LocalElement(F, 0, [1, 1]))
    residual = poly_eval(G, root)
    assert residual.is_zero_within_precision() or residual.valuation() >= 30


def test_newton_lift_requires_hensel_condition():
    F = GF(3)
    G = [LocalElement(F, 0, [2, 2]), LocalElement.zero(F), LocalElement.one(F)]
    with pytest.raises(HenselConditionFailed):
        newton_lift(G, LocalElement.pi(F), 10)


def test_newton_lift_detects_insufficient_input_precision():
    F = GF(3)
    G = [LocalElement(F, 0, [2, 2], prec=6), LocalElement.zero(F), LocalElement.one(F)]
    with pytest.raises(PrecisionExhausted):
        newton_lift(G, LocalElement.one(F), 30)


def test_relation_model_for_ramified_place():
    # t = pi^3 / (1 - pi^2) at a place over (t) of index 3
    F = GF(2)
    rel = [(1, 0, 1), (-1, 2, 1), (-1, 3, 0)]
    model = PlaceModel.from_relation(Poly.t(F), rel, LocalElement(F, 3, (1,)), e_ram=3, ext_degree=3)
    t = model.t_image(30)
    expect = LocalElement(F, 3, (1,)) * LocalElement(F, 0, [1, 0, 1], prec=40).inverse()
    assert t.agrees_with(expect)
    assert model.t_valuation == 3


@given(fields([(2, 1), (3, 1), (2, 2), (5, 1)]), st.data())
def test_product_formula(F, data):
    g = data.draw(rationals(F, 5))
    assert product_formula_sum(g) == 0


def test_max_precision_env(monkeypatch):
    monkeypatch.setenv("DRINFELD_MAX_PREC", "128")
    assert max_precision() == 128
    monkeypatch.delenv("DRINFELD_MAX_PREC")
    assert max_precision() == 4096


def test_literal_round_trip():
    F = GF(5)
    a = LocalElement(F, -2, [3, 0, 4], prec=7)
    assert LocalElement.from_literal(F, a.to_literal()) == a
