import pytest
from hypothesis import given
from hypothesis import strategies as st

from drinfeld_heights import (GF, DrinfeldModule, LocalElement, PlaceModel, Poly,
                              RationalFunction, TwistedPoly, apply, conjugate, monicize, phi_a,
                              skew_mul)
from drinfeld_heights.errors import (ConfigError, MonicizationError, ZeroGamma,
                                     ZeroMultiplier)
from drinfeld_heights.local import embed_rational

from conftest import polys, rationals

F2, F3 = GF(2), GF(3)


@st.composite
def twisted(draw, F, max_deg=2):
    n = draw(st.integers(0, max_deg))
    return TwistedPoly(F.q, {i: draw(rationals(F, 2)) for i in range(n + 1)})


@given(st.sampled_from([F2, F3]), st.data())
def test_skew_multiplication_is_associative(F, data):
    a, b, c = (data.draw(twisted(F)) for _ in range(3))
    assert skew_mul(skew_mul(a, b), c) == skew_mul(a, skew_mul(b, c))
    assert skew_mul(a, b + c) == skew_mul(a, b) + skew_mul(a, c)


def test_tau_commutation_rule():
    t = RationalFunction.t(F3)
    tau = TwistedPoly(3, {1: RationalFunction.constant(F3, 1)})
    assert skew_mul(tau, TwistedPoly(3, {0: t})) == TwistedPoly(3, {1: t ** 3})


@given(st.sampled_from([F2, F3]), st.data())
def test_action_is_composition(F, data):
    a, b = data.draw(twisted(F)), data.draw(twisted(F))
    x = data.draw(rationals(F, 2))
    assert apply(skew_mul(a, b), x) == apply(a, apply(b, x))


MODULES = [
    lambda: DrinfeldModule.carlitz(F3),
    lambda: DrinfeldModule.e1_family(F2, 2, 1),
    lambda: DrinfeldModule.from_coefficients(
        F2, {0: RationalFunction.t(F2), 1: RationalFunction.t(F2).inverse(), 2: 1}),
]


@pytest.mark.parametrize("make", MODULES)
@given(data=st.data())
def test_phi_is_a_ring_homomorphism(make, data):
    phi = make()
    F = phi.base
    a = data.draw(polys(F, 2, nonzero=True))
    b = data.draw(polys(F, 2, nonzero=True))
    assert phi_a(phi, a * b) == skew_mul(phi_a(phi, a), phi_a(phi, b))
    if not (a + b).is_zero():
        assert phi_a(phi, a + b) == phi_a(phi, a) + phi_a(phi, b)
    assert phi_a(phi, a).degree == phi.r * a.degree


def test_phi_of_zero_raises():
    with pytest.raises(ZeroMultiplier):
        phi_a(DrinfeldModule.carlitz(F3), Poly(F3))


def test_generic_characteristic_needs_t():
    with pytest.raises(ValueError):
        DrinfeldModule.from_coefficients(F3, {0: 1, 1: 1})
    assert DrinfeldModule.carlitz(F3).char_kind == "generic"
    assert DrinfeldModule.e1_family(F2, 2).char_kind == "finite"


def test_e1_family_coefficients():
    phi = DrinfeldModule.e1_family(F2, 2, 1)
    t = RationalFunction.t(F2)
    assert phi.r == 2 and phi.r0 == 1
    assert phi.coefficient(1) == t.inverse()
    assert phi.is_monic()


def test_config_round_trip():
    phi = DrinfeldModule.from_coefficients(
        F3, {0: RationalFunction.t(F3), 2: RationalFunction.t(F3) ** -2})
    again = DrinfeldModule.from_config(phi.to_config())
    assert again.phi_t == phi.phi_t


def test_bad_config():
    with pytest.raises(ConfigError):
        DrinfeldModule.from_config({"p": 3})


@given(st.data())
def test_global_conjugation_intertwines_the_action(data):
    phi = DrinfeldModule.from_coefficients(F3, {0: RationalFunction.t(F3), 1: 1, 2: 1})
    gamma = data.draw(rationals(F3, 2))
    x = data.draw(rationals(F3, 2))
    conj = conjugate(phi, gamma)
    assert apply(conj.phi_t, gamma.inverse() * x) == gamma.inverse() * apply(phi.phi_t, x)


def test_conjugation_by_zero():
    with pytest.raises(ZeroGamma):
        conjugate(DrinfeldModule.carlitz(F3), RationalFunction(Poly(F3)))


def test_monicize_constant_leading_coefficient():
    phi = DrinfeldModule.from_coefficients(F3, {0: RationalFunction.t(F3), 1: 2})
    gamma, conj = monicize(phi)
    assert conj.is_monic()
    assert gamma ** (3 - 1) * F3(2).embed(gamma.field) == gamma.field.one()


def test_monicize_constant_needs_extension():
    # gamma^8 * 2 = 1 has no solution before F_81
    phi = DrinfeldModule.from_coefficients(F3, {0: RationalFunction.t(F3), 1: 1, 2: 2})
    gamma, conj = monicize(phi)
    assert conj.is_monic()
    least = next(k for k in range(1, 9)
                 if any(g ** 8 * F3(2).embed(g.field) == g.field.one()
                        for g in F3.extension(k).nonzero_elements()))
    assert gamma.field.q == 3 ** least == 81


def test_monicize_at_a_place():
    t = RationalFunction.t(F3)
    phi = DrinfeldModule.from_coefficients(F3, {0: t, 1: t ** 2})
    model = PlaceModel.infinity(F3)
    gamma, conj = monicize(phi, model)
    top = conj.phi_t[1]
    assert top.agrees_with(LocalElement.one(F3))
    # the tau^0 coefficient is unchanged by conjugation
    assert conj.phi_t[0].agrees_with(embed_rational(t, model, 60))


def test_monicize_rejects_bad_valuation():
    t = RationalFunction.t(F3)
    phi = DrinfeldModule.from_coefficients(F3, {0: t, 2: t})
    with pytest.raises(MonicizationError):
        monicize(phi, PlaceModel.infinity(F3))
