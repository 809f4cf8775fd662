import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinfeld_heights import (GF, DrinfeldModule, LocalElement, PlaceModel, Poly,
                              RationalFunction, apply, bound_margin, compute_exception_sets,
                              compute_thresholds, find_escaping_multiplier, global_height,
                              local_height)
from drinfeld_heights.errors import NoEscapeFound, NotInS, ZeroHeight
from drinfeld_heights.heights import (ESCAPE, L11, L2_PRIME, T3_INTEGRALITY, TORSION, UNDECIDED,
                                      candidate_places, phi_b_of, step_budget)
from drinfeld_heights.lab import Transformed, e1_element, e1_model, random_instance

import oracle
from conftest import rationals

F2, F3 = GF(2), GF(3)
T2, T3 = RationalFunction.t(F2), RationalFunction.t(F3)


@pytest.fixture(scope="module")
def e1():
    module = DrinfeldModule.e1_family(F2, 2, 1)
    model = e1_model(F2, 3)
    return module, model, e1_element(model, 3)


def _torsion_setup():
    module = DrinfeldModule.from_coefficients(F2, {1: T2.inverse(), 2: 1})
    model = PlaceModel.finite_ramified(Poly.t(F2), 2)
    return module, model, LocalElement(F2, -1, (1,))


# --- thresholds and exceptional sets ------------------------------------------

def test_e1_thresholds(e1):
    module, model, _ = e1
    th = compute_thresholds(module, model)
    assert th.M_v == Fraction(-3, 2) and th.N_v == 3
    assert th.in_S and th.c_v0 == 1 and th.m_steps == 2 and th.L_lcm == 1
    sets = compute_exception_sets(module, model, th)
    assert sets.P_v == {Fraction(-3, 2), Fraction(0)}
    assert sets.R_v[Fraction(0)] == {F2.one()}
    assert sets.z == 2 and sets.f_cap == 1
    assert sets.contains(Fraction(-3, 2), F2.one())
    assert not sets.contains(1, F2.one())


def test_carlitz_at_infinity_thresholds():
    th = compute_thresholds(DrinfeldModule.carlitz(F3), PlaceModel.infinity(F3))
    # v(t) = -1 at infinity: M_v = -1/(3 - 1)
    assert th.M_v == Fraction(-1, 2) and th.in_S
    assert th.escape_below == Fraction(-1, 2)


def test_not_in_S():
    module = DrinfeldModule.carlitz(F3)
    model = PlaceModel.finite_unramified(Poly(F3, [1, 1]))
    th = compute_thresholds(module, model)
    assert not th.in_S
    with pytest.raises(NotInS):
        compute_exception_sets(module, model, th)


def test_exception_set_members_are_ties():
    # every (alpha, gamma) in R_v makes at least two terms of phi_t(gamma pi^alpha) cancel
    module, model, _ = _torsion_setup()
    th = compute_thresholds(module, model)
    sets = compute_exception_sets(module, model, th)
    q = module.q
    for alpha, sols in sets.R_v.items():
        scores = [th.valuations[i] + q ** i * alpha for i in th.valuations]
        assert scores.count(min(scores)) >= 2 or sols == {F2.one()}


# --- exact values ------------------------------------------------------------

def test_e1_value_and_trajectory(e1):
    res = local_height(*e1)
    assert res.value == Fraction(5, 192)
    assert res.certificate == L2_PRIME
    assert [v for _, v, _ in res.trajectory] == [2, 1, -1, -5]


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("d", [1, 2])
def test_carlitz_at_infinity(p, n, d):
    F = GF(p)
    res = local_height(DrinfeldModule.carlitz(F), PlaceModel.infinity(F, e_ram=d, ext_degree=d),
                       RationalFunction.t(F) ** -n)
    assert res.value == Fraction(1, p ** (n + 1))


def test_carlitz_global_height():
    module = DrinfeldModule.carlitz(F3)
    total, parts = global_height(module, T3.inverse(), breakdown=True)
    assert total == Fraction(10, 9)
    assert {m.label: r.value for m, r in parts} == {"(t)": 1, "inf": Fraction(1, 9)}
    assert global_height(module, T3.inverse(), parallel=True) == total


def test_constant_is_not_torsion_for_carlitz():
    # phi_t(1) = t + 1 already has a pole at infinity
    module = DrinfeldModule.carlitz(F3)
    assert global_height(module, RationalFunction.constant(F3, 1)) == Fraction(1, 3)
    assert oracle.local_height(module, RationalFunction.constant(F3, 1), None) == Fraction(1, 3)


def test_constant_module_fixes_constants():
    module = DrinfeldModule.from_coefficients(F3, {1: 1, 2: 1})
    res = local_height(module, PlaceModel.infinity(F3), RationalFunction.constant(F3, 1))
    assert res.value == 0 and res.certificate == L11
    assert global_height(module, RationalFunction.constant(F3, 1)) == 0


def test_generic_zero_certificate_where_t_is_integral():
    module = DrinfeldModule.carlitz(F3)
    res = local_height(module, PlaceModel.finite_unramified(Poly(F3, [1, 1])), T3)
    assert res.value == 0 and res.certificate == T3_INTEGRALITY


def test_exact_torsion_point_at_infinity():
    # phi_t(t) = t^2 + t^2 = 0 for Carlitz over F_2; no threshold certificate applies at infinity
    module = DrinfeldModule.carlitz(F2)
    res = local_height(module, PlaceModel.infinity(F2), T2)
    assert res.value == 0 and res.certificate == TORSION
    assert global_height(module, T2) == 0


def test_zero_element_rejected():
    with pytest.raises(ValueError, match="nonzero"):
        local_height(DrinfeldModule.carlitz(F3), PlaceModel.infinity(F3),
                     RationalFunction(Poly(F3)))


# --- closed form at step 0 ------------------------------------------------------

@pytest.mark.parametrize("seed", range(40))
def test_closed_form_below_threshold(seed):
    def below(th, rng):
        return math.floor(min(0, th.M_v)) - 1 - rng.randint(0, 3)

    inst = random_instance(seed, valuation=below)
    res = local_height(inst.module, inst.model, inst.x)
    v = inst.x.valuation
    m = inst.model
    assert res.steps_used == 0 and res.certificate == L2_PRIME
    assert res.value == Fraction(m.deg_v0 * m.f_res * -v, m.ext_degree)


# --- agreement with the exact global iteration -----------------------------------

MONIC = [
    lambda F: DrinfeldModule.carlitz(F),
    lambda F: DrinfeldModule.from_coefficients(F, {0: RationalFunction.t(F), 1: RationalFunction.t(F) ** 2, 2: 1}),
    lambda F: DrinfeldModule.from_coefficients(F, {1: RationalFunction.t(F).inverse(), 2: 1}),
    lambda F: DrinfeldModule.from_coefficients(F, {1: RationalFunction.t(F) + 1, 2: 1}),
]


@pytest.mark.parametrize("make", MONIC)
@settings(max_examples=25)
@given(data=st.data())
def test_matches_exact_iteration(make, data):
    F = data.draw(st.sampled_from([F2, F3]))
    module = make(F)
    x = data.draw(rationals(F, 2))
    for prime in [None, Poly.t(F), Poly(F, [1, 1])]:
        model = PlaceModel.infinity(F) if prime is None else PlaceModel.finite_unramified(prime)
        res = local_height(module, model, x)
        expected = oracle.local_height(module, x, prime, steps=3 if module.r == 1 else 2)
        if expected is not None:
            assert res.value == expected


def test_oracle_comparison_is_not_vacuous():
    rng = random.Random(5)
    module = DrinfeldModule.carlitz(F3)
    for _ in range(20):
        x = RationalFunction(Poly(F3, [rng.randrange(3) for _ in range(2)] + [1]),
                             Poly(F3, [rng.randrange(3) for _ in range(2)] + [1]))
        expected = oracle.local_height(module, x, None)
        assert expected is not None
        assert local_height(module, PlaceModel.infinity(F3), x).value == expected


def test_carlitz_over_f2_at_infinity_is_undecided():
    # valuations hover at -1 = -1/(q-1); neither threshold is ever crossed
    module = DrinfeldModule.carlitz(F2)
    res = local_height(module, PlaceModel.infinity(F2), RationalFunction.constant(F2, 1))
    assert res.certificate == UNDECIDED
    assert all(v == -1 for _, v, _ in res.trajectory[1:])


# --- certificates survive more precision and more steps ---------------------------

@pytest.mark.parametrize("seed", range(30))
def test_certificate_is_stable(seed):
    inst = random_instance(seed)
    res = local_height(inst.module, inst.model, inst.x)
    if not res.decided:
        pytest.skip("undecided within the default budget")
    again = local_height(inst.module, inst.model, inst.x, prec=2 * res.precision,
                         budget=res.steps_used + 5)
    assert again.value == res.value


def test_scaling_on_series(e1):
    module, model, x = e1
    y = Transformed(x, lambda s, p: apply(module.phi_t, s, model, p), "phi_t")
    assert local_height(module, model, y).value == 4 * local_height(module, model, x).value


@settings(max_examples=20)
@given(st.data())
def test_global_scaling(data):
    F = data.draw(st.sampled_from([F2, F3]))
    module = DrinfeldModule.from_coefficients(F, {0: RationalFunction.t(F), 1: RationalFunction.t(F).inverse(), 2: 1})
    x = data.draw(rationals(F, 2))
    assert global_height(module, apply(module.phi_t, x)) == module.q ** module.r * global_height(module, x)


# --- budget, escape multipliers and bounds -------------------------------------

def test_zero_budget_is_undecided_without_a_multiplier(e1):
    res = local_height(*e1, budget=0)
    assert res.certificate == UNDECIDED and res.value is None and not res.decided


def test_escape_path_with_zero_budget():
    module = DrinfeldModule.from_coefficients(F2, {1: T2.inverse(), 2: 1})
    model = PlaceModel.finite_unramified(Poly.t(F2))
    one = RationalFunction.constant(F2, 1)
    direct = local_height(module, model, one)
    forced = local_height(module, model, one, budget=0)
    assert forced.certificate == ESCAPE
    assert forced.multiplier.degree >= 1
    assert forced.value == direct.value == Fraction(1, 4)


def test_e1_escape_multipliers(e1):
    module, model, x = e1
    assert find_escaping_multiplier(module, model, x) == Poly(F2, [1])
    b = find_escaping_multiplier(module, model, x, nonpositive=True)
    assert b == Poly(F2, [0, 0, 1])
    y = Transformed(x, lambda s, p: phi_b_of(module, model, s, b, p))
    assert local_height(module, model, y).value / module.q ** (module.r * b.degree) == Fraction(5, 192)


def test_escape_outside_S_is_one():
    module = DrinfeldModule.carlitz(F3)
    model = PlaceModel.finite_unramified(Poly(F3, [1, 1]))
    assert find_escaping_multiplier(module, model, T3) == Poly(F3, [1])


def test_torsion_has_no_escape():
    module, model, x = _torsion_setup()
    res = local_height(module, model, x)
    assert res.value == 0 and res.certificate == L11
    with pytest.raises(NoEscapeFound):
        find_escaping_multiplier(module, model, x)


def test_bounds_for_e1(e1):
    module, model, x = e1
    res = local_height(module, model, x)
    report = bound_margin(module, model, x, res)
    assert report["applicable"] and report["passes"]
    assert report["optimality_below"]
    assert res.value >= report["e27_bound"] >= report["tame_bound"]


def test_bounds_reject_zero_height():
    module = DrinfeldModule.from_coefficients(F3, {1: 1, 2: 1})
    model = PlaceModel.infinity(F3)
    one = RationalFunction.constant(F3, 1)
    with pytest.raises(ZeroHeight):
        bound_margin(module, model, one, local_height(module, model, one))


def test_step_budget_formula(e1):
    module, model, _ = e1
    th = compute_thresholds(module, model)
    sets = compute_exception_sets(module, model, th)
    assert step_budget(module, th, sets) == th.m_steps + sets.z * sets.f_cap + module.r + 1


def test_candidate_places_cover_poles():
    module = DrinfeldModule.from_coefficients(F3, {0: T3, 1: (T3 + 1).inverse(), 2: 1})
    x = (T3 ** 2 + 1).inverse()
    labels = [m.label for m in candidate_places(module, x)]
    assert labels[-1] == "inf" and len(labels) == 3
