import random
from fractions import Fraction
from itertools import permutations, product

import pytest

from projcalc.algebra import Poly, RatFunc
from projcalc.cartan import normal_weyl, solve_normality
from projcalc.connection import Connection
from projcalc.invariants import (TRANSPOSITION, CriticalDeltaError, Derangement, build_w,
                                 check_recursion, coefficient, gamma_value, map4, map5,
                                 map5_coefficient)
from projcalc.tensors import TensorField, random_symmetric
from projcalc.witness import load_witness


def brute_w(k0, sigma, slot):
    """W straight from the index formula; ``slot`` picks the κ0 arguments of one factor."""
    m, j = k0.dim, len(sigma)
    zero = Poly.zero(k0.variables)

    def comp(idx):
        total = zero
        for nu in permutations(range(2 * j)):
            for r in product(range(m), repeat=j):
                term = None
                for t in range(j):
                    a, b = idx[nu[2 * t]], idx[nu[2 * t + 1]]
                    f = k0[slot(r[t], a, b, r[sigma[t] - 1])]
                    term = f if term is None else term * f
                    if term.is_zero():
                        break
                total = total + term
        return total

    return TensorField.from_function(m, 0, 2 * j, comp, variables=k0.variables)


@pytest.fixture(scope="module")
def witness_weyl():
    return normal_weyl(load_witness().connection)


def test_build_w_matches_brute_force(witness_weyl):
    expected = brute_w(witness_weyl, (2, 1), lambda r, a, b, s: (r, a, b, s))
    got = build_w(witness_weyl, TRANSPOSITION)
    assert got == expected and not got.is_zero()
    assert got.symmetry_holds()


def test_build_w_random_connection_brute_force():
    k0 = normal_weyl(Connection.random(3, random.Random(2), degree=1))
    assert build_w(k0, (2, 1)) == brute_w(k0, (2, 1), lambda r, a, b, s: (r, a, b, s))


def test_form_slots_first_reading_vanishes(witness_weyl):
    # feeding the ν-pair into the antisymmetric form slots kills every term
    alt = brute_w(witness_weyl, (2, 1), lambda r, a, b, s: (r, s, a, b))
    assert alt.is_zero()


def test_three_cycle_derangement():
    k0 = normal_weyl(load_witness().connection)
    w = build_w(k0, Derangement((2, 3, 1)))
    assert w.down == 6 and w.symmetry_holds()


@pytest.mark.parametrize("sigma", [(1,), (1, 2), (2, 1, 3), (2, 2)])
def test_invalid_derangements(sigma):
    with pytest.raises(ValueError):
        Derangement(sigma)


def test_derangement_parse_and_cycles():
    d = Derangement.parse("2,3,1,5,4")
    assert d.cycles() == [[0, 1, 2], [3, 4]]
    assert str(d) == "2,3,1,5,4"


@pytest.mark.parametrize("n,m", [(5, 3), (9, 3), (1, 4)])
def test_gamma_values(n, m):
    assert gamma_value(5, 3, 0) == 2
    assert gamma_value(n, m, Fraction(m + n, m + 1)) == 0


def test_gamma_and_coefficients():
    assert gamma_value(9, 3, Fraction(1, 3)) == Fraction(8, 3)
    assert coefficient(5, 5, 0, 2, 3, Fraction(1, 3)) == 1
    assert coefficient(5, 5, 1, 2, 3, Fraction(1, 3)) == Fraction(3, 4)
    for k, m, delta in [(5, 3, Fraction(1, 3)), (6, 4, Fraction(-2)), (7, 3, 0)]:
        assert map5_coefficient(k, m, delta) == Fraction(8, (m + 1)) / gamma_value(2 * k - 1, m, delta)
    formal = coefficient(5, 5, 1, 2, 3)
    assert isinstance(formal, RatFunc)
    assert formal.evaluate(Fraction(1, 3)) == Fraction(3, 4)


def test_critical_delta_names_gamma_index():
    with pytest.raises(CriticalDeltaError) as info:
        coefficient(5, 5, 1, 2, 3, 3)  # γ_9 = 12/4 - 3 = 0
    assert info.value.index == 9


@pytest.mark.parametrize("k,l,j,m", [(3, 5, 2, 3), (6, 6, 2, 3), (8, 8, 2, 4), (9, 9, 3, 3)])
def test_recursion_formal(k, l, j, m):
    assert check_recursion(k, l, j, m).passed


def test_recursion_at_rational_delta():
    assert check_recursion(6, 6, 2, 3, Fraction(2, 7)).passed


def test_map4_invariant_and_precondition(v3):
    w = load_witness()
    g = solve_normality(w.connection)
    assert map4(w.symbol4, g)[()] == Poly.const(v3, 12)
    with pytest.raises(ValueError, match="k >= 4"):
        map4(random_symmetric(3, 3, random.Random(1), variables=v3), g)
    with pytest.raises(ValueError, match="j = 2"):
        map4(w.symbol4, g, Derangement((2, 3, 1)))


def test_map5_validation():
    w = load_witness()
    g = solve_normality(w.connection)
    with pytest.raises(ValueError, match="differs"):
        map5(w.symbol5, g, delta=Fraction(1, 5))
    critical = w.symbol5.like(w.symbol5.components, weight=3)
    with pytest.raises(CriticalDeltaError):
        map5(critical, g)
