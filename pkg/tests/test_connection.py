import random
from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import to_sympy
from projcalc.algebra import Poly, chart_variables
from projcalc.connection import (Connection, OneForm, compose_affine, covariant_derivative,
                                 curvature, divergence, projective_shift, pullback_affine,
                                 pullback_tensor, ricci)
from projcalc.tensors import TensorField, identity, random_symmetric

V3 = chart_variables(3)
X = sympy.symbols("x1 x2 x3")


def sympy_curvature(c):
    m = c.dim
    G = [[[to_sympy(c.gamma[i][j][k]) for k in range(m)] for j in range(m)] for i in range(m)]
    R = {}
    for i, j, k, l in product(range(m), repeat=4):
        val = sympy.diff(G[i][l][j], X[k]) - sympy.diff(G[i][k][j], X[l])
        val += sum(G[i][k][r] * G[r][l][j] - G[i][l][r] * G[r][k][j] for r in range(m))
        R[i, j, k, l] = sympy.expand(val)
    return R


def test_curvature_matches_sympy_oracle():
    c = Connection.random(3, random.Random(11), degree=2)
    R = curvature(c)
    oracle = sympy_curvature(c)
    for idx, val in oracle.items():
        assert sympy.expand(to_sympy(R[idx]) - val) == 0


def test_curvature_antisymmetry_and_bianchi():
    c = Connection.random(3, random.Random(12))
    R = curvature(c)
    for i, j, k, l in product(range(3), repeat=4):
        assert R[i, j, k, l] == -R[i, j, l, k]
        assert (R[i, j, k, l] + R[i, k, l, j] + R[i, l, j, k]).is_zero()


def test_flat_connection():
    c = Connection.flat(3)
    assert curvature(c).is_zero() and ricci(c).is_zero()


def test_torsion_rejected():
    g = [[[0] * 2 for _ in range(2)] for _ in range(2)]
    g[0][0][1] = 1
    with pytest.raises(ValueError, match="torsion"):
        Connection(2, g)


def test_json_roundtrip():
    c = Connection.random(3, random.Random(13))
    assert Connection.from_json(c.to_json()) == c
    with pytest.raises(ValueError):
        Connection.from_json({"dim": 2, "gamma": {"1,1,2": "x1", "1,2,1": "x2"}})


def test_covariant_derivative_of_identity_vanishes():
    c = Connection.random(3, random.Random(14))
    assert covariant_derivative(c, identity(3, V3)).is_zero()


def test_divergence_example():
    c = Connection.flat(3)
    s = TensorField.from_function(3, 1, 0, lambda t: Poly.var(V3, "x1") if t == (0,) else 0,
                                  variables=V3)
    assert divergence(c, s)[()] == Poly.const(V3, 1)


def test_density_term():
    # Γ^1_{11} = x2: a weight-w scalar density 1 gets ∇_1 = -w x2
    c = Connection.from_function(3, lambda i, j, k: Poly.var(V3, "x2") if (i, j, k) == (0, 0, 0) else 0)
    one = TensorField.scalar(3, 1, weight=Fraction(1, 2), variables=V3)
    d = covariant_derivative(c, one)
    assert d[(0,)] == Poly.var(V3, "x2") * Fraction(-1, 2)
    assert d[(1,)].is_zero()


def test_projective_shift_formula_and_inverse():
    rng = random.Random(15)
    c = Connection.random(3, rng)
    alpha = OneForm.random(3, rng)
    shifted = projective_shift(c, alpha)
    for i, j, k in product(range(3), repeat=3):
        expected = c.gamma[i][j][k] + (alpha.components[k] if i == j else 0) \
            + (alpha.components[j] if i == k else 0)
        assert shifted.gamma[i][j][k] == expected
    neg = OneForm(tuple(-a for a in alpha.components))
    assert projective_shift(shifted, neg) == c


matrices = st.lists(st.integers(-2, 2), min_size=9, max_size=9).map(
    lambda v: [v[0:3], v[3:6], v[6:9]])
vectors = st.lists(st.fractions(-2, 2, max_denominator=3), min_size=3, max_size=3)


def _det(A):
    return sympy.Matrix(A).det()


@settings(max_examples=8, deadline=None)
@given(matrices, vectors, matrices, vectors)
def test_pullback_composition_law(A1, b1, A2, b2):
    if _det(A1) == 0 or _det(A2) == 0:
        return
    c = Connection.random(3, random.Random(16), degree=1)
    A, b = compose_affine(A1, b1, A2, b2)
    assert pullback_affine(pullback_affine(c, A1, b1), A2, b2) == pullback_affine(c, A, b)
    s = random_symmetric(3, 2, random.Random(17), variables=V3)
    assert pullback_tensor(pullback_tensor(s, A1, b1), A2, b2) == pullback_tensor(s, A, b)


def test_curvature_is_natural():
    c = Connection.random(3, random.Random(18), degree=2)
    A, b = [[1, 1, 0], [0, 2, 0], [Fraction(1, 2), 0, 1]], [1, 0, -1]
    assert curvature(pullback_affine(c, A, b)) == pullback_tensor(curvature(c), A, b)


def test_singular_affine_map_rejected():
    with pytest.raises(ValueError, match="singular"):
        pullback_affine(Connection.flat(2), [[1, 2], [2, 4]], [0, 0])
