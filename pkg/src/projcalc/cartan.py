"""The normal projective Cartan connection of a torsion-free connection.

sl(m+1) is graded as g_-1 ⊕ g_0 ⊕ g_1 with g_-1 = R^m (column vectors),
g_0 = gl(m) and g_1 = R^m* (row vectors).  The bracket is

    [A, X] = A X,   [A, h] = -h A,   [A, B] = AB - BA,
    [h, X] = X h + <h, X> Id   (the endomorphism Y -> <h, Y> X plus a trace part),

and [X, Y] = [h, h'] = 0.  In matrix form this is the embedding
``(X, A, h) -> [[0, -h], [X, A]]`` modulo scalar matrices.

Along the canonical section of the frame bundle, the Cartan connection is
the g-valued one-form ``ω(∂_k) = (e_k, Γ_k, P_k)`` with ``(Γ_k)^i_j = Γ^i_{kj}``
and ``(P_k)_j = P_{kj}``.  Its curvature function is

    κ(e_k, e_l) = ∂_k ω(∂_l) - ∂_l ω(∂_k) + [ω(∂_k), ω(∂_l)].
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .algebra import Poly, as_scalar, invert_matrix
from .connection import Connection, ricci
from .report import Report
from .tensors import TensorField


def _zero_like(x):
    return x * 0


class GradedElement:
    """An element (X, A, h) of g_-1 ⊕ g_0 ⊕ g_1; entries are scalars or Polys."""

    __slots__ = ("x", "a", "h")

    def __init__(self, x, a, h):
        self.x = tuple(x)
        self.a = tuple(tuple(row) for row in a)
        self.h = tuple(h)
        m = len(self.x)
        if len(self.a) != m or any(len(r) != m for r in self.a) or len(self.h) != m:
            raise ValueError("inconsistent graded element shape")

    @property
    def dim(self):
        return len(self.x)

    @classmethod
    def zero(cls, m, zero=0):
        return cls([zero] * m, [[zero] * m for _ in range(m)], [zero] * m)

    @classmethod
    def vector(cls, m, i, zero=0, one=1):
        x = [zero] * m
        x[i] = one
        return cls(x, [[zero] * m for _ in range(m)], [zero] * m)

    @classmethod
    def covector(cls, m, i, zero=0, one=1):
        h = [zero] * m
        h[i] = one
        return cls([zero] * m, [[zero] * m for _ in range(m)], h)

    @classmethod
    def matrix(cls, a, zero=0):
        m = len(a)
        return cls([zero] * m, a, [zero] * m)

    def __add__(self, other):
        return GradedElement([p + q for p, q in zip(self.x, other.x)],
                             [[p + q for p, q in zip(r, s)] for r, s in zip(self.a, other.a)],
                             [p + q for p, q in zip(self.h, other.h)])

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return GradedElement([p * c for p in self.x], [[p * c for p in r] for r in self.a],
                             [p * c for p in self.h])

    def map(self, fn):
        return GradedElement([fn(p) for p in self.x], [[fn(p) for p in r] for r in self.a],
                             [fn(p) for p in self.h])

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.x == other.x and self.a == other.a and self.h == other.h

    __hash__ = None

    def is_zero(self):
        return all(not p for p in self.x) and all(not p for r in self.a for p in r) \
            and all(not p for p in self.h)

    def __repr__(self):
        return f"GradedElement(x={list(map(str, self.x))}, a={[list(map(str, r)) for r in self.a]}, h={list(map(str, self.h))})"


def bracket(u, v):
    """Graded Lie bracket on g_-1 ⊕ g_0 ⊕ g_1."""
    m = u.dim
    if v.dim != m:
        raise ValueError("dimension mismatch")
    R = range(m)
    z = _zero_like(u.x[0]) if m else 0

    def matvec(a, x):
        return [sum((a[i][j] * x[j] for j in R), z) for i in R]

    def vecmat(h, a):
        return [sum((h[i] * a[i][j] for i in R), z) for j in R]

    def hx(h, x):
        # [h, X] = X h + <h, X> Id
        s = sum((h[i] * x[i] for i in R), z)
        return [[x[i] * h[j] + (s if i == j else z) for j in R] for i in R]

    ua, va = u.a, v.a
    ax = matvec(ua, v.x)
    bx = matvec(va, u.x)
    x = [p - q for p, q in zip(ax, bx)]

    comm = [[sum((ua[i][r] * va[r][j] - va[i][r] * ua[r][j] for r in R), z) for j in R] for i in R]
    m1 = hx(u.h, v.x)
    m2 = hx(v.h, u.x)
    a = [[comm[i][j] + m1[i][j] - m2[i][j] for j in R] for i in R]

    ha = vecmat(u.h, va)
    hb = vecmat(v.h, ua)
    # [A, h'] = -h' A and [h, B] = h B
    h = [p - q for p, q in zip(ha, hb)]
    return GradedElement(x, a, h)


def to_matrix(e):
    """Embed into (m+1)x(m+1) matrices, representative with top-left entry 0."""
    m = e.dim
    z = _zero_like(e.x[0])
    top = [z] + [-p for p in e.h]
    rows = [top] + [[e.x[i]] + list(e.a[i]) for i in range(m)]
    return rows


def from_matrix(rows):
    """Project a matrix (modulo scalars) back to a graded element."""
    m = len(rows) - 1
    c = rows[0][0]
    x = [rows[i + 1][0] for i in range(m)]
    h = [-rows[0][j + 1] for j in range(m)]
    a = [[rows[i + 1][j + 1] - (c if i == j else 0 * c) for j in range(m)] for i in range(m)]
    return GradedElement(x, a, h)


def _matmul(a, b):
    n, k, p = len(a), len(b), len(b[0])
    z = _zero_like(a[0][0]) + _zero_like(b[0][0])
    return [[sum((a[i][r] * b[r][j] for r in range(k)), z) for j in range(p)] for i in range(n)]


def matrix_bracket(u, v):
    """Bracket computed through the matrix embedding; an independent check of `bracket`."""
    U, V = to_matrix(u), to_matrix(v)
    uv, vu = _matmul(U, V), _matmul(V, U)
    return from_matrix([[p - q for p, q in zip(r, s)] for r, s in zip(uv, vu)])


@dataclass(frozen=True, eq=False)
class NormalGauge:
    connection: Connection
    p: TensorField

    @property
    def dim(self):
        return self.connection.dim


@dataclass(frozen=True, eq=False)
class KappaField:
    """κ(e_k, e_l) for all k, l as graded elements, plus tensor views."""

    values: tuple  # values[k][l] -> GradedElement

    @property
    def dim(self):
        return len(self.values)

    def kappa_minus(self):
        """Torsion part as a (1,2) tensor T^i_{kl}."""
        m = self.dim
        V = self.values[0][0].x[0].variables
        return TensorField.from_function(m, 1, 2, lambda ikl: self.values[ikl[1]][ikl[2]].x[ikl[0]],
                                         variables=V)

    def kappa0(self):
        """g_0 part as a (1,3) tensor κ0^i_{jkl} (matrix entry (i,j), form slots k,l)."""
        m = self.dim
        V = self.values[0][0].x[0].variables
        return TensorField.from_function(
            m, 1, 3, lambda t: self.values[t[2]][t[3]].a[t[0]][t[1]], variables=V)

    def kappa1(self):
        """g_1 part as a (0,3) tensor κ1_{jkl} (covector slot j, form slots k,l)."""
        m = self.dim
        V = self.values[0][0].x[0].variables
        return TensorField.from_function(
            m, 0, 3, lambda t: self.values[t[1]][t[2]].h[t[0]], variables=V)

    def is_zero(self):
        return all(v.is_zero() for row in self.values for v in row)


def gauge_form(c, p):
    """ω(∂_k) = (e_k, Γ_k, P_k) along the canonical section."""
    m, V = c.dim, c.variables
    zero, one = Poly.zero(V), Poly.const(V, 1)
    forms = []
    for k in range(m):
        x = [one if i == k else zero for i in range(m)]
        a = [[c.gamma[i][k][j] for j in range(m)] for i in range(m)]
        h = [p[k, j] for j in range(m)]
        forms.append(GradedElement(x, a, h))
    return forms


def structure_curvature(c, p):
    """κ(e_k, e_l) = ∂_k ω_l - ∂_l ω_k + [ω_k, ω_l] for gauge data (Γ, P)."""
    m = c.dim
    names = [v for v in c.variables if v != "delta"][:m]
    forms = gauge_form(c, p)
    zero = GradedElement.zero(m, Poly.zero(c.variables))
    values = [[None] * m for _ in range(m)]
    for k in range(m):
        values[k][k] = zero
        for l in range(k + 1, m):
            d = forms[l].map(lambda q: q.partial(names[k])) - \
                forms[k].map(lambda q: q.partial(names[l]))
            val = d + bracket(forms[k], forms[l])
            values[k][l] = val
            values[l][k] = val.scale(-1)
    return KappaField(tuple(tuple(r) for r in values))


def normality_trace(kappa0):
    """N_{jl} = Σ_i κ0^i_{jil}; normality means N = 0."""
    m = kappa0.dim

    def comp(jl):
        j, l = jl
        total = Poly.zero(kappa0.variables)
        for i in range(m):
            total = total + kappa0[i, j, i, l]
        return total

    return TensorField.from_function(m, 0, 2, comp, variables=kappa0.variables)


def _p_trace_operator(m):
    """Matrix of the linear map P -> normality trace of the P-dependent part of κ0.

    Columns are indexed by the unit matrices E_ab, rows by (j, l).  With
    constant gauge data Γ = 0, P = E_ab the curvature reduces to the bracket
    terms κ(e_i, e_l) = [P_i, e_l] + [e_i, P_l].
    """
    zero_a = [[0] * m for _ in range(m)]
    cols = []
    for a, b in product(range(m), repeat=2):
        rows = [[int(i == a and j == b) for j in range(m)] for i in range(m)]
        col = []
        for j, l in product(range(m), repeat=2):
            total = 0
            for i in range(m):
                p_i = GradedElement([0] * m, zero_a, rows[i])
                p_l = GradedElement([0] * m, zero_a, rows[l])
                val = bracket(p_i, GradedElement.vector(m, l)) + \
                    bracket(GradedElement.vector(m, i), p_l)
                total += val.a[i][j]
            col.append(total)
        cols.append(col)
    return [list(row) for row in zip(*cols)]


def solve_normality(c):
    """The unique P making the Cartan curvature normal (m >= 2)."""
    m = c.dim
    if m < 2:
        raise ValueError("normal projective connections need m >= 2")
    bare = structure_curvature(c, TensorField.zeros(m, 0, 2, variables=c.variables))
    rhs = [-v for v in normality_trace(bare.kappa0()).components]
    inv = invert_matrix(_p_trace_operator(m))
    comps = []
    for row in inv:
        total = Poly.zero(c.variables)
        for coef, r in zip(row, rhs):
            if coef:
                total = total + r * coef
        comps.append(total)
    return NormalGauge(c, TensorField(m, 0, 2, comps, variables=c.variables))


def schouten_closed_form(c):
    """P_{jl} = (R_{jl} + m R_{lj}) / (m^2 - 1); the closed form of the normality solve."""
    m = c.dim
    ric = ricci(c)
    f = Fraction(1, m * m - 1)
    return TensorField.from_function(
        m, 0, 2, lambda jl: (ric[jl] + ric[jl[1], jl[0]] * m) * f, variables=c.variables)


def curvature_kappa(g):
    return structure_curvature(g.connection, g.p)


def weyl_tensor(g):
    return curvature_kappa(g).kappa0()


def normal_weyl(c):
    return weyl_tensor(solve_normality(c))


# -- H-equivariance ---------------------------------------------------------

def group_matrix(a, xi):
    """Element g0·g1 of H as a matrix: diag(1, a) times exp of the g_1 element xi."""
    m = len(a)
    a = [[as_scalar(v) for v in row] for row in a]
    xi = [as_scalar(v) for v in xi]
    g0 = [[1] + [0] * m] + [[0] + list(a[i]) for i in range(m)]
    g1 = [[1] + [-v for v in xi]] + [[0] + [int(i == j) for j in range(m)] for i in range(m)]
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*g1)] for row in g0]


def _adjoint(h, hinv, e):
    M = to_matrix(e)
    return from_matrix(_matmul(_matmul(h, M), hinv))


def gauge_equivariance(g, a, xi, kappa=None):
    """Compare the Ad-route transform of κ with the tensorial transform of κ0.

    Route 1 evaluates Ad(h^-1) κ(Ad(h)X, Ad(h)Y) in the matrix model,
    using that κ vanishes on the vertical directions; route 2 applies only
    the g_0 part ``a`` of h tensorially to κ0.  Returns (Report, moved κ0).
    """
    m = g.dim
    try:
        ainv = invert_matrix(a)
    except ZeroDivisionError:
        raise ValueError("g_0 part of h is singular") from None
    kappa = kappa or curvature_kappa(g)
    V = g.connection.variables
    h = group_matrix(a, xi)
    hinv = invert_matrix(h)

    def lift(M):
        return [[Poly.const(V, v) for v in row] for row in M]

    hP, hinvP = lift(h), lift(hinv)
    zero = Poly.zero(V)
    basis = [GradedElement.vector(m, k, zero, Poly.const(V, 1)) for k in range(m)]
    moved = [_adjoint(hP, hinvP, e).x for e in basis]  # g_-1 part of Ad(h) e_k

    def kappa_at(u, v):
        total = GradedElement.zero(m, zero)
        for k in range(m):
            if not u[k]:
                continue
            for l in range(m):
                if v[l]:
                    total = total + kappa.values[k][l].scale(u[k] * v[l])
        return total

    k0 = kappa.kappa0()
    comps_ad = []
    comps_tensor = []
    for i, j, k, l in product(range(m), repeat=4):
        val = _adjoint(hinvP, hP, kappa_at(moved[k], moved[l]))
        comps_ad.append(val.a[i][j])
        # ρ(h^-1) κ0(a e_k, a e_l): entry (i, j) of a^-1 κ0 a
        total = zero
        for p, q, r, s in product(range(m), repeat=4):
            coef = ainv[i][p] * a[q][j] * a[r][k] * a[s][l]
            if coef:
                total = total + k0[p, q, r, s] * coef
        comps_tensor.append(total)
    t_ad = TensorField(m, 1, 3, comps_ad, variables=V)
    t_tensor = TensorField(m, 1, 3, comps_tensor, variables=V)
    diff = t_ad.first_difference(t_tensor)
    rep = Report(
        identity="kappa0(uh) = rho(h^-1) kappa0(rho(h)X, rho(h)Y)",
        parameters={"a": [[str(v) for v in row] for row in a], "xi": [str(v) for v in xi]},
        status="pass" if diff is None else "fail",
        witness=None if diff is None else {
            "index": [i + 1 for i in diff[0]], "adjoint_route": str(diff[1]),
            "tensor_route": str(diff[2])},
    )
    return rep, t_ad
