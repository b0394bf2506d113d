"""Torsion-free connections on a coordinate chart.

Christoffel data is stored as ``gamma[i][j][k] = Γ^i_{jk}``.  Conventions:

* curvature ``R^i_{jkl} = ∂_k Γ^i_{lj} - ∂_l Γ^i_{kj} + Γ^i_{kr} Γ^r_{lj} - Γ^i_{lr} Γ^r_{kj}``,
  stored as a (1,3) tensor with index order (i; j, k, l);
* Ricci ``R_{jl} = Σ_i R^i_{jil}``;
* a weight-w density component picks up ``-w Γ^r_{rk}`` under ``∇_k``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product

from .algebra import Poly, as_scalar, chart_variables, invert_matrix, mat_mul, parse
from .tensors import TensorField, random_poly, sym_from_sorted, transform_linear


class Connection:
    __slots__ = ("dim", "gamma", "variables")

    def __init__(self, dim, gamma, variables=None):
        self.variables = tuple(variables or chart_variables(dim))
        self.dim = dim
        rows = []
        for i in range(dim):
            rows.append(tuple(
                tuple(_as_poly(gamma[i][j][k], self.variables) for k in range(dim))
                for j in range(dim)))
        self.gamma = tuple(rows)
        for i, j, k in product(range(dim), repeat=3):
            if j < k and self.gamma[i][j][k] != self.gamma[i][k][j]:
                raise ValueError(
                    f"connection has torsion: Γ^{i + 1}_{{{j + 1}{k + 1}}} != Γ^{i + 1}_{{{k + 1}{j + 1}}}")

    @classmethod
    def flat(cls, dim, variables=None):
        variables = tuple(variables or chart_variables(dim))
        z = Poly.zero(variables)
        return cls(dim, [[[z] * dim for _ in range(dim)] for _ in range(dim)], variables)

    @classmethod
    def from_function(cls, dim, fn, variables=None):
        """``fn(i, j, k)`` is consulted for j <= k only; the rest is filled by symmetry."""
        variables = tuple(variables or chart_variables(dim))
        g = [[[None] * dim for _ in range(dim)] for _ in range(dim)]
        for i, j, k in product(range(dim), repeat=3):
            if j <= k:
                g[i][j][k] = g[i][k][j] = _as_poly(fn(i, j, k), variables)
        return cls(dim, g, variables)

    @classmethod
    def random(cls, dim, rng, *, degree=2, coeff_range=3, density=0.6, variables=None):
        variables = tuple(variables or chart_variables(dim))
        chart = [v for v in variables if v != "delta"]
        return cls.from_function(
            dim, lambda i, j, k: random_poly(chart, variables, degree, rng, coeff_range, density),
            variables)

    def in_ring(self, variables):
        if tuple(variables) == self.variables:
            return self
        return Connection(self.dim, [[[c.in_ring(variables) for c in row] for row in mat]
                                     for mat in self.gamma], variables)

    def __getitem__(self, ijk):
        i, j, k = ijk
        return self.gamma[i][j][k]

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return self.dim == other.dim and self.gamma == other.gamma

    __hash__ = None

    def trace(self, k):
        """Γ^r_{rk}."""
        total = Poly.zero(self.variables)
        for r in range(self.dim):
            total = total + self.gamma[r][r][k]
        return total

    def to_json(self):
        out = {}
        for i, j, k in product(range(self.dim), repeat=3):
            if j <= k and not self.gamma[i][j][k].is_zero():
                out[f"{i + 1},{j + 1},{k + 1}"] = str(self.gamma[i][j][k])
        return {"dim": self.dim, "gamma": out}

    @classmethod
    def from_json(cls, data, variables=None):
        dim = int(data["dim"])
        variables = tuple(variables or chart_variables(dim))
        entries = {}
        for key, text in data.get("gamma", {}).items():
            try:
                i, j, k = (int(s) - 1 for s in key.split(","))
            except ValueError:
                raise ValueError(f"bad Christoffel key {key!r}") from None
            if not all(0 <= x < dim for x in (i, j, k)):
                raise ValueError(f"Christoffel index out of range in {key!r}")
            entries[(i, j, k)] = parse(text, variables)
        zero = Poly.zero(variables)
        g = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j, k), p in entries.items():
            other = entries.get((i, k, j))
            if other is not None and other != p:
                raise ValueError(f"asymmetric Christoffel entries at {i + 1},{j + 1},{k + 1}")
            g[i][j][k] = g[i][k][j] = p
        return cls(dim, g, variables)

    @classmethod
    def load(cls, path, variables=None):
        with open(path) as fh:
            return cls.from_json(json.load(fh), variables)


def _as_poly(value, variables):
    if isinstance(value, Poly):
        return value.in_ring(variables)
    if isinstance(value, str):
        return parse(value, variables)
    return Poly.const(variables, value)


@dataclass(frozen=True)
class OneForm:
    """Covector field α = α_k dx^k."""

    components: tuple

    @classmethod
    def from_json(cls, data, variables=None):
        dim = int(data["dim"])
        variables = tuple(variables or chart_variables(dim))
        comps = [Poly.zero(variables)] * dim
        for key, text in data.get("alpha", {}).items():
            k = int(key) - 1
            if not 0 <= k < dim:
                raise ValueError(f"one-form index out of range: {key!r}")
            comps[k] = parse(text, variables)
        return cls(tuple(comps))

    def to_json(self):
        return {"dim": len(self.components),
                "alpha": {str(k + 1): str(c) for k, c in enumerate(self.components)
                          if not c.is_zero()}}

    @classmethod
    def random(cls, dim, rng, *, degree=1, coeff_range=3, variables=None):
        variables = tuple(variables or chart_variables(dim))
        chart = [v for v in variables if v != "delta"]
        return cls(tuple(random_poly(chart, variables, degree, rng, coeff_range, 0.8)
                         for _ in range(dim)))

    def __add__(self, other):
        return OneForm(tuple(a + b for a, b in zip(self.components, other.components)))


def curvature(c):
    m, g, V = c.dim, c.gamma, c.variables
    names = [v for v in V if v != "delta"][:m]

    def comp(idx):
        i, j, k, l = idx
        if k == l:
            return Poly.zero(V)
        val = g[i][l][j].partial(names[k]) - g[i][k][j].partial(names[l])
        for r in range(m):
            val = val + g[i][k][r] * g[r][l][j] - g[i][l][r] * g[r][k][j]
        return val

    # R^i_{jkl} = -R^i_{jlk}: evaluate only k < l
    cache = {}
    comps = []
    for idx in product(range(m), repeat=4):
        i, j, k, l = idx
        if k <= l:
            val = cache.setdefault(idx, comp(idx))
        else:
            val = -cache.setdefault((i, j, l, k), comp((i, j, l, k)))
        comps.append(val)
    return TensorField(m, 1, 3, comps, variables=V)


def ricci(c):
    R = curvature(c)
    m = c.dim

    def comp(jl):
        j, l = jl
        total = Poly.zero(c.variables)
        for i in range(m):
            total = total + R[i, j, i, l]
        return total

    return TensorField.from_function(m, 0, 2, comp, variables=c.variables)


def covariant_derivative(c, t):
    """∇t with the derivative slot placed first in the lower block.

    Returns the tensor (∇t)^{I}_{k J} = ∇_k t^I_J, weight unchanged.  If ``t``
    is symmetric in its lower block, only sorted lower indices are evaluated.
    """
    if c.dim != t.dim:
        raise ValueError("dimension mismatch")
    if c.variables != t.variables:
        c = c.in_ring(t.variables)
    m, g = c.dim, c.gamma
    names = [v for v in t.variables if v != "delta"][:m]
    traces = [c.trace(k) for k in range(m)]
    w = t.weight
    density = w != 0
    zero = Poly.zero(t.variables)

    def comp(idx):
        ups, k, downs = idx[:t.up], idx[t.up], idx[t.up + 1:]
        base = ups + downs
        val = t[base].partial(names[k])
        for s, a in enumerate(ups):
            for r in range(m):
                gm = g[a][k][r]
                if gm.terms:
                    src = t[ups[:s] + (r,) + ups[s + 1:] + downs]
                    if src.terms:
                        val = val + gm * src
        for s, b in enumerate(downs):
            for r in range(m):
                gm = g[r][k][b]
                if gm.terms:
                    src = t[ups + downs[:s] + (r,) + downs[s + 1:]]
                    if src.terms:
                        val = val - gm * src
        if density and traces[k].terms and t[base].terms:
            val = val - traces[k] * t[base] * w
        return val if val.terms else zero

    cache = {}
    comps = []
    for idx in product(range(m), repeat=t.order + 1):
        key = idx
        if t.sym_down and t.down > 1:
            key = idx[:t.up + 1] + tuple(sorted(idx[t.up + 1:]))
        if key not in cache:
            cache[key] = comp(key)
        comps.append(cache[key])
    return TensorField(m, t.up, t.down + 1, comps, weight=t.weight, sym_up=t.sym_up,
                       variables=t.variables)


def divergence(c, s):
    """Div S = Σ_j ∇_j S^{j ...} for a symmetric contravariant S of order >= 1."""
    if s.down != 0 or s.up < 1:
        raise ValueError("divergence needs a contravariant tensor of order >= 1")
    m = s.dim
    nabla = covariant_derivative(c, s)

    def comp(rest):
        total = Poly.zero(s.variables)
        for j in range(m):
            total = total + nabla[(j,) + rest + (j,)]
        return total

    if s.sym_up:
        return sym_from_sorted(m, s.up - 1, 0, comp, "up", weight=s.weight,
                               variables=s.variables)
    return TensorField.from_function(m, s.up - 1, 0, comp, weight=s.weight,
                                     variables=s.variables)


def projective_shift(c, alpha):
    """Γ'^i_{jk} = Γ^i_{jk} + δ^i_j α_k + δ^i_k α_j."""
    comps = alpha.components if isinstance(alpha, OneForm) else tuple(alpha)
    if len(comps) != c.dim:
        raise ValueError("one-form has the wrong arity")
    comps = [_as_poly(a, c.variables) for a in comps]

    def fn(i, j, k):
        val = c.gamma[i][j][k]
        if i == j:
            val = val + comps[k]
        if i == k:
            val = val + comps[j]
        return val

    return Connection.from_function(c.dim, fn, c.variables)


def affine_images(A, b, variables, dim):
    """Substitution x_i -> Σ_j A_ij x_j + b_i over ``variables``."""
    names = [v for v in variables if v != "delta"][:dim]
    images = {}
    for i in range(dim):
        img = Poly.const(variables, b[i])
        for j in range(dim):
            if A[i][j]:
                img = img + Poly.var(variables, names[j]) * A[i][j]
        images[names[i]] = img
    return images


def _check_affine(A, b, dim):
    A = [[as_scalar(x) for x in row] for row in A]
    b = [as_scalar(x) for x in b]
    if len(A) != dim or any(len(row) != dim for row in A) or len(b) != dim:
        raise ValueError("affine map has the wrong shape")
    try:
        Ainv = invert_matrix(A)
    except ZeroDivisionError:
        raise ValueError("affine map is singular") from None
    return A, b, Ainv


def pullback_affine(c, A, b):
    """Christoffel data of φ*∇ for φ(y) = A y + b, written in the same variable names."""
    A, b, Ainv = _check_affine(A, b, c.dim)
    m, V = c.dim, c.variables
    images = affine_images(A, b, V, m)
    composed = [[[p.substitute(images) for p in row] for row in mat] for mat in c.gamma]

    def fn(i, j, k):
        total = Poly.zero(V)
        for a in range(m):
            if not Ainv[i][a]:
                continue
            for bb in range(m):
                if not A[bb][j]:
                    continue
                for cc in range(m):
                    if A[cc][k] and composed[a][bb][cc].terms:
                        total = total + composed[a][bb][cc] * (Ainv[i][a] * A[bb][j] * A[cc][k])
        return total

    return Connection.from_function(m, fn, V)


def pullback_tensor(t, A, b):
    """φ*t for φ(y) = A y + b; the constant density factor |det A|^w is omitted."""
    A, b, Ainv = _check_affine(A, b, t.dim)
    images = affine_images(A, b, t.variables, t.dim)
    moved = t.like([p.substitute(images) for p in t.components])
    return transform_linear(moved, A, Ainv)


def compose_affine(A1, b1, A2, b2):
    """(A1, b1) ∘ (A2, b2): y -> A1 (A2 y + b2) + b1."""
    A = mat_mul(A1, A2)
    b = [as_scalar(sum(A1[i][j] * b2[j] for j in range(len(b2))) + b1[i]) for i in range(len(b1))]
    return A, b
