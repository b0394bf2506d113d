"""Dense tensor fields with polynomial components and a density weight.

A :class:`TensorField` of type (p, q) on an m-dimensional chart stores all
m**(p+q) components in row-major order of the combined index tuple
``(i1..ip, j1..jq)`` (upper indices first, 0-based).  Symmetric products use
the normalized symmetrization ``1/k! sum over permutations``; pairings are
plain contractions.
"""
from __future__ import annotations

import json
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial

from .algebra import Poly, as_scalar, chart_variables, parse


def distinct_permutations(seq):
    """Yield each distinct ordering of ``seq`` once."""
    items = sorted(seq)
    n = len(items)
    if n == 0:
        yield ()
        return
    while True:
        yield tuple(items)
        i = n - 2
        while i >= 0 and items[i] >= items[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while items[j] <= items[i]:
            j -= 1
        items[i], items[j] = items[j], items[i]
        items[i + 1:] = reversed(items[i + 1:])


def multinomial(seq):
    """Number of distinct orderings of the multiset ``seq``."""
    out = factorial(len(seq))
    for c in Counter(seq).values():
        out //= factorial(c)
    return out


def _weight_str(w):
    return str(w)


class TensorField:
    __slots__ = ("dim", "up", "down", "weight", "components", "sym_up", "sym_down", "variables")

    def __init__(self, dim, up, down, components, *, weight=0, sym_up=False,
                 sym_down=False, variables=None):
        if dim < 1 or up < 0 or down < 0:
            raise ValueError("invalid tensor shape")
        if variables is None:
            variables = chart_variables(dim)
        variables = tuple(variables)
        components = list(components)
        if len(components) != dim ** (up + down):
            raise ValueError(
                f"expected {dim ** (up + down)} components, got {len(components)}"
            )
        for n, c in enumerate(components):
            if not isinstance(c, Poly):
                components[n] = Poly.const(variables, c)
            elif c.variables != variables:
                components[n] = c.in_ring(variables)
        self.dim = dim
        self.up = up
        self.down = down
        self.weight = weight if isinstance(weight, Poly) else as_scalar(weight)
        self.components = tuple(components)
        self.sym_up = sym_up
        self.sym_down = sym_down
        self.variables = variables

    # -- construction helpers ------------------------------------------------
    @classmethod
    def from_function(cls, dim, up, down, fn, **kw):
        return cls(dim, up, down, [fn(idx) for idx in product(range(dim), repeat=up + down)], **kw)

    @classmethod
    def zeros(cls, dim, up, down, **kw):
        variables = kw.get("variables") or chart_variables(dim)
        zero = Poly.zero(variables)
        kw["variables"] = variables
        return cls(dim, up, down, [zero] * dim ** (up + down), **kw)

    @classmethod
    def scalar(cls, dim, value, **kw):
        return cls(dim, 0, 0, [value], **kw)

    def like(self, components, **overrides):
        kw = dict(weight=self.weight, sym_up=self.sym_up, sym_down=self.sym_down,
                  variables=self.variables)
        kw.update(overrides)
        up = kw.pop("up", self.up)
        down = kw.pop("down", self.down)
        return TensorField(self.dim, up, down, components, **kw)

    # -- access ----------------------------------------------------------------
    @property
    def order(self):
        return self.up + self.down

    def flat_index(self, idx):
        n = 0
        for i in idx:
            n = n * self.dim + i
        return n

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        if len(idx) != self.order:
            raise IndexError(f"expected {self.order} indices, got {len(idx)}")
        return self.components[self.flat_index(idx)]

    def index_tuples(self):
        return product(range(self.dim), repeat=self.order)

    def items(self):
        return zip(self.index_tuples(), self.components)

    def nonzero_items(self):
        return [(idx, c) for idx, c in self.items() if not c.is_zero()]

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def _same_shape(self, other):
        if (self.dim, self.up, self.down) != (other.dim, other.up, other.down):
            raise ValueError("tensor shapes differ")

    def __eq__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return ((self.dim, self.up, self.down) == (other.dim, other.up, other.down)
                and self.weight == other.weight and self.components == other.components)

    __hash__ = None

    def __add__(self, other):
        self._same_shape(other)
        return self.like([a + b for a, b in zip(self.components, other.components)],
                         sym_up=self.sym_up and other.sym_up,
                         sym_down=self.sym_down and other.sym_down)

    def __sub__(self, other):
        self._same_shape(other)
        return self.like([a - b for a, b in zip(self.components, other.components)],
                         sym_up=self.sym_up and other.sym_up,
                         sym_down=self.sym_down and other.sym_down)

    def __neg__(self):
        return self.like([-a for a in self.components])

    def scale(self, c):
        return self.like([a * c for a in self.components])

    def map_components(self, fn):
        return self.like([fn(a) for a in self.components])

    def first_difference(self, other):
        """First index (deterministic order) where the two tensors differ."""
        for idx, a, b in zip(self.index_tuples(), self.components, other.components):
            if a != b:
                return idx, a, b
        return None

    def symmetry_holds(self):
        """Check the declared symmetry flags component-wise."""
        for idx, c in self.items():
            ups, downs = idx[:self.up], idx[self.up:]
            if self.sym_up and self[tuple(sorted(ups)) + downs] != c:
                return False
            if self.sym_down and self[ups + tuple(sorted(downs))] != c:
                return False
        return True

    # -- JSON ------------------------------------------------------------------
    def to_json(self):
        comps = {}
        for idx, c in self.items():
            if c.is_zero():
                continue
            ups = ",".join(str(i + 1) for i in idx[:self.up])
            downs = ",".join(str(i + 1) for i in idx[self.up:])
            comps[f"{ups};{downs}"] = str(c)
        return {"dim": self.dim, "up": self.up, "down": self.down,
                "weight": _weight_str(self.weight), "components": comps}

    @classmethod
    def from_json(cls, data, variables=None):
        dim, up, down = int(data["dim"]), int(data["up"]), int(data["down"])
        if variables is None:
            variables = chart_variables(dim, formal_delta="delta" in json.dumps(data))
        zero = Poly.zero(variables)
        comps = [zero] * dim ** (up + down)
        t = cls(dim, up, down, comps, variables=variables)
        comps = list(t.components)
        for key, text in data.get("components", {}).items():
            ups, _, downs = key.partition(";")
            idx = tuple(int(s) - 1 for s in ups.split(",") if s.strip()) + \
                tuple(int(s) - 1 for s in downs.split(",") if s.strip())
            if len(idx) != up + down or any(not 0 <= i < dim for i in idx):
                raise ValueError(f"bad component key {key!r}")
            comps[t.flat_index(idx)] = parse(text, variables)
        weight = parse(str(data.get("weight", "0")), variables)
        weight = weight.constant_value() if weight.is_constant() else weight
        out = cls(dim, up, down, comps, weight=weight, variables=variables)
        out.sym_up = up > 1 and _check_block(out, "up")
        out.sym_down = down > 1 and _check_block(out, "down")
        return out


def _check_block(t, block):
    for idx, c in t.items():
        ups, downs = idx[:t.up], idx[t.up:]
        key = tuple(sorted(ups)) + downs if block == "up" else ups + tuple(sorted(downs))
        if t[key] != c:
            return False
    return True


def identity(dim, variables=None):
    variables = variables or chart_variables(dim)
    return TensorField.from_function(dim, 1, 1, lambda ij: int(ij[0] == ij[1]),
                                     variables=variables)


def outer(a, b):
    """Tensor product; upper blocks concatenate, then lower blocks."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    comps = []
    for idx in product(range(a.dim), repeat=a.order + b.order):
        ua, ub = idx[:a.up], idx[a.up:a.up + b.up]
        da, db = idx[a.up + b.up:a.up + b.up + a.down], idx[a.up + b.up + a.down:]
        comps.append(a[ua + da] * b[ub + db])
    return TensorField(a.dim, a.up + b.up, a.down + b.down, comps,
                       weight=a.weight + b.weight, variables=a.variables)


def contract(t, up_slot, down_slot):
    if not (0 <= up_slot < t.up and 0 <= down_slot < t.down):
        raise IndexError("contraction slot out of range")
    m = t.dim
    comps = []
    for idx in product(range(m), repeat=t.order - 2):
        ups, downs = idx[:t.up - 1], idx[t.up - 1:]
        total = Poly.zero(t.variables)
        for r in range(m):
            full = ups[:up_slot] + (r,) + ups[up_slot:] + downs[:down_slot] + (r,) + downs[down_slot:]
            total = total + t[full]
        comps.append(total)
    return TensorField(m, t.up - 1, t.down - 1, comps, weight=t.weight,
                       sym_up=t.sym_up, sym_down=t.sym_down, variables=t.variables)


def symmetrize(t, block):
    """Full symmetrization (with 1/k!) over the upper or lower index block."""
    if block not in ("up", "down"):
        raise ValueError("block must be 'up' or 'down'")
    k = t.up if block == "up" else t.down
    if k < 2:
        return t.like(t.components, **{f"sym_{block}": True})
    if (t.sym_up if block == "up" else t.sym_down):
        return t
    comps = [None] * len(t.components)
    for idx in t.index_tuples():
        if comps[t.flat_index(idx)] is not None:
            continue
        ups, downs = idx[:t.up], idx[t.up:]
        blk = ups if block == "up" else downs
        if tuple(sorted(blk)) != blk:
            continue
        total = Poly.zero(t.variables)
        perms = list(distinct_permutations(blk))
        for p in perms:
            key = p + downs if block == "up" else ups + p
            total = total + t[key]
        value = total * Fraction(1, len(perms))
        for p in perms:
            key = p + downs if block == "up" else ups + p
            comps[t.flat_index(key)] = value
    return t.like(comps, **{f"sym_{block}": True})


def sym_product(a, b):
    """The symmetric product a ∨ b = Sym(a ⊗ b) of two symmetric tensors."""
    if a.up == 0 and b.up == 0:
        block = "down"
    elif a.down == 0 and b.down == 0:
        block = "up"
    else:
        raise ValueError("sym_product needs two covariant or two contravariant tensors")
    return symmetrize(outer(a, b), block)


def pair(s, u):
    """Contract every slot of covariant ``u`` into the leading slots of contravariant ``s``."""
    if s.down != 0 or u.up != 0:
        raise ValueError("pair expects a contravariant s and a covariant u")
    if u.down > s.up:
        raise ValueError(f"cannot pair order {u.down} into order {s.up}")
    if s.dim != u.dim:
        raise ValueError("dimension mismatch")
    m, b = s.dim, u.down
    rest = s.up - b
    if s.sym_up and (u.sym_down or b < 2):
        blocks = [(B, multinomial(B)) for B in _multisets(m, b)]
    else:
        blocks = [(B, 1) for B in product(range(m), repeat=b)]
    comps = []
    zero = Poly.zero(s.variables)
    for J in product(range(m), repeat=rest):
        total = zero
        for B, mult in blocks:
            sv = s[B + J]
            if sv.is_zero():
                continue
            uv = u[B]
            if uv.is_zero():
                continue
            total = total + sv * uv * mult
        comps.append(total)
    return TensorField(m, rest, 0, comps, weight=s.weight + u.weight, sym_up=s.sym_up,
                       variables=s.variables)


def _multisets(m, k):
    return list(combinations_with_replacement(range(m), k))


def sym_from_sorted(dim, up, down, fn, block, **kw):
    """Build a tensor symmetric in one block by evaluating ``fn`` on sorted block indices."""
    cache = {}
    comps = []
    for idx in product(range(dim), repeat=up + down):
        ups, downs = idx[:up], idx[up:]
        key = (tuple(sorted(ups)) + downs) if block == "up" else (ups + tuple(sorted(downs)))
        if key not in cache:
            cache[key] = fn(key)
        comps.append(cache[key])
    kw[f"sym_{block}"] = True
    return TensorField(dim, up, down, comps, **kw)


def transform_linear(t, forward, inverse):
    """Change of frame: covariant slots by ``forward``, contravariant by ``inverse``.

    For a map y -> x = A y + b, covariant components use A (Jacobian) and
    contravariant components use A^{-1}.
    """
    m = t.dim
    comps = list(t.components)
    for slot in range(t.order):
        mat = inverse if slot < t.up else forward
        new = []
        for idx in product(range(m), repeat=t.order):
            i = idx[slot]
            total = Poly.zero(t.variables)
            for a in range(m):
                coef = mat[i][a] if slot < t.up else mat[a][i]
                if coef:
                    src = idx[:slot] + (a,) + idx[slot + 1:]
                    n = 0
                    for x in src:
                        n = n * m + x
                    total = total + comps[n] * coef
            new.append(total)
        comps = new
    return t.like(comps)


def substitute_components(t, images):
    return t.like([c.substitute(images) for c in t.components])


def random_symmetric(dim, order, rng, *, degree=1, weight=0, variables=None, coeff_range=3):
    """Random fully symmetric contravariant tensor with small integer coefficients."""
    variables = variables or chart_variables(dim)
    chart = [v for v in variables if v != "delta"]

    def fn(idx):
        return random_poly(chart, variables, degree, rng, coeff_range)

    return sym_from_sorted(dim, order, 0, fn, "up", weight=weight, variables=variables)


def random_poly(chart, variables, degree, rng, coeff_range=3, density=0.6):
    """Random polynomial of total degree <= ``degree`` in the chart variables."""
    terms = {}
    n = len(variables)
    pos = [variables.index(v) for v in chart]
    for exps in product(range(degree + 1), repeat=len(chart)):
        if sum(exps) > degree or rng.random() > density:
            continue
        e = [0] * n
        for p, k in zip(pos, exps):
            e[p] = k
        terms[tuple(e)] = rng.randint(-coeff_range, coeff_range)
    return Poly(variables, terms)


def permuted(t, perm):
    """Reorder all slots: new slot s takes old slot perm[s] (blocks must be respected)."""
    comps = []
    for idx in t.index_tuples():
        old = [0] * t.order
        for s, p in enumerate(perm):
            old[p] = idx[s]
        comps.append(t[tuple(old)])
    return t.like(comps, sym_up=False, sym_down=False)


__all__ = [
    "TensorField", "contract", "outer", "pair", "sym_product",
    "symmetrize", "identity", "transform_linear", "sym_from_sorted", "multinomial",
    "distinct_permutations", "random_symmetric", "random_poly", "permuted",
]
