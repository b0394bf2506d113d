"""Exact term algebra for functions on the Cartan bundle.

Scalar functions are linear combinations (coefficients in Q(δ)) of products
of *atoms*.  An atom ``(gen, idx, word)`` is the component ``idx`` of a
generator (the invariant W or the lifted symbol S) hit by the derivative
letters of ``word`` in order: ``word = (a1, ..., an)`` stands for
``L_{ω^-1(e_an)} ... L_{ω^-1(e_a1)} gen[idx]``.  Generators are fully
symmetric, so ``idx`` is kept sorted; words are never reordered because
derivative letters do not commute.

Fundamental fields act through the commutation rules

    L_{A*} L_X = L_X L_{A*} + L_{AX}          (A in g_0)
    L_{h*} L_X = L_X L_{h*} - L_{[h,X]*}      (h in g_1)

with ``L_{A*} f = -ρ_*(A) f`` and ``L_{h*} f = 0`` on the generators.  The
minus sign in the second rule makes ``h*`` the fundamental field of the
matrix with ``h`` in its top-right block; with the grading conventions of
:func:`projcalc.cartan.bracket` that matrix is the element ``-h``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, permutations, product
from math import factorial
from typing import NamedTuple

from .algebra import RatFunc
from .cartan import GradedElement, bracket
from .invariants import coefficient
from .parallel import parallel_map
from .report import Report
from .tensors import distinct_permutations, multinomial


class Generator(NamedTuple):
    """A generator's value space: fully symmetric, with density weight c0 + c1·δ."""

    name: str
    lower: int
    upper: int
    weight_const: Fraction = Fraction(0)
    weight_delta: Fraction = Fraction(0)

    @property
    def weight(self):
        return _weight_value((self.weight_const, self.weight_delta))


def weyl_generator(j):
    return Generator("W", 2 * j, 0)


def symbol_generator(k):
    return Generator("S", 0, k, Fraction(0), Fraction(1))


def _weight_value(w):
    c0, c1 = w
    if c1:
        return c0 + c1 * RatFunc.delta()
    return c0


# -- coefficient-dict helpers --------------------------------------------------

def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _lin_scale(d, c):
    if c == 1:
        return dict(d)
    return {k: v * c for k, v in d.items() if v * c}


# -- atom-level actions ----------------------------------------------------------

def _sparse(matrix):
    return tuple(((i, j), v) for i, row in enumerate(matrix) for j, v in enumerate(row) if v)


@lru_cache(maxsize=None)
def bracket_matrix(m, c, a):
    """Sparse entries of [ε^c, e_a] ∈ g_0."""
    return _sparse(bracket(GradedElement.covector(m, c), GradedElement.vector(m, a)).a)


@lru_cache(maxsize=None)
def _g0_atom(A, atom):
    """L_{A*} on one atom: the tensorial action -ρ_*(A) on letters and value slots."""
    gen, idx, word = atom
    out = {}
    for t, a in enumerate(word):
        for (row, col), v in A:
            if col == a:
                _acc(out, (gen, idx, word[:t] + (row,) + word[t + 1:]), v)
    if gen.lower:
        for s, i in enumerate(idx):
            for (row, col), v in A:
                if col == i:
                    _acc(out, (gen, tuple(sorted(idx[:s] + (row,) + idx[s + 1:])), word), v)
    if gen.upper:
        for s, b in enumerate(idx):
            for (row, col), v in A:
                if row == b:
                    _acc(out, (gen, tuple(sorted(idx[:s] + (col,) + idx[s + 1:])), word), -v)
    if gen.weight_const or gen.weight_delta:
        tr = sum(v for (row, col), v in A if row == col)
        if tr:
            _acc(out, atom, gen.weight * tr)
    return out


@lru_cache(maxsize=None)
def _g1_atom(m, c, atom):
    """L_{(ε^c)*} on one atom, by pushing through the derivative letters."""
    gen, idx, word = atom
    if not word:
        return {}
    a = word[-1]
    prefix = (gen, idx, word[:-1])
    out = {}
    for (g2, i2, w2), v in _g1_atom(m, c, prefix).items():
        _acc(out, (g2, i2, w2 + (a,)), v)
    for key, v in _g0_atom(bracket_matrix(m, c, a), prefix).items():
        _acc(out, key, -v)
    return out


def clear_caches():
    _g0_atom.cache_clear()
    _g1_atom.cache_clear()


# -- scalar functions: dict monomial -> coefficient -----------------------------

def _leibniz(scalar, atom_op):
    """Apply a derivation given on atoms to a scalar (products of atoms)."""
    out = {}
    for mono, coef in scalar.items():
        for pos, atom in enumerate(mono):
            for new_atom, v in atom_op(atom).items():
                new = tuple(sorted(mono[:pos] + (new_atom,) + mono[pos + 1:]))
                _acc(out, new, coef * v)
    return out


def _letter(a):
    def op(atom):
        gen, idx, word = atom
        return {(gen, idx, word + (a,)): 1}
    return op


def _scalar_mul(x, y):
    out = {}
    for m1, c1 in x.items():
        for m2, c2 in y.items():
            _acc(out, tuple(sorted(m1 + m2)), c1 * c2)
    return out


def _scalar_add(out, x, factor=1):
    for mono, c in x.items():
        _acc(out, mono, c * factor)


def format_atom(atom):
    gen, idx, word = atom
    s = f"{gen.name}[{','.join(str(i + 1) for i in idx)}]"
    if word:
        s = "".join(f"L{a + 1} " for a in reversed(word)) + s
    return s


def format_scalar(scalar):
    if not scalar:
        return "0"
    parts = []
    for mono in sorted(scalar):
        c = scalar[mono]
        parts.append(f"({c})*" + "*".join(format_atom(a) for a in mono))
    return " + ".join(parts)


# -- tensor-valued expressions ---------------------------------------------------

class FormalExpr:
    """Tensor-valued function on the bundle with explicit lower/upper slots.

    ``comps`` maps ``(lower_indices, upper_indices)`` to a scalar; absent
    keys are zero.  ``weight`` is the density weight ``(c0, c1)`` = c0 + c1·δ.
    """

    __slots__ = ("m", "lower", "upper", "weight", "comps")

    def __init__(self, m, lower, upper, comps, weight=(Fraction(0), Fraction(0))):
        self.m = m
        self.lower = lower
        self.upper = upper
        self.weight = (Fraction(weight[0]), Fraction(weight[1]))
        self.comps = {k: v for k, v in comps.items() if v}

    @classmethod
    def generator(cls, gen, m):
        comps = {}
        for idx in product(range(m), repeat=gen.lower + gen.upper):
            atom = (gen, tuple(sorted(idx)), ())
            key = (idx, ()) if gen.lower else ((), idx)
            comps[key] = {(atom,): 1}
        return cls(m, gen.lower, gen.upper, comps, (gen.weight_const, gen.weight_delta))

    def like(self, comps, lower=None, upper=None, weight=None):
        return FormalExpr(self.m, self.lower if lower is None else lower,
                          self.upper if upper is None else upper, comps,
                          self.weight if weight is None else weight)

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, FormalExpr):
            return NotImplemented
        return (self.m, self.lower, self.upper) == (other.m, other.lower, other.upper) \
            and self.comps == other.comps

    __hash__ = None

    def _check(self, other):
        if (self.m, self.lower, self.upper) != (other.m, other.lower, other.upper):
            raise ValueError("expression shapes differ")

    def __add__(self, other):
        self._check(other)
        comps = {k: dict(v) for k, v in self.comps.items()}
        for k, v in other.comps.items():
            _scalar_add(comps.setdefault(k, {}), v)
        return self.like(comps)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        if not c:
            return self.like({})
        return self.like({k: _lin_scale(v, c) for k, v in self.comps.items()})

    def first_difference(self, other):
        self._check(other)
        for key in sorted(set(self.comps) | set(other.comps)):
            a, b = self.comps.get(key, {}), other.comps.get(key, {})
            if a != b:
                return key, a, b
        return None

    def __repr__(self):
        return f"FormalExpr(m={self.m}, lower={self.lower}, upper={self.upper}, terms={len(self.comps)})"


def deriv(a, e):
    """L_{ω^-1(e_a)} applied componentwise."""
    op = _letter(a)
    return e.like({k: _leibniz(v, op) for k, v in e.comps.items()})


def grad(e):
    """Prepend a lower slot carrying one derivative letter."""
    comps = {}
    for a in range(e.m):
        op = _letter(a)
        for (lo, up), v in e.comps.items():
            comps[((a,) + lo, up)] = _leibniz(v, op)
    return e.like(comps, lower=e.lower + 1)


def symmetrize_lower(e, slots=None):
    """Average over permutations of the given lower slots (default: all)."""
    slots = list(range(e.lower)) if slots is None else list(slots)
    k = len(slots)
    if k < 2:
        return e
    if k == e.lower and not e.upper:
        # full symmetrization is the average over each index multiset's orbit
        comps = {}
        for key, v in polarize(e).items():
            norm = Fraction(1, multinomial(key))
            for seq in distinct_permutations(key):
                comps[(seq, ())] = _lin_scale(v, norm)
        return e.like(comps)
    norm = Fraction(1, factorial(k))
    comps = {}
    for (lo, up), v in e.comps.items():
        vals = [lo[s] for s in slots]
        for perm in permutations(range(k)):
            new = list(lo)
            for s, p in zip(slots, perm):
                new[s] = vals[p]
            target = comps.setdefault((tuple(new), up), {})
            _scalar_add(target, v, norm)
    return e.like(comps)


def sym_deriv(k, e):
    """∇_s^k: k derivative letters symmetrized with 1/k! (new slots first)."""
    for _ in range(k):
        e = grad(e)
    return symmetrize_lower(e, range(k))


def contract(e, lower_slot, upper_slot):
    if not (0 <= lower_slot < e.lower and 0 <= upper_slot < e.upper):
        raise IndexError("contraction slot out of range")
    comps = {}
    for (lo, up), v in e.comps.items():
        if lo[lower_slot] != up[upper_slot]:
            continue
        key = (lo[:lower_slot] + lo[lower_slot + 1:], up[:upper_slot] + up[upper_slot + 1:])
        _scalar_add(comps.setdefault(key, {}), v)
    return e.like(comps, lower=e.lower - 1, upper=e.upper - 1)


def formal_div(e):
    """Σ_j L_{ω^-1(e_j)} e(ε^j): one derivative letter against the first upper slot."""
    if e.upper < 1:
        raise ValueError("divergence needs a contravariant slot")
    return contract(grad(e), 0, 0)


def pair(s, u):
    """Contract all lower slots of ``u`` into the leading upper slots of ``s``."""
    if s.lower or u.upper:
        raise ValueError("pair expects contravariant s and covariant u")
    n = u.lower
    if n > s.upper:
        raise ValueError("u has more slots than s")
    comps = {}
    for (_, up), sv in s.comps.items():
        uv = u.comps.get((up[:n], ()))
        if uv:
            _scalar_add(comps.setdefault(((), up[n:]), {}), _scalar_mul(sv, uv))
    weight = (s.weight[0] + u.weight[0], s.weight[1] + u.weight[1])
    return s.like(comps, lower=0, upper=s.upper - n, weight=weight)


def sym_product_covector(c, e):
    """ε^c ∨ e for a covariant e: Sym(ε^c ⊗ e) over all lower slots."""
    if e.upper:
        raise ValueError("expected a covariant expression")
    comps = {((c,) + lo, up): dict(v) for (lo, up), v in e.comps.items()}
    return symmetrize_lower(e.like(comps, lower=e.lower + 1))


def g1_action(c, e):
    """L_{h*} with h = ε^c, componentwise."""
    m = e.m
    op = lambda atom: _g1_atom(m, c, atom)  # noqa: E731
    return e.like({k: _leibniz(v, op) for k, v in e.comps.items()})


def g0_action(A, e):
    """L_{A*} for A ∈ gl(m), componentwise."""
    A = _sparse(A) if not _is_sparse(A) else A
    op = lambda atom: _g0_atom(A, atom)  # noqa: E731
    return e.like({k: _leibniz(v, op) for k, v in e.comps.items()})


def _is_sparse(A):
    return isinstance(A, tuple) and (not A or isinstance(A[0][0], tuple))


def rep_action(A, e):
    """-ρ_*(A) on the value space of ``e`` (its free slots and density weight)."""
    A = _sparse(A) if not _is_sparse(A) else A
    # covariant slots pull back by A, contravariant slots push forward by -A
    comps = {}
    w = _weight_value(e.weight)
    tr = sum(a for (row, col), a in A if row == col)
    for (lo, up) in product(product(range(e.m), repeat=e.lower), product(range(e.m), repeat=e.upper)):
        acc = {}
        for s, i in enumerate(lo):
            for (row, col), a in A:
                if col == i:
                    src = e.comps.get((lo[:s] + (row,) + lo[s + 1:], up))
                    if src:
                        _scalar_add(acc, src, a)
        for s, b in enumerate(up):
            for (row, col), a in A:
                if row == b:
                    src = e.comps.get((lo, up[:s] + (col,) + up[s + 1:]))
                    if src:
                        _scalar_add(acc, src, -a)
        if w:
            src = e.comps.get((lo, up))
            if tr and src:
                _scalar_add(acc, src, w * tr)
        if acc:
            comps[(lo, up)] = acc
    return e.like(comps)


# -- polarized symmetric forms -----------------------------------------------------
#
# A fully symmetrized covariant expression F is determined by the sums
# P_F(I) = Σ_{sequences s ~ I} F_s over each multiset I of slot indices,
# i.e. by the coefficients of F(X, ..., X) as a polynomial in X.

def polarize(e):
    """Multiset-keyed sums of a covariant expression (linear in atoms)."""
    if e.upper:
        raise ValueError("expected a covariant expression")
    out = {}
    for (lo, _), v in e.comps.items():
        _scalar_add(out.setdefault(tuple(sorted(lo)), {}), v)
    return {k: v for k, v in out.items() if v}


def polar_sym_deriv_w(k, j, m):
    """Polarized ∇_s^k W built directly: word letters and W slots all fed X."""
    gen = weyl_generator(j)
    out = {}
    w_sets = [(i, multinomial(i)) for i in combinations_with_replacement(range(m), 2 * j)]
    for word in product(range(m), repeat=k):
        for i, mult in w_sets:
            key = tuple(sorted(word + i))
            _acc(out.setdefault(key, {}), ((gen, i, word),), mult)
    return out


def polar_g1(c, m, form):
    op = lambda atom: _g1_atom(m, c, atom)  # noqa: E731
    out = {}
    for key, v in form.items():
        r = _leibniz(v, op)
        if r:
            out[key] = r
    return out


def polar_covector_product(c, form, factor=1):
    """Polarized ε^c ∨ F: P(I) = P_F(I - {c})."""
    out = {}
    for key, v in form.items():
        new = tuple(sorted(key + (c,)))
        out[new] = _lin_scale(v, factor)
    return {k: v for k, v in out.items() if v}


def _first_polar_difference(a, b):
    for key in sorted(set(a) | set(b)):
        x, y = a.get(key, {}), b.get(key, {})
        if x != y:
            return key, x, y
    return None


def lemma_coefficient(k, j):
    return -k * (k + 4 * j - 1)


def _lemma_case(args):
    k, j, m, c = args
    lhs = polar_g1(c, m, polar_sym_deriv_w(k, j, m))
    if k == 0:
        rhs = {}
    else:
        rhs = polar_covector_product(c, polar_sym_deriv_w(k - 1, j, m), lemma_coefficient(k, j))
    diff = _first_polar_difference(lhs, rhs)
    if diff is None:
        return None
    key, x, y = diff
    return {"h": f"e^{c + 1}", "slots": [i + 1 for i in key],
            "lhs": format_scalar(x), "rhs": format_scalar(y)}


def verify_lemma(k, j, m):
    """L_{h*} ∇_s^k W = -k(k+4j-1) h ∨ ∇_s^{k-1} W for every basis covector h."""
    if j < 2 or k < 0:
        raise ValueError("need j >= 2 and k >= 0")
    results = parallel_map(_lemma_case, [(k, j, m, c) for c in range(m)])
    witness = next((r for r in results if r is not None), None)
    return Report(
        identity="L_{h*} nabla_s^k W = -k(k+4j-1) h v nabla_s^{k-1} W",
        parameters={"k": k, "j": j, "m": m, "coefficient": lemma_coefficient(k, j)},
        status="pass" if witness is None else "fail",
        witness=witness,
    )


def theorem_terms(k, l, j, m):
    """The expressions ⟨Div^r p*S, ∇_s^{l-r-2j} W⟩ for r = 0..l-2j."""
    if l < 2 * j or k < l:
        raise ValueError("need l >= 2j and k >= l")
    S = FormalExpr.generator(symbol_generator(k), m)
    W = FormalExpr.generator(weyl_generator(j), m)
    terms = []
    div = S
    for r in range(l - 2 * j + 1):
        terms.append(pair(div, sym_deriv(l - r - 2 * j, W)))
        if r < l - 2 * j:
            div = formal_div(div)
    return terms


def _combine(parts, coeffs):
    total = parts[0].scale(coeffs[0])
    for p, c in zip(parts[1:], coeffs[1:]):
        total = total + p.scale(c)
    return total


def _theorem_actions(args):
    k, l, j, m, c = args
    return [g1_action(c, t) for t in theorem_terms(k, l, j, m)]


def verify_theorem(k, l, j, m, coefficients=None, sharpness=True):
    """g_1-equivariance of Σ_r C_{k,l,r} ⟨Div^r p*S, ∇_s^{l-r-2j} W⟩ with δ formal.

    ``coefficients`` overrides the C_{k,l,r}.  With ``sharpness`` each
    coefficient is in turn replaced by C + 1 and the action must become
    nonzero (only meaningful when there are at least two terms).
    """
    n_terms = l - 2 * j + 1
    if coefficients is None:
        coefficients = [coefficient(k, l, r, j, m) for r in range(n_terms)]
    actions = parallel_map(_theorem_actions, [(k, l, j, m, c) for c in range(m)])
    witness = None
    for c, parts in enumerate(actions):
        total = _combine(parts, coefficients)
        if not total.is_zero():
            key = sorted(total.comps)[0]
            witness = {"h": f"e^{c + 1}", "slots": [i + 1 for i in key[1]],
                       "value": format_scalar(total.comps[key])}
            break
    sharp = None
    if sharpness and n_terms > 1:
        sharp = []
        for r in range(n_terms):
            bumped = list(coefficients)
            bumped[r] = bumped[r] + 1
            broken = any(not _combine(parts, bumped).is_zero() for parts in actions)
            sharp.append({"r": r, "perturbed_breaks_equivariance": broken})
    status = "pass" if witness is None else "fail"
    if sharp is not None and not all(s["perturbed_breaks_equivariance"] for s in sharp):
        status = "fail"
        witness = witness or {"sharpness": sharp}
    params = {"k": k, "l": l, "j": j, "m": m, "delta": "formal",
              "coefficients": [str(c) for c in coefficients]}
    if sharp is not None:
        params["sharpness"] = sharp
    return Report(
        identity="L_{h*} sum_r C_{k,l,r} <Div^r p*S, nabla_s^{l-r-2j} W> = 0",
        parameters=params, status=status, witness=witness)
