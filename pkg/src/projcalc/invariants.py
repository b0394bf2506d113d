"""Invariants built from the Weyl tensor and the order-4/5 equivariant maps.

The Weyl tensor is stored as ``κ0[i, a, b, c]`` with ``i`` the upper index,
``a`` the lower g_0 index and ``(b, c)`` the two (antisymmetric) form slots.
For a derangement σ of {1..j}:

    W(e_{i1}, ..., e_{i2j}) = Σ_ν Σ_{r1..rj} Π_t κ0[r_t, i_ν(2t-1), i_ν(2t), r_σ(t)]

ν running over all permutations of the 2j slots (no 1/(2j)! factor).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, factorial

from .algebra import Poly, RatFunc, as_scalar
from .cartan import weyl_tensor
from .connection import covariant_derivative, divergence
from .report import Report
from .tensors import distinct_permutations, pair, sym_from_sorted, symmetrize


class CriticalDeltaError(ValueError):
    def __init__(self, index, delta):
        super().__init__(f"critical weight: gamma_{index} vanishes at delta = {delta}")
        self.index = index
        self.delta = delta


class Derangement:
    """Fixed-point-free permutation σ of {1..j}, j >= 2 (stored 1-based)."""

    __slots__ = ("sigma",)

    def __init__(self, sigma):
        sigma = tuple(int(s) for s in sigma)
        j = len(sigma)
        if j < 2:
            raise ValueError("a derangement needs j >= 2")
        if sorted(sigma) != list(range(1, j + 1)):
            raise ValueError(f"{sigma} is not a permutation of 1..{j}")
        fixed = [l for l in range(1, j + 1) if sigma[l - 1] == l]
        if fixed:
            raise ValueError(f"sigma fixes {fixed}; a derangement has no fixed points")
        self.sigma = sigma

    @classmethod
    def parse(cls, text):
        return cls(int(s) for s in text.replace(" ", "").split(",") if s)

    @property
    def j(self):
        return len(self.sigma)

    def cycles(self):
        """Cycles of σ as lists of 0-based positions, in order t, σ(t), σ²(t), ..."""
        seen, out = set(), []
        for start in range(self.j):
            if start in seen:
                continue
            cyc, t = [], start
            while t not in seen:
                seen.add(t)
                cyc.append(t)
                t = self.sigma[t] - 1
            out.append(cyc)
        return out

    def __str__(self):
        return ",".join(map(str, self.sigma))

    def __eq__(self, other):
        return isinstance(other, Derangement) and self.sigma == other.sigma

    def __hash__(self):
        return hash(self.sigma)


TRANSPOSITION = Derangement((2, 1))


def _matprod(x, y, zero):
    m = len(x)
    out = []
    for i in range(m):
        row = []
        for k in range(m):
            total = zero
            for r in range(m):
                a, b = x[i][r], y[r][k]
                if a.terms and b.terms:
                    total = total + a * b
            row.append(total)
        out.append(row)
    return out


def build_w(kappa0, d):
    """The fully symmetric (0, 2j) invariant W built from the Weyl tensor."""
    if kappa0.up != 1 or kappa0.down != 3:
        raise ValueError("expected a (1,3) Weyl tensor")
    if not isinstance(d, Derangement):
        d = Derangement(d)
    m, j, V = kappa0.dim, d.j, kappa0.variables
    zero = Poly.zero(V)
    # K_ab[r][s] = κ0[r, a, b, s]
    pair_mats = {(a, b): [[kappa0[r, a, b, s] for s in range(m)] for r in range(m)]
                 for a, b in product(range(m), repeat=2)}
    cycles = d.cycles()
    chain_cache = {}

    def chain_trace(pairs):
        if pairs in chain_cache:
            return chain_cache[pairs]
        mat = pair_mats[pairs[0]]
        for p in pairs[1:]:
            mat = _matprod(mat, pair_mats[p], zero)
        total = zero
        for r in range(m):
            total = total + mat[r][r]
        chain_cache[pairs] = total
        return total

    u_cache = {}

    def unsym(idx):
        # U(i) = Π over cycles of tr(K_{t1} K_{σ t1} ...)
        if idx in u_cache:
            return u_cache[idx]
        val = None
        for cyc in cycles:
            tr = chain_trace(tuple((idx[2 * t], idx[2 * t + 1]) for t in cyc))
            if not tr.terms:
                val = zero
                break
            val = tr if val is None else val * tr
        u_cache[idx] = val
        return val

    def comp(sorted_idx):
        total = zero
        for p in distinct_permutations(sorted_idx):
            total = total + unsym(p)
        # each distinct arrangement occurs Π(count!) times among all ν
        mult = 1
        for v in set(sorted_idx):
            mult *= factorial(sorted_idx.count(v))
        return total * mult

    return sym_from_sorted(m, 0, 2 * j, comp, "down", variables=V)


def gamma_value(n, m, delta=None):
    """γ_n = (m + n)/(m + 1) - δ; ``delta=None`` means formal δ."""
    if delta is None or delta == "formal":
        delta = RatFunc.delta()
    elif not isinstance(delta, RatFunc):
        delta = as_scalar(delta)
    return Fraction(m + n, m + 1) - delta


def coefficient(k, l, r, j, m, delta=None):
    """C_{k,l,r} = (l+2j-1)! / ((m+1)^r (l+2j-1-r)! γ_{2k-1}...γ_{2k-r}) · binom(l-2j, r)."""
    if l < 2 * j:
        raise ValueError("need l >= 2j")
    if not 0 <= r <= l - 2 * j:
        raise ValueError(f"r must lie in 0..{l - 2 * j}")
    if r == 0:
        return 1
    denom = 1
    for t in range(1, r + 1):
        g = gamma_value(2 * k - t, m, delta)
        if not isinstance(g, RatFunc) and g == 0:
            raise CriticalDeltaError(2 * k - t, delta)
        denom = denom * g
    lead = Fraction(factorial(l + 2 * j - 1) * comb(l - 2 * j, r),
                    (m + 1) ** r * factorial(l + 2 * j - 1 - r))
    value = lead / denom if isinstance(denom, RatFunc) else lead / Fraction(denom)
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def check_recursion(k, l, j, m, delta=None):
    """C_r · r(m+2k-r-(m+1)δ) = C_{r-1} (l-r-2j+1)(l-r+2j) for r = 1..l-2j."""
    dl = RatFunc.delta() if delta is None or delta == "formal" else as_scalar(delta)
    witness = None
    for r in range(1, l - 2 * j + 1):
        lhs = coefficient(k, l, r, j, m, delta) * r * (m + 2 * k - r - (m + 1) * dl)
        rhs = coefficient(k, l, r - 1, j, m, delta) * (l - r - 2 * j + 1) * (l - r + 2 * j)
        if lhs != rhs:
            witness = {"r": r, "lhs": str(lhs), "rhs": str(rhs)}
            break
    return Report(
        identity="C_{k,l,r} r (m+2k-r-(m+1)delta) = C_{k,l,r-1} (l-r-2j+1)(l-r+2j)",
        parameters={"k": k, "l": l, "j": j, "m": m,
                    "delta": "formal" if delta is None or delta == "formal" else str(delta)},
        status="pass" if witness is None else "fail",
        witness=witness,
    )


def _check_symbol(S, k_min):
    if S.down != 0:
        raise ValueError("the symbol must be a contravariant tensor")
    if S.up < k_min:
        raise ValueError(f"precondition k >= {k_min} violated: symbol has order {S.up}")
    if not S.sym_up and S.up > 1:
        raise ValueError("the symbol must be fully symmetric")


def invariant_t(g, d=TRANSPOSITION):
    return build_w(weyl_tensor(g), d)


def map4(S, g, d=TRANSPOSITION, T=None):
    """⟨S, T⟩ with T the j = 2 invariant of the normal Weyl tensor."""
    d = d if isinstance(d, Derangement) else Derangement(d)
    if d.j != 2:
        raise ValueError("the order-4 map uses j = 2")
    _check_symbol(S, 4)
    if T is None:
        T = invariant_t(g, d)
    return pair(S, T)


def map5_parts(S, g, d=TRANSPOSITION, T=None):
    """(⟨S, ∇_s T⟩, ⟨Div S, T⟩) for the connection of ``g``."""
    d = d if isinstance(d, Derangement) else Derangement(d)
    if d.j != 2:
        raise ValueError("the order-5 map uses j = 2")
    _check_symbol(S, 5)
    if T is None:
        T = invariant_t(g, d)
    conn = g.connection
    nabla_t = symmetrize(covariant_derivative(conn, T), "down")
    return pair(S, nabla_t), pair(divergence(conn, S), T)


def map5_coefficient(k, m, delta):
    return coefficient(k, 5, 1, 2, m, delta)


def map5(S, g, d=TRANSPOSITION, k=None, delta=None, coefficient_override=None, T=None):
    """⟨S, ∇_s T⟩ + 8/((m+1)γ_{2k-1}) ⟨Div S, T⟩ at a rational non-critical δ."""
    _check_symbol(S, 5)
    k = S.up if k is None else k
    if k != S.up:
        raise ValueError(f"k = {k} does not match the symbol order {S.up}")
    if delta is None:
        delta = S.weight
    if isinstance(delta, Poly):
        raise ValueError("map5 needs a rational delta")
    delta = as_scalar(delta)
    if S.weight != delta:
        raise ValueError(f"symbol weight {S.weight} differs from delta = {delta}")
    c = map5_coefficient(k, S.dim, delta) if coefficient_override is None else coefficient_override
    first, second = map5_parts(S, g, d, T)
    return first + second.scale(c)
