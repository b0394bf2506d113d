"""Exact rational arithmetic, multivariate polynomials and their text form.

Scalars are Python ints or :class:`fractions.Fraction` (always reduced,
integral values are stored as ``int``).  :class:`Poly` is a polynomial in a
fixed, ordered list of variable names; :class:`RatFunc` is a univariate
rational function in the formal weight parameter ``delta``.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest
from math import lcm
from numbers import Rational as _RationalABC

Rational = Fraction
DELTA = "delta"


class VariableMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


def as_scalar(value):
    """Return the canonical exact scalar for ``value`` (int when integral)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        value = Fraction(value.strip())
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, _RationalABC):
        value = Fraction(value.numerator, value.denominator)
        return value.numerator if value.denominator == 1 else value
    raise TypeError(f"not an exact scalar: {value!r}")


def _canon(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _is_scalar(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def chart_variables(dim, formal_delta=False):
    names = tuple(f"x{i + 1}" for i in range(dim))
    return names + (DELTA,) if formal_delta else names


class Poly:
    """Polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples (one entry per variable) to nonzero
    coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("variables", "terms", "_hash", "_scaled")

    def __init__(self, variables, terms=None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        n = len(variables)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp} for {n} variables")
            c = as_scalar(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
        self.variables = variables
        self.terms = {e: _canon(c) for e, c in clean.items() if c}
        self._hash = None
        self._scaled = None

    @classmethod
    def _raw(cls, variables, terms):
        p = object.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        p._scaled = None
        return p

    def _integer_form(self):
        """(D, terms * D) with D the lcm of the coefficient denominators."""
        if self._scaled is None:
            den = 1
            for c in self.terms.values():
                if type(c) is not int:
                    den = lcm(den, c.denominator)
            if den == 1:
                self._scaled = (1, self.terms)
            else:
                self._scaled = (den, {e: (c * den).numerator if type(c) is not int else c * den
                                      for e, c in self.terms.items()})
        return self._scaled

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, variables):
        return cls._raw(tuple(variables), {})

    @classmethod
    def const(cls, variables, c):
        variables = tuple(variables)
        c = as_scalar(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, variables, name):
        variables = tuple(variables)
        if name not in variables:
            raise KeyError(f"unknown variable {name!r}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exp: 1})

    # -- inspection -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * len(self.variables), 0)

    def degree(self, name=None):
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    def free_variables(self):
        used = set()
        for e in self.terms:
            used.update(v for v, k in zip(self.variables, e) if k)
        return [v for v in self.variables if v in used]

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise VariableMismatch(
                    f"variable lists differ: {self.variables} vs {other.variables}"
                )
            return other
        if _is_scalar(other):
            return Poly.const(self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = _canon(s)
            else:
                del out[e]
        return Poly._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            other = as_scalar(other)
            if not other:
                return Poly._raw(self.variables, {})
            if other == 1:
                return self
            return Poly._raw(self.variables, {e: _canon(c * other) for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Poly._raw(self.variables, {})
        # multiply over the integers, divide once per result term
        da, ta = self._integer_form()
        db, tb = other._integer_form()
        out = {}
        get = out.get
        if len(self.variables) == 1:
            for (a,), c in ta.items():
                for (b,), d in tb.items():
                    k = (a + b,)
                    out[k] = get(k, 0) + c * d
        else:
            for ea, c in ta.items():
                for eb, d in tb.items():
                    k = tuple([x + y for x, y in zip(ea, eb)])
                    out[k] = get(k, 0) + c * d
        den = da * db
        if den == 1:
            return Poly._raw(self.variables, {e: c for e, c in out.items() if c})
        return Poly._raw(self.variables,
                         {e: _canon(Fraction(c, den)) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant():
                raise ZeroDivisionError("division by a non-constant polynomial")
            other = other.constant_value()
        other = as_scalar(other)
        if not other:
            raise ZeroDivisionError("division by zero")
        return self * (Fraction(1) / other)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.const(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.variables == other.variables and self.terms == other.terms
        if _is_scalar(other):
            if not other:
                return not self.terms
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- calculus and substitution ----------------------------------------
    def partial(self, name):
        try:
            i = self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return Poly._raw(self.variables, out)

    def substitute(self, images):
        """Compose with ``images``: variable ``v`` is replaced by ``images[v]``.

        ``images`` maps variable names to Polys (all over one common ring) or
        scalars; variables not mentioned are left in place, which requires
        the target ring to contain them.
        """
        target = None
        for img in images.values():
            if isinstance(img, Poly):
                target = img.variables
                break
        if target is None:
            target = self.variables
        powers = {}
        result = Poly.zero(target)
        for e, c in self.terms.items():
            term = Poly.const(target, c)
            for v, k in zip(self.variables, e):
                if not k:
                    continue
                base = images.get(v)
                if base is None:
                    base = Poly.var(target, v)
                elif not isinstance(base, Poly):
                    base = Poly.const(target, base)
                key = (v, k)
                if key not in powers:
                    powers[key] = base ** k
                term = term * powers[key]
            result = result + term
        return result

    def evaluate(self, point):
        """Evaluate at ``point`` (mapping name -> scalar); must cover free variables."""
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(self.variables, e):
                if k:
                    t = t * as_scalar(point[v]) ** k
            total += t
        return _canon(Fraction(total)) if not isinstance(total, int) else total

    def in_ring(self, variables):
        """Re-express over ``variables`` (must contain every variable in use)."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        idx = []
        for v in self.variables:
            idx.append(variables.index(v) if v in variables else None)
        out = {}
        n = len(variables)
        for e, c in self.terms.items():
            new = [0] * n
            for i, k in zip(idx, e):
                if k:
                    if i is None:
                        raise VariableMismatch(f"{self} uses variables missing from {variables}")
                    new[i] = k
            out[tuple(new)] = c
        return Poly._raw(variables, out)

    # -- printing ----------------------------------------------------------
    def sorted_terms(self):
        """Terms in graded-lexicographic order (highest total degree first)."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, exp) if k
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not parts:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f" - {body}" if neg else f" + {body}")
        return "".join(parts)

    def __repr__(self):
        return f"Poly({str(self)!r}, variables={self.variables})"


# -- parser -------------------------------------------------------------------

_SINGLE = set("+-*/^()")


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("num", int(text[i:j]), i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
        elif ch in _SINGLE:
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = tuple(variables)

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.pos += 1
        return tok

    def parse(self):
        result = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return result

    def expr(self):
        value = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, at = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if not rhs.is_constant():
                    raise ParseError("division by a non-constant expression", at)
                if rhs.is_zero():
                    raise ParseError("division by zero", at)
                value = value * (Fraction(1) / Fraction(rhs.constant_value()))
        return value

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        if self.peek()[0] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("num")
            base = base ** tok[1]
        return base

    def atom(self):
        kind, value, at = self.peek()
        if kind == "num":
            self.take()
            return Poly.const(self.variables, value)
        if kind == "name":
            self.take()
            if value not in self.variables:
                raise ParseError(f"unknown identifier {value!r}", at)
            return Poly.var(self.variables, value)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        what = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {what}", at)


def parse(text, variables):
    """Parse polynomial ``text`` over ``variables``.

    Grammar: integers, ``a/b`` (division by constants), variable names,
    ``+ - * ^`` with nonnegative integer exponents, parentheses.
    """
    if not isinstance(text, str):
        raise TypeError("polynomial text must be a string")
    return _Parser(text, variables).parse()


# -- univariate rational functions in delta ----------------------------------

def _trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return tuple(_canon(Fraction(c)) if not isinstance(c, int) else c for c in a)


def _padd(a, b):
    return _trim(x + y for x, y in zip_longest(a, b, fillvalue=0))


def _pneg(a):
    return tuple(-c for c in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _pscale(a, c):
    return _trim(x * c for x in a)


def _pdivmod(a, b):
    a = [Fraction(c) for c in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        while a and not a[-1]:
            a.pop()
    return _trim(q), _trim(a)


def _pgcd(a, b):
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    if not a:
        return (1,)
    return _pscale(a, Fraction(1) / Fraction(a[-1]))


def _peval(a, x):
    total = 0
    for c in reversed(a):
        total = total * x + c
    return total


class RatFunc:
    """Nonconstant rational function of ``delta`` in lowest terms.

    Construct through :meth:`make`, which collapses constants to exact
    scalars, so a RatFunc instance always depends on delta.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    @classmethod
    def make(cls, num, den=(1,)):
        num, den = _trim(num), _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return 0
        g = _pgcd(num, den)
        if g != (1,):
            num, _ = _pdivmod(num, g)
            den, _ = _pdivmod(den, g)
        lead = Fraction(den[-1])
        if lead != 1:
            num, den = _pscale(num, 1 / lead), _pscale(den, 1 / lead)
        if len(den) == 1 and len(num) == 1:
            return _canon(Fraction(num[0]))
        return cls(num, den)

    @classmethod
    def delta(cls):
        return cls((0, 1), (1,))

    @classmethod
    def from_poly(cls, poly):
        if poly.variables != (DELTA,):
            poly = poly.in_ring((DELTA,))
        coeffs = [0] * (poly.degree() + 1 if poly.terms else 0)
        for (k,), c in poly.terms.items():
            coeffs[k] = c
        return cls.make(coeffs)

    @staticmethod
    def _parts(x):
        if isinstance(x, RatFunc):
            return x.num, x.den
        if _is_scalar(x):
            return ((x,) if x else ()), (1,)
        return None

    def __add__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        n2, d2 = o
        if self.den == d2:
            return RatFunc.make(_padd(self.num, n2), d2)
        return RatFunc.make(_padd(_pmul(self.num, d2), _pmul(n2, self.den)), _pmul(self.den, d2))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(_pneg(self.num), self.den)

    def __sub__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return self + RatFunc._negparts(o)

    def __rsub__(self, other):
        return (-self) + other

    @staticmethod
    def _negparts(parts):
        n, d = parts
        return RatFunc.make(_pneg(n), d)

    def __mul__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        n2, d2 = o
        if d2 == (1,) and len(n2) == 1:
            return RatFunc.make(_pscale(self.num, n2[0]), self.den)
        return RatFunc.make(_pmul(self.num, n2), _pmul(self.den, d2))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        n2, d2 = o
        if not n2:
            raise ZeroDivisionError("division by zero")
        return RatFunc.make(_pmul(self.num, d2), _pmul(self.den, n2))

    def __rtruediv__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        n2, d2 = o
        return RatFunc.make(_pmul(n2, self.den), _pmul(d2, self.num))

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if _is_scalar(other):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return True

    def evaluate(self, value):
        value = as_scalar(value)
        d = _peval(self.den, value)
        if not d:
            raise ZeroDivisionError(f"denominator vanishes at delta = {value}")
        return _canon(Fraction(_peval(self.num, value)) / d)

    def numerator_poly(self):
        return Poly((DELTA,), {(i,): c for i, c in enumerate(self.num) if c})

    def denominator_poly(self):
        return Poly((DELTA,), {(i,): c for i, c in enumerate(self.den) if c})

    def __str__(self):
        num = str(self.numerator_poly())
        if self.den == (1,):
            return num
        return f"({num})/({self.denominator_poly()})"

    def __repr__(self):
        return f"RatFunc({self})"


def scalar_to_str(c):
    return str(c)


def evaluate_delta(c, value):
    """Specialize a scalar-or-RatFunc coefficient at a rational delta."""
    return c.evaluate(value) if isinstance(c, RatFunc) else c


# -- small exact linear algebra ------------------------------------------------

def invert_matrix(rows):
    """Exact inverse of a square matrix of scalars (Gauss-Jordan)."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    if any(len(row) != 2 * n for row in a):
        raise ValueError("matrix is not square")
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col]), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [[_canon(x) for x in row[n:]] for row in a]


def mat_mul(a, b):
    return [[_canon(Fraction(sum(x * y for x, y in zip(row, col)))) for col in zip(*b)] for row in a]
