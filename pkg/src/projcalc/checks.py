"""Projective invariance and affine naturality checks, reported as Report objects."""
from __future__ import annotations

from .cartan import normal_weyl, solve_normality
from .connection import projective_shift, pullback_affine, pullback_tensor
from .invariants import TRANSPOSITION, map4, map5
from .report import Report


def _compare(identity, params, left, right, names):
    diff = left.first_difference(right)
    witness = None
    if diff is not None:
        idx, a, b = diff
        witness = {"index": [i + 1 for i in idx], names[0]: str(a), names[1]: str(b)}
    return Report(identity=identity, parameters=params,
                  status="pass" if diff is None else "fail", witness=witness)


def weyl_projective_invariance(c, alpha):
    return _compare("kappa0(Gamma) = kappa0(Gamma + alpha)", {"m": c.dim},
                    normal_weyl(c), normal_weyl(projective_shift(c, alpha)),
                    ("original", "shifted"))


def weyl_affine_naturality(c, A, b):
    left = normal_weyl(pullback_affine(c, A, b))
    right = pullback_tensor(normal_weyl(c), A, b)
    return _compare("kappa0(phi^* Gamma) = phi^* kappa0(Gamma)",
                    {"m": c.dim, "A": _strs(A), "b": [str(v) for v in b]},
                    left, right, ("of_pullback", "pullback_of"))


def _strs(A):
    return [[str(v) for v in row] for row in A]


def _apply(order, S, c, d, coefficient_override=None):
    g = solve_normality(c)
    if order == 4:
        return map4(S, g, d)
    return map5(S, g, d, coefficient_override=coefficient_override)


def map_projective_invariance(order, S, c, alpha, d=TRANSPOSITION, coefficient_override=None):
    params = {"map": order, "m": c.dim, "k": S.up, "sigma": str(d), "delta": str(S.weight)}
    if coefficient_override is not None:
        params["coefficient"] = str(coefficient_override)
    return _compare(f"map{order}(S, Gamma) = map{order}(S, Gamma + alpha)", params,
                    _apply(order, S, c, d, coefficient_override),
                    _apply(order, S, projective_shift(c, alpha), d, coefficient_override),
                    ("original", "shifted"))


def map_affine_naturality(order, S, c, A, b, d=TRANSPOSITION):
    left = _apply(order, pullback_tensor(S, A, b), pullback_affine(c, A, b), d)
    right = pullback_tensor(_apply(order, S, c, d), A, b)
    return _compare(f"map{order}(phi^* S, phi^* Gamma) = phi^* map{order}(S, Gamma)",
                    {"map": order, "m": c.dim, "k": S.up, "A": _strs(A), "b": [str(v) for v in b]},
                    left, right, ("of_pullback", "pullback_of"))
