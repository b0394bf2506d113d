"""Command-line front end.  Exit codes: 0 success, 1 failed check, 2 bad input."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algebra import ParseError, as_scalar
from .cartan import curvature_kappa, solve_normality
from .checks import (map_affine_naturality, map_projective_invariance,
                     weyl_affine_naturality, weyl_projective_invariance)
from .connection import Connection, OneForm
from .formal import verify_lemma, verify_theorem
from .invariants import (TRANSPOSITION, CriticalDeltaError, Derangement, build_w,
                         check_recursion, map4, map5, map5_coefficient)
from .tensors import TensorField
from .witness import load_witness, parse_affine


class UsageError(ValueError):
    pass


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _load_connection(args):
    c = Connection.from_json(_read_json(args.connection))
    if args.m is not None and args.m != c.dim:
        raise UsageError(f"--m {args.m} does not match the connection dimension {c.dim}")
    return c


def _load_symbol(args, c):
    S = TensorField.from_json(_read_json(args.symbol), c.variables)
    if S.dim != c.dim:
        raise UsageError("symbol and connection dimensions differ")
    if S.down:
        raise UsageError("the symbol must be contravariant")
    if getattr(args, "k", None) is not None and args.k != S.up:
        raise UsageError(f"--k {args.k} does not match the symbol order {S.up}")
    return S


def _delta(text):
    if text is None or text == "formal":
        return None
    try:
        return as_scalar(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--delta must be a rational or 'formal', got {text!r}") from None


def _sigma(args):
    return Derangement.parse(args.sigma) if args.sigma else TRANSPOSITION


def _affine(path):
    return parse_affine(_read_json(path))


def _emit(args, payload):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _status(reports):
    return 0 if all(r.passed for r in reports) else 1


# -- subcommands ---------------------------------------------------------------

def cmd_weyl(args):
    g = solve_normality(_load_connection(args))
    kappa = curvature_kappa(g)
    _emit(args, {"P": g.p.to_json(), "kappa0": kappa.kappa0().to_json(),
                 "kappa1": kappa.kappa1().to_json(),
                 "kappa_minus1": kappa.kappa_minus().to_json()})
    return 0


def cmd_build_w(args):
    g = solve_normality(_load_connection(args))
    d = _sigma(args)
    _emit(args, {"sigma": str(d), "W": build_w(curvature_kappa(g).kappa0(), d).to_json()})
    return 0


def cmd_map4(args):
    c = _load_connection(args)
    S = _load_symbol(args, c)
    if S.up < 4:
        raise UsageError(f"precondition k >= 4 violated: symbol has order {S.up}")
    d = _sigma(args)
    _emit(args, {"map": 4, "sigma": str(d), "result": map4(S, solve_normality(c), d).to_json()})
    return 0


def _map5_symbol(args, c):
    S = _load_symbol(args, c)
    if S.up < 5:
        raise UsageError(f"precondition k >= 5 violated: symbol has order {S.up}")
    delta = _delta(args.delta) if args.delta is not None else S.weight
    if delta is None:
        raise UsageError("map5 needs a rational --delta")
    if S.weight == 0 and delta != 0:
        S = S.like(S.components, weight=delta)
    elif S.weight != delta:
        raise UsageError(f"--delta {delta} differs from the symbol weight {S.weight}")
    # reject critical weights before any heavy computation
    map5_coefficient(S.up, S.dim, delta)
    return S, delta


def cmd_map5(args):
    c = _load_connection(args)
    S, delta = _map5_symbol(args, c)
    d = _sigma(args)
    coef = map5_coefficient(S.up, S.dim, delta)
    result = map5(S, solve_normality(c), d, delta=delta)
    _emit(args, {"map": 5, "sigma": str(d), "delta": str(delta), "coefficient": str(coef),
                 "result": result.to_json()})
    return 0


def cmd_check_invariance(args):
    if not args.alpha_file and not args.affine_file:
        raise UsageError("give --alpha-file and/or --affine-file")
    c = _load_connection(args)
    alpha = OneForm.from_json(_read_json(args.alpha_file), c.variables) if args.alpha_file else None
    if alpha is not None and len(alpha.components) != c.dim:
        raise UsageError("one-form and connection dimensions differ")
    affine = _affine(args.affine_file) if args.affine_file else None
    d = _sigma(args)
    order, S = None, None
    if args.symbol:
        order = args.order
        if order == 5:
            S, _ = _map5_symbol(args, c)
        else:
            S = _load_symbol(args, c)
            if S.up < 4:
                raise UsageError(f"precondition k >= 4 violated: symbol has order {S.up}")
    reports = []
    if alpha is not None:
        reports.append(weyl_projective_invariance(c, alpha))
        if S is not None:
            reports.append(map_projective_invariance(order, S, c, alpha, d))
    if affine is not None:
        A, b = affine
        reports.append(weyl_affine_naturality(c, A, b))
        if S is not None:
            reports.append(map_affine_naturality(order, S, c, A, b, d))
    _emit(args, {"reports": [r.to_json() for r in reports]})
    return _status(reports)


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing required {', '.join(missing)}")


def cmd_check_lemma(args):
    _require(args, "k", "j", "m")
    if args.j < 2 or args.k < 0 or args.m < 2:
        raise UsageError("need k >= 0, j >= 2, m >= 2")
    rep = verify_lemma(args.k, args.j, args.m)
    _emit(args, rep.to_json())
    return _status([rep])


def cmd_check_theorem(args):
    _require(args, "l", "j", "m")
    k = args.l if args.k is None else args.k
    if args.l < 2 * args.j or k < args.l or args.j < 2 or args.m < 2:
        raise UsageError("need j >= 2, l >= 2j, k >= l, m >= 2")
    rep = verify_theorem(k, args.l, args.j, args.m)
    _emit(args, rep.to_json())
    return _status([rep])


def cmd_check_recursion(args):
    _require(args, "k", "l", "j", "m")
    if args.l < 2 * args.j or args.j < 2:
        raise UsageError("need j >= 2 and l >= 2j")
    rep = check_recursion(args.k, args.l, args.j, args.m, _delta(args.delta))
    _emit(args, rep.to_json())
    return _status([rep])


def cmd_demo(args):
    w = load_witness()
    c = _load_connection(args) if args.connection else w.connection
    S = _load_symbol(args, c) if args.symbol else w.symbol4
    if S.up < 4:
        raise UsageError(f"precondition k >= 4 violated: symbol has order {S.up}")
    d = _sigma(args)
    g = solve_normality(c)
    T = build_w(curvature_kappa(g).kappa0(), d)
    out = map4(S, g, d, T=T)
    reports = [map_projective_invariance(4, S, c, w.alpha, d)]
    if args.affine_file or c is w.connection:
        A, b = _affine(args.affine_file) if args.affine_file else w.affine
        reports.append(map_affine_naturality(4, S, c, A, b, d))
    nonzero = not out.is_zero()
    _emit(args, {
        "connection": c.to_json(), "symbol": S.to_json(), "sigma": str(d),
        "W": T.to_json(), "map4": out.to_json(), "map4_nonzero": nonzero,
        "reports": [r.to_json() for r in reports],
        "conclusion": ("map4 is a nonzero natural projectively equivariant map, "
                       "so the equivariant quantization is not unique"
                       if nonzero and _status(reports) == 0 else "inconclusive"),
    })
    return 0 if nonzero and _status(reports) == 0 else 1


# -- argument parsing ------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="projcalc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, connection=True, optional_connection=False):
        if connection:
            sp.add_argument("connection", nargs="?" if optional_connection else None,
                            help="connection JSON file")
        sp.add_argument("--m", type=int)
        sp.add_argument("--sigma", help="derangement, e.g. 2,1")
        sp.add_argument("--out", help="write the report here instead of stdout")
        return sp

    common(sub.add_parser("weyl", help="P, kappa0, kappa1 of the normal Cartan connection"))
    common(sub.add_parser("build-w", help="the W invariant for a derangement"))
    for name in ("map4", "map5"):
        sp = common(sub.add_parser(name, help=f"the order-{name[-1]} equivariant map"))
        sp.add_argument("symbol", help="symbol TensorField JSON")
        sp.add_argument("--k", type=int)
        if name == "map5":
            sp.add_argument("--delta")
    sp = common(sub.add_parser("check-invariance", help="projective shift and affine naturality"))
    sp.add_argument("--symbol")
    sp.add_argument("--order", type=int, choices=(4, 5), default=4)
    sp.add_argument("--k", type=int)
    sp.add_argument("--delta")
    sp.add_argument("--alpha-file")
    sp.add_argument("--affine-file")
    for name in ("check-lemma", "check-theorem", "check-recursion"):
        sp = common(sub.add_parser(name), connection=False)
        for flag in ("k", "l", "j"):
            sp.add_argument(f"--{flag}", type=int)
        if name == "check-recursion":
            sp.add_argument("--delta", default="formal")
    sp = common(sub.add_parser("demo-nonuniqueness", help="nonzero map4 on the packaged witness"),
                optional_connection=True)
    sp.add_argument("--symbol")
    sp.add_argument("--affine-file")
    return p


COMMANDS = {
    "weyl": cmd_weyl, "build-w": cmd_build_w, "map4": cmd_map4, "map5": cmd_map5,
    "check-invariance": cmd_check_invariance, "check-lemma": cmd_check_lemma,
    "check-theorem": cmd_check_theorem, "check-recursion": cmd_check_recursion,
    "demo-nonuniqueness": cmd_demo,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args)
    except CriticalDeltaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ParseError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
