"""The packaged m = 3 witness: a connection with nonvanishing W and matching test data."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib.resources import files

from .algebra import as_scalar
from .connection import Connection, OneForm
from .tensors import TensorField


def parse_affine(data):
    """``{"A": [[..]], "b": [..]}`` with rational entries given as strings or numbers."""
    try:
        A = [[as_scalar(Fraction(str(v))) for v in row] for row in data["A"]]
        b = [as_scalar(Fraction(str(v))) for v in data["b"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad affine map: {exc}") from None
    return A, b


@dataclass(frozen=True)
class Witness:
    connection: Connection
    alpha: OneForm
    symbol4: TensorField
    symbol5: TensorField
    delta: Fraction
    perturbed_coefficients: tuple
    affine: tuple


def load_witness():
    data = json.loads(files("projcalc").joinpath("data/witness.json").read_text())
    conn = Connection.from_json(data["connection"])
    V = conn.variables
    return Witness(
        connection=conn,
        alpha=OneForm.from_json(data["alpha"], V),
        symbol4=TensorField.from_json(data["symbol4"], V),
        symbol5=TensorField.from_json(data["symbol5"], V),
        delta=as_scalar(Fraction(data["delta"])),
        perturbed_coefficients=tuple(as_scalar(Fraction(c)) for c in data["perturbed_coefficients"]),
        affine=parse_affine(data["affine"]),
    )
