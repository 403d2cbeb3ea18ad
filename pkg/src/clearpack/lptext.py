"""Deterministic LP-dialect text export and a matching reader.

Rationals whose denominators factor into 2s and 5s are emitted as exact
decimals; otherwise every number in the file is multiplied by one global
integer scale (the lcm of all denominators), recorded in a comment header, so
the text stays exact either way.  Re-exporting a parsed file reproduces it
byte for byte.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .formulations import LinearRow, MBLPModel, RowTag, VariableDescriptor

_SENSE_OUT = {"<=": "<=", ">=": ">=", "==": "="}
_SENSE_IN = {"<=": "<=", ">=": ">=", "=": "=="}


def _decimal_exact(value: Fraction) -> bool:
    den = value.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def _decimal_str(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    value = abs(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    digits = max(twos, fives)
    scaled = value.numerator * 10**digits // value.denominator
    text = str(scaled).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def _all_values(model: MBLPModel):
    for v in model.objective.values():
        yield v
    for row in model.rows:
        yield row.rhs
        yield from row.coeffs.values()
    for var in model.variables:
        if var.lower is not None:
            yield var.lower
        if var.upper is not None:
            yield var.upper


def export_lp_text(model: MBLPModel) -> str:
    scale = 1
    if not all(_decimal_exact(v) for v in _all_values(model)):
        scale = 1
        for v in _all_values(model):
            scale = lcm(scale, v.denominator)

    def num(value: Fraction) -> str:
        return _decimal_str(value * scale)

    def terms(coeffs: dict, order: list[str]) -> str:
        parts = []
        for name in order:
            if name not in coeffs:
                continue
            coeff = coeffs[name]
            text = num(abs(coeff))
            piece = f"{text} {name}"
            if not parts:
                parts.append(piece if coeff > 0 else f"- {piece}")
            else:
                parts.append(f"+ {piece}" if coeff > 0 else f"- {piece}")
        return " ".join(parts) if parts else "0 " + (order[0] if order else "zero")

    order = model.var_names()
    lines = ["\\ exact model export"]
    if scale != 1:
        lines.append(f"\\ scale-factor: {scale}")
    lines.append("Minimize" if model.objective_sense == "min" else "Maximize")
    lines.append(f" obj: {terms(model.objective, order)}")
    lines.append("Subject To")
    for idx, row in enumerate(model.rows):
        lines.append(
            f" r{idx}: {terms(row.coeffs, order)} {_SENSE_OUT[row.sense]} {num(row.rhs)}"
        )
    lines.append("Bounds")
    for var in model.variables:
        lo, hi = var.lower, var.upper
        if lo is None and hi is None:
            lines.append(f" {var.name} free")
        elif lo is not None and hi is not None:
            lines.append(f" {num(lo)} <= {var.name} <= {num(hi)}")
        elif lo is not None:
            lines.append(f" {var.name} >= {num(lo)}")
        else:
            lines.append(f" {var.name} <= {num(hi)}")
    binaries = [v.name for v in model.variables if v.kind == "binary"]
    if binaries:
        lines.append("Binary")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def parse_lp_text(text: str) -> MBLPModel:
    """Reader for the dialect emitted above (not a general LP parser)."""
    scale = 1
    sense = "min"
    objective: dict[str, Fraction] = {}
    rows: list[LinearRow] = []
    bounds: dict[str, tuple] = {}
    var_order: list[str] = []
    binaries: set[str] = set()
    section = None

    def parse_terms(chunk: str) -> dict[str, Fraction]:
        tokens = chunk.split()
        coeffs: dict[str, Fraction] = {}
        sign = 1
        pending = None
        for tok in tokens:
            if tok == "+":
                sign = 1
            elif tok == "-":
                sign = -1
            else:
                if pending is None:
                    pending = sign * Fraction(tok)
                else:
                    coeffs[tok] = coeffs.get(tok, Fraction(0)) + Fraction(pending, scale)
                    pending = None
                    sign = 1
        return {k: v for k, v in coeffs.items() if v != 0}

    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            if "scale-factor:" in line:
                scale = int(line.split(":", 1)[1])
            continue
        lowered = line.lower()
        if lowered in ("minimize", "maximize"):
            sense = "min" if lowered == "minimize" else "max"
            section = "objective"
            continue
        if lowered == "subject to":
            section = "rows"
            continue
        if lowered == "bounds":
            section = "bounds"
            continue
        if lowered == "binary":
            section = "binary"
            continue
        if lowered == "end":
            break
        if section == "objective":
            body = line.split(":", 1)[1]
            objective = parse_terms(body)
        elif section == "rows":
            body = line.split(":", 1)[1]
            for sym in (" <= ", " >= ", " = "):
                if sym in body:
                    lhs, rhs = body.split(sym)
                    rows.append(
                        LinearRow(
                            parse_terms(lhs),
                            _SENSE_IN[sym.strip()],
                            Fraction(Fraction(rhs.strip()), scale),
                            RowTag("lp", (len(rows),)),
                        )
                    )
                    break
        elif section == "bounds":
            tokens = line.split()
            if tokens[-1] == "free":
                name = tokens[0]
                bounds[name] = (None, None)
            elif len(tokens) == 5:  # lo <= name <= hi
                name = tokens[2]
                bounds[name] = (
                    Fraction(Fraction(tokens[0]), scale),
                    Fraction(Fraction(tokens[4]), scale),
                )
            elif tokens[1] == ">=":
                name = tokens[0]
                bounds[name] = (Fraction(Fraction(tokens[2]), scale), None)
            else:
                name = tokens[0]
                bounds[name] = (None, Fraction(Fraction(tokens[2]), scale))
            if name not in var_order:
                var_order.append(name)
        elif section == "binary":
            binaries.add(line)

    variables = tuple(
        VariableDescriptor(
            name,
            "binary" if name in binaries else "continuous",
            bounds[name][0],
            bounds[name][1],
        )
        for name in var_order
    )
    return MBLPModel(variables, tuple(rows), sense, objective, metadata={"kind": "parsed"})
