"""MPS export and import for the model IR.

Layout (documented contract, also parseable as free-format MPS):

- indicator field starts at column 2, names at columns 5 and 15,
  values at column 25; a second name/value pair at columns 40/50;
- names are at most 8 characters, values are shortest round-trip
  decimal representations (``repr``), so re-reading reproduces every
  float bit-for-bit;
- every variable gets explicit BOUNDS records (FX, or LO/UP/MI/PL),
  integer columns are wrapped in INTORG/INTEND markers;
- rows appear in model order, columns in model order; the objective row
  is named ``OBJ`` (type N) and an objective constant, when present, is
  written as a negated RHS entry on ``OBJ``.
"""

from __future__ import annotations

import math

from .model import MilpModel

INF = math.inf

_SENSE_TO_TYPE = {"<=": "L", ">=": "G", "==": "E"}
_TYPE_TO_SENSE = {v: k for k, v in _SENSE_TO_TYPE.items()}


def _num(x: float) -> str:
    return repr(float(x))


def _check_name(name: str):
    if len(name) > 8 or not name or any(ch.isspace() for ch in name):
        raise ValueError(f"MPS names must be 1-8 characters without blanks: {name!r}")


def export_mps(model: MilpModel, path) -> None:
    """Write the model; deterministic row/column ordering, minimize sense."""
    for name in model.var_names:
        _check_name(name)
    seen = set()
    for row in model.constraints:
        _check_name(row.name)
        if row.name in seen:
            raise ValueError(f"duplicate row name {row.name!r}")
        seen.add(row.name)

    lines = [f"NAME          {model.name}", "ROWS", " N  OBJ"]
    for row in model.constraints:
        lines.append(f" {_SENSE_TO_TYPE[row.sense]}  {row.name}")

    lines.append("COLUMNS")
    # entries grouped per column, in model constraint order
    col_entries = [[] for _ in range(model.n_vars)]
    for row in model.constraints:
        for j, coef in row.coeffs:
            col_entries[j].append((row.name, coef))
    int_open = False
    marker = 0
    for j, vname in enumerate(model.var_names):
        entries = []
        if j in model.obj_coeffs:
            entries.append(("OBJ", model.obj_coeffs[j]))
        entries.extend(col_entries[j])
        if model.is_integer[j] and not int_open:
            lines.append(f"    MARKER{marker:<21}'MARKER'                 'INTORG'")
            marker += 1
            int_open = True
        elif not model.is_integer[j] and int_open:
            lines.append(f"    MARKER{marker:<21}'MARKER'                 'INTEND'")
            marker += 1
            int_open = False
        if not entries:
            # column with no row appearance still needs a record to exist
            entries.append(("OBJ", 0.0))
        for rname, coef in entries:
            lines.append(f"    {vname:<10}{rname:<10}{_num(coef)}")
    if int_open:
        lines.append(f"    MARKER{marker:<21}'MARKER'                 'INTEND'")

    lines.append("RHS")
    for row in model.constraints:
        if row.rhs != 0.0:
            lines.append(f"    RHS       {row.name:<10}{_num(row.rhs)}")
    if model.obj_constant != 0.0:
        lines.append(f"    RHS       OBJ       {_num(-model.obj_constant)}")

    lines.append("BOUNDS")
    for j, vname in enumerate(model.var_names):
        lo, hi = model.lb[j], model.ub[j]
        if lo == hi:
            lines.append(f" FX BND       {vname:<10}{_num(lo)}")
            continue
        if lo == -INF:
            lines.append(f" MI BND       {vname:<10}")
        elif lo != 0.0 or True:
            # always explicit: no reliance on reader defaults
            lines.append(f" LO BND       {vname:<10}{_num(lo)}")
        if hi == INF:
            lines.append(f" PL BND       {vname:<10}")
        else:
            lines.append(f" UP BND       {vname:<10}{_num(hi)}")
    lines.append("ENDATA")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mps(path) -> MilpModel:
    """Parse a file produced by :func:`export_mps` back into the IR."""
    model = MilpModel()
    section = None
    row_sense = {}
    row_order = []
    row_coeffs = {}
    row_rhs = {}
    obj_coeffs = {}
    obj_constant = 0.0
    int_mode = False
    explicit_lo = set()
    explicit_hi = set()

    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("*"):
                continue
            if not line.startswith(" "):
                head = line.split()
                section = head[0]
                if section == "NAME" and len(head) > 1:
                    model.name = head[1]
                continue
            tok = line.split()
            if section == "ROWS":
                rtype, rname = tok[0], tok[1]
                if rtype == "N":
                    continue  # objective row
                row_sense[rname] = _TYPE_TO_SENSE[rtype]
                row_order.append(rname)
                row_coeffs[rname] = []
                row_rhs[rname] = 0.0
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    int_mode = tok[2] == "'INTORG'"
                    continue
                vname = tok[0]
                if vname not in model._index:
                    lb = 0.0 if not int_mode else 0.0
                    model.add_variable(vname, lb=0.0, ub=INF, integer=False)
                    if int_mode:
                        model.is_integer[model.index_of(vname)] = True
                        # readers expect finite integer bounds; BOUNDS will set them
                        model.ub[model.index_of(vname)] = 1.0
                j = model.index_of(vname)
                pairs = [(tok[i], tok[i + 1]) for i in range(1, len(tok) - 1, 2)]
                for rname, val in pairs:
                    coef = float(val)
                    if rname == "OBJ":
                        obj_coeffs[j] = obj_coeffs.get(j, 0.0) + coef
                    else:
                        row_coeffs[rname].append((j, coef))
            elif section == "RHS":
                pairs = [(tok[i], tok[i + 1]) for i in range(1, len(tok) - 1, 2)]
                for rname, val in pairs:
                    if rname == "OBJ":
                        obj_constant = -float(val)
                    else:
                        row_rhs[rname] = float(val)
            elif section == "BOUNDS":
                btype, vname = tok[0], tok[2]
                j = model.index_of(vname)
                val = float(tok[3]) if len(tok) > 3 else 0.0
                if btype == "FX":
                    model.lb[j] = model.ub[j] = val
                    explicit_lo.add(j)
                    explicit_hi.add(j)
                elif btype == "LO":
                    model.lb[j] = val
                    explicit_lo.add(j)
                elif btype == "UP":
                    model.ub[j] = val
                    explicit_hi.add(j)
                elif btype == "MI":
                    model.lb[j] = -INF
                    explicit_lo.add(j)
                elif btype == "PL":
                    model.ub[j] = INF
                    explicit_hi.add(j)
                elif btype == "BV":
                    model.lb[j], model.ub[j] = 0.0, 1.0
                    model.is_integer[j] = True
                    explicit_lo.add(j)
                    explicit_hi.add(j)
                else:
                    raise ValueError(f"unsupported bound type {btype!r}")
            elif section == "RANGES":
                raise ValueError("RANGES section not supported")

    for j in range(model.n_vars):
        if model.is_integer[j] and j not in explicit_hi:
            model.ub[j] = 1.0
        elif not model.is_integer[j] and j not in explicit_hi:
            model.ub[j] = INF
    for rname in row_order:
        model.add_constraint(row_coeffs[rname], row_sense[rname], row_rhs[rname], name=rname)
    model.obj_coeffs = obj_coeffs
    model.obj_constant = obj_constant
    return model
