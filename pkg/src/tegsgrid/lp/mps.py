"""MPS export and import.

Output uses the fixed-format section layout (NAME, ROWS, COLUMNS, RHS,
BOUNDS, ENDATA) with fields aligned to the classic columns. Names longer
than eight characters are allowed, so readers should parse it as free MPS;
names therefore must not contain whitespace.
"""

from __future__ import annotations

import math
from collections import defaultdict

from .program import EQ, GE, INF, LE, LinearProgram

OBJ_ROW = "COST"
_ROW_TYPE = {LE: "L", GE: "G", EQ: "E"}
_TYPE_ROW = {v: k for k, v in _ROW_TYPE.items()}


class MpsError(ValueError):
    pass


def _num(x: float) -> str:
    if x == 0:
        return "0"
    return repr(float(x))


def export_standard_form(lp: LinearProgram, name: str = "TEGSGRID") -> str:
    """Render ``lp`` as MPS text. Raises :class:`MpsError` on name collisions."""
    var_names = lp.names_for_vars()
    row_names = lp.names_for_rows()
    for kind, names in (("column", var_names), ("row", row_names + [OBJ_ROW])):
        seen = set()
        for n in names:
            if n in seen:
                raise MpsError(f"duplicate {kind} name {n!r}")
            if not n or any(ch.isspace() for ch in n):
                raise MpsError(f"{kind} name {n!r} is empty or contains whitespace")
            seen.add(n)

    out = [f"NAME          {name}", "ROWS", f" N  {OBJ_ROW}"]
    for rn, s in zip(row_names, lp.row_sense):
        out.append(f" {_ROW_TYPE[s]}  {rn}")

    out.append("COLUMNS")
    csc = lp.matrix().tocsc()
    cost = lp.objective
    for j, vn in enumerate(var_names):
        entries = []
        if cost[j] != 0:
            entries.append((OBJ_ROW, cost[j]))
        start, end = csc.indptr[j], csc.indptr[j + 1]
        for i, v in zip(csc.indices[start:end], csc.data[start:end]):
            if v != 0:
                entries.append((row_names[i], v))
        if not entries:
            entries.append((OBJ_ROW, 0.0))  # keep the column declared
        for rn, v in entries:
            out.append(f"    {vn:<8}  {rn:<8}  {_num(v):>12}")

    out.append("RHS")
    for rn, r in zip(row_names, lp.row_rhs):
        if r != 0:
            out.append(f"    RHS       {rn:<8}  {_num(r):>12}")

    out.append("BOUNDS")
    for vn, lo, up in zip(var_names, lp.lower, lp.upper):
        if lo == up:
            out.append(f" FX BND       {vn:<8}  {_num(lo):>12}")
            continue
        if math.isinf(lo) and math.isinf(up):
            out.append(f" FR BND       {vn:<8}")
            continue
        if math.isinf(lo):
            out.append(f" MI BND       {vn:<8}")
        elif lo != 0:
            out.append(f" LO BND       {vn:<8}  {_num(lo):>12}")
        if not math.isinf(up):
            out.append(f" UP BND       {vn:<8}  {_num(up):>12}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def write_mps(lp: LinearProgram, path, name: str = "TEGSGRID") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_standard_form(lp, name=name))


def read_mps(text: str) -> LinearProgram:
    """Parse MPS text (free-format tokenization) into a LinearProgram.

    Covers the sections emitted by :func:`export_standard_form`. RANGES and
    integer markers are rejected.
    """
    section = None
    obj_name = None
    row_order: list[str] = []
    row_type: dict[str, str] = {}
    col_order: list[str] = []
    col_entries: dict[str, list[tuple[str, float]]] = defaultdict(list)
    rhs: dict[str, float] = {}
    bounds: dict[str, list[float]] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()[0].upper()
            if head == "ENDATA":
                break
            if head not in {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "OBJSENSE"}:
                raise MpsError(f"line {lineno}: unsupported section {head!r}")
            section = head
            continue
        tok = raw.split()
        try:
            if section == "ROWS":
                kind, rn = tok[0].upper(), tok[1]
                if kind == "N":
                    if obj_name is None:
                        obj_name = rn
                    continue
                row_order.append(rn)
                row_type[rn] = _TYPE_ROW[kind]
            elif section == "COLUMNS":
                cn = tok[0]
                if "'MARKER'" in tok:
                    raise MpsError(f"line {lineno}: integer markers are not supported")
                if cn not in col_entries:
                    col_order.append(cn)
                    col_entries[cn] = []
                for rn, val in zip(tok[1::2], tok[2::2]):
                    col_entries[cn].append((rn, float(val)))
            elif section == "RHS":
                pairs = tok[1:] if len(tok) % 2 == 1 else tok
                for rn, val in zip(pairs[0::2], pairs[1::2]):
                    if rn != obj_name:
                        rhs[rn] = float(val)
            elif section == "BOUNDS":
                kind = tok[0].upper()
                if kind in {"FR", "MI", "PL"}:
                    cn, val = tok[-1], None
                else:
                    cn, val = tok[-2], float(tok[-1])
                b = bounds.setdefault(cn, [0.0, INF])
                if kind == "UP":
                    b[1] = val
                elif kind == "LO":
                    b[0] = val
                elif kind == "FX":
                    b[0] = b[1] = val
                elif kind == "FR":
                    b[0], b[1] = -INF, INF
                elif kind == "MI":
                    b[0] = -INF
                elif kind == "PL":
                    b[1] = INF
                else:
                    raise MpsError(f"line {lineno}: unsupported bound type {kind!r}")
        except (IndexError, KeyError, ValueError) as exc:
            if isinstance(exc, MpsError):
                raise
            raise MpsError(f"line {lineno}: cannot parse {raw.strip()!r}") from exc

    lp = LinearProgram()
    row_index = {rn: i for i, rn in enumerate(row_order)}
    for cn in col_order:
        lo, up = bounds.get(cn, [0.0, INF])
        cost = sum(v for rn, v in col_entries[cn] if rn == obj_name)
        lp.add_var(lo, up, cost, name=cn)
    per_row: dict[int, list[tuple[int, float]]] = defaultdict(list)
    for j, cn in enumerate(col_order):
        for rn, v in col_entries[cn]:
            if rn == obj_name:
                continue
            if rn not in row_index:
                raise MpsError(f"column {cn!r} references unknown row {rn!r}")
            per_row[row_index[rn]].append((j, v))
    for i, rn in enumerate(row_order):
        lp.add_constraint(row_type[rn], rhs.get(rn, 0.0), per_row.get(i, []), name=rn)
    return lp
