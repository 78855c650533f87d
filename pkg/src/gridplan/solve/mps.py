"""Free-format MPS interchange: canonical writer and tolerant reader.

Writer conventions (these make export -> parse -> export byte-identical):
the objective row is always named ``obj``; column entries are grouped by
column in layout order, objective coefficient first, then matrix entries
by ascending row; zero right-hand sides are omitted; bounds lines appear
in column order with LO written before UP. Numbers use Python's shortest
round-trip float repr, so every value survives the trip exactly.

Names longer than the length cap are replaced by a stable hash and the
substitution map is returned for inclusion in the model map. The reader
accepts the writer's output plus the common variations mainstream
solvers emit: one or two coefficient pairs per line and the full
LO/UP/FX/FR/MI/PL bound vocabulary. RANGES sections and integrality
markers are rejected with a clear message.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from gridplan.errors import DataError
from gridplan.program.indexing import (
    RELATION_EQ,
    RELATION_GE,
    RELATION_LE,
    LinearProgram,
)

MAX_NAME_LEN = 255
_REL_CODE = {RELATION_LE: "L", RELATION_GE: "G", RELATION_EQ: "E"}
_CODE_REL = {"L": RELATION_LE, "G": RELATION_GE, "E": RELATION_EQ}


def _fmt(v: float) -> str:
    return repr(float(v))


def _safe_names(names: list[str], overrides: dict[str, str]) -> list[str]:
    out = []
    for name in names:
        if len(name) > MAX_NAME_LEN:
            hashed = "n" + hashlib.sha1(name.encode()).hexdigest()[:16]
            overrides[hashed] = name
            out.append(hashed)
        else:
            out.append(name)
    return out


def write_mps(lp: LinearProgram, path: str | Path) -> dict[str, str]:
    """Write the program; returns {written-name: original-name} for any
    names that had to be hashed to fit the length cap."""
    overrides: dict[str, str] = {}
    col_names = _safe_names(lp.col_names, overrides)
    row_names = _safe_names(lp.row_tags, overrides)
    if len(set(row_names)) != len(row_names):
        raise DataError("row tags must be unique to serve as MPS row names")

    a = lp.rows_csr().tocsc()
    a.sort_indices()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"NAME {lp.name}\n")
        fh.write("ROWS\n N obj\n")
        for rel, rname in zip(lp.row_relations, row_names):
            fh.write(f" {_REL_CODE[int(rel)]} {rname}\n")

        fh.write("COLUMNS\n")
        for j, cname in enumerate(col_names):
            start, end = a.indptr[j], a.indptr[j + 1]
            c = lp.objective[j]
            if c != 0.0:
                fh.write(f"    {cname} obj {_fmt(c)}\n")
            elif start == end:
                fh.write(f"    {cname} obj 0\n")  # declare empty column
            for r, v in zip(a.indices[start:end], a.data[start:end]):
                fh.write(f"    {cname} {row_names[r]} {_fmt(v)}\n")

        fh.write("RHS\n")
        for r, rhs in enumerate(lp.row_rhs):
            if rhs != 0.0:
                fh.write(f"    rhs {row_names[r]} {_fmt(rhs)}\n")

        fh.write("BOUNDS\n")
        for j, cname in enumerate(col_names):
            lo, hi = lp.col_lower[j], lp.col_upper[j]
            lo_fin, hi_fin = np.isfinite(lo), np.isfinite(hi)
            if lo_fin and hi_fin and lo == hi:
                fh.write(f" FX bnd {cname} {_fmt(lo)}\n")
                continue
            if not lo_fin and not hi_fin:
                fh.write(f" FR bnd {cname}\n")
                continue
            if not lo_fin:
                fh.write(f" MI bnd {cname}\n")
            elif lo != 0.0:
                fh.write(f" LO bnd {cname} {_fmt(lo)}\n")
            if hi_fin:
                fh.write(f" UP bnd {cname} {_fmt(hi)}\n")
        fh.write("ENDATA\n")
    return overrides


def parse_mps(path: str | Path) -> LinearProgram:
    """Read a free-format MPS file into a LinearProgram.

    The result carries no layout or metadata; row names become the row
    tags. Only minimization is supported.
    """
    path = Path(path)
    name = "model"
    obj_row: str | None = None
    row_order: list[str] = []
    row_rel: dict[str, int] = {}
    col_order: list[str] = []
    col_idx: dict[str, int] = {}
    obj_coef: dict[int, float] = {}
    row_pos: dict[str, int] = {}
    entries_r: list[int] = []
    entries_c: list[int] = []
    entries_v: list[float] = []
    seen_pairs: set[tuple[int, int]] = set()
    rhs: dict[str, float] = {}
    bounds: dict[int, list[float]] = {}
    section = None
    saw_end = False

    def fail(lineno: int, msg: str) -> DataError:
        return DataError(f"{path}:{lineno}: {msg}")

    def col_of(token: str) -> int:
        if token not in col_idx:
            col_idx[token] = len(col_order)
            col_order.append(token)
            bounds[col_idx[token]] = [0.0, np.inf]
        return col_idx[token]

    def add_entry(lineno: int, cname: str, rname: str, value: str) -> None:
        j = col_of(cname)
        try:
            v = float(value)
        except ValueError:
            raise fail(lineno, f"bad numeric value {value!r}") from None
        if rname == obj_row:
            if j in obj_coef:
                raise fail(lineno, f"duplicate objective entry for {cname}")
            obj_coef[j] = v
            return
        if rname not in row_rel:
            raise fail(lineno, f"entry references undeclared row {rname!r}")
        r = row_pos[rname]
        if (r, j) in seen_pairs:
            raise fail(lineno, f"duplicate entry ({cname}, {rname})")
        seen_pairs.add((r, j))
        entries_r.append(r)
        entries_c.append(j)
        entries_v.append(v)

    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("*"):
                continue
            upper = line.strip().upper()
            if not line[0].isspace():
                head = line.split()
                keyword = head[0].upper()
                if keyword == "NAME":
                    name = head[1] if len(head) > 1 else "model"
                    section = None
                elif keyword in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "OBJSENSE"):
                    section = keyword
                elif keyword == "RANGES":
                    raise fail(lineno, "RANGES sections are not supported")
                elif keyword == "ENDATA":
                    saw_end = True
                    break
                else:
                    raise fail(lineno, f"unknown section {head[0]!r}")
                continue

            tokens = line.split()
            if section == "OBJSENSE":
                if upper not in ("MIN", "MINIMIZE"):
                    raise fail(lineno, "only minimization is supported")
            elif section == "ROWS":
                if len(tokens) != 2:
                    raise fail(lineno, "ROWS entries need a type and a name")
                code, rname = tokens[0].upper(), tokens[1]
                if code == "N":
                    if obj_row is not None:
                        raise fail(lineno, "multiple objective rows")
                    obj_row = rname
                elif code in _CODE_REL:
                    if rname in row_rel:
                        raise fail(lineno, f"duplicate row {rname!r}")
                    row_rel[rname] = _CODE_REL[code]
                    row_pos[rname] = len(row_order)
                    row_order.append(rname)
                else:
                    raise fail(lineno, f"unknown row type {tokens[0]!r}")
            elif section == "COLUMNS":
                if "'MARKER'" in line or "MARKER" in (t.strip("'") for t in tokens):
                    raise fail(lineno, "integer markers are not supported")
                if len(tokens) not in (3, 5):
                    raise fail(lineno, "COLUMNS entries need 1 or 2 row/value pairs")
                add_entry(lineno, tokens[0], tokens[1], tokens[2])
                if len(tokens) == 5:
                    add_entry(lineno, tokens[0], tokens[3], tokens[4])
            elif section == "RHS":
                if len(tokens) not in (3, 5):
                    raise fail(lineno, "RHS entries need 1 or 2 row/value pairs")
                for rname, value in zip(tokens[1::2], tokens[2::2]):
                    if rname == obj_row:
                        raise fail(lineno, "objective offsets are not supported")
                    if rname not in row_rel:
                        raise fail(lineno, f"RHS references undeclared row {rname!r}")
                    if rname in rhs:
                        raise fail(lineno, f"duplicate RHS for {rname!r}")
                    try:
                        rhs[rname] = float(value)
                    except ValueError:
                        raise fail(lineno, f"bad numeric value {value!r}") from None
            elif section == "BOUNDS":
                btype = tokens[0].upper()
                if btype in ("BV", "LI", "UI"):
                    raise fail(lineno, "integer bounds are not supported")
                if btype in ("FR", "MI", "PL"):
                    if len(tokens) != 3:
                        raise fail(lineno, f"{btype} bounds take no value")
                    j = col_of(tokens[2])
                    if btype == "FR":
                        bounds[j] = [-np.inf, np.inf]
                    elif btype == "MI":
                        bounds[j][0] = -np.inf
                    # PL keeps the +inf upper default
                elif btype in ("LO", "UP", "FX"):
                    if len(tokens) != 4:
                        raise fail(lineno, f"{btype} bounds need a value")
                    j = col_of(tokens[2])
                    try:
                        v = float(tokens[3])
                    except ValueError:
                        raise fail(lineno, f"bad numeric value {tokens[3]!r}") from None
                    if btype == "LO":
                        bounds[j][0] = v
                    elif btype == "UP":
                        bounds[j][1] = v
                    else:
                        bounds[j] = [v, v]
                else:
                    raise fail(lineno, f"unknown bound type {tokens[0]!r}")
            elif section is None:
                raise fail(lineno, "data before any section header")

    if not saw_end:
        raise DataError(f"{path}: missing ENDATA")
    if obj_row is None:
        raise DataError(f"{path}: no objective (N) row declared")

    n, m = len(col_order), len(row_order)
    mat = sp.coo_matrix(
        (entries_v, (entries_r, entries_c)), shape=(m, n)
    ).tocsr()
    mat.sort_indices()
    objective = np.zeros(n)
    for j, v in obj_coef.items():
        objective[j] = v
    lower = np.array([bounds[j][0] for j in range(n)])
    upper = np.array([bounds[j][1] for j in range(n)])
    lp = LinearProgram(
        name=name,
        n_cols=n,
        objective=objective,
        col_lower=lower,
        col_upper=upper,
        col_names=col_order,
        lower_tags={},
        upper_tags={},
        row_data=mat.data,
        row_indices=mat.indices,
        row_indptr=mat.indptr,
        row_relations=np.array([row_rel[r] for r in row_order], dtype=np.int8),
        row_rhs=np.array([rhs.get(r, 0.0) for r in row_order]),
        row_tags=row_order,
    )
    lp.validate()
    return lp
