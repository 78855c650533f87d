"""CPLEX-style LP text interchange: canonical writer and reader.

Writer conventions for byte-stable round trips: the objective row is
named ``obj``; terms are written with explicit coefficients and sorted
by column NAME (names survive a parse, column indexes do not); long
term lists wrap at eight terms per line; bounds lines come in name
order with canonical forms (``x free``, ``x = v``, ``x >= v``,
``lo <= x <= hi``, ``-infinity <= x <= hi``). Numbers use the shortest
round-trip float repr.

Reader grammar: sections Minimize / Subject To / Bounds / End (case
insensitive; ``\\`` starts a comment). Every constraint needs a
``name:`` prefix; terms are whitespace-separated ``[+|-] [coef] name``
with coefficient defaulting to 1. Maximization and integer sections are
rejected. One bound per line.
"""

from __future__ import annotations

import re
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
from gridplan.solve.mps import _fmt, _safe_names

_REL_TEXT = {RELATION_LE: "<=", RELATION_GE: ">=", RELATION_EQ: "="}
_TEXT_REL = {"<=": RELATION_LE, ">=": RELATION_GE, "=": RELATION_EQ, "<": RELATION_LE, ">": RELATION_GE}
_TERMS_PER_LINE = 8

_SEC_MIN = re.compile(r"^(minimize|minimum|min)$", re.I)
_SEC_MAX = re.compile(r"^(maximize|maximum|max)$", re.I)
_SEC_ST = re.compile(r"^(subject\s+to|such\s+that|st|s\.t\.)$", re.I)
_SEC_BOUNDS = re.compile(r"^bounds$", re.I)
_SEC_END = re.compile(r"^end$", re.I)
_SEC_INT = re.compile(r"^(general|generals|integer|integers|binary|binaries|semi-continuous)$", re.I)


def _write_terms(fh, pairs: list[tuple[str, float]]) -> None:
    """Emit name-sorted terms, wrapped, with explicit signed coefficients."""
    pairs = sorted(pairs)
    chunks = []
    for k, (name, coef) in enumerate(pairs):
        sign = "-" if coef < 0 else "+"
        body = f"{_fmt(abs(coef))} {name}"
        chunks.append(body if k == 0 and sign == "+" else f"{sign} {body}")
    for start in range(0, len(chunks), _TERMS_PER_LINE):
        fh.write(" " + " ".join(chunks[start : start + _TERMS_PER_LINE]) + "\n")


def write_lp_text(lp: LinearProgram, path: str | Path) -> dict[str, str]:
    """Write the program; returns the hashed-name substitution map."""
    overrides: dict[str, str] = {}
    col_names = _safe_names(lp.col_names, overrides)
    row_names = _safe_names(lp.row_tags, overrides)
    if len(set(row_names)) != len(row_names):
        raise DataError("row tags must be unique to serve as constraint names")
    for name in col_names:
        if ":" in name or not name:
            raise DataError(f"column name {name!r} cannot appear in LP text")

    # sorted_indices() copies; sorting in place would permute the shared
    # data array against a dtype-converted copy of the index array
    a = lp.rows_csr().sorted_indices()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"\\ {lp.name}\n")
        fh.write("Minimize\n obj:\n")
        obj_pairs = [
            (col_names[j], lp.objective[j])
            for j in np.flatnonzero(lp.objective != 0.0)
        ]
        if obj_pairs:
            _write_terms(fh, obj_pairs)
        fh.write("Subject To\n")
        for r, rname in enumerate(row_names):
            start, end = a.indptr[r], a.indptr[r + 1]
            pairs = [
                (col_names[j], v) for j, v in zip(a.indices[start:end], a.data[start:end])
            ]
            fh.write(f" {rname}:\n")
            if pairs:
                _write_terms(fh, pairs)
            fh.write(f" {_REL_TEXT[int(lp.row_relations[r])]} {_fmt(lp.row_rhs[r])}\n")
        fh.write("Bounds\n")
        for name, j in sorted(zip(col_names, range(lp.n_cols))):
            lo, hi = lp.col_lower[j], lp.col_upper[j]
            lo_fin, hi_fin = np.isfinite(lo), np.isfinite(hi)
            if not lo_fin and not hi_fin:
                fh.write(f" {name} free\n")
            elif lo_fin and hi_fin and lo == hi:
                fh.write(f" {name} = {_fmt(lo)}\n")
            elif lo_fin and hi_fin:
                fh.write(f" {_fmt(lo)} <= {name} <= {_fmt(hi)}\n")
            elif not lo_fin:
                fh.write(f" -infinity <= {name} <= {_fmt(hi)}\n")
            elif lo != 0.0:
                fh.write(f" {name} >= {_fmt(lo)}\n")
            # default [0, inf) columns need no line
        fh.write("End\n")
    return overrides


def _parse_terms(tokens: list[str], where: str) -> list[tuple[float, str]]:
    terms: list[tuple[float, str]] = []
    sign = 1.0
    coef: float | None = None
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        if tok.startswith(("+", "-")) and len(tok) > 1:
            if tok[0] == "-":
                sign = -sign
            tok = tok[1:]
        try:
            v = float(tok)
        except ValueError:
            terms.append((sign * (1.0 if coef is None else coef), tok))
            sign, coef = 1.0, None
            continue
        if coef is not None:
            raise DataError(f"{where}: two consecutive numbers in expression")
        coef = v
    if coef is not None:
        raise DataError(f"{where}: dangling coefficient with no variable")
    return terms


_INF_TOKENS = {"inf": np.inf, "+inf": np.inf, "infinity": np.inf, "+infinity": np.inf,
               "-inf": -np.inf, "-infinity": -np.inf}


def _bound_value(tok: str, where: str) -> float:
    low = tok.lower()
    if low in _INF_TOKENS:
        return _INF_TOKENS[low]
    try:
        return float(tok)
    except ValueError:
        raise DataError(f"{where}: bad bound value {tok!r}") from None


def parse_lp_text(path: str | Path) -> LinearProgram:
    path = Path(path)
    name = path.stem
    saw_name = False
    section = None
    saw_end = False

    col_order: list[str] = []
    col_idx: dict[str, int] = {}
    bounds: dict[int, list[float]] = {}

    def col_of(token: str) -> int:
        if token not in col_idx:
            col_idx[token] = len(col_order)
            col_order.append(token)
            bounds[col_idx[token]] = [0.0, np.inf]
        return col_idx[token]

    obj_tokens: list[str] = []
    groups: list[tuple[str, list[str]]] = []  # (constraint name, tokens)

    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            comment = raw.split("\\", 1)
            line = comment[0].rstrip()
            if not line.strip():
                # the first leading comment carries the model name
                if len(comment) > 1 and section is None and not saw_name:
                    head = comment[1].strip()
                    if head:
                        name = head
                        saw_name = True
                continue
            stripped = line.strip()
            where = f"{path}:{lineno}"
            if _SEC_MAX.fullmatch(stripped):
                raise DataError(f"{where}: only minimization is supported")
            if _SEC_INT.fullmatch(stripped):
                raise DataError(f"{where}: integer sections are not supported")
            if _SEC_MIN.fullmatch(stripped):
                section = "objective"
                continue
            if _SEC_ST.fullmatch(stripped):
                section = "constraints"
                continue
            if _SEC_BOUNDS.fullmatch(stripped):
                section = "bounds"
                continue
            if _SEC_END.fullmatch(stripped):
                saw_end = True
                break
            if section == "objective":
                if ":" in stripped:
                    stripped = stripped.split(":", 1)[1]
                obj_tokens.extend(stripped.split())
            elif section == "constraints":
                if ":" in stripped:
                    cname, rest = stripped.split(":", 1)
                    cname = cname.strip()
                    if not cname:
                        raise DataError(f"{where}: empty constraint name")
                    groups.append((cname, rest.split()))
                else:
                    if not groups:
                        raise DataError(f"{where}: constraint body before any name")
                    groups[-1][1].extend(stripped.split())
            elif section == "bounds":
                tokens = stripped.split()
                lowered = [t.lower() for t in tokens]
                if len(tokens) == 2 and lowered[1] == "free":
                    bj = col_of(tokens[0])
                    bounds[bj] = [-np.inf, np.inf]
                elif len(tokens) == 3 and tokens[1] in _TEXT_REL:
                    rel = _TEXT_REL[tokens[1]]
                    bj = col_of(tokens[0])
                    v = _bound_value(tokens[2], where)
                    if rel == RELATION_EQ:
                        bounds[bj] = [v, v]
                    elif rel == RELATION_GE:
                        bounds[bj][0] = v
                    else:
                        bounds[bj][1] = v
                elif len(tokens) == 5 and tokens[1] in ("<", "<=") and tokens[3] in ("<", "<="):
                    bj = col_of(tokens[2])
                    bounds[bj] = [
                        _bound_value(tokens[0], where),
                        _bound_value(tokens[4], where),
                    ]
                else:
                    raise DataError(f"{where}: unrecognized bounds line")
            elif section is None:
                raise DataError(f"{where}: expression before any section header")

    if not saw_end:
        raise DataError(f"{path}: missing End line")

    obj_terms = _parse_terms(obj_tokens, f"{path}: objective")
    row_names: list[str] = []
    row_terms: list[list[tuple[float, str]]] = []
    relations: list[int] = []
    rhs_vals: list[float] = []
    seen_rows: set[str] = set()
    for cname, tokens in groups:
        if cname in seen_rows:
            raise DataError(f"{path}: duplicate constraint name {cname!r}")
        seen_rows.add(cname)
        rel_pos = [k for k, t in enumerate(tokens) if t in _TEXT_REL]
        if len(rel_pos) != 1 or rel_pos[0] != len(tokens) - 2:
            raise DataError(
                f"{path}: constraint {cname!r} needs exactly one relation before the rhs"
            )
        k = rel_pos[0]
        try:
            rhs = float(tokens[k + 1])
        except ValueError:
            raise DataError(f"{path}: constraint {cname!r} has bad rhs {tokens[k + 1]!r}") from None
        row_names.append(cname)
        relations.append(_TEXT_REL[tokens[k]])
        rhs_vals.append(rhs)
        row_terms.append(_parse_terms(tokens[:k], f"{path}: constraint {cname!r}"))

    objective_pairs = [(col_of(nm), v) for v, nm in obj_terms]
    triplets = []
    for r, terms in enumerate(row_terms):
        for v, nm in terms:
            triplets.append((r, col_of(nm), v))

    n, m = len(col_order), len(row_names)
    objective = np.zeros(n)
    for j, v in objective_pairs:
        objective[j] += v
    if triplets:
        rr, cc, vv = zip(*triplets)
    else:
        rr = cc = vv = ()
    mat = sp.coo_matrix((vv, (rr, cc)), shape=(m, n)).tocsr()
    mat.sort_indices()
    lp = LinearProgram(
        name=name,
        n_cols=n,
        objective=objective,
        col_lower=np.array([bounds[j][0] for j in range(n)]),
        col_upper=np.array([bounds[j][1] for j in range(n)]),
        col_names=col_order,
        lower_tags={},
        upper_tags={},
        row_data=mat.data,
        row_indices=mat.indices,
        row_indptr=mat.indptr,
        row_relations=np.array(relations, dtype=np.int8),
        row_rhs=np.array(rhs_vals),
        row_tags=row_names,
    )
    lp.validate()
    return lp
