"""Column layout and the sparse linear-program container.

Column order: the two investment groups first (PV kW then battery kWh per
bus), then one block per scenario. Within a scenario block the operational
groups appear in fixed order — pv dispatch, charge, discharge, soc, ens,
line flow, squared voltage — each indexed bus-major with hour fastest.

Every row and every non-default column bound carries a short provenance
tag (constraint family plus coordinates) so external solutions can be
verified and failures pinpointed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from gridplan.errors import DataError

RELATION_LE = -1
RELATION_EQ = 0
RELATION_GE = 1

_REL_SYMBOL = {RELATION_LE: "<=", RELATION_EQ: "=", RELATION_GE: ">="}

# (name prefix, group key) in intra-block order
_GROUPS = ("p", "ch", "dis", "soc", "ens")


@dataclass(frozen=True)
class VariableLayout:
    """Bijective map between structured variables and flat columns."""

    n_buses: int
    n_edges: int
    n_hours: int
    n_scenarios: int
    with_network: bool = True

    @property
    def block_size(self) -> int:
        nt = self.n_buses * self.n_hours
        base = 5 * nt
        if self.with_network:
            base += self.n_edges * self.n_hours + nt
        return base

    @property
    def n_cols(self) -> int:
        return 2 * self.n_buses + self.n_scenarios * self.block_size

    # -- column calculators (accept scalars or numpy arrays) ---------------

    def cap_pv(self, i):
        return np.asarray(i) if not np.isscalar(i) else i

    def cap_b(self, i):
        return self.n_buses + (np.asarray(i) if not np.isscalar(i) else i)

    def _block(self, group: int, i, t, s):
        nt = self.n_buses * self.n_hours
        return 2 * self.n_buses + s * self.block_size + group * nt + i * self.n_hours + t

    def p(self, i, t, s):
        return self._block(0, i, t, s)

    def ch(self, i, t, s):
        return self._block(1, i, t, s)

    def dis(self, i, t, s):
        return self._block(2, i, t, s)

    def soc(self, i, t, s):
        """End-of-hour state column for hours t = 0..T-1."""
        return self._block(3, i, t, s)

    def ens(self, i, t, s):
        return self._block(4, i, t, s)

    def flow(self, e, t, s):
        if not self.with_network:
            raise DataError("layout has no flow columns")
        nt = self.n_buses * self.n_hours
        return 2 * self.n_buses + s * self.block_size + 5 * nt + e * self.n_hours + t

    def voltsq(self, i, t, s):
        if not self.with_network:
            raise DataError("layout has no voltage columns")
        nt = self.n_buses * self.n_hours
        et = self.n_edges * self.n_hours
        return 2 * self.n_buses + s * self.block_size + 5 * nt + et + i * self.n_hours + t

    # -- decoding -----------------------------------------------------------

    def decode(self, col: int) -> tuple[str, int, int | None, int | None]:
        """Column -> (group, bus-or-edge position, hour, scenario)."""
        n = self.n_buses
        if col < 0 or col >= self.n_cols:
            raise DataError(f"column {col} outside layout")
        if col < n:
            return ("cap_pv", col, None, None)
        if col < 2 * n:
            return ("cap_b", col - n, None, None)
        rel = col - 2 * n
        s, off = divmod(rel, self.block_size)
        nt = n * self.n_hours
        if off < 5 * nt:
            group, r = divmod(off, nt)
            i, t = divmod(r, self.n_hours)
            return (_GROUPS[group], i, t, s)
        off -= 5 * nt
        et = self.n_edges * self.n_hours
        if off < et:
            e, t = divmod(off, self.n_hours)
            return ("flow", e, t, s)
        off -= et
        i, t = divmod(off, self.n_hours)
        return ("voltsq", i, t, s)

    def col_name(self, col: int) -> str:
        group, a, t, s = self.decode(col)
        if group == "cap_pv":
            return f"xpv_{a}"
        if group == "cap_b":
            return f"xb_{a}"
        prefix = {"flow": "f", "voltsq": "u"}.get(group, group)
        return f"{prefix}_{a}_{t}_{s}"

    def col_names(self) -> list[str]:
        names = [f"xpv_{i}" for i in range(self.n_buses)]
        names += [f"xb_{i}" for i in range(self.n_buses)]
        rng_t = range(self.n_hours)
        for s in range(self.n_scenarios):
            for prefix in ("p", "ch", "dis", "soc", "ens"):
                names += [
                    f"{prefix}_{i}_{t}_{s}" for i in range(self.n_buses) for t in rng_t
                ]
            if self.with_network:
                names += [f"f_{e}_{t}_{s}" for e in range(self.n_edges) for t in rng_t]
                names += [f"u_{i}_{t}_{s}" for i in range(self.n_buses) for t in rng_t]
        return names

    def parse_name(self, name: str) -> int:
        m = re.fullmatch(r"(xpv|xb)_(\d+)", name)
        if m:
            i = int(m.group(2))
            return self.cap_pv(i) if m.group(1) == "xpv" else self.cap_b(i)
        m = re.fullmatch(r"(p|ch|dis|soc|ens|f|u)_(\d+)_(\d+)_(\d+)", name)
        if not m:
            raise DataError(f"unrecognized column name {name!r}")
        kind, a, t, s = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
        fn = {
            "p": self.p, "ch": self.ch, "dis": self.dis, "soc": self.soc,
            "ens": self.ens, "f": self.flow, "u": self.voltsq,
        }[kind]
        return int(fn(a, t, s))


def tag_family(tag: str) -> str:
    """Collapse a provenance tag to its constraint family."""
    m = re.match(r"(eq\d+|objective|ens_cap)", tag)
    if not m:
        raise DataError(f"malformed provenance tag {tag!r}")
    return m.group(1)


@dataclass
class LinearProgram:
    """Sparse LP in row form: data/indices/indptr CSR triplet plus bounds.

    Relations are -1/0/+1 for <=, =, >=. ``row_tags`` and ``bound_tags``
    hold provenance strings; default (untagged) bounds are 0/+inf.
    """

    name: str
    n_cols: int
    objective: np.ndarray
    col_lower: np.ndarray
    col_upper: np.ndarray
    col_names: list[str]
    lower_tags: dict[int, str]
    upper_tags: dict[int, str]
    row_data: np.ndarray
    row_indices: np.ndarray
    row_indptr: np.ndarray
    row_relations: np.ndarray
    row_rhs: np.ndarray
    row_tags: list[str]
    layout: VariableLayout | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return len(self.row_rhs)

    @property
    def n_nonzeros(self) -> int:
        return len(self.row_data)

    def rows_csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.row_data, self.row_indices, self.row_indptr),
            shape=(self.n_rows, self.n_cols),
        )

    def relation_symbol(self, row: int) -> str:
        return _REL_SYMBOL[int(self.row_relations[row])]

    def provenance_families(self) -> set[str]:
        fams = {tag_family(t) for t in self.row_tags}
        fams |= {tag_family(t) for t in self.lower_tags.values()}
        fams |= {tag_family(t) for t in self.upper_tags.values()}
        if np.any(self.objective != 0):
            fams.add("objective")
        return fams

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """Signed constraint violations: positive means infeasible amount."""
        ax = self.rows_csr() @ x
        viol = np.zeros(self.n_rows)
        le = self.row_relations == RELATION_LE
        ge = self.row_relations == RELATION_GE
        eq = self.row_relations == RELATION_EQ
        viol[le] = ax[le] - self.row_rhs[le]
        viol[ge] = self.row_rhs[ge] - ax[ge]
        viol[eq] = np.abs(ax[eq] - self.row_rhs[eq])
        return np.maximum(viol, 0.0)

    def bound_violations(self, x: np.ndarray) -> np.ndarray:
        return np.maximum(np.maximum(self.col_lower - x, x - self.col_upper), 0.0)

    def validate(self) -> None:
        if self.objective.shape != (self.n_cols,):
            raise DataError("objective length mismatch")
        if self.col_lower.shape != (self.n_cols,) or self.col_upper.shape != (self.n_cols,):
            raise DataError("bound array length mismatch")
        if np.any(self.col_lower > self.col_upper + 1e-15):
            bad = int(np.argmax(self.col_lower - self.col_upper))
            raise DataError(f"crossed bounds on column {self.col_names[bad]}")
        if len(self.row_tags) != self.n_rows:
            raise DataError("one provenance tag required per row")
        if len(self.col_names) != self.n_cols:
            raise DataError("one name required per column")


class LpBuilder:
    """Accumulates constraint blocks, then freezes into a LinearProgram."""

    def __init__(self, layout: VariableLayout, name: str = "model"):
        self.layout = layout
        self.name = name
        n = layout.n_cols
        self.objective = np.zeros(n)
        self.col_lower = np.zeros(n)
        self.col_upper = np.full(n, np.inf)
        self.lower_tags: dict[int, str] = {}
        self.upper_tags: dict[int, str] = {}
        self._chunks_idx: list[np.ndarray] = []
        self._chunks_val: list[np.ndarray] = []
        self._chunks_len: list[np.ndarray] = []
        self._rel: list[np.ndarray] = []
        self._rhs: list[np.ndarray] = []
        self._tags: list[str] = []
        self.meta: dict = {}

    def set_bounds(
        self,
        cols,
        lower=None,
        upper=None,
        tag: str | None = None,
        lower_tag: str | None = None,
        upper_tag: str | None = None,
    ) -> None:
        cols = np.atleast_1d(np.asarray(cols, dtype=int))
        lower_tag = lower_tag or tag
        upper_tag = upper_tag or tag
        if lower is not None:
            self.col_lower[cols] = lower
            if lower_tag:
                self.lower_tags.update((int(c), lower_tag) for c in cols)
        if upper is not None:
            self.col_upper[cols] = upper
            if upper_tag:
                self.upper_tags.update((int(c), upper_tag) for c in cols)

    def add_block(self, cols: np.ndarray, vals: np.ndarray, relation: int, rhs, tags) -> None:
        """Append R rows with identical arity k: cols/vals are (R, k)."""
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.broadcast_to(np.asarray(vals, dtype=float), cols.shape)
        r, k = cols.shape
        self._chunks_idx.append(cols.reshape(-1))
        self._chunks_val.append(np.ascontiguousarray(vals).reshape(-1))
        self._chunks_len.append(np.full(r, k, dtype=np.int64))
        self._rel.append(np.full(r, relation, dtype=np.int8))
        self._rhs.append(np.broadcast_to(np.asarray(rhs, dtype=float), (r,)).copy())
        if isinstance(tags, str):
            raise DataError("tags must be a sequence, one per row")
        if len(tags) != r:
            raise DataError("one tag per row required")
        self._tags.extend(tags)

    def add_row(self, cols, vals, relation: int, rhs: float, tag: str) -> None:
        self.add_block(
            np.asarray(cols, dtype=np.int64)[None, :],
            np.asarray(vals, dtype=float)[None, :],
            relation,
            np.array([rhs]),
            [tag],
        )

    def finish(self) -> LinearProgram:
        if self._chunks_idx:
            indices = np.concatenate(self._chunks_idx)
            data = np.concatenate(self._chunks_val)
            lens = np.concatenate(self._chunks_len)
            indptr = np.concatenate([[0], np.cumsum(lens)])
            relations = np.concatenate(self._rel)
            rhs = np.concatenate(self._rhs)
        else:
            indices = np.zeros(0, dtype=np.int64)
            data = np.zeros(0)
            indptr = np.zeros(1, dtype=np.int64)
            relations = np.zeros(0, dtype=np.int8)
            rhs = np.zeros(0)
        lp = LinearProgram(
            name=self.name,
            n_cols=self.layout.n_cols,
            objective=self.objective,
            col_lower=self.col_lower,
            col_upper=self.col_upper,
            col_names=self.layout.col_names(),
            lower_tags=self.lower_tags,
            upper_tags=self.upper_tags,
            row_data=data,
            row_indices=indices,
            row_indptr=indptr,
            row_relations=relations,
            row_rhs=rhs,
            row_tags=self._tags,
            layout=self.layout,
            meta=self.meta,
        )
        lp.validate()
        return lp
