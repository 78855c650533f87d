"""Network file ingestion.

Format: a sectioned CSV text file. Section markers are bracketed lines;
each section carries its own header row. Blank lines and ``#`` comments
are ignored.

::

    [meta]
    key,value
    v_base_kv,12.66
    v_min_pu,0.95
    v_max_pu,1.05
    slack_bus,1
    [buses]
    bus_id,s_base_kw
    1,1000
    ...
    [lines]
    from,to,r_ohm,p_max_kw
    1,2,0.0922,2000
    ...
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from gridplan.core.types import Line, NetworkModel
from gridplan.errors import DataError

_META_KEYS = {"v_base_kv", "v_min_pu", "v_max_pu", "slack_bus"}


def _fail(path, lineno: int, msg: str):
    raise DataError(f"{path}:{lineno}: {msg}")


def load_network(path) -> NetworkModel:
    path = Path(path)
    if not path.exists():
        raise DataError(f"network file not found: {path}")

    meta: dict[str, float] = {}
    bus_rows: list[tuple[int, float]] = []
    line_rows: list[Line] = []

    section = None
    header: list[str] | None = None
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(csv.reader(fh), start=1):
            if not raw or not any(cell.strip() for cell in raw):
                continue
            first = raw[0].strip()
            if first.startswith("#"):
                continue
            if first.startswith("[") and first.endswith("]"):
                section = first[1:-1].lower()
                if section not in ("meta", "buses", "lines"):
                    _fail(path, lineno, f"unknown section [{section}]")
                header = None
                continue
            if section is None:
                _fail(path, lineno, "data before any section marker")
            if header is None:
                header = [c.strip().lower() for c in raw]
                expected = {
                    "meta": ["key", "value"],
                    "buses": ["bus_id", "s_base_kw"],
                    "lines": ["from", "to", "r_ohm", "p_max_kw"],
                }[section]
                if header != expected:
                    _fail(path, lineno, f"[{section}] header must be {','.join(expected)}")
                continue

            cells = [c.strip() for c in raw]
            try:
                if section == "meta":
                    key = cells[0].lower()
                    if key not in _META_KEYS:
                        _fail(path, lineno, f"unknown meta key {key!r}")
                    meta[key] = float(cells[1])
                elif section == "buses":
                    bus_rows.append((int(cells[0]), float(cells[1])))
                else:
                    line_rows.append(
                        Line(int(cells[0]), int(cells[1]), float(cells[2]), float(cells[3]))
                    )
            except (ValueError, IndexError):
                _fail(path, lineno, f"cannot parse [{section}] row: {','.join(cells)}")

    missing = _META_KEYS - meta.keys()
    if missing:
        raise DataError(f"{path}: missing meta keys: {sorted(missing)}")
    if not bus_rows:
        raise DataError(f"{path}: no buses defined")

    buses = tuple(b for b, _ in bus_rows)
    s_base = np.array([s for _, s in bus_rows], dtype=float)
    return NetworkModel(
        buses=buses,
        lines=tuple(line_rows),
        v_base_kv=meta["v_base_kv"],
        v_min_pu=meta["v_min_pu"],
        v_max_pu=meta["v_max_pu"],
        s_base_kw=s_base,
        slack_bus=int(meta["slack_bus"]),
    )


def save_network(network: NetworkModel, path) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        fh.write("[meta]\n")
        w.writerow(["key", "value"])
        w.writerow(["v_base_kv", repr(network.v_base_kv)])
        w.writerow(["v_min_pu", repr(network.v_min_pu)])
        w.writerow(["v_max_pu", repr(network.v_max_pu)])
        w.writerow(["slack_bus", network.slack_bus])
        fh.write("[buses]\n")
        w.writerow(["bus_id", "s_base_kw"])
        for b, s in zip(network.buses, network.s_base_kw):
            w.writerow([b, repr(float(s))])
        fh.write("[lines]\n")
        w.writerow(["from", "to", "r_ohm", "p_max_kw"])
        for ln in network.lines:
            w.writerow([ln.from_bus, ln.to_bus, repr(ln.r_ohm), repr(ln.p_max_kw)])
