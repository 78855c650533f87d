"""Run configuration: one JSON file describing a complete planning run.

A config names the input data, the scenario-generation settings, the device
and cost parameters, and where outputs go. Command-line flags may override
individual values after loading; validation happens once, after overrides,
and rejects anything out of range before any compute starts.

Relative input paths are resolved against the config file's directory, then
against ``$GRIDPLAN_DATA_DIR`` (if set), then against the data files bundled
with the package. The output directory is resolved against the current
working directory.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .core.types import CostBook, DeviceParams
from .errors import DataError
from .solve import BACKENDS

__all__ = [
    "CONFIG_BACKENDS",
    "RunConfig",
    "apply_overrides",
    "bundled_data_dir",
    "load_config",
    "validate_config",
]

# "export" is accepted on top of the solver backends: plan then writes the
# model and map instead of solving, for hand-off to an external solver.
CONFIG_BACKENDS = BACKENDS + ("export",)

_TOP_KEYS = {
    "name", "network", "profiles", "scenarios", "device", "costs",
    "backend", "with_network", "out_dir",
}
_PROFILE_KEYS = {"load", "pv", "synth_seed"}
_SCENARIO_KEYS = {"k_min", "k_max", "seed", "multi_node_failures"}


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one run, shared by every subcommand."""

    name: str
    network_path: Path
    load_path: Path | None
    pv_path: Path | None
    synth_seed: int | None
    k_min: int
    k_max: int
    seed: int
    multi_node: bool
    device: DeviceParams
    costs: CostBook
    backend: str
    with_network: bool
    out_dir: Path

    @property
    def uses_synthetic_profiles(self) -> bool:
        return self.load_path is None


def bundled_data_dir() -> Path:
    """Directory holding the data files shipped inside the package."""
    return Path(resources.files("gridplan").joinpath("data"))


def _resolve_input(raw: str, base: Path) -> Path:
    p = Path(raw)
    if p.is_absolute():
        return p
    local = base / p
    if local.exists():
        return local
    env = os.environ.get("GRIDPLAN_DATA_DIR")
    if env and (Path(env) / p).exists():
        return Path(env) / p
    bundled = bundled_data_dir() / p
    if bundled.exists():
        return bundled
    return local  # fails existence checking later, with the obvious path


def _reject_unknown(section: dict, allowed: set[str], where: str) -> None:
    extra = sorted(set(section) - allowed)
    if extra:
        raise DataError(f"unknown {where} key(s): {', '.join(extra)}")


def _build_params(cls, section: dict, where: str):
    fields = {f.name for f in dataclasses.fields(cls)}
    _reject_unknown(section, fields, where)
    try:
        return cls(**section)
    except TypeError as exc:
        raise DataError(f"bad {where} section: {exc}") from None


def load_config(path: str | Path) -> RunConfig:
    """Parse and structurally check a JSON config file.

    Range and existence checks live in :func:`validate_config` so that flag
    overrides can be applied in between.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"config is not valid JSON: {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise DataError(f"config must be a JSON object: {path}")
    _reject_unknown(doc, _TOP_KEYS, "config")
    if "network" not in doc:
        raise DataError(f"config is missing required key 'network': {path}")

    base = path.parent
    profiles = doc.get("profiles", {})
    if not isinstance(profiles, dict):
        raise DataError("'profiles' must be an object")
    _reject_unknown(profiles, _PROFILE_KEYS, "profiles")
    if "synth_seed" in profiles and "load" in profiles:
        raise DataError("'profiles' must give either file paths or synth_seed, not both")

    scen = doc.get("scenarios", {})
    if not isinstance(scen, dict):
        raise DataError("'scenarios' must be an object")
    _reject_unknown(scen, _SCENARIO_KEYS, "scenarios")

    costs_doc = doc.get("costs", {})
    if "c_pv_per_kw" not in costs_doc or "c_b_per_kwh" not in costs_doc:
        raise DataError("config 'costs' must set c_pv_per_kw and c_b_per_kwh")

    return RunConfig(
        name=str(doc.get("name", path.stem)),
        network_path=_resolve_input(str(doc["network"]), base),
        load_path=_resolve_input(str(profiles["load"]), base) if "load" in profiles else None,
        pv_path=_resolve_input(str(profiles["pv"]), base) if "pv" in profiles else None,
        synth_seed=int(profiles["synth_seed"]) if "synth_seed" in profiles else None,
        k_min=int(scen.get("k_min", 7)),
        k_max=int(scen.get("k_max", 20)),
        seed=int(scen.get("seed", 0)),
        multi_node=bool(scen.get("multi_node_failures", False)),
        device=_build_params(DeviceParams, doc.get("device", {}), "device"),
        costs=_build_params(CostBook, costs_doc, "costs"),
        backend=str(doc.get("backend", "auto")),
        with_network=bool(doc.get("with_network", True)),
        out_dir=Path(doc.get("out_dir", "out")),
    )


def apply_overrides(
    cfg: RunConfig,
    seed: int | None = None,
    epsilon: float | None = None,
    backend: str | None = None,
    out: str | None = None,
    synth: bool = False,
) -> RunConfig:
    """Fold command-line flags into a config. Flags win."""
    changes: dict = {}
    if seed is not None:
        changes["seed"] = int(seed)
    if epsilon is not None:
        changes["costs"] = dataclasses.replace(cfg.costs, epsilon_rel=float(epsilon))
    if backend is not None:
        changes["backend"] = backend
    if out is not None:
        changes["out_dir"] = Path(out)
    if synth:
        changes["load_path"] = None
        changes["pv_path"] = None
        if cfg.synth_seed is None:
            changes["synth_seed"] = seed if seed is not None else cfg.seed
    return dataclasses.replace(cfg, **changes) if changes else cfg


def validate_config(cfg: RunConfig, need_profiles: bool = False) -> None:
    """Reject out-of-range settings and missing inputs before any compute."""
    if cfg.backend not in CONFIG_BACKENDS:
        raise DataError(
            f"unknown backend {cfg.backend!r}; choose from {', '.join(CONFIG_BACKENDS)}"
        )
    if cfg.k_min < 2 or cfg.k_max < cfg.k_min:
        raise DataError(
            f"cluster-count range must satisfy 2 <= k_min <= k_max, got [{cfg.k_min}, {cfg.k_max}]"
        )
    if cfg.seed < 0:
        raise DataError("seed must be non-negative")
    if not cfg.network_path.exists():
        raise DataError(f"network file not found: {cfg.network_path}")
    if need_profiles and not cfg.uses_synthetic_profiles:
        for label, p in (("load", cfg.load_path), ("pv", cfg.pv_path)):
            if p is not None and not p.exists():
                raise DataError(
                    f"{label} profile file not found: {p} (pass --synth to use generated profiles)"
                )
    if need_profiles and cfg.uses_synthetic_profiles and cfg.synth_seed is None:
        raise DataError("profiles: set either a load file or synth_seed")
