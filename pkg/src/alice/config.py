"""YAML run configuration."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from alice.errors import ConfigError, ConfigMissingKey, ConfigRangeError, ConfigTypeError
from alice.params import FlowParams, SelectPolicy

REQUIRED = ("sources", "top", "selected_outputs", "max_io", "max_efpgas")
SECTIONS = {
    "fabric": {"w_min", "w_max", "io_per_side_unit"},
    "score": {"alpha", "beta", "rank_order"},
    "filter": {"policy", "k", "impact"},
    "limits": {"max_clusters"},
}
TOP_LEVEL = set(REQUIRED) | set(SECTIONS) | {"name"}


@dataclass(frozen=True)
class RunConfig:
    name: str
    sources: tuple[Path, ...]
    top: str
    params: FlowParams
    path: Path | None = None


def _int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigTypeError(f"{key} must be an integer, got {value!r}")
    return value


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigTypeError(f"{key} must be a number, got {value!r}")
    return float(value)


def _str(key: str, value: Any) -> str:
    if not isinstance(value, str) or not value:
        raise ConfigTypeError(f"{key} must be a non-empty string, got {value!r}")
    return value


def _str_list(key: str, value: Any) -> list[str]:
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list):
        raise ConfigTypeError(f"{key} must be a list of strings, got {value!r}")
    items = [_str(f"{key}[{i}]", v) for i, v in enumerate(value)]
    if not items:
        raise ConfigRangeError(f"{key} must not be empty")
    return items


def _section(data: dict, name: str) -> dict:
    section = data.get(name) or {}
    if not isinstance(section, dict):
        raise ConfigTypeError(f"{name} must be a mapping")
    unknown = set(section) - SECTIONS[name]
    if unknown:
        raise ConfigError(f"unknown key(s) in {name}: {', '.join(sorted(unknown))}")
    return section


def parse_config(data: Any, base_dir: Path = Path("."), name: str = "run") -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigTypeError("configuration must be a YAML mapping")
    for key in REQUIRED:
        if key not in data:
            raise ConfigMissingKey(key)
    unknown = set(data) - TOP_LEVEL
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(sorted(unknown))}")

    fabric = _section(data, "fabric")
    score = _section(data, "score")
    filt = _section(data, "filter")
    limits = _section(data, "limits")

    policy = SelectPolicy(
        kind=_str("filter.policy", filt.get("policy", "positive_score")),
        k=_int("filter.k", filt["k"]) if "k" in filt else None,
    )
    params = FlowParams(
        max_io=_int("max_io", data["max_io"]),
        max_efpgas=_int("max_efpgas", data["max_efpgas"]),
        selected_outputs=tuple(_str_list("selected_outputs", data["selected_outputs"])),
        fabric_w_min=_int("fabric.w_min", fabric.get("w_min", 2)),
        fabric_w_max=_int("fabric.w_max", fabric.get("w_max", 20)),
        io_per_side_unit=_int("fabric.io_per_side_unit", fabric.get("io_per_side_unit", 16)),
        alpha=_number("score.alpha", score.get("alpha", 1.0)),
        beta=_number("score.beta", score.get("beta", 1.0)),
        rank_order=_str("score.rank_order", score.get("rank_order", "max")),
        select_policy=policy,
        impact=_str("filter.impact", filt.get("impact", "transitive")),
        max_clusters=_int("limits.max_clusters", limits.get("max_clusters", 100_000)),
    )
    sources = tuple(base_dir / s for s in _str_list("sources", data["sources"]))
    return RunConfig(
        name=_str("name", data.get("name", name)),
        sources=sources,
        top=_str("top", data["top"]),
        params=params,
    )


def load_config(path: str | Path) -> RunConfig:
    """Read a run configuration; source paths are relative to the file's directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    cfg = parse_config(data, base_dir=path.parent, name=path.stem)
    return RunConfig(cfg.name, cfg.sources, cfg.top, cfg.params, path)
