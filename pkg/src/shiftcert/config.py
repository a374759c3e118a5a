"""Run configuration shared by the CLI and the certification suites.

A config can come from a ``key=value`` text file, from CLI flags, or both;
flags win over file entries, which win over the defaults below.  All values
are validated before any computation starts.  Numeric inputs use the exact
scalar syntax -- decimal floats are rejected at the parsing layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .scalars import ScalarParseError

__all__ = ["Config", "ConfigError", "parse_config_file", "build_config"]


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


@dataclass(frozen=True)
class Config:
    weights: str = "exp:2"
    spaces: tuple[str, ...] = ("l1",)
    precision: int = 32
    targets: int = 5  # M: enumeration targets for schedule / orbit / distance
    blocks: int = 12  # K: materialized periodic blocks
    periods: tuple[int, ...] = (1, 2, 3)  # N values for fixpoint checks
    witness_max: int = 12  # n_max for the unboundedness table
    weight_check: int = 64  # prefix length for the weight-condition suite
    heads_per_period: int = 2
    distance_slack: int = 4  # distance period is max(k_m, 1) + slack
    search_cap: int = 2000
    fmt: str = "json"
    out: str | None = None
    field_name: str = "auto"  # auto | real | complex
    parallel: bool = False
    include_timings: bool = False

    def validate(self) -> "Config":
        if not self.weights:
            raise ConfigError("weights must be specified")
        if not self.spaces:
            raise ConfigError("at least one space must be specified")
        for name in ("precision", "targets", "blocks", "witness_max", "search_cap"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if self.precision < 1:
            raise ConfigError("precision must be >= 1")
        if self.blocks < 2:
            raise ConfigError("blocks must be >= 2 (fixpoint checks need two)")
        if self.weight_check < 2:
            raise ConfigError("weight_check must be >= 2")
        if any(n < 1 for n in self.periods):
            raise ConfigError("periods must be positive")
        if self.fmt not in ("json", "csv-summary", "csv-curves"):
            raise ConfigError(f"unknown output format {self.fmt!r}")
        if self.field_name not in ("auto", "real", "complex"):
            raise ConfigError(f"unknown field {self.field_name!r}")
        return self


_INT_KEYS = {
    "precision",
    "targets",
    "blocks",
    "witness_max",
    "weight_check",
    "heads_per_period",
    "distance_slack",
    "search_cap",
}
_LIST_INT_KEYS = {"periods"}
_LIST_STR_KEYS = {"spaces"}
_BOOL_KEYS = {"parallel", "include_timings"}
_STR_KEYS = {"weights", "fmt", "out", "field_name"}

# accepted spellings in config files / flag names
_ALIASES = {
    "space": "spaces",
    "M": "targets",
    "K": "blocks",
    "N": "periods",
    "n_max": "witness_max",
    "format": "fmt",
    "field": "field_name",
}


def _coerce(key: str, raw: str):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
    if key in _LIST_INT_KEYS:
        try:
            return tuple(int(part) for part in raw.split(",") if part.strip())
        except ValueError:
            raise ConfigError(f"{key} must be comma-separated integers, got {raw!r}") from None
    if key in _LIST_STR_KEYS:
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    if key in _BOOL_KEYS:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} must be a boolean, got {raw!r}")
    if key in _STR_KEYS:
        return raw
    raise ConfigError(f"unknown config key {key!r}")


def parse_config_file(text: str) -> dict[str, object]:
    """Parse key=value lines; '#' starts a comment, blank lines are skipped."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        key = _ALIASES.get(key, key)
        values[key] = _coerce(key, raw)
    return values


def build_config(
    file_values: dict[str, object] | None = None,
    overrides: dict[str, object] | None = None,
) -> Config:
    """Defaults, then file values, then explicit overrides; validated."""
    cfg = Config()
    known = {f.name for f in fields(Config)}
    for source in (file_values or {}, overrides or {}):
        updates = {}
        for key, value in source.items():
            key = _ALIASES.get(key, key)
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if value is not None:
                updates[key] = value
        cfg = replace(cfg, **updates)
    try:
        return cfg.validate()
    except ScalarParseError as exc:  # pragma: no cover - defensive
        raise ConfigError(str(exc)) from exc
