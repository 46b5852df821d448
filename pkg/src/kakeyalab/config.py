"""Experiment configs: flat dotted ``key = value`` files (a TOML subset)."""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import tomli

KINDS = ("scaling", "decay", "metric-oracle", "covering", "dual-sphere", "cone", "bump", "identities")


class ConfigError(Exception):
    """Invalid config; ``str()`` carries a line/field diagnostic."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    name: str
    seed: int
    values: dict
    source_text: str

    def get(self, key: str, default=None):
        node = self.values
        for part in key.split("."):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def require(self, key: str):
        value = self.get(key)
        if value is None:
            raise ConfigError("missing required value", key, self.line_of(key))
        return value

    def line_of(self, key: str) -> int | None:
        pattern = re.compile(rf"^\s*{re.escape(key)}\s*=")
        for i, line in enumerate(self.source_text.splitlines(), start=1):
            if pattern.match(line):
                return i
        return None

    def fail(self, key: str, message: str):
        raise ConfigError(message, key, self.line_of(key))

    def integer(self, key: str, minimum: int | None = None, default=None) -> int:
        value = self.get(key, default)
        if value is None:
            self.fail(key, "missing required value")
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(key, f"expected an integer, got {value!r}")
        if minimum is not None and value < minimum:
            self.fail(key, f"must be >= {minimum}")
        return value

    def real(self, key: str, positive: bool = False, default=None) -> float:
        value = self.get(key, default)
        if value is None:
            self.fail(key, "missing required value")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(key, f"expected a number, got {value!r}")
        if positive and value <= 0:
            self.fail(key, "must be positive")
        return float(value)

    def real_list(self, key: str, positive: bool = True) -> list[float]:
        value = self.get(key)
        if value is None:
            self.fail(key, "missing required value")
        if not isinstance(value, list) or not value:
            self.fail(key, "expected a non-empty list of numbers")
        for v in value:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                self.fail(key, f"expected numbers, got {v!r}")
            if positive and v <= 0:
                self.fail(key, "values must be positive")
        return [float(v) for v in value]

    def choice(self, key: str, options, default=None) -> str:
        value = self.get(key, default)
        if value not in options:
            self.fail(key, f"expected one of {sorted(options)}, got {value!r}")
        return value


def parse_config(text: str, default_name: str = "experiment") -> ExperimentConfig:
    try:
        values = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from None
    probe = ExperimentConfig("", default_name, 0, values, text)
    kind = probe.choice("experiment.kind", KINDS)
    if "seed" not in values:
        probe.fail("seed", "a seed is mandatory")
    seed = probe.integer("seed", minimum=0)
    name = probe.get("experiment.name", default_name)
    if not isinstance(name, str) or not re.fullmatch(r"[A-Za-z0-9_.-]+", name):
        probe.fail("experiment.name", "use letters, digits, '.', '_' or '-'")
    return ExperimentConfig(kind, name, seed, values, text)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), default_name=path.stem)


def fixture_dir():
    return resources.files("kakeyalab") / "fixtures"


def list_fixtures() -> list[tuple[str, str]]:
    """Bundled configs as (name, one-line description) pairs."""
    out = []
    for entry in sorted(fixture_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".toml"):
            cfg = parse_config(entry.read_text(), entry.name[:-5])
            out.append((entry.name[:-5], str(cfg.get("experiment.description", ""))))
    return out


def resolve_config(target: str) -> ExperimentConfig:
    """Load ``target`` as a file path, falling back to a bundled fixture name."""
    path = Path(target)
    if path.is_file():
        return load_config(path)
    fixture = fixture_dir() / f"{target}.toml"
    if fixture.is_file():
        return parse_config(fixture.read_text(), target)
    raise ConfigError(f"no config file or fixture named {target!r}")
