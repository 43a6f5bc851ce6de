"""
The `section.key = value` configuration grammar.

One setting per line, `#` starts a comment, lists are comma-separated and
`clean` stands for an infinite signal-to-noise ratio. Settings are applied in
order: file, `EXPLAIN_LAB_SEED`, `--set` overrides, command-line flags.
"""

from __future__ import annotations

import logging
import math
import os
from pathlib import Path
from typing import Any, Iterable, Mapping, NamedTuple, get_args, get_origin

from pydantic import BaseModel, ValidationError

from explain_lab.errors import ConfigValidationError

from .RunConfig import DERIVED_KEYS, RunConfig, derived_values

logger = logging.getLogger(__name__)

SEED_ENV = "EXPLAIN_LAB_SEED"
CLEAN_TOKEN = "clean"
NONE_TOKEN = "none"


class Setting(NamedTuple):
    key: str
    value: str
    line: int | None


def read_settings(text: str) -> list[Setting]:
    """
    Raise
    -----
    `ConfigValidationError` on a line without `=`, an empty key, or a key set twice
    """

    settings: list[Setting] = []
    seen: dict[str, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigValidationError("expected `section.key = value`", None, number)
        if key in seen:
            raise ConfigValidationError(f"already set on line {seen[key]}", key, number)
        seen[key] = number
        settings.append(Setting(key, value.strip(), number))
    return settings


def parse_override(text: str) -> Setting:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigValidationError(f"override {text!r} is not `section.key=value`")
    return Setting(key.strip(), value.strip(), None)


def _annotation(parts: list[str]) -> Any:
    model: type[BaseModel] | None = RunConfig
    annotation: Any = None
    for part in parts:
        if model is None or part not in model.model_fields:
            return None
        annotation = model.model_fields[part].annotation
        model = annotation if isinstance(annotation, type) and issubclass(annotation, BaseModel) else None
    return annotation


def _accepts_none(annotation: Any) -> bool:
    return type(None) in get_args(annotation)


def _is_sequence(annotation: Any) -> bool:
    return get_origin(annotation) in (tuple, list)


def _coerce(parts: list[str], value: str) -> Any:
    annotation = _annotation(parts)
    if value.lower() == NONE_TOKEN and _accepts_none(annotation):
        return None
    if _is_sequence(annotation):
        items = [item.strip() for item in value.split(",") if item.strip()]
        return [math.inf if item.lower() == CLEAN_TOKEN else item for item in items]
    return value


def _check_key(setting: Setting) -> list[str]:
    parts = setting.key.split(".")
    if len(parts) < 2 or not all(parts):
        raise ConfigValidationError("keys have the form `section.key`", setting.key, setting.line)
    for derived, source in DERIVED_KEYS.items():
        if setting.key == derived or setting.key.startswith(derived + "."):
            raise ConfigValidationError(f"cannot be set, it follows {source}", setting.key, setting.line)
    return parts


def _locate(loc: tuple, lines: Mapping[str, int | None]) -> tuple[str, int | None]:
    parts = [str(p) for p in loc if not isinstance(p, int)]
    for end in range(len(parts), 0, -1):
        key = ".".join(parts[:end])
        if key in lines:
            return key, lines[key]
    key = ".".join(parts)
    nested = [line for k, line in lines.items() if k.startswith(key + ".") and line is not None]
    return key, min(nested) if nested else None


def build_config(settings: Iterable[Setting]) -> RunConfig:
    """
    Validate ordered settings into a `RunConfig`; later settings win

    Raise
    -----
    `ConfigValidationError` naming the offending key and, for file settings, its line
    """

    raw: dict[str, Any] = {}
    lines: dict[str, int | None] = {}
    for setting in settings:
        parts = _check_key(setting)
        node = raw
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigValidationError("is a value, not a section", ".".join(parts[:-1]), setting.line)
            node = child
        node[parts[-1]] = _coerce(parts, setting.value)
        lines[setting.key] = setting.line
    try:
        return RunConfig.model_validate(derived_values(raw))
    except ValidationError as e:
        error = e.errors()[0]
        key, line = _locate(error["loc"], lines)
        raise ConfigValidationError(error["msg"], key, line) from e


def parse_config(
    path: Path | str | None = None,
    overrides: Iterable[str] = (),
    flags: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> RunConfig:
    """
    Parse a config file and apply overrides.

    Parameters
    ----------
    `path` `Path | str | None` Config file; all defaults without one
    `overrides` `Iterable[str]` `section.key=value` strings from `--set`
    `flags` `Mapping[str, Any] | None` Dotted keys set by dedicated flags; `None` values are skipped
    `environ` `Mapping[str, str] | None` Environment, `os.environ` by default

    Returns
    -------
    `RunConfig`

    Raise
    -----
    `FileNotFoundError` if `path` does not exist, `ConfigValidationError` otherwise
    """

    environ = os.environ if environ is None else environ
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    settings: list[Setting] = []
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"no such config file: {path}")
        settings.extend(read_settings(path.read_text()))
    if environ.get(SEED_ENV):
        logger.debug("seed base %s from %s", environ[SEED_ENV], SEED_ENV)
        settings.append(Setting("run.seed", environ[SEED_ENV], None))
    settings.extend(parse_override(o) for o in overrides)
    settings.extend(Setting(k, _format(v), None) for k, v in flags.items())
    return build_config(settings)


def _format(value: Any, clean: bool = False) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value) and value > 0 and clean:
            return CLEAN_TOKEN
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ", ".join(_format(v, clean) for v in value)
    return str(value)


def _flatten(prefix: str, values: Mapping[str, Any]) -> Iterable[tuple[str, Any]]:
    for name, value in values.items():
        key = f"{prefix}.{name}"
        if key in DERIVED_KEYS:
            continue
        if isinstance(value, dict):
            yield from _flatten(key, value)
        elif value is not None:
            yield key, value


def emit_config(config: RunConfig) -> str:
    """
    The effective configuration in the file grammar; `parse_config` of the
    result reproduces `config`
    """

    blocks = []
    for section, values in config.model_dump().items():
        lines = [f"# {section}"]
        lines.extend(
            f"{key} = {_format(value, clean=key == 'sweep.snr_levels')}"
            for key, value in _flatten(section, values)
        )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
