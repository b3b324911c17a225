"""Flat experiment config files.

Configs are INI-style `key = value` files with the sections [env], [agent],
[shadow] and [harness]. Any key may be overridden from the command line as
`section.key=value`, or as `key=value` when the key name is unique across
sections.

Example:
    >>> config = load_config("configs/fig4_qcompare_sparse.cfg", ["agent.gamma=0.95", "seeds=0,1"])
    >>> Path("run/config.cfg").write_text(dump_config(config))
"""

import configparser
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, Optional, Type, Union

from pydantic import BaseModel, ValidationError

from shadowrl.errors import ShadowRLError
from shadowrl.models.config import (
    AgentConfig,
    DecisionMode,
    EnvConfig,
    ExperimentConfig,
    HarnessConfig,
)

logger = logging.getLogger(__name__)

SECTIONS: Dict[str, Type[BaseModel]] = {
    'env': EnvConfig,
    'agent': AgentConfig,
    'shadow': DecisionMode,
    'harness': HarnessConfig,
}


class ConfigError(ShadowRLError):
    """Raised for unreadable config files, unknown keys or invalid values."""
    pass


def section_keys(section: str) -> set:
    """Keys accepted in a section: field names plus their file aliases."""
    keys = set()
    for name, info in SECTIONS[section].model_fields.items():
        keys.add(name)
        if info.alias:
            keys.add(info.alias)
    return keys


def _new_parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    return parser


def _parse_sections(text: str, source: str) -> Dict[str, Dict[str, str]]:
    parser = _new_parser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(f"Cannot parse {source}: {e}") from e

    unknown = set(parser.sections()) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"Unknown config sections in {source}: {sorted(unknown)}")
    return {name: dict(parser[name]) for name in parser.sections()}


def _read_sections(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    return _parse_sections(path.read_text(), str(path))


def _validate(sections: Dict[str, Dict[str, str]]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(sections)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration:\n{e}") from e


def _resolve_key(key: str) -> tuple:
    """Map `section.key` or a bare unique key onto (section, key)."""
    if '.' in key:
        section, name = key.split('.', 1)
        if section not in SECTIONS:
            raise ConfigError(f"Unknown config section {section!r} in override {key!r}")
        if name not in section_keys(section):
            raise ConfigError(f"Unknown config key {key!r}")
        return section, name

    owners = [s for s in SECTIONS if key in section_keys(s)]
    if not owners:
        raise ConfigError(f"Unknown config key {key!r}")
    if len(owners) > 1:
        raise ConfigError(f"Ambiguous config key {key!r}; use one of {[f'{s}.{key}' for s in owners]}")
    return owners[0], key


def apply_overrides(
    sections: Dict[str, Dict[str, str]],
    overrides: Iterable[str],
) -> Dict[str, Dict[str, str]]:
    """Merge `key=value` overrides into raw section dicts."""
    merged = {name: dict(values) for name, values in sections.items()}
    for item in overrides:
        if '=' not in item:
            raise ConfigError(f"Override must look like key=value, got {item!r}")
        key, value = (part.strip() for part in item.split('=', 1))
        section, name = _resolve_key(key)
        merged.setdefault(section, {})[name] = value
        logger.debug(f"Override {section}.{name} = {value}")
    return merged


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
) -> ExperimentConfig:
    """Build a validated config from defaults, an optional file and overrides.

    Raises:
        ConfigError: If the file is unreadable, a key is unknown or a value
            fails validation.
    """
    sections = _read_sections(path) if path is not None else {}
    return _validate(apply_overrides(sections, overrides))


def _format_value(value) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_format_value(v) for v in value)
    return str(value)


def dump_config(config: ExperimentConfig) -> str:
    """Render a fully resolved config in the file format `load_config` reads."""
    lines = []
    for section in SECTIONS:
        model = getattr(config, section)
        lines.append(f"[{section}]")
        for key, value in model.model_dump(by_alias=True).items():
            lines.append(f"{key} = {_format_value(value)}")
        lines.append("")
    return "\n".join(lines)


def loads_config(text: str, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """Parse config text, such as the echo stored inside a checkpoint."""
    return _validate(apply_overrides(_parse_sections(text, "<config text>"), overrides))
