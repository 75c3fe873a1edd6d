"""
Configuration
=============

Defaults, optionally overridden by a YAML file and then by environment
variables (``.env`` files are loaded first). Command-line flags override the
result.

Example ``astkit.yaml``::

    frontend:
      drop_punctuation: true
    paths:
      max_length: 8
      max_width: 2
      max_contexts: 200
    max_distance: 7
    jobs: 4
"""

import logging
import os
from dataclasses import dataclass, field, fields, is_dataclass, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import yaml
from dotenv import load_dotenv

from astkit.errors import ConfigurationError

logger = logging.getLogger(__name__)

GRAMMAR_DIR_ENV = "ASTKIT_GRAMMAR_DIR"
SUPPORTED_LANGUAGES = ("java",)

# Default interval edges for the characterization histograms.
BIN_PRESETS: Dict[str, Tuple[float, ...]] = {
    "jaccard": (0.0, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 1.0),
    "ease": (0.0, 0.15, 0.30, 0.45, 0.60, 0.75),
    "relevance": (0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175),
}


@dataclass(frozen=True)
class FrontendConfig:
    """Parser frontend settings."""

    language: str = "java"
    drop_punctuation: bool = True
    grammar_dir: Optional[str] = None


@dataclass(frozen=True)
class PathConfig:
    """
    Path-context extraction limits.

    Parameters
    ----------
    max_length : int
        Maximum number of edges on a path (k)
    max_width : int
        Maximum child-index gap at the turning node
    max_contexts : int or None
        Sample down to this many contexts; ``None`` keeps all
    sample_seed : int
        Seed for the sampler
    """

    max_length: int = 8
    max_width: int = 2
    max_contexts: Optional[int] = 200
    sample_seed: int = 0

    def __post_init__(self):
        if self.max_length < 1:
            raise ConfigurationError("max_length must be >= 1")
        if self.max_width < 0:
            raise ConfigurationError("max_width must be >= 0")
        if self.max_contexts is not None and self.max_contexts < 1:
            raise ConfigurationError("max_contexts must be >= 1 or unlimited")


@dataclass(frozen=True)
class TokenizerConfig:
    """``simple`` is the built-in sub-tokenizer; ``external`` names a pretrained one."""

    mode: str = "simple"
    external_spec: Optional[str] = None

    def __post_init__(self):
        if self.mode not in ("simple", "external"):
            raise ConfigurationError(f"unknown tokenizer mode {self.mode!r}")
        if self.mode == "external" and not self.external_spec:
            raise ConfigurationError("external tokenizer mode needs external_spec")


@dataclass(frozen=True)
class AstkitConfig:
    """Top-level configuration."""

    frontend: FrontendConfig = field(default_factory=FrontendConfig)
    paths: PathConfig = field(default_factory=PathConfig)
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    max_distance: int = 7
    jobs: Optional[int] = None
    strict_threshold: bool = False

    def __post_init__(self):
        if self.max_distance < 1:
            raise ConfigurationError("max_distance (P) must be >= 1")
        if self.jobs is not None and self.jobs == 0:
            raise ConfigurationError("jobs must be non-zero")


# ============================================================================
# Loading
# ============================================================================

def _merge(instance: Any, overrides: Mapping[str, Any], where: str) -> Any:
    known = {f.name: f for f in fields(instance)}
    changes = {}
    for key, value in overrides.items():
        if key not in known:
            raise ConfigurationError(f"unknown configuration key {where}{key!r}")
        current = getattr(instance, key)
        if is_dataclass(current):
            if not isinstance(value, Mapping):
                raise ConfigurationError(f"{where}{key} must be a mapping")
            changes[key] = _merge(current, value, f"{where}{key}.")
        else:
            changes[key] = value
    try:
        return replace(instance, **changes)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> AstkitConfig:
    """
    Assemble the effective configuration.

    Parameters
    ----------
    path : str or Path, optional
        YAML file with a (partial) configuration mapping
    overrides : mapping, optional
        Nested overrides applied last (used by the CLI)

    Returns
    -------
    AstkitConfig

    Raises
    ------
    ConfigurationError
        On unreadable files, unknown keys or invalid values.
    """
    load_dotenv()
    config = AstkitConfig()

    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, Mapping):
            raise ConfigurationError(f"config {path} must contain a mapping")
        config = _merge(config, data, "")
        logger.debug("loaded configuration from %s", path)

    grammar_dir = os.environ.get(GRAMMAR_DIR_ENV)
    if grammar_dir:
        config = replace(config, frontend=replace(config.frontend, grammar_dir=grammar_dir))

    if overrides:
        config = _merge(config, overrides, "")

    if config.frontend.language not in SUPPORTED_LANGUAGES:
        raise ConfigurationError(
            f"unsupported language {config.frontend.language!r}; "
            f"supported: {', '.join(SUPPORTED_LANGUAGES)}"
        )
    return config


def resolve_bins(spec: Union[str, None]) -> Optional[Tuple[float, ...]]:
    """
    Interpret a ``--bins`` value: a preset name or comma-separated edges.
    """
    if spec is None:
        return None
    if spec in BIN_PRESETS:
        return BIN_PRESETS[spec]
    try:
        return tuple(float(part) for part in spec.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"bad bin specification {spec!r}") from exc
