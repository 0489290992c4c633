"""Run configuration with layered sources.

Precedence, lowest to highest: built-in defaults, a TOML or JSON config
file, COUNTQA_* environment variables, then explicit overrides (CLI flags).
Field names, file keys, env suffixes, and CLI flags all match 1:1.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .pipeline import CountAnswerPipeline
from .providers.cache import ProviderCache
from .providers.remote import (
    RemoteEntailment,
    RemoteEntityRecognizer,
    RemoteSimilarity,
    RemoteSpanPredictor,
)
from .types import parse_count_strategy, parse_instance_strategy

ENV_PREFIX = "COUNTQA_"


class ConfigError(Exception):
    """Bad configuration value, file, or provider binding."""


@dataclass
class RunConfig:
    """Everything a run needs: knobs, provider bindings, service settings."""

    theta_inference: float = 0.5
    theta_explanation: float = 0.2
    alpha: float = 0.3
    count_strategy: str = "weighted_median"
    instance_strategy: str = "type_compatibility"
    provider: str = "lexical"
    span_predictor_url: Optional[str] = None
    explanation_predictor_url: Optional[str] = None
    similarity_url: Optional[str] = None
    ner_url: Optional[str] = None
    entailment_url: Optional[str] = None
    cache_path: Optional[str] = None
    offline: bool = False
    jobs: int = 1
    datasets: tuple[str, ...] = ()
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: tuple[str, ...] = ("*",)

    def validate(self) -> "RunConfig":
        for name in ("theta_inference", "theta_explanation", "alpha"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0,1], got {value!r}")
        try:
            parse_count_strategy(self.count_strategy)
            parse_instance_strategy(self.instance_strategy)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.provider not in ("lexical", "remote"):
            raise ConfigError(f"provider must be lexical or remote, "
                              f"got {self.provider!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if not 1 <= self.port <= 65535:
            raise ConfigError(f"port out of range: {self.port}")
        if self.offline and self.cache_path is None:
            raise ConfigError("offline mode requires cache_path")
        return self


_TUPLE_FIELDS = {"datasets", "cors_origins"}
_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, value: Any) -> Any:
    """Coerce a raw file/env value to the field's declared type."""
    spec = {f.name: f for f in fields(RunConfig)}.get(name)
    if spec is None:
        raise ConfigError(f"unknown config key: {name!r}")
    if name in _TUPLE_FIELDS:
        if isinstance(value, str):
            return tuple(v.strip() for v in value.split(",") if v.strip())
        if isinstance(value, (list, tuple)):
            return tuple(str(v) for v in value)
        raise ConfigError(f"{name} must be a list or comma-separated string")
    if name in ("theta_inference", "theta_explanation", "alpha"):
        try:
            return float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name} must be a number, got {value!r}") from exc
    if name in ("jobs", "port"):
        try:
            return int(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name} must be an integer, got {value!r}") from exc
    if name == "offline":
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _BOOL_TRUE:
            return True
        if text in _BOOL_FALSE:
            return False
        raise ConfigError(f"offline must be a boolean, got {value!r}")
    if value is None:
        return None
    return str(value)


def _load_file(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(path.read_text(encoding="utf-8"))
        else:
            with path.open("rb") as fh:
                data = tomllib.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    return data


def load_config(
    path: Optional[str | Path] = None,
    env: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Layer defaults, file, environment, and overrides into a RunConfig."""
    values: dict[str, Any] = {}
    if path is not None:
        for key, value in _load_file(Path(path)).items():
            values[key] = _coerce(key, value)
    env = os.environ if env is None else env
    for key, raw in env.items():
        if key.startswith(ENV_PREFIX):
            name = key[len(ENV_PREFIX):].lower()
            values[name] = _coerce(name, raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = _coerce(key, value)
    try:
        config = dataclasses.replace(RunConfig(), **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate()


def build_pipeline(config: RunConfig) -> CountAnswerPipeline:
    """Bind providers per the config and return a ready pipeline."""
    config.validate()
    if config.provider == "lexical":
        return CountAnswerPipeline(
            theta_inference=config.theta_inference,
            theta_explanation=config.theta_explanation,
            alpha=config.alpha,
            count_strategy=config.count_strategy,
            instance_strategy=config.instance_strategy,
        )

    cache = ProviderCache(config.cache_path) if config.cache_path else None
    common = {"cache": cache, "offline": config.offline}

    def require(url: Optional[str], flag: str) -> str:
        if not url:
            raise ConfigError(
                f"remote provider needs {flag} (or the matching "
                f"{ENV_PREFIX}{flag.upper()} variable)"
            )
        return url

    span = RemoteSpanPredictor(
        require(config.span_predictor_url, "span_predictor_url"), **common
    )
    explanation = None
    if config.explanation_predictor_url:
        explanation = RemoteSpanPredictor(config.explanation_predictor_url,
                                          **common)
    similarity = RemoteSimilarity(
        require(config.similarity_url, "similarity_url"), **common
    )
    ner = RemoteEntityRecognizer(require(config.ner_url, "ner_url"), **common)
    entailment = None
    if parse_instance_strategy(config.instance_strategy).value == "type_compatibility":
        entailment = RemoteEntailment(
            require(config.entailment_url, "entailment_url"), **common
        )
    elif config.entailment_url:
        entailment = RemoteEntailment(config.entailment_url, **common)
    return CountAnswerPipeline(
        theta_inference=config.theta_inference,
        theta_explanation=config.theta_explanation,
        alpha=config.alpha,
        count_strategy=config.count_strategy,
        instance_strategy=config.instance_strategy,
        span_predictor=span,
        explanation_predictor=explanation,
        similarity=similarity,
        ner=ner,
        entailment=entailment,
    )
