"""Run configuration: defaults, JSON config files, CLI flag overrides.

A key set in the config file and also passed as a flag is a hard error:
there is no silent precedence between the two sources.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError
from .evalkit import METRIC_NAMES
from .models import MODEL_TYPES

DEFAULT_GRIDS: dict[str, dict[str, list[float]]] = {
    "nb": {"alpha": [0.1, 0.5, 1.0]},
    "lr": {"l2": [0.0, 0.01, 0.1, 1.0]},
    "svm": {"lam": [1e-4, 1e-3, 1e-2, 1e-1]},
}


@dataclass
class RunConfig:
    """Resolved settings for a pipeline or zero-shot run."""

    seed: int | None = None
    test_frac: float = 0.2
    augment: bool = True
    augment_rate: float = 0.10
    use_smote: bool = True
    smote_k: int = 5
    include_pos: bool = False
    models: tuple[str, ...] = ("nb", "lr", "svm")
    selection_metric: str = "macro_f1"
    cv_folds: int = 5
    grids: dict = field(default_factory=lambda: copy.deepcopy(DEFAULT_GRIDS))
    lr_epochs: int = 300
    lr_learning_rate: float = 0.5
    svm_passes: int = 30
    provider: str = "mock:verbs"
    provider_settings: dict = field(default_factory=dict)
    concurrency: int = 4
    resources: dict = field(default_factory=dict)

    def validate(self, require_seed: bool = True) -> None:
        if require_seed and self.seed is None:
            raise ConfigError("seed is required: set it in the config file or pass --seed")
        if self.seed is not None and not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        if not 0.0 < self.test_frac < 1.0:
            raise ConfigError("test_frac must be strictly between 0 and 1")
        if self.augment_rate < 0:
            raise ConfigError("augment_rate must be non-negative")
        if self.smote_k < 1:
            raise ConfigError("smote_k must be at least 1")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be at least 2")
        if not self.models:
            raise ConfigError("at least one model must be selected")
        for m in self.models:
            if m not in MODEL_TYPES:
                raise ConfigError(f"unknown model {m!r}, expected one of {MODEL_TYPES}")
        if self.selection_metric not in METRIC_NAMES:
            raise ConfigError(
                f"unknown selection metric {self.selection_metric!r}, "
                f"expected one of {METRIC_NAMES}"
            )
        if self.lr_epochs < 1 or self.svm_passes < 1:
            raise ConfigError("lr_epochs and svm_passes must be positive")
        if self.concurrency < 1:
            raise ConfigError("concurrency must be at least 1")
        if not isinstance(self.provider, str) or not any(
            p.strip() for p in self.provider.split(",")
        ):
            raise ConfigError("provider must name at least one provider")
        for m, grid in self.grids.items():
            if m not in MODEL_TYPES:
                raise ConfigError(f"grid for unknown model {m!r}")
            if not isinstance(grid, dict) or not grid:
                raise ConfigError(f"grid for {m!r} must be a non-empty mapping")
            for key, values in grid.items():
                if not isinstance(values, list) or not values:
                    raise ConfigError(f"grid {m}.{key} must be a non-empty list")

    def as_dict(self) -> dict:
        out: dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def _coerce(key: str, value: Any) -> Any:
    if key == "models":
        if isinstance(value, str):
            value = [v.strip() for v in value.split(",") if v.strip()]
        return tuple(value)
    if key == "provider" and isinstance(value, (list, tuple)):
        # a list of provider names collapses to the comma form
        return ",".join(str(v) for v in value)
    return value


def load_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Build a RunConfig from an optional JSON file and CLI overrides.

    overrides uses None to mean "not passed". A key present in both the
    file and the overrides raises ConfigError.
    """
    file_values: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        unknown = set(doc) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        file_values = doc
    cfg = RunConfig()
    for key, value in file_values.items():
        setattr(cfg, key, _coerce(key, value))
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown setting {key!r}")
            if key in file_values:
                raise ConfigError(
                    f"{key!r} is set in the config file and as a flag; pick one place"
                )
            setattr(cfg, key, _coerce(key, value))
    return cfg
