"""Run configuration: one JSON document with gen/lbm/model/train/paths
sections, strict about unknown keys, with defaults filled in for anything
omitted.  The fully resolved document is echoed next to each command's
output so runs can be reproduced from the echo plus input files alone.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .lbm import LbmConfig
from .model import ModelConfig
from .porous import GenConfig
from .train import TrainConfig

_TUPLE_FIELDS = {"porosity_range", "modes", "classifier_sizes"}


@dataclass
class RunConfig:
    gen: GenConfig = field(default_factory=GenConfig)
    lbm: LbmConfig = field(default_factory=LbmConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    paths: dict = field(default_factory=dict)

    def validate(self) -> None:
        self.gen.validate()
        self.lbm.validate()
        self.model.validate()
        self.train.validate()

    def resolved(self) -> dict:
        out = {}
        for section in ("gen", "lbm", "model", "train"):
            cfg = getattr(self, section)
            d = dataclasses.asdict(cfg)
            for key, value in d.items():
                if isinstance(value, tuple):
                    d[key] = list(value)
            out[section] = d
        out["paths"] = dict(self.paths)
        return out

    def echo(self, out_path: str) -> None:
        payload = json.dumps(self.resolved(), indent=2, sort_keys=True) + "\n"
        directory = os.path.dirname(os.path.abspath(out_path))
        os.makedirs(directory, exist_ok=True)
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)


def _apply_section(cfg, data: dict, section: str):
    valid = {f.name: f for f in dataclasses.fields(cfg)}
    for key, value in data.items():
        if key not in valid:
            raise ConfigError(f"unknown key {section}.{key!r} in run config")
        if key in _TUPLE_FIELDS and isinstance(value, list):
            value = tuple(value)
        setattr(cfg, key, value)
    return cfg


def run_config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("run config must be a JSON object")
    known = {"gen", "lbm", "model", "train", "paths"}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown section {key!r} in run config")
    rc = RunConfig()
    for section in ("gen", "lbm", "model", "train"):
        payload = data.get(section, {})
        if not isinstance(payload, dict):
            raise ConfigError(f"section {section!r} must be an object")
        _apply_section(getattr(rc, section), payload, section)
    paths = data.get("paths", {})
    if not isinstance(paths, dict):
        raise ConfigError("section 'paths' must be an object")
    rc.paths = dict(paths)
    rc.validate()
    return rc


def load_run_config(path: str | None) -> RunConfig:
    if path is None:
        rc = RunConfig()
        rc.validate()
        return rc
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return run_config_from_dict(data)
