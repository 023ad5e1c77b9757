"""Runtime configuration: JSON file plus environment overrides."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .braid import DEFAULT_STRAND_CAP
from .chaincomplex import Calibration

ENV_THREADS = "GL1HOM_THREADS"
ENV_CACHE_DIR = "GL1HOM_CACHE_DIR"
ENV_STRAND_CAP = "GL1HOM_STRAND_CAP"
ENV_TIMEOUT = "GL1HOM_TIMEOUT"
ENV_CONFIG = "GL1HOM_CONFIG"


@dataclass(frozen=True)
class Config:
    threads: int = 1
    strand_cap: int = DEFAULT_STRAND_CAP
    timeout: float = 600.0  # per batch entry, seconds
    cache_dir: str | None = None
    calibration: Calibration = field(default_factory=Calibration)


def _calibration_from(data: dict, base: Calibration) -> Calibration:
    kw = {}
    for key in ("q_shift", "hom_shift"):
        if key in data:
            vals = tuple(int(x) for x in data[key])
            if len(vals) != 4:
                raise ValueError(f"{key} needs four integers")
            kw[key] = vals
    if "v_weight" in data:
        kw["v_weight"] = int(data["v_weight"])
    if "mirror" in data:
        kw["mirror"] = bool(data["mirror"])
    return replace(base, **kw)


def load_config(path: str | None = None, env=None) -> Config:
    env = os.environ if env is None else env
    cfg = Config()
    path = path or env.get(ENV_CONFIG)
    if path:
        data = json.loads(Path(path).read_text())
        cal = _calibration_from(data.get("calibration", {}), cfg.calibration)
        cfg = replace(
            cfg,
            threads=int(data.get("threads", cfg.threads)),
            strand_cap=int(data.get("strand_cap", cfg.strand_cap)),
            timeout=float(data.get("timeout", cfg.timeout)),
            cache_dir=data.get("cache_dir", cfg.cache_dir),
            calibration=cal,
        )
    if env.get(ENV_THREADS):
        cfg = replace(cfg, threads=max(1, int(env[ENV_THREADS])))
    if env.get(ENV_STRAND_CAP):
        cfg = replace(cfg, strand_cap=int(env[ENV_STRAND_CAP]))
    if env.get(ENV_TIMEOUT):
        cfg = replace(cfg, timeout=float(env[ENV_TIMEOUT]))
    if env.get(ENV_CACHE_DIR):
        cfg = replace(cfg, cache_dir=env[ENV_CACHE_DIR])
    return cfg
