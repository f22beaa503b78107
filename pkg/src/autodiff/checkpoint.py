"""
JSON checkpoints of named parameters: ``{"params": {name: {shape, data}}, "config": {...}}``.

Floats are written in their shortest round-trip decimal form, which reads
back bit-exactly.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from src.autodiff.tensor import Parameter
from src.utils.errors import ConfigError, ShapeError

logger = logging.getLogger(__name__)


def params_to_dict(params: Mapping[str, Parameter]) -> Dict[str, Dict[str, Any]]:
    return {
        name: {"shape": list(p.shape), "data": [float(v) for v in p.data.reshape(-1)]}
        for name, p in params.items()
    }


def save_checkpoint(path: Path, params: Mapping[str, Parameter], config: Optional[dict] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"config": config or {}, "params": params_to_dict(params)}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)
    logger.debug(f"Saved checkpoint with {len(params)} tensors to {path}")
    return path


def load_checkpoint(path: Path) -> Tuple[Dict[str, Parameter], dict]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"checkpoint not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        payload = json.load(f)
    params = {}
    for name, entry in payload["params"].items():
        shape = tuple(entry["shape"])
        data = np.asarray(entry["data"], dtype=np.float64)
        if data.size != int(np.prod(shape, dtype=np.int64)):
            raise ShapeError(f"checkpoint tensor {name}", shape, data.shape)
        params[name] = Parameter(name, data.reshape(shape))
    return params, payload.get("config", {})
