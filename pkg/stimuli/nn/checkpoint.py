"""JSON checkpoint files: parameter arrays plus provenance."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def encode_array(values: np.ndarray) -> Dict[str, Any]:
    return {"shape": list(values.shape), "values": values.ravel().tolist()}


def decode_array(entry: Dict[str, Any]) -> np.ndarray:
    values = np.asarray(entry["values"], dtype=np.float64)
    shape = tuple(entry["shape"])
    if values.size != int(np.prod(shape)):
        raise ValueError(f"checkpoint array has {values.size} values for shape {shape}")
    return values.reshape(shape)


def write_checkpoint(path: Union[str, Path], payload: Dict[str, Any],
                     parameters: Dict[str, np.ndarray]) -> Path:
    """Write ``payload`` plus row-major parameter arrays under a version header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = dict(payload)
    document["format_version"] = FORMAT_VERSION
    document["parameters"] = {name: encode_array(values) for name, values in parameters.items()}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, sort_keys=True)
    logger.info("Wrote checkpoint %s (%d parameters)", path, len(parameters))
    return path


def read_checkpoint(path: Union[str, Path]) -> Dict[str, Any]:
    """Load a checkpoint; ``parameters`` come back as numpy arrays."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"checkpoint {path} is not valid JSON: {e}") from e
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format_version {version!r} in {path}")
    document["parameters"] = {name: decode_array(entry)
                              for name, entry in document.get("parameters", {}).items()}
    return document
