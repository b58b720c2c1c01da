"""Model documents on disk.

A document is either the model object itself or ``{"model": {...}}``::

    {"atoms": [{"prob": p, "maps": [{"scale": s, "rotation_deg": a,
                                       "reflect": b, "translate": [x, y]}]}],
     "open_set": [[x, y], ...], "big_R": optional}
"""
import json
import logging
import os
from pathlib import Path
from typing import Optional

from .errors import ModelConfigError
from .exact_gasket import gasket_model
from .ifs_core import RandomIfsModel

logger = logging.getLogger("fractalcurv")


def load_model(path) -> RandomIfsModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ModelConfigError(f"model file not found: {path}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ModelConfigError(f"model file is not valid JSON: {path}: {e}") from e
    if not isinstance(data, dict):
        raise ModelConfigError("model document must be a JSON object")
    model = RandomIfsModel.from_dict(data.get("model", data))
    logger.info(f"model loaded | path={path} | atoms={len(model.atoms)}")
    return model


def save_model(path, model: RandomIfsModel):
    path = Path(path)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with open(tmp_path, "w", encoding="utf-8") as f:
        json.dump({"model": model.to_dict()}, f, indent=2)
    os.replace(tmp_path, path)


def resolve_model(path: Optional[str], gasket: Optional[float]) -> RandomIfsModel:
    """A model file or the built-in gasket family; exactly one must be given."""
    if (path is None) == (gasket is None):
        raise ModelConfigError("give either a model file or --gasket P")
    if gasket is not None:
        if not 0.0 <= gasket <= 1.0:
            raise ModelConfigError(f"--gasket takes p in [0, 1], got {gasket}")
        return gasket_model(gasket)
    return load_model(path)
