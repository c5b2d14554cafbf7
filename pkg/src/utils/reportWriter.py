"""
Report Writer Utility
Writes byte-stable JSON and CSV payloads into an output directory.
"""
import logging
import os
from typing import Any

import numpy as np
import orjson
import pandas as pd

logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY
CSV_FLOAT_FORMAT = '%.10g'


def _default(obj: Any):
    """Fallback for values orjson does not serialize natively"""
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"Type is not JSON serializable: {type(obj).__name__}")


def ensure_output_dir(out_dir: str) -> str:
    """Create the output directory; raises OSError when it cannot be written"""
    os.makedirs(out_dir, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise PermissionError(f"Output directory not writable: {out_dir}")
    return out_dir


def to_json_bytes(payload: Any) -> bytes:
    return orjson.dumps(payload, default=_default, option=JSON_OPTIONS) + b'\n'


def write_json(out_dir: str, filename: str, payload: Any) -> str:
    """Write a JSON payload with sorted keys"""
    path = os.path.join(ensure_output_dir(out_dir), filename)
    with open(path, 'wb') as f:
        f.write(to_json_bytes(payload))
    logger.info(f"Wrote {path}")
    return path


def write_csv(out_dir: str, filename: str, frame: pd.DataFrame) -> str:
    """Write a DataFrame without index, fixed float format"""
    path = os.path.join(ensure_output_dir(out_dir), filename)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    logger.info(f"Wrote {path} ({len(frame)} rows)")
    return path
