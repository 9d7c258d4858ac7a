# src/aging_ctrw/utils/serialization.py
"""
Deterministic writers for result files: JSON reports and CSV tables with
'.' decimals, LF line endings and full float precision.
"""

import hashlib
import json
import math
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

FLOAT_FORMAT = '%.17g'


def _to_jsonable(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return value
    if isinstance(obj, complex):
        return {'real': obj.real, 'imag': obj.imag}
    if hasattr(obj, 'model_dump'):
        return _to_jsonable(obj.model_dump())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_to_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=True) + '\n'


def scenario_hash(canonical: dict) -> str:
    """First 16 hex digits of the SHA-256 of the canonical scenario JSON"""
    payload = json.dumps(_to_jsonable(canonical), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]


def write_json(path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='\n', encoding='utf-8') as handle:
        handle.write(dumps(obj))
    return path


def write_frame(path, frame: pd.DataFrame, header_comment: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='\n', encoding='utf-8') as handle:
        if header_comment:
            handle.write(f"# {header_comment}\n")
        frame.to_csv(handle, index=False, lineterminator='\n', float_format=FLOAT_FORMAT)
    return path


def provenance(scenario_digest: str, seed: int) -> str:
    return f"scenario_hash={scenario_digest},seed={seed}"
