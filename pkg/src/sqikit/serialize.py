"""Versioned, self-describing text format for trained models.

A model file is a JSON document carrying a format tag, a version, free-form
metadata and a list of named arrays. Arrays are stored as base64 of their
little-endian bytes together with shape and dtype, so round trips are exact.
"""

from __future__ import annotations

import base64
import json

import numpy as np

FORMAT_TAG = "sqikit-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def encode_array(a: np.ndarray, dtype: str = "<f4") -> dict:
    arr = np.ascontiguousarray(np.asarray(a).astype(dtype))
    return {
        "shape": list(arr.shape),
        "dtype": dtype,
        "data": base64.b64encode(arr.tobytes()).decode("ascii"),
    }


def decode_array(blob: dict) -> np.ndarray:
    dtype = np.dtype(blob["dtype"])
    if dtype.byteorder == ">":
        raise ModelFormatError("big-endian blobs are not supported")
    raw = base64.b64decode(blob["data"].encode("ascii"))
    arr = np.frombuffer(raw, dtype=dtype).copy()
    return arr.reshape(blob["shape"])


def dumps(kind: str, meta: dict, arrays: dict) -> str:
    doc = {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "kind": kind,
        "meta": meta,
        "arrays": arrays,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def loads(text: str, kind: str) -> tuple:
    """Parse a model document; returns ``(meta, arrays)`` with arrays still encoded."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not a model document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        raise ModelFormatError("missing or wrong format tag")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    if doc.get("kind") != kind:
        raise ModelFormatError(f"expected a {kind!r} model, found {doc.get('kind')!r}")
    return doc["meta"], doc["arrays"]
