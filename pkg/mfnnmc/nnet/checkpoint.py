"""Portable network checkpoints.

FORMAT:
A JSON document with an architecture header and, per layer, the weight
shape plus base64-encoded little-endian float64 arrays in row-major order.
Decoding reproduces every parameter bit-exactly.
"""

from __future__ import annotations

import base64
from pathlib import Path

import numpy as np

from ..exceptions import InputError
from ..host.filesystem import read_json, write_json
from .network import Architecture, NetworkParams

CHECKPOINT_FORMAT = "mfnnmc-network"
CHECKPOINT_VERSION = 1


def _encode(array: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(array, dtype="<f8").tobytes()).decode("ascii")


def _decode(text: str, shape: tuple[int, ...]) -> np.ndarray:
    return np.frombuffer(base64.b64decode(text), dtype="<f8").reshape(shape).astype(np.float64)


def params_to_dict(params: NetworkParams) -> dict:
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "architecture": params.arch.to_dict(),
        "layers": [
            {"weight_shape": list(w.shape), "weight": _encode(w), "bias": _encode(b)}
            for w, b in zip(params.weights, params.biases)
        ],
    }


def params_from_dict(data: dict) -> NetworkParams:
    if data.get("format") != CHECKPOINT_FORMAT:
        raise InputError("Not a network checkpoint", {"format": data.get("format")})
    arch = Architecture.from_dict(data["architecture"])
    weights, biases = [], []
    for layer in data["layers"]:
        rows, cols = layer["weight_shape"]
        weights.append(_decode(layer["weight"], (rows, cols)))
        biases.append(_decode(layer["bias"], (rows,)))
    return NetworkParams(arch, tuple(weights), tuple(biases))


def save_checkpoint(params: NetworkParams, path: str | Path, extra: dict | None = None) -> Path:
    """Write ``params`` (and optional metadata under ``extra``) to ``path``."""
    payload = params_to_dict(params)
    if extra:
        payload["extra"] = extra
    return write_json(path, payload)


def load_checkpoint(path: str | Path) -> NetworkParams:
    return params_from_dict(read_json(path))


def load_checkpoint_extra(path: str | Path) -> dict:
    return read_json(path).get("extra", {})
