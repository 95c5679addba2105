"""Checkpoint files: length-prefixed JSON header + named f64le parameter blobs.

Layout mirrors the signal container: bytes 0-7 little-endian u64 header
length, UTF-8 JSON header, then each parameter's float64 data concatenated in
the order listed under the header's "params" key (name + shape pairs). That
order is the model's parameter-definition order, so save -> load -> save is
byte-identical.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from ..fsutil import atomic_write_bytes
from .decaf import DecafConfig, DecafModel, EncoderOnlyConfig, EncoderOnlyModel
from .mtrf import MtrfModel

MAGIC = "DCKPT1"


def _named_params(model):
    if isinstance(model, MtrfModel):
        return [("weights", model.weights)]
    return [(name, p.data) for name, p in model.named_parameters()]


def _model_header(model) -> dict:
    if isinstance(model, MtrfModel):
        return {
            "kind": "mtrf",
            "config": {
                "n_lags": model.n_lags,
                "n_channels": model.n_channels,
                "ridge_lambda": model.ridge_lambda,
            },
            "seed": None,
        }
    return {
        "kind": model.kind,
        "config": model.config.to_dict(),
        "seed": model.config.seed,
    }


def save_checkpoint(model, path, epoch=None, metrics=None) -> None:
    header = _model_header(model)
    header["magic"] = MAGIC
    header["epoch"] = epoch
    header["metrics"] = metrics or {}
    params = _named_params(model)
    header["params"] = [[name, list(arr.shape)] for name, arr in params]
    hbytes = json.dumps(header, separators=(",", ":")).encode("utf-8")
    blob = bytearray(struct.pack("<Q", len(hbytes)) + hbytes)
    for _, arr in params:
        blob += np.ascontiguousarray(arr, dtype="<f8").tobytes()
    atomic_write_bytes(path, bytes(blob))


def load_checkpoint(path):
    """-> (model, header dict). The model is rebuilt from its config, then its
    parameters are overwritten with the stored values."""
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise DataFormatError(f"{path}: too short for a checkpoint")
    (hlen,) = struct.unpack("<Q", raw[:8])
    if len(raw) < 8 + hlen:
        raise DataFormatError(f"{path}: header truncated")
    try:
        header = json.loads(raw[8:8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"{path}: bad header JSON: {exc}") from None
    if header.get("magic") != MAGIC:
        raise DataFormatError(f"{path}: bad magic {header.get('magic')!r}")

    kind = header["kind"]
    offset = 8 + hlen
    arrays = {}
    for name, shape in header["params"]:
        n = int(np.prod(shape)) if shape else 1
        end = offset + n * 8
        if end > len(raw):
            raise DataFormatError(f"{path}: payload truncated at parameter {name!r}")
        arrays[name] = np.frombuffer(raw[offset:end], dtype="<f8").reshape(shape).copy()
        offset = end
    if offset != len(raw):
        raise DataFormatError(f"{path}: {len(raw) - offset} trailing bytes")

    if kind == "mtrf":
        cfg = header["config"]
        model = MtrfModel(weights=arrays["weights"], n_lags=cfg["n_lags"],
                          n_channels=cfg["n_channels"],
                          ridge_lambda=cfg["ridge_lambda"])
        return model, header
    if kind == "decaf":
        model = DecafModel(DecafConfig.from_dict(header["config"]))
    elif kind == "eeg_only":
        model = EncoderOnlyModel(EncoderOnlyConfig.from_dict(header["config"]))
    else:
        raise DataFormatError(f"{path}: unknown model kind {kind!r}")
    for name, p in model.named_parameters():
        if name not in arrays:
            raise DataFormatError(f"{path}: missing parameter {name!r}")
        if arrays[name].shape != p.data.shape:
            raise DataFormatError(
                f"{path}: parameter {name!r} has shape {arrays[name].shape}, "
                f"model expects {p.data.shape}"
            )
        p.data = arrays[name]
    return model, header
