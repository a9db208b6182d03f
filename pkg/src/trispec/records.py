"""JSON records: interval codec, run manifests, file hashing.

All rigorous numbers are serialized as outward-rounded decimal endpoint
strings (never bare floats), so a record round-trips to an interval that
contains the original.  Floats that are exact inputs (candidate eigenvalues,
coefficients) additionally carry their hex form for bit-exact reload.
"""

from __future__ import annotations

import hashlib
import json
import os
import time

from .interval import Interval

__all__ = [
    "RunManifest",
    "content_hash",
    "decode_interval",
    "encode_interval",
    "read_record",
    "write_record",
]

_DIGITS = 85  # outward decimal digits; beyond 256-bit precision


def encode_interval(x: Interval, digits: int = _DIGITS) -> dict:
    lo, hi = x.to_decimal_outward(digits)
    return {"lo": lo, "hi": hi, "digits": digits}


def decode_interval(obj) -> Interval:
    if isinstance(obj, dict):
        return Interval(obj["lo"], obj["hi"])
    raise TypeError(f"not an interval record: {obj!r}")


def encode_float(x: float) -> dict:
    return {"dec": repr(float(x)), "hex": float(x).hex()}


def decode_float(obj) -> float:
    if isinstance(obj, dict):
        return float.fromhex(obj["hex"])
    return float(obj)


def content_hash(payload: dict) -> str:
    """Stable hash of a JSON-serializable payload (excludes volatile keys)."""
    blob = json.dumps(
        {k: v for k, v in payload.items() if k not in ("content_hash", "timing")},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode()).hexdigest()


def write_record(path, payload: dict) -> str:
    """Write payload with embedded content hash; returns the hash."""
    h = content_hash(payload)
    payload = dict(payload)
    payload["content_hash"] = h
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)
    return h


class RecordIntegrityError(ValueError):
    pass


def read_record(path, verify: bool = True) -> dict:
    with open(path) as f:
        payload = json.load(f)
    if verify:
        stored = payload.get("content_hash")
        if stored is None or stored != content_hash(payload):
            raise RecordIntegrityError(f"content hash mismatch in {path}")
    return payload


class RunManifest:
    """Provenance stamp carried by every output file of a CLI run."""

    def __init__(self, command: str, config_path, seed: int, precision_bits: int, out_dir):
        self.command = command
        self.config_path = str(config_path) if config_path else None
        self.seed = int(seed)
        self.precision_bits = int(precision_bits)
        self.out_dir = str(out_dir)
        self.started = time.time()

    def payload(self) -> dict:
        return {
            "command": self.command,
            "config_path": self.config_path,
            "seed": self.seed,
            "precision_bits": self.precision_bits,
        }

    @property
    def hash(self) -> str:
        return content_hash(self.payload())

    def write(self, path) -> str:
        p = self.payload()
        p["timing"] = {"started": self.started, "elapsed": time.time() - self.started}
        return write_record(path, p)
