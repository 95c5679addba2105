"""Bit-exact container format for EEG/envelope signals ("ENV1").

File layout: bytes 0-7 are a little-endian u64 length H of the JSON header;
bytes 8..8+H are the UTF-8 JSON header; the rest is the payload as
little-endian float32, time-major. Header keys:

    {"magic": "ENV1", "kind": "eeg"|"envelope", "dtype": "f32le",
     "layout": "time_major", "shape": [T, C], "fs_hz": 64,
     "subject": str, "stimulus": str}

Payloads are stored as float32; in-memory arrays are float64. A round trip
is bit-exact whenever the in-memory values are float32-representable, which
the synthetic generator guarantees by quantizing its outputs once at
creation time.

A dataset is a split manifest (plain text) with one line per recording:

    subject,stimulus,eeg_path,env_path,split

Paths are relative to the manifest's directory. Real externally-recorded
data enters the pipeline by converting it to this same format.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from ..fsutil import atomic_write_bytes, atomic_write_text

MAGIC = "ENV1"
SPLITS = ("train", "valid", "test")


@dataclass
class Recording:
    """One subject/stimulus pair of time-aligned EEG and envelope at 64 Hz."""

    subject_id: str
    stimulus_id: str
    eeg: np.ndarray  # [T, C]
    envelope: np.ndarray  # [T]
    fs: int = 64

    def __post_init__(self):
        self.eeg = np.asarray(self.eeg, dtype=np.float64)
        self.envelope = np.asarray(self.envelope, dtype=np.float64).ravel()
        if self.eeg.ndim != 2:
            raise DataFormatError(f"eeg must be 2-d [T, C], got shape {self.eeg.shape}")
        if self.eeg.shape[0] != self.envelope.shape[0]:
            raise DataFormatError(
                f"eeg and envelope disagree on T: {self.eeg.shape[0]} vs "
                f"{self.envelope.shape[0]}"
            )
        if np.any(self.envelope < 0):
            raise DataFormatError("envelope values must be >= 0")

    @property
    def n_samples(self) -> int:
        return self.eeg.shape[0]

    @property
    def n_channels(self) -> int:
        return self.eeg.shape[1]


def encode_signal(array: np.ndarray, kind: str, subject: str, stimulus: str,
                  fs: int = 64) -> bytes:
    """Serialize one signal to ENV1 bytes."""
    arr = np.asarray(array, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    header = {
        "magic": MAGIC,
        "kind": kind,
        "dtype": "f32le",
        "layout": "time_major",
        "shape": [int(arr.shape[0]), int(arr.shape[1])],
        "fs_hz": int(fs),
        "subject": subject,
        "stimulus": stimulus,
    }
    hbytes = json.dumps(header, separators=(",", ":")).encode("utf-8")
    payload = np.ascontiguousarray(arr, dtype="<f4").tobytes()
    return struct.pack("<Q", len(hbytes)) + hbytes + payload


def decode_signal(blob: bytes):
    """Parse ENV1 bytes -> (float64 array [T, C], header dict)."""
    if len(blob) < 8:
        raise DataFormatError("file too short for header length field")
    (hlen,) = struct.unpack("<Q", blob[:8])
    if len(blob) < 8 + hlen:
        raise DataFormatError(f"header truncated: declared {hlen} bytes, "
                              f"file has {len(blob) - 8}")
    try:
        header = json.loads(blob[8:8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"header is not valid JSON: {exc}") from None
    if header.get("magic") != MAGIC:
        raise DataFormatError(f"bad magic {header.get('magic')!r}, expected {MAGIC!r}")
    for key in ("kind", "dtype", "layout", "shape", "fs_hz", "subject", "stimulus"):
        if key not in header:
            raise DataFormatError(f"header missing field {key!r}")
    if header["dtype"] != "f32le":
        raise DataFormatError(f"unsupported dtype {header['dtype']!r}")
    if header["layout"] != "time_major":
        raise DataFormatError(f"unsupported layout {header['layout']!r}")
    t, c = header["shape"]
    expected = t * c * 4
    payload = blob[8 + hlen:]
    if len(payload) != expected:
        raise DataFormatError(
            f"payload length mismatch for shape {header['shape']}: expected "
            f"{expected} bytes ({t * c} samples), got {len(payload)} "
            f"({len(payload) // 4} samples)"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(t, c).astype(np.float64)
    return arr, header


def write_signal(path, array, kind: str, subject: str, stimulus: str, fs: int = 64):
    atomic_write_bytes(path, encode_signal(array, kind, subject, stimulus, fs))


def read_signal(path):
    try:
        return decode_signal(Path(path).read_bytes())
    except DataFormatError as exc:
        raise DataFormatError(f"{path}: {exc}") from None


def write_recording(rec: Recording, eeg_path, env_path) -> None:
    write_signal(eeg_path, rec.eeg, "eeg", rec.subject_id, rec.stimulus_id, rec.fs)
    write_signal(env_path, rec.envelope, "envelope", rec.subject_id, rec.stimulus_id,
                 rec.fs)


def read_recording(eeg_path, env_path) -> Recording:
    eeg, eh = read_signal(eeg_path)
    env, nh = read_signal(env_path)
    if eh["kind"] != "eeg":
        raise DataFormatError(f"{eeg_path}: kind {eh['kind']!r}, expected 'eeg'")
    if nh["kind"] != "envelope":
        raise DataFormatError(f"{env_path}: kind {nh['kind']!r}, expected 'envelope'")
    if (eh["subject"], eh["stimulus"]) != (nh["subject"], nh["stimulus"]):
        raise DataFormatError(
            f"eeg/envelope pair mismatch: {eh['subject']}/{eh['stimulus']} vs "
            f"{nh['subject']}/{nh['stimulus']}"
        )
    return Recording(eh["subject"], eh["stimulus"], eeg, env[:, 0], fs=eh["fs_hz"])


@dataclass
class ManifestEntry:
    subject: str
    stimulus: str
    eeg_path: str
    env_path: str
    split: str


@dataclass
class DatasetSplit:
    """Recordings grouped by split; test stimuli never appear in train/valid."""

    train: list = field(default_factory=list)
    valid: list = field(default_factory=list)
    test: list = field(default_factory=list)

    def recordings(self, split: str):
        return getattr(self, split)

    def validate(self) -> None:
        seen = {}
        for split in SPLITS:
            for rec in self.recordings(split):
                key = (rec.subject_id, rec.stimulus_id)
                if key in seen and seen[key] != split:
                    raise DataFormatError(
        f"recording {key} appears in both {seen[key]} and {split}")
                seen[key] = split
        test_stims = {r.stimulus_id for r in self.test}
        fit_stims = {r.stimulus_id for r in self.train} | {
            r.stimulus_id for r in self.valid}
        overlap = test_stims & fit_stims
        if overlap:
            raise DataFormatError(
                f"test stimuli leak into train/valid: {sorted(overlap)}")


def write_manifest(path, entries) -> None:
    lines = [f"{e.subject},{e.stimulus},{e.eeg_path},{e.env_path},{e.split}"
             for e in entries]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path):
    entries = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise DataFormatError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        if parts[4] not in SPLITS:
            raise DataFormatError(f"{path}:{lineno}: unknown split {parts[4]!r}")
        entries.append(ManifestEntry(*parts))
    return entries


def load_dataset(manifest_path) -> DatasetSplit:
    """Read every recording named by the manifest; paths resolve relative to it."""
    root = Path(manifest_path).parent
    split = DatasetSplit()
    for e in read_manifest(manifest_path):
        rec = read_recording(root / e.eeg_path, root / e.env_path)
        split.recordings(e.split).append(rec)
    split.validate()
    return split
