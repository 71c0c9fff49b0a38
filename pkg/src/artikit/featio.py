"""Trajectory and manifest I/O.

Binary trajectory interchange format ("AFT1"):

    bytes 0-3    magic, ASCII "AFT1"
    bytes 4-7    u32 little-endian, frame count
    bytes 8-11   u32 little-endian, channel count
    bytes 12-15  f32 little-endian, frame rate in Hz
    then         frames * channels f32 little-endian, frame-major

Channel names never live in the binary; they travel in the manifest.
The manifest is UTF-8 JSON-lines, one sample record per line, with required
keys id, speaker, word, label, set_id, path, role. Unknown keys are ignored.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, TextIO

import numpy as np

from artikit.errors import DataError, ParseError

MAGIC = b"AFT1"
HEADER = struct.Struct("<4sIIf")

ROLES = ("articulatory", "feature")
_MANIFEST_KEYS = ("id", "speaker", "word", "label", "set_id", "path", "role")


@dataclass(frozen=True, eq=False)
class FeatureTrajectory:
    """A frames x channels matrix of real features at a fixed frame rate.

    ``data`` is kept as float32 if supplied as float32 (the on-disk element
    type), otherwise it is promoted to float64; either way it is copied,
    C-ordered and marked read-only. ``frame_rate_hz`` is rounded to float32
    precision at construction so a write/read cycle is exact.
    """

    data: np.ndarray
    frame_rate_hz: float
    channel_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        dtype = np.float32 if arr.dtype == np.float32 else np.float64
        arr = np.array(arr, dtype=dtype, order="C", copy=True)
        if arr.ndim != 2:
            raise DataError(f"trajectory data must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DataError(f"trajectory must have >=1 frame and >=1 channel, got {arr.shape}")
        if not np.isfinite(arr).all():
            i, j = np.argwhere(~np.isfinite(arr))[0]
            raise DataError(f"non-finite value at frame {i}, channel {j}")
        rate = float(np.float32(self.frame_rate_hz))
        if not math.isfinite(rate) or rate <= 0.0:
            raise DataError(f"frame_rate_hz must be a positive finite number, got {self.frame_rate_hz}")
        if self.channel_names is not None:
            names = tuple(self.channel_names)
            if len(names) != arr.shape[1]:
                raise DataError(
                    f"channel_names has {len(names)} entries for {arr.shape[1]} channels"
                )
            object.__setattr__(self, "channel_names", names)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "frame_rate_hz", rate)

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]


def write_trajectory(traj: FeatureTrajectory, dest: BinaryIO) -> None:
    """Serialize ``traj`` to ``dest`` in the AFT1 binary format.

    float64 data is cast to float32 on the way out; float32 data round-trips
    bit for bit.
    """
    payload = np.ascontiguousarray(traj.data, dtype="<f4")
    if not np.isfinite(payload).all():
        raise DataError("non-finite value after float32 conversion; refusing to write")
    dest.write(HEADER.pack(MAGIC, traj.frames, traj.channels, traj.frame_rate_hz))
    dest.write(payload.tobytes(order="C"))


def read_trajectory(source: BinaryIO) -> FeatureTrajectory:
    """Read and validate one AFT1 trajectory from ``source``.

    Never returns a partially-read matrix: corrupt headers fail before any
    payload is touched, and short payloads raise with the byte counts.
    """
    head = source.read(HEADER.size)
    if len(head) < 4 or head[:4] != MAGIC:
        raise DataError(f"bad magic {head[:4]!r}, expected {MAGIC!r}")
    if len(head) < HEADER.size:
        raise DataError(f"truncated header: got {len(head)} bytes, expected {HEADER.size}")
    _, frames, channels, rate = HEADER.unpack(head)
    if frames == 0 or channels == 0:
        raise DataError(f"zero dimension in header: {frames} frames x {channels} channels")
    if not math.isfinite(rate) or rate <= 0.0:
        raise DataError(f"bad frame rate in header: {rate}")
    expected = 4 * frames * channels
    payload = source.read(expected)
    if len(payload) != expected:
        raise DataError(
            f"truncated payload: got {len(payload)} bytes, expected {expected} "
            f"({frames}x{channels} float32)"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(frames, channels)
    if not np.isfinite(data).all():
        i, j = np.argwhere(~np.isfinite(data))[0]
        raise DataError(f"non-finite value at frame {i}, channel {j}")
    return FeatureTrajectory(data=data, frame_rate_hz=rate)


def write_trajectory_file(traj: FeatureTrajectory, path: str | Path) -> None:
    with open(path, "wb") as fh:
        write_trajectory(traj, fh)


def read_trajectory_file(path: str | Path) -> FeatureTrajectory:
    try:
        with open(path, "rb") as fh:
            return read_trajectory(fh)
    except OSError as exc:
        raise DataError(f"cannot read trajectory file {path}: {exc}") from exc


@dataclass(frozen=True)
class SampleRecord:
    id: str
    speaker: str
    word: str
    label: str
    set_id: str
    path: str
    role: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ParseError(f"record {self.id!r}: role must be one of {ROLES}, got {self.role!r}")


@dataclass
class Manifest:
    records: list[SampleRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def validate(self) -> None:
        """Check id uniqueness and that records in one set share a role."""
        seen: dict[str, int] = {}
        for i, rec in enumerate(self.records):
            if rec.id in seen:
                raise ParseError(f"duplicate id {rec.id!r} (records {seen[rec.id]} and {i})")
            seen[rec.id] = i
        roles: dict[str, str] = {}
        for rec in self.records:
            prev = roles.setdefault(rec.set_id, rec.role)
            if prev != rec.role:
                raise ParseError(
                    f"set {rec.set_id!r} mixes roles {prev!r} and {rec.role!r} (record {rec.id!r})"
                )


def load_manifest(source: TextIO | Iterable[str]) -> Manifest:
    """Parse a JSON-lines manifest. Blank lines are skipped.

    All errors name the 1-based line number.
    """
    records: list[SampleRecord] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise ParseError(f"line {lineno}: expected a JSON object, got {type(obj).__name__}")
        missing = [k for k in _MANIFEST_KEYS if k not in obj]
        if missing:
            raise ParseError(f"line {lineno}: missing required field(s) {', '.join(missing)}")
        values = {k: obj[k] for k in _MANIFEST_KEYS}
        for k, v in values.items():
            if not isinstance(v, str):
                raise ParseError(f"line {lineno}: field {k!r} must be a string")
        if values["id"] in seen:
            raise ParseError(
                f"line {lineno}: duplicate id {values['id']!r} (first seen on line {seen[values['id']]})"
            )
        seen[values["id"]] = lineno
        try:
            records.append(SampleRecord(**values))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    manifest = Manifest(records)
    manifest.validate()
    return manifest


def load_manifest_file(path: str | Path) -> Manifest:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_manifest(fh)
    except OSError as exc:
        raise ParseError(f"cannot read manifest {path}: {exc}") from exc


def load_trajectories(
    manifest: Manifest, base_dir: str | Path = "."
) -> dict[str, FeatureTrajectory]:
    """Load every record's trajectory, resolving relative paths against ``base_dir``.

    Raises DataError naming the sample id for any unreadable or invalid file.
    """
    base = Path(base_dir)
    out: dict[str, FeatureTrajectory] = {}
    for rec in manifest:
        p = Path(rec.path)
        if not p.is_absolute():
            p = base / p
        try:
            out[rec.id] = read_trajectory_file(p)
        except DataError as exc:
            raise DataError(f"sample {rec.id!r}: {exc}") from exc
    return out
