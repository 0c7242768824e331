"""Frame sources: image folders and recorded bag files, plus distance sidecars.

Distance ground truth is always an input (a sidecar CSV), never estimated.
Two sidecar layouts are accepted:

* positional -- header ``distance_m``, one row per frame in stream order;
  the stream is truncated to ``min(rows, frames)``;
* keyed -- header ``filename,distance_m``; frames without a row keep
  ``distance_m = None`` and are later skipped (with a warning count) by the
  runner.  Only image folders can use the keyed layout.
"""

from __future__ import annotations

import bz2
import csv
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import BagFormatError, FrameSourceError, SidecarError, TopicNotFoundError

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp")


@dataclass(frozen=True)
class FrameSample:
    """One camera frame paired with its ground-truth distance."""

    frame_id: str
    image_ref: str
    distance_m: float | None
    scenario_id: str
    timestamp: float | None = None


# --------------------------------------------------------------------------
# distance sidecars


@dataclass(frozen=True)
class DistanceSidecar:
    """Parsed sidecar: either an ordered list or a filename-keyed table."""

    positional: tuple[float, ...] | None
    keyed: dict[str, float] | None

    def for_index(self, index: int) -> float | None:
        if self.positional is None:
            raise SidecarError("bag sources need a positional sidecar (distance_m)")
        if index < len(self.positional):
            return self.positional[index]
        return None

    def for_name(self, name: str, index: int) -> float | None:
        if self.keyed is not None:
            return self.keyed.get(name)
        return self.for_index(index)

    def __len__(self) -> int:
        if self.positional is not None:
            return len(self.positional)
        assert self.keyed is not None
        return len(self.keyed)


def _parse_distance(raw: str, row: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise SidecarError(f"row {row}: distance_m is not a number: {raw!r}") from None
    if math.isnan(value) or math.isinf(value) or value < 0.0:
        raise SidecarError(f"row {row}: distance_m must be finite and >= 0, got {raw}")
    return value


def load_sidecar(path: str | Path) -> DistanceSidecar:
    """Read a distance sidecar CSV; errors name the offending row (1-based)."""
    p = Path(path)
    if not p.exists():
        raise SidecarError(f"{p}: sidecar file does not exist")
    with open(p, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SidecarError(f"{p}: empty sidecar, expected a header row") from None
        header = [h.strip() for h in header]
        if header == ["distance_m"]:
            values = []
            for row, fields in enumerate(reader, start=2):
                if not fields:
                    continue
                if len(fields) != 1:
                    raise SidecarError(f"row {row}: expected 1 column, got {len(fields)}")
                values.append(_parse_distance(fields[0], row))
            return DistanceSidecar(positional=tuple(values), keyed=None)
        if header == ["filename", "distance_m"]:
            table: dict[str, float] = {}
            for row, fields in enumerate(reader, start=2):
                if not fields:
                    continue
                if len(fields) != 2:
                    raise SidecarError(f"row {row}: expected 2 columns, got {len(fields)}")
                name = fields[0].strip()
                if not name:
                    raise SidecarError(f"row {row}: empty filename")
                if name in table:
                    raise SidecarError(f"row {row}: duplicate filename {name!r}")
                table[name] = _parse_distance(fields[1], row)
            return DistanceSidecar(positional=None, keyed=table)
        raise SidecarError(
            f"{p}: header must be 'distance_m' or 'filename,distance_m', "
            f"got {','.join(header)!r}"
        )


# --------------------------------------------------------------------------
# image folders


def iter_folder_frames(
    folder: str | Path, sidecar: DistanceSidecar, scenario_id: str
) -> Iterator[FrameSample]:
    """Frames from an image folder in filename order.

    With a positional sidecar the stream stops at ``min(rows, files)``;
    with a keyed sidecar unmatched files carry ``distance_m = None``.
    """
    root = Path(folder)
    if not root.is_dir():
        raise FrameSourceError(f"{root}: not a directory")
    files = sorted(
        p for p in root.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not files:
        raise FrameSourceError(f"{root}: no image files ({'/'.join(IMAGE_SUFFIXES)})")
    for index, p in enumerate(files):
        distance = sidecar.for_name(p.name, index)
        if sidecar.positional is not None and index >= len(sidecar.positional):
            return  # positional pairing truncates to the shorter side
        yield FrameSample(
            frame_id=p.name,
            image_ref=str(p),
            distance_m=distance,
            scenario_id=scenario_id,
        )


# --------------------------------------------------------------------------
# bag files (container format 2.0)
#
# The reader is deliberately minimal: it walks the record stream, collects
# connection records to map the requested topic to connection ids, and
# yields the raw payload of each message on that topic.  Chunks compressed
# with bz2 are transparently expanded; message contents are never decoded
# (detections come from the configured backends, not from pixel data here).

_BAG_MAGIC = b"#ROSBAG V2.0\n"

_OP_MESSAGE = 0x02
_OP_BAG_HEADER = 0x03
_OP_INDEX = 0x04
_OP_CHUNK = 0x05
_OP_CHUNK_INFO = 0x06
_OP_CONNECTION = 0x07


def _read_exact(data: bytes, offset: int, n: int, what: str) -> bytes:
    if offset + n > len(data):
        raise BagFormatError(f"truncated bag: unexpected end of data in {what}")
    return data[offset : offset + n]


def _parse_fields(header: bytes) -> dict[str, bytes]:
    fields: dict[str, bytes] = {}
    offset = 0
    while offset < len(header):
        (field_len,) = struct.unpack_from("<I", header, offset)
        offset += 4
        raw = _read_exact(header, offset, field_len, "header field")
        offset += field_len
        name, sep, value = raw.partition(b"=")
        if not sep:
            raise BagFormatError(f"malformed header field {raw[:40]!r}")
        fields[name.decode("ascii", "replace")] = value
    return fields


def _iter_records(data: bytes, offset: int = 0) -> Iterator[tuple[dict[str, bytes], bytes]]:
    while offset < len(data):
        if offset + 4 > len(data):
            raise BagFormatError("truncated bag: dangling record header length")
        (header_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        header = _read_exact(data, offset, header_len, "record header")
        offset += header_len
        if offset + 4 > len(data):
            raise BagFormatError("truncated bag: dangling record data length")
        (data_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        payload = _read_exact(data, offset, data_len, "record data")
        offset += data_len
        yield _parse_fields(header), payload


def _op_of(fields: dict[str, bytes]) -> int:
    op = fields.get("op")
    if op is None or len(op) != 1:
        raise BagFormatError("record without a valid 'op' field")
    return op[0]


def _decompress_chunk(fields: dict[str, bytes], payload: bytes) -> bytes:
    compression = fields.get("compression", b"none").decode("ascii", "replace")
    if compression == "none":
        return payload
    if compression == "bz2":
        return bz2.decompress(payload)
    raise BagFormatError(f"unsupported chunk compression {compression!r}")


def _message_time(fields: dict[str, bytes]) -> float | None:
    raw = fields.get("time")
    if raw is None or len(raw) != 8:
        return None
    secs, nsecs = struct.unpack("<II", raw)
    return secs + nsecs * 1e-9


@dataclass(frozen=True)
class BagMessage:
    topic: str
    timestamp: float | None
    payload: bytes


def read_bag_messages(path: str | Path, topic: str) -> list[BagMessage]:
    """All messages recorded on ``topic``, in file order.

    Raises :class:`TopicNotFoundError` (naming the known topics) when the
    bag has no connection for ``topic``.
    """
    p = Path(path)
    if not p.exists():
        raise FrameSourceError(f"{p}: bag file does not exist")
    blob = p.read_bytes()
    if not blob.startswith(_BAG_MAGIC):
        raise BagFormatError(f"{p}: missing bag magic, not a v2.0 bag")

    topics: dict[int, str] = {}
    messages: list[tuple[int, float | None, bytes]] = []

    def consume(fields: dict[str, bytes], payload: bytes) -> None:
        op = _op_of(fields)
        if op == _OP_CONNECTION:
            (conn,) = struct.unpack("<I", fields["conn"])
            topics[conn] = fields.get("topic", b"").decode("utf-8", "replace")
        elif op == _OP_MESSAGE:
            (conn,) = struct.unpack("<I", fields["conn"])
            messages.append((conn, _message_time(fields), payload))

    for fields, payload in _iter_records(blob, offset=len(_BAG_MAGIC)):
        op = _op_of(fields)
        if op == _OP_CHUNK:
            for inner_fields, inner_payload in _iter_records(
                _decompress_chunk(fields, payload)
            ):
                consume(inner_fields, inner_payload)
        elif op in (_OP_BAG_HEADER, _OP_INDEX, _OP_CHUNK_INFO):
            continue
        else:
            consume(fields, payload)

    if not topics:
        return []  # an empty bag yields an empty stream, not an error
    matching = {conn for conn, name in topics.items() if name == topic}
    if not matching:
        known = sorted(set(topics.values()))
        raise TopicNotFoundError(
            f"{p}: no connection for topic {topic!r} (topics: {', '.join(known)})"
        )
    return [
        BagMessage(topic=topic, timestamp=ts, payload=payload)
        for conn, ts, payload in messages
        if conn in matching
    ]


def iter_bag_frames(
    path: str | Path,
    topic: str,
    sidecar: DistanceSidecar,
    scenario_id: str,
) -> Iterator[FrameSample]:
    """Frames from a bag topic, positionally paired with sidecar distances.

    Yields ``min(len(sidecar), messages)`` samples (the pairing rule); bag
    sources require the positional sidecar layout.
    """
    if sidecar.positional is None:
        raise SidecarError("bag sources need a positional sidecar (distance_m)")
    p = Path(path)
    for index, message in enumerate(read_bag_messages(p, topic)):
        distance = sidecar.for_index(index)
        if distance is None:
            return
        yield FrameSample(
            frame_id=f"msg-{index:05d}",
            image_ref=f"{p.name}:{topic}[{index}]",
            distance_m=distance,
            scenario_id=scenario_id,
            timestamp=message.timestamp,
        )
