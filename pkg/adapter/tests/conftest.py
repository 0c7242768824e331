"""Shared builders: minimal bag files, image folders, sidecars, configs."""

from __future__ import annotations

import bz2
import json
import struct
from pathlib import Path

import pytest

_MAGIC = b"#ROSBAG V2.0\n"

_OP_MESSAGE = 0x02
_OP_BAG_HEADER = 0x03
_OP_CHUNK = 0x05
_OP_CONNECTION = 0x07


def _field(name: str, value: bytes) -> bytes:
    raw = name.encode("ascii") + b"=" + value
    return struct.pack("<I", len(raw)) + raw


def record_bytes(fields: dict[str, bytes], data: bytes = b"") -> bytes:
    header = b"".join(_field(n, v) for n, v in fields.items())
    return (
        struct.pack("<I", len(header))
        + header
        + struct.pack("<I", len(data))
        + data
    )


def connection_record(conn: int, topic: str) -> bytes:
    inner = _field("topic", topic.encode()) + _field(
        "type", b"sensor_msgs/Image"
    )
    return record_bytes(
        {
            "op": bytes([_OP_CONNECTION]),
            "conn": struct.pack("<I", conn),
            "topic": topic.encode(),
        },
        inner,
    )


def message_record(
    conn: int, payload: bytes, time: tuple[int, int] | None = (10, 500)
) -> bytes:
    fields = {"op": bytes([_OP_MESSAGE]), "conn": struct.pack("<I", conn)}
    if time is not None:
        fields["time"] = struct.pack("<II", *time)
    return record_bytes(fields, payload)


def bag_header_record() -> bytes:
    return record_bytes(
        {
            "op": bytes([_OP_BAG_HEADER]),
            "index_pos": struct.pack("<Q", 0),
            "conn_count": struct.pack("<I", 0),
            "chunk_count": struct.pack("<I", 0),
        }
    )


def build_bag(
    path: Path,
    topics: dict[int, str],
    messages: list[tuple[int, bytes]],
    *,
    compression: str = "none",
    chunked: bool = True,
) -> Path:
    """Assemble a container-format-2.0 bag with the given connections/messages."""
    inner = b"".join(connection_record(c, t) for c, t in topics.items())
    inner += b"".join(
        message_record(conn, payload, time=(100 + i, 0))
        for i, (conn, payload) in enumerate(messages)
    )
    blob = _MAGIC + bag_header_record()
    if chunked:
        data = inner
        if compression == "bz2":
            data = bz2.compress(inner)
        blob += record_bytes(
            {
                "op": bytes([_OP_CHUNK]),
                "compression": compression.encode(),
                "size": struct.pack("<I", len(inner)),
            },
            data,
        )
    else:
        blob += inner
    path.write_bytes(blob)
    return path


@pytest.fixture
def make_bag(tmp_path):
    def _make(name="drive.bag", topics=None, messages=None, **kwargs) -> Path:
        return build_bag(
            tmp_path / name,
            topics if topics is not None else {},
            messages if messages is not None else [],
            **kwargs,
        )

    return _make


@pytest.fixture
def make_images(tmp_path):
    """Create a folder of empty image files; returns the folder path."""

    def _make(names: list[str], folder="frames") -> Path:
        root = tmp_path / folder
        root.mkdir(exist_ok=True)
        for name in names:
            (root / name).write_bytes(b"\x89PNG\r\n")
        return root

    return _make


@pytest.fixture
def make_sidecar(tmp_path):
    def _make(rows, name="distances.csv", keyed=False) -> Path:
        p = tmp_path / name
        if keyed:
            lines = ["filename,distance_m"] + [f"{n},{d}" for n, d in rows]
        else:
            lines = ["distance_m"] + [str(d) for d in rows]
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return p

    return _make


@pytest.fixture
def make_detectors(tmp_path):
    """Write a detector config plus one stub table per model.

    ``tables`` maps model name -> {frame_id: [(label, confidence), ...]}.
    """

    def _make(tables: dict[str, dict], target_label=None, name="detectors.json") -> Path:
        cfg_dir = tmp_path / "cfg"
        cfg_dir.mkdir(exist_ok=True)
        models = []
        for model, table in tables.items():
            weights = cfg_dir / f"{model}.json"
            weights.write_text(
                json.dumps(
                    {
                        frame_id: [
                            {"label": label, "confidence": conf}
                            for label, conf in boxes
                        ]
                        for frame_id, boxes in table.items()
                    }
                ),
                encoding="utf-8",
            )
            models.append({"name": model, "backend": "stub", "weights": weights.name})
        doc: dict = {"schema": "detectors", "version": 1, "models": models}
        if target_label is not None:
            doc["target_label"] = target_label
        cfg = cfg_dir / name
        cfg.write_text(json.dumps(doc), encoding="utf-8")
        return cfg

    return _make
