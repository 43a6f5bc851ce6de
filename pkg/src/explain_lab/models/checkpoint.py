"""
Versioned binary model container:

    magic        8 bytes   b"XLABCKPT"
    version      u32 LE
    header_len   u32 LE    followed by a UTF-8 JSON header {kind, hyper, meta}
    n_arrays     u32 LE
    shape table  per array: u16 name length, name, u8 ndim, ndim x u32 dims
    payload      every array in table order, little-endian float64
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from explain_lab.errors import FormatError
from explain_lab.models.Cen import CenModel
from explain_lab.models.Classifier import Classifier
from explain_lab.models.LogisticRegression import LogisticRegression
from explain_lab.models.MlpClassifier import MlpClassifier
from explain_lab.models.Moe import MoeModel

MAGIC = b"XLABCKPT"
VERSION = 1

_KINDS: dict[str, type[Classifier]] = {
    cls.kind: cls for cls in (LogisticRegression, MlpClassifier, MoeModel, CenModel)
}


def save_checkpoint(model: Classifier, path: Path | str, meta: dict | None = None) -> None:
    header = json.dumps({"kind": model.kind, "hyper": model.hyper(), "meta": meta or {}}).encode("utf-8")
    params = model.params
    table = [struct.pack("<I", len(params))]
    for name, value in params.items():
        encoded = name.encode("utf-8")
        table.append(struct.pack(f"<H{len(encoded)}sB", len(encoded), encoded, value.ndim))
        table.append(struct.pack(f"<{value.ndim}I", *value.shape))
    payload = [np.ascontiguousarray(v, dtype="<f8").tobytes() for v in params.values()]
    Path(path).write_bytes(
        MAGIC + struct.pack("<II", VERSION, len(header)) + header + b"".join(table) + b"".join(payload)
    )


def load_checkpoint(path: Path | str) -> tuple[Classifier, dict]:
    """
    Returns
    -------
    `(model, meta)`

    Raise
    -----
    `FormatError` with the byte offset on any malformed or truncated content
    """

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    raw = path.read_bytes()
    offset = 0

    def take(fmt: str) -> tuple:
        nonlocal offset
        size = struct.calcsize(fmt)
        if offset + size > len(raw):
            raise FormatError("truncated checkpoint", path, offset)
        values = struct.unpack_from(fmt, raw, offset)
        offset += size
        return values

    if raw[:8] != MAGIC:
        raise FormatError("not a checkpoint (bad magic)", path, 0)
    offset = 8
    version, header_len = take("<II")
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", path, 8)
    (header_raw,) = take(f"<{header_len}s")
    try:
        header = json.loads(header_raw.decode("utf-8"))
    except ValueError as e:
        raise FormatError(f"unreadable header: {e}", path, 16) from e
    cls = _KINDS.get(header.get("kind"))
    if cls is None:
        raise FormatError(f"unknown model kind {header.get('kind')!r}", path, 16)

    (count,) = take("<I")
    shapes: list[tuple[str, tuple[int, ...]]] = []
    for _ in range(count):
        (name_len,) = take("<H")
        (name,) = take(f"<{name_len}s")
        (ndim,) = take("<B")
        shapes.append((name.decode("utf-8"), take(f"<{ndim}I")))
    params = {}
    for name, shape in shapes:
        size = int(np.prod(shape)) * 8
        if offset + size > len(raw):
            raise FormatError(f"truncated payload for {name}", path, offset)
        params[name] = np.frombuffer(raw, dtype="<f8", count=size // 8, offset=offset).reshape(shape).astype(np.float64)
        offset += size
    if offset != len(raw):
        raise FormatError("trailing bytes after payload", path, offset)
    return cls(params, **header.get("hyper", {})), header.get("meta", {})
