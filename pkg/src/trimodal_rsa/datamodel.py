"""On-disk matrix format, manifest documents and their in-memory records.

Matrix file layout (all little-endian)::

    bytes 0-3    magic b"RSAM"
    bytes 4-7    version, u32 (= 1)
    bytes 8-15   rows, u64
    bytes 16-23  cols, u64
    bytes 24-    rows*cols float32 values, row-major

Matrices are plain ``numpy.ndarray`` objects. ``load_matrix`` returns float32
so that ``write_matrix`` followed by ``load_matrix`` is bit-exact; numerical
code upcasts to float64 on entry.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadMagic, InconsistentLayers, MissingFile, NonFiniteValue, ParseError, ShapeMismatch

MAGIC = b"RSAM"
VERSION = 1
HEADER = struct.Struct("<4sIQQ")
N_PROSODY = 13
N_AFFECT = 3


def write_matrix(path, m) -> None:
    m = np.asarray(m, dtype="<f4")
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        bad = int(np.flatnonzero(~np.isfinite(m.ravel()))[0])
        raise NonFiniteValue(f"non-finite value at element {bad}")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, m.shape[0], m.shape[1]))
        fh.write(np.ascontiguousarray(m).tobytes())


def load_matrix(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER.size:
        raise ShapeMismatch(f"{path}: truncated header ({len(raw)} bytes, offset {len(raw)})")
    magic, version, rows, cols = HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise BadMagic(f"{path}: bad magic {magic!r} at offset 0")
    if version != VERSION:
        raise BadMagic(f"{path}: unsupported version {version} at offset 4")
    if rows < 1 or cols < 1:
        raise ShapeMismatch(f"{path}: declared shape {rows}x{cols} at offset 8")
    expected = rows * cols * 4
    body = len(raw) - HEADER.size
    if body != expected:
        raise ShapeMismatch(
            f"{path}: header declares {rows}x{cols} ({expected} bytes) but payload has "
            f"{body} bytes (mismatch at offset {HEADER.size + min(body, expected)})"
        )
    m = np.frombuffer(raw, dtype="<f4", offset=HEADER.size).reshape(rows, cols)
    finite = np.isfinite(m)
    if not finite.all():
        bad = int(np.flatnonzero(~finite.ravel())[0])
        raise NonFiniteValue(f"{path}: non-finite value at element {bad} (byte offset {HEADER.size + 4 * bad})")
    m = m.copy()
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class SentenceRecord:
    id: str
    duration_ms: float
    eeg_path: Path
    channels: tuple[str, ...]
    layers: tuple[Path, ...]
    acoustic_path: Path | None = None
    prosody_row: tuple[float, ...] | None = None
    affect_features: tuple[float, ...] | None = None

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def referenced_paths(self) -> list[Path]:
        paths = [self.eeg_path, *self.layers]
        if self.acoustic_path is not None:
            paths.append(self.acoustic_path)
        return paths

    def missing_paths(self) -> list[Path]:
        return [p for p in self.referenced_paths() if not p.is_file()]


@dataclass(frozen=True)
class Manifest:
    dataset_id: str
    sentences: tuple[SentenceRecord, ...]
    subject_id: str | None = None
    source: Path | None = field(default=None, compare=False)

    @property
    def n_layers(self) -> int:
        return self.sentences[0].n_layers if self.sentences else 0

    def ids(self) -> list[str]:
        return [s.id for s in self.sentences]


def _real_tuple(value, n, where):
    if not isinstance(value, list) or len(value) != n:
        raise ParseError(f"{where}: expected a list of {n} numbers")
    try:
        out = tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from None
    if not all(math.isfinite(v) for v in out):
        raise ParseError(f"{where}: non-finite value")
    return out


def _parse_layers(raw, where, base):
    if isinstance(raw, list):
        items = list(enumerate(raw))
    elif isinstance(raw, dict):
        try:
            items = sorted((int(k), v) for k, v in raw.items())
        except ValueError:
            raise ParseError(f"{where}.layers: keys must be integer layer indices") from None
    else:
        raise ParseError(f"{where}.layers: expected a list or an index->path mapping")
    if not items:
        raise ParseError(f"{where}.layers: at least one layer is required")
    if [k for k, _ in items] != list(range(len(items))):
        raise ParseError(f"{where}.layers: layer indices must be contiguous from 0")
    return tuple(base / str(p) for _, p in items)


def _parse_sentence(raw, pos, base) -> SentenceRecord:
    where = f"sentences[{pos}]"
    if not isinstance(raw, dict):
        raise ParseError(f"{where}: expected an object")
    try:
        sid = str(raw["id"])
        duration = float(raw["duration_ms"])
        eeg = raw["eeg"]
        layers_raw = raw["layers"]
    except KeyError as exc:
        raise ParseError(f"{where}: missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from None
    if not (duration > 0 and math.isfinite(duration)):
        raise ParseError(f"{where}.duration_ms must be positive, got {duration}")
    if isinstance(eeg, str):
        eeg_path, channels = eeg, ()
    elif isinstance(eeg, dict) and "path" in eeg:
        eeg_path, channels = eeg["path"], tuple(str(c) for c in eeg.get("channels", ()))
    else:
        raise ParseError(f"{where}.eeg: expected a path or {{path, channels}}")
    acoustic = raw.get("acoustic")
    prosody = raw.get("prosody")
    affect = raw.get("affect")
    return SentenceRecord(
        id=sid,
        duration_ms=duration,
        eeg_path=base / str(eeg_path),
        channels=channels,
        layers=_parse_layers(layers_raw, where, base),
        acoustic_path=None if acoustic is None else base / str(acoustic),
        prosody_row=None if prosody is None else _real_tuple(prosody, N_PROSODY, f"{where}.prosody"),
        affect_features=None if affect is None else _real_tuple(affect, N_AFFECT, f"{where}.affect"),
    )


def parse_manifest(doc: dict, base: Path = Path("."), source: Path | None = None) -> Manifest:
    if not isinstance(doc, dict):
        raise ParseError("manifest root must be an object")
    sentences_raw = doc.get("sentences")
    if not isinstance(sentences_raw, list) or not sentences_raw:
        raise ParseError("manifest.sentences must be a non-empty list")
    sentences = [_parse_sentence(s, i, base) for i, s in enumerate(sentences_raw)]
    seen: dict[str, int] = {}
    for i, s in enumerate(sentences):
        if s.id in seen:
            raise ParseError(f"duplicate sentence id {s.id!r} at sentences[{seen[s.id]}] and sentences[{i}]")
        seen[s.id] = i
    counts = {s.n_layers for s in sentences}
    if len(counts) > 1:
        detail = ", ".join(f"{s.id}={s.n_layers}" for s in sentences)
        raise InconsistentLayers(f"sentences disagree on layer count: {detail}")
    subject = doc.get("subject_id")
    return Manifest(
        dataset_id=str(doc.get("dataset_id", "")),
        sentences=tuple(sentences),
        subject_id=None if subject is None else str(subject),
        source=source,
    )


def load_manifest(path, check_files: bool = True) -> Manifest:
    """Read and validate a JSON manifest; paths resolve against its directory.

    With ``check_files=False`` missing referenced files are tolerated so that
    the pipeline can skip the affected sentences individually.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"manifest not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    manifest = parse_manifest(doc, base=path.parent, source=path)
    if check_files:
        missing = [(s.id, p) for s in manifest.sentences for p in s.missing_paths()]
        if missing:
            listing = "; ".join(f"{sid}: {p}" for sid, p in missing)
            raise MissingFile(f"{path}: referenced files not found: {listing}")
    return manifest


def manifest_to_dict(manifest: Manifest, relative_to: Path | None = None) -> dict:
    def rel(p: Path) -> str:
        if relative_to is None:
            return str(p)
        try:
            return str(p.relative_to(relative_to))
        except ValueError:
            return str(p)

    out = {"dataset_id": manifest.dataset_id, "sentences": []}
    if manifest.subject_id is not None:
        out["subject_id"] = manifest.subject_id
    for s in manifest.sentences:
        rec = {
            "id": s.id,
            "duration_ms": s.duration_ms,
            "eeg": {"path": rel(s.eeg_path), "channels": list(s.channels)},
            "layers": [rel(p) for p in s.layers],
        }
        if s.acoustic_path is not None:
            rec["acoustic"] = rel(s.acoustic_path)
        if s.prosody_row is not None:
            rec["prosody"] = list(s.prosody_row)
        if s.affect_features is not None:
            rec["affect"] = list(s.affect_features)
        out["sentences"].append(rec)
    return out
