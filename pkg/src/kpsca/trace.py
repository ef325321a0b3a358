"""Trace geometry, secret-key handling, cycle compression and trace file I/O.

A raw trace covers the main loop of a scalar multiplication: ``l`` slots
(one per processed key bit), each of ``D`` clock cycles, each of ``S``
samples, stored slot-major as float64. Compression replaces every clock
cycle by the sum of squares of its samples.

Binary formats
--------------
``KPT1`` (raw): 4-byte ASCII magic ``KPT1``; uint32 little-endian ``l``,
``D``, ``S``; uint32 metadata byte length ``M``; ``M`` bytes of UTF-8 JSON
metadata; ``l*D*S`` float64 little-endian samples, slot-major.

``KPC1`` (compressed): same layout with the ``S`` field fixed to 0 and
``l*D`` float64 values.

Metadata is a JSON object; recognised keys are ``key_hex``, ``key_bits``
and ``description``.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from ._backend import sum_squares_rows

RAW_MAGIC = b"KPT1"
COMPRESSED_MAGIC = b"KPC1"
_HEADER = struct.Struct("<4sIIII")


class TraceFormatError(Exception):
    """Base class for trace file format violations."""


class BadMagicError(TraceFormatError):
    pass


class TruncatedFileError(TraceFormatError):
    pass


class GeometryError(TraceFormatError):
    """Geometry fields inconsistent with the payload or invalid."""


class NonFiniteSampleError(TraceFormatError):
    pass


@dataclass(frozen=True)
class TraceGeometry:
    """Slot/cycle/sample counts of one trace: ``l`` slots of ``D`` cycles
    of ``S`` samples."""

    l: int
    D: int
    S: int

    def __post_init__(self):
        if self.l < 2 or self.D < 1 or self.S < 1:
            raise GeometryError(
                f"invalid geometry l={self.l}, D={self.D}, S={self.S} "
                "(need l >= 2, D >= 1, S >= 1)"
            )

    @property
    def n_samples(self) -> int:
        return self.l * self.D * self.S


@dataclass(frozen=True, eq=False)
class RawTrace:
    """One measured (or simulated) trace plus its slot/cycle/sample geometry."""

    geometry: TraceGeometry
    samples: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size != self.geometry.n_samples:
            raise GeometryError(
                f"expected {self.geometry.n_samples} samples, got {samples.size}"
            )
        if not np.all(np.isfinite(samples)):
            raise NonFiniteSampleError("trace contains non-finite samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def cube(self) -> np.ndarray:
        """Samples as an (l, D, S) view."""
        g = self.geometry
        return self.samples.reshape(g.l, g.D, g.S)


@dataclass(frozen=True, eq=False)
class CompressedTrace:
    """Per-clock-cycle sums of squares, slot-major; geometry (l, D)."""

    l: int
    D: int
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size != self.l * self.D:
            raise GeometryError(
                f"expected {self.l * self.D} values, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteSampleError("compressed trace contains non-finite values")
        if np.any(values < 0):
            raise ValueError("compressed values must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def grid(self) -> np.ndarray:
        """Values as an (l, D) view."""
        return self.values.reshape(self.l, self.D)


def compress(trace: RawTrace) -> CompressedTrace:
    """Collapse every clock cycle to the sum of squares of its samples."""
    g = trace.geometry
    values = sum_squares_rows(trace.samples.reshape(g.l * g.D, g.S))
    return CompressedTrace(g.l, g.D, values, dict(trace.metadata))


@dataclass(frozen=True, eq=False)
class SecretKey:
    """A scalar as an MSB-first bit vector plus the analyzed bit window.

    ``analyzed_window = (start, length)`` selects ``bits[start:start+length]``
    (indices counted from the most significant bit). Slot ``t`` of a trace
    corresponds to ``analyzed_bits[t]``: slots follow processing order, most
    significant analyzed bit first.
    """

    bits: np.ndarray
    analyzed_window: tuple[int, int]

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size == 0 or np.any(bits > 1):
            raise ValueError("key bits must be a 1-D array of 0/1 values")
        start, length = self.analyzed_window
        if start < 0 or length < 1 or start + length > bits.size:
            raise ValueError(
                f"analyzed window {self.analyzed_window} outside a "
                f"{bits.size}-bit key"
            )
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def bit_length(self) -> int:
        return int(self.bits.size)

    @property
    def analyzed_bits(self) -> np.ndarray:
        start, length = self.analyzed_window
        return self.bits[start : start + length]

    def to_hex(self) -> str:
        value = 0
        for b in self.bits:
            value = (value << 1) | int(b)
        return format(value, f"0{(self.bit_length + 3) // 4}x")


def parse_key_hex(hex_str: str, bit_length: int, window: tuple[int, int]) -> SecretKey:
    """Decode a hex scalar, keeping its ``bit_length`` least significant bits.

    The result is MSB-first; ``window`` selects the analyzed bits.
    """
    text = hex_str.strip().lower().removeprefix("0x")
    if not text or any(ch not in "0123456789abcdef" for ch in text):
        raise ValueError(f"not a hex string: {hex_str!r}")
    if 4 * len(text) < bit_length:
        raise ValueError(
            f"bit_length {bit_length} exceeds the {4 * len(text)} bits "
            f"decoded from {hex_str!r}"
        )
    value = int(text, 16)
    bits = np.array(
        [(value >> (bit_length - 1 - i)) & 1 for i in range(bit_length)],
        dtype=np.uint8,
    )
    return SecretKey(bits, window)


def _pack(magic: bytes, l: int, d: int, s: int, payload: np.ndarray, metadata: dict) -> bytes:
    meta = json.dumps(metadata, sort_keys=True, separators=(",", ":")).encode()
    header = _HEADER.pack(magic, l, d, s, len(meta))
    body = np.ascontiguousarray(payload, dtype="<f8").tobytes()
    return header + meta + body


def write_trace(trace: RawTrace, destination=None) -> bytes:
    """Serialize to KPT1. If ``destination`` is a path or file, also write it."""
    g = trace.geometry
    blob = _pack(RAW_MAGIC, g.l, g.D, g.S, trace.samples, trace.metadata)
    _emit(blob, destination)
    return blob


def write_compressed(ctrace: CompressedTrace, destination=None) -> bytes:
    """Serialize to KPC1 (S field fixed to 0)."""
    blob = _pack(COMPRESSED_MAGIC, ctrace.l, ctrace.D, 0, ctrace.values, ctrace.metadata)
    _emit(blob, destination)
    return blob


def _emit(blob: bytes, destination):
    if destination is None:
        return
    if hasattr(destination, "write"):
        destination.write(blob)
    else:
        with open(destination, "wb") as fh:
            fh.write(blob)


def _slurp(source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if hasattr(source, "read"):
        return source.read()
    with open(source, "rb") as fh:
        return fh.read()


def _parse_header(blob: bytes):
    if len(blob) < _HEADER.size:
        raise TruncatedFileError(f"file too short for header ({len(blob)} bytes)")
    magic, l, d, s, mlen = _HEADER.unpack_from(blob)
    if magic not in (RAW_MAGIC, COMPRESSED_MAGIC):
        raise BadMagicError(f"bad magic {magic!r}")
    offset = _HEADER.size
    if len(blob) < offset + mlen:
        raise TruncatedFileError("file truncated inside metadata")
    try:
        metadata = json.loads(blob[offset : offset + mlen].decode()) if mlen else {}
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TraceFormatError(f"metadata is not valid JSON: {exc}") from None
    if not isinstance(metadata, dict):
        raise TraceFormatError("metadata must be a JSON object")
    return magic, l, d, s, metadata, offset + mlen


def _payload(blob: bytes, offset: int, count: int) -> np.ndarray:
    need = offset + 8 * count
    if len(blob) < need:
        raise TruncatedFileError(
            f"payload truncated: need {need} bytes, file has {len(blob)}"
        )
    if len(blob) > need:
        raise GeometryError(
            f"payload longer than the geometry implies ({len(blob) - need} extra bytes)"
        )
    return np.frombuffer(blob[offset:], dtype="<f8").astype(np.float64)


def sniff_format(source) -> str:
    """Return 'raw' or 'compressed' from the magic of a trace file."""
    blob = _slurp(source)
    magic = _parse_header(blob)[0]
    return "raw" if magic == RAW_MAGIC else "compressed"


def read_trace(source) -> RawTrace:
    """Parse a KPT1 file (path, file object, or bytes)."""
    blob = _slurp(source)
    magic, l, d, s, metadata, offset = _parse_header(blob)
    if magic != RAW_MAGIC:
        raise BadMagicError("expected a raw KPT1 trace, found KPC1")
    try:
        geometry = TraceGeometry(l, d, s)
    except GeometryError:
        raise
    samples = _payload(blob, offset, geometry.n_samples)
    if not np.all(np.isfinite(samples)):
        raise NonFiniteSampleError("trace file contains non-finite samples")
    return RawTrace(geometry, samples, metadata)


def read_compressed(source) -> CompressedTrace:
    """Parse a KPC1 file (path, file object, or bytes)."""
    blob = _slurp(source)
    magic, l, d, s, metadata, offset = _parse_header(blob)
    if magic != COMPRESSED_MAGIC:
        raise BadMagicError("expected a compressed KPC1 trace, found KPT1")
    if s != 0:
        raise GeometryError(f"KPC1 requires S == 0, found {s}")
    if l < 2 or d < 1:
        raise GeometryError(f"invalid compressed geometry l={l}, D={d}")
    values = _payload(blob, offset, l * d)
    if not np.all(np.isfinite(values)):
        raise NonFiniteSampleError("compressed file contains non-finite values")
    return CompressedTrace(l, d, values, metadata)


def truth_from_metadata(metadata: dict, l: int) -> SecretKey | None:
    """Reconstruct the known key from trace metadata, if present.

    The analyzed window is taken as the trailing ``l`` bits of the scalar.
    """
    key_hex = metadata.get("key_hex")
    if not key_hex:
        return None
    bit_length = int(metadata.get("key_bits") or 4 * len(str(key_hex).removeprefix("0x")))
    if bit_length < l:
        raise ValueError(f"metadata key has {bit_length} bits, trace needs {l}")
    return parse_key_hex(str(key_hex), bit_length, (bit_length - l, l))
