"""Shard files and the text manifest.

Shard layout (all integers little-endian)::

    b"MSRA" | version u16 | node ordinal u16 | payload | crc32(payload) u32

The payload holds the node's alpha symbols for stripe 0, then stripe 1, and
so on; each symbol takes w/8 bytes.  The manifest is ``key: value`` text,
one entry per line, carrying every coefficient explicitly so decoding never
depends on how the coefficients were originally chosen.
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import ReadCounter, encode, extract_helpers, reconstruct, repair_systematic
from .construction import CodeDescription, ConstructionError, check_description, verify_mds
from .galois import FieldSpec
from .params import CodeParams, NodeId, as_node, validate

MAGIC = b"MSRA"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sHH")
TRAILER = struct.Struct("<I")
MANIFEST_NAME = "manifest.txt"


class ShardError(Exception):
    pass


class ShardFormatError(ShardError):
    pass


class ShardLengthError(ShardFormatError):
    pass


class ShardCorruptionError(ShardError):
    def __init__(self, name, expected, actual):
        self.name = name
        super().__init__(f"shard {name}: CRC32 mismatch (expected {expected:#010x}, got {actual:#010x})")


class ManifestError(ShardError):
    pass


class UnverifiedDescriptionError(ShardError):
    pass


@dataclass(frozen=True)
class Manifest:
    desc: CodeDescription
    file_length: int | None = None
    stripe_count: int | None = None
    padding: int | None = None
    shard_crcs: tuple[int, ...] | None = None

    @property
    def params(self) -> CodeParams:
        return self.desc.params


def shard_name(ordinal: int) -> str:
    return f"shard_{ordinal:03d}.msra"


def _hex(v: int, width: int) -> str:
    return f"0x{v:0{width // 4}x}"


def serialize_manifest(man: Manifest) -> str:
    d = man.desc
    p = d.params
    w = p.field.width
    lines = [
        ("format", "msra-manifest"),
        ("version", str(FORMAT_VERSION)),
        ("field_bits", str(w)),
        ("polynomial", f"{p.field.polynomial:#x}"),
        ("m", str(p.m)),
        ("r", str(p.r)),
        ("seed", str(d.seed)),
    ]
    for x, row in enumerate(d.a):
        lines.append((f"a.{x}", " ".join(_hex(v, w) for v in row)))
    if d.c is not None:
        lines.append(("c", _hex(d.c, w)))
    if man.file_length is not None:
        lines += [
            ("file_length", str(man.file_length)),
            ("stripe_count", str(man.stripe_count)),
            ("padding", str(man.padding)),
        ]
    for u, crc in enumerate(man.shard_crcs or ()):
        lines.append((f"crc.{u}", f"{crc:#010x}"))
    return "".join(f"{k}: {v}\n" for k, v in lines)


def parse_manifest(text: str) -> Manifest:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or not key or key != key.lower() or not key.isascii():
            raise ManifestError(f"line {lineno}: expected lowercase 'key: value', got {line!r}")
        if key in entries:
            raise ManifestError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    try:
        if entries.get("format") != "msra-manifest":
            raise ManifestError("not an msra manifest")
        if int(entries["version"]) != FORMAT_VERSION:
            raise ManifestError(f"unsupported manifest version {entries['version']}")
        field = FieldSpec(int(entries["field_bits"]), int(entries["polynomial"], 16))
        params = validate(int(entries["m"]), int(entries["r"]), field)
        a = tuple(
            tuple(int(tok, 16) for tok in entries[f"a.{x}"].split()) for x in range(params.r)
        )
        c = int(entries["c"], 16) if "c" in entries else None
        desc = CodeDescription(params, a, c, int(entries["seed"]))
        check_description(desc)
        man = Manifest(desc)
        if "file_length" in entries:
            crcs = None
            if "crc.0" in entries:
                crcs = tuple(int(entries[f"crc.{u}"], 16) for u in range(params.n))
            man = Manifest(
                desc,
                int(entries["file_length"]),
                int(entries["stripe_count"]),
                int(entries["padding"]),
                crcs,
            )
    except KeyError as exc:
        raise ManifestError(f"manifest is missing key {exc.args[0]!r}") from None
    except (ValueError, ConstructionError) as exc:
        raise ManifestError(f"malformed manifest: {exc}") from None
    return man


def atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_manifest(path, man: Manifest) -> None:
    atomic_write(path, serialize_manifest(man).encode("ascii"))


def load_manifest(path) -> Manifest:
    return parse_manifest(Path(path).read_text(encoding="ascii"))


# byte <-> symbol packing


def bytes_to_stripes(data: bytes, params: CodeParams) -> tuple[np.ndarray, int]:
    """Split a file into zero-padded ``(stripes, k, alpha)`` messages."""
    stripe_bytes = params.B * params.field.symbol_bytes
    stripes = -(-len(data) // stripe_bytes)
    padding = stripes * stripe_bytes - len(data)
    buf = np.frombuffer(bytes(data) + bytes(padding), dtype=params.field.dtype)
    return buf.reshape(stripes, params.k, params.alpha), padding


def stripes_to_bytes(stripes: np.ndarray, file_length: int, params: CodeParams) -> bytes:
    return np.ascontiguousarray(stripes, dtype=params.field.dtype).tobytes()[:file_length]


def shard_bytes(ordinal: int, symbols: np.ndarray, params: CodeParams) -> bytes:
    payload = np.ascontiguousarray(symbols, dtype=params.field.dtype).tobytes()
    return HEADER.pack(MAGIC, FORMAT_VERSION, ordinal) + payload + TRAILER.pack(zlib.crc32(payload))


def parse_shard(blob: bytes, man: Manifest, name="<shard>") -> tuple[int, np.ndarray]:
    """Validate a shard blob and return (node ordinal, (stripes, alpha) symbols)."""
    p = man.params
    if len(blob) < HEADER.size + TRAILER.size:
        raise ShardLengthError(f"shard {name}: {len(blob)} bytes is shorter than header + CRC")
    magic, version, ordinal = HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ShardFormatError(f"shard {name}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ShardFormatError(f"shard {name}: unsupported version {version}")
    if ordinal >= p.n:
        raise ShardFormatError(f"shard {name}: node ordinal {ordinal} outside [0, {p.n})")
    payload = blob[HEADER.size : -TRAILER.size]
    if man.stripe_count is not None:
        want = man.stripe_count * p.alpha * p.field.symbol_bytes
        if len(payload) != want:
            raise ShardLengthError(f"shard {name}: payload is {len(payload)} bytes, expected {want}")
    elif len(payload) % (p.alpha * p.field.symbol_bytes):
        raise ShardLengthError(f"shard {name}: payload is not a whole number of stripes")
    (crc,) = TRAILER.unpack_from(blob, len(blob) - TRAILER.size)
    actual = zlib.crc32(payload)
    if crc != actual:
        raise ShardCorruptionError(name, crc, actual)
    if man.shard_crcs is not None and man.shard_crcs[ordinal] != actual:
        raise ShardCorruptionError(name, man.shard_crcs[ordinal], actual)
    symbols = np.frombuffer(payload, dtype=p.field.dtype).reshape(-1, p.alpha)
    return ordinal, symbols


# whole-file operations


def encode_file(data: bytes, desc: CodeDescription) -> tuple[list[bytes], Manifest]:
    """Shard blobs (indexed by node ordinal) and the completed manifest."""
    p = desc.params
    stripes, padding = bytes_to_stripes(data, p)
    cw = encode(stripes, desc)
    blobs = [shard_bytes(u, cw[:, u, :], p) for u in range(p.n)]
    crcs = tuple(zlib.crc32(b[HEADER.size : -TRAILER.size]) for b in blobs)
    return blobs, Manifest(desc, len(data), stripes.shape[0], padding, crcs)


def write_shards(data: bytes, desc: CodeDescription, outdir, verify: bool = True,
                 ) -> tuple[list[Path], Manifest]:
    """Encode ``data`` into n shard files plus ``manifest.txt`` under ``outdir``."""
    if not desc.c:
        raise UnverifiedDescriptionError("description has no common coefficient c")
    if verify and not verify_mds(desc, stop_at_first=True).ok:
        raise UnverifiedDescriptionError("description is not MDS")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    blobs, man = encode_file(data, desc)
    paths = []
    for u, blob in enumerate(blobs):
        path = outdir / shard_name(u)
        atomic_write(path, blob)
        paths.append(path)
    save_manifest(outdir / MANIFEST_NAME, man)
    return paths, man


def load_shards(shard_dir, man: Manifest, nodes=None) -> dict[int, np.ndarray]:
    """Read and validate the shards present in ``shard_dir``; missing ones are skipped."""
    p = man.params
    wanted = range(p.n) if nodes is None else [as_node(u, p).ordinal(p) for u in nodes]
    out = {}
    for u in wanted:
        path = Path(shard_dir) / shard_name(u)
        if not path.exists():
            continue
        ordinal, symbols = parse_shard(path.read_bytes(), man, path.name)
        if ordinal != u:
            raise ShardFormatError(f"shard {path.name}: header says node {ordinal}")
        out[u] = symbols
    return out


def read_stripe(shards: dict, man: Manifest, stripe: int) -> dict[NodeId, np.ndarray]:
    """Per-node alpha-symbol rows of one stripe, keyed by NodeId."""
    p = man.params
    if man.stripe_count is not None and not 0 <= stripe < man.stripe_count:
        raise IndexError(f"stripe {stripe} outside [0, {man.stripe_count})")
    return {NodeId.from_ordinal(u, p): np.asarray(sym)[stripe] for u, sym in shards.items()}


def read_all(shard_dir, man: Manifest, nodes=None) -> bytes:
    """Rebuild the original file from any k shards (the first k present by default)."""
    p = man.params
    shards = load_shards(shard_dir, man, nodes)
    if len(shards) < p.k:
        raise ShardError(f"need {p.k} shards to reconstruct, found {len(shards)}")
    chosen = dict(sorted(shards.items())[: p.k])
    if man.stripe_count == 0:
        return b""
    if all(u < p.k for u in chosen):
        msg = np.stack([chosen[u] for u in range(p.k)], axis=1)
    else:
        msg = reconstruct(chosen, man.desc)
    return stripes_to_bytes(msg, man.file_length, p)


def repair_shard(shard_dir, man: Manifest, failed, counter: ReadCounter | None = None) -> Path:
    """Regenerate a lost systematic shard from the other n - 1 shards.

    Only the access-set symbols of each helper are handed to the repair
    routine; ``counter`` receives the per-helper symbol reads.
    """
    p = man.params
    node = as_node(failed, p)
    fo = node.ordinal(p)
    helpers_present = load_shards(shard_dir, man, [u for u in range(p.n) if u != fo])
    missing = [u for u in range(p.n) if u != fo and u not in helpers_present]
    if missing:
        raise ShardError(
            f"repair of {node} needs all {p.n - 1} other shards; missing {missing}"
        )
    stacked = np.zeros((man.stripe_count, p.n, p.alpha), dtype=p.field.dtype)
    for u, sym in helpers_present.items():
        stacked[:, u, :] = sym
    helpers = extract_helpers(stacked, node, p, counter)
    content = repair_systematic(node, helpers, man.desc)
    blob = shard_bytes(fo, content, p)
    if man.shard_crcs is not None:
        parse_shard(blob, man, shard_name(fo))
    path = Path(shard_dir) / shard_name(fo)
    atomic_write(path, blob)
    return path
