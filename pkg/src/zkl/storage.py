"""On-disk formats: flat dotted config files, binary field dumps and result bundles.

Binary dump layout (all little-endian)::

    16 bytes   magic b"ZKLFIELD" | uint16 version | uint16 0 | uint32 0
    uint32     dims (grid dimension)
    uint32     N (points per axis)
    float64    eps (0 when the producer has none, e.g. the Zakharov solver)
    float64    t
    uint32     number of fields
    per field: uint16 name length | name (utf-8) | uint8 kind (0 real, 1 complex)
               | uint32 components | values, C order, float64 or complex128
"""
from __future__ import annotations

import csv
import io
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"ZKLFIELD"
DUMP_VERSION = 1
_HEAD = struct.Struct("<8sHHI")
_META = struct.Struct("<IIddI")


class ConfigError(ValueError):
    """Malformed configuration; ``line`` and ``key`` locate the problem."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.key = key


# -- config text --------------------------------------------------------------

def parse_flat(text: str) -> dict:
    """``key = value`` lines with dotted keys; ``#`` starts a comment. Returns ``{key: (value, line)}``."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or any(c.isspace() for c in key):
            raise ConfigError(f"invalid key {key!r}", lineno, key)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", lineno, key)
        out[key] = (value, lineno)
    return out


def format_flat(entries: dict) -> str:
    return "".join(f"{k} = {entries[k]}\n" for k in sorted(entries))


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(format_value(x) for x in v)
    return str(v)


# -- binary dumps -------------------------------------------------------------

def write_dump(path, fields: dict, dims: int, points: int, eps: float = 0.0, t: float = 0.0) -> None:
    buf = io.BytesIO()
    buf.write(_HEAD.pack(MAGIC, DUMP_VERSION, 0, 0))
    buf.write(_META.pack(dims, points, float(eps), float(t), len(fields)))
    for name in sorted(fields):
        arr = np.asarray(fields[name])
        complex_ = np.iscomplexobj(arr)
        arr = arr.astype("<c16" if complex_ else "<f8")
        comps = arr.size // points**dims
        if comps * points**dims != arr.size:
            raise ValueError(f"field {name!r} does not fit a {dims}D grid of {points} points")
        enc = name.encode()
        buf.write(struct.pack("<H", len(enc)) + enc + struct.pack("<BI", int(complex_), comps))
        buf.write(np.ascontiguousarray(arr).tobytes())
    Path(path).write_bytes(buf.getvalue())


def read_dump(path):
    """Inverse of :func:`write_dump`: ``(meta, fields)`` with fields shaped ``(components, N, ...)``."""
    data = Path(path).read_bytes()
    magic, version, _, _ = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a field dump (bad magic)")
    if version != DUMP_VERSION:
        raise ValueError(f"{path}: unsupported dump version {version}")
    off = _HEAD.size
    dims, points, eps, t, count = _META.unpack_from(data, off)
    off += _META.size
    grid_shape = (points,) * dims
    out = {}
    for _ in range(count):
        (nlen,) = struct.unpack_from("<H", data, off)
        off += 2
        name = data[off:off + nlen].decode()
        off += nlen
        kind, comps = struct.unpack_from("<BI", data, off)
        off += 5
        dtype = np.dtype("<c16" if kind else "<f8")
        n = comps * points**dims
        arr = np.frombuffer(data, dtype=dtype, count=n, offset=off).reshape((comps,) + grid_shape)
        off += n * dtype.itemsize
        out[name] = arr.copy()
    return {"dims": dims, "points": points, "eps": eps, "t": t, "version": version}, out


# -- result bundles -----------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def jsonable(v):
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, float) and not np.isfinite(v):
        return repr(v)
    return v


@dataclass
class ResultBundle:
    tables: dict = field(default_factory=dict)    # name -> (header, rows)
    summary: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)     # name -> (x, y)
    dumps: dict = field(default_factory=dict)     # name -> dict(fields=..., dims=..., points=..., eps=..., t=...)
    failures: list = field(default_factory=list)  # failed assumption checks

    @property
    def ok(self) -> bool:
        return not self.failures

    def write(self, out_dir, manifest: dict) -> list:
        """Write everything under ``out_dir``; returns the relative paths written."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for name, (header, rows) in sorted(self.tables.items()):
            sio = io.StringIO()
            w = csv.writer(sio, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(v) for v in row])
            (out / f"{name}.csv").write_text(sio.getvalue())
            written.append(f"{name}.csv")
        if self.plots:
            (out / "plots").mkdir(exist_ok=True)
        for name, (x, y) in sorted(self.plots.items()):
            lines = "".join(f"{_cell(float(a))} {_cell(float(b))}\n" for a, b in zip(x, y))
            (out / "plots" / f"{name}.dat").write_text(lines)
            written.append(f"plots/{name}.dat")
        if self.dumps:
            (out / "dumps").mkdir(exist_ok=True)
        for name, d in sorted(self.dumps.items()):
            write_dump(out / "dumps" / f"{name}.zkl", d["fields"], d["dims"], d["points"],
                       d.get("eps", 0.0), d.get("t", 0.0))
            written.append(f"dumps/{name}.zkl")
        summary = dict(self.summary, failures=self.failures)
        (out / "summary.json").write_text(json.dumps(jsonable(summary), indent=2, sort_keys=True) + "\n")
        written.append("summary.json")
        man = dict(manifest, files=sorted(written))
        (out / "manifest.json").write_text(json.dumps(jsonable(man), indent=2, sort_keys=True) + "\n")
        return written
