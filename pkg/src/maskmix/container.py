"""Portable on-disk containers: raw little-endian arrays with text sidecars.

Every binary artifact (dataset samples, network checkpoints) is a pair of
files: ``<name>.bin`` holding raw array bytes in C order, little endian,
and ``<name>.hdr`` holding a flat ``key = value`` text header with the
shape, element type and byte order. The format is deliberately trivial to
parse from any language.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

_DTYPES = {
    "float32": np.dtype("<f4"),
    "float64": np.dtype("<f8"),
    "uint8": np.dtype("u1"),
    "int64": np.dtype("<i8"),
}
_DTYPE_NAMES = {v: k for k, v in _DTYPES.items()}


def write_kv(path: Path | str, pairs: dict[str, str]) -> None:
    lines = [f"{k} = {v}" for k, v in pairs.items()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_kv(path: Path | str) -> dict[str, str]:
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: malformed line {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def write_array(path: Path | str, arr: np.ndarray, extra: dict[str, str] | None = None) -> None:
    """Write <path>.bin plus <path>.hdr describing it."""
    path = Path(path)
    arr = np.ascontiguousarray(arr)
    canonical = None
    for name, dt in _DTYPES.items():
        if arr.dtype == dt or arr.dtype.name == name:
            canonical = name
            arr = arr.astype(dt, copy=False)
            break
    if canonical is None:
        raise ValueError(f"unsupported dtype {arr.dtype} for container format")
    header = {
        "shape": " ".join(str(s) for s in arr.shape),
        "dtype": canonical,
        "byte_order": "little",
    }
    if extra:
        header.update(extra)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path.with_suffix(path.suffix + ".bin"), "wb") as f:
        f.write(arr.tobytes())
    write_kv(path.with_suffix(path.suffix + ".hdr"), header)


def read_array(path: Path | str) -> tuple[np.ndarray, dict[str, str]]:
    """Read an array written by write_array; returns (array, header)."""
    path = Path(path)
    header = read_kv(path.with_suffix(path.suffix + ".hdr"))
    shape = tuple(int(s) for s in header["shape"].split()) if header["shape"] else ()
    if header.get("byte_order", "little") != "little":
        raise ValueError(f"{path}: unsupported byte order {header['byte_order']}")
    dtype = _DTYPES[header["dtype"]]
    data = Path(path.with_suffix(path.suffix + ".bin")).read_bytes()
    arr = np.frombuffer(data, dtype=dtype).reshape(shape).copy()
    return arr, header


def save_named_arrays(directory: Path | str, arrays: dict[str, np.ndarray]) -> None:
    """Flat named-array container: one .bin/.hdr pair per entry plus an index."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = list(arrays)
    for name in names:
        write_array(directory / name, arrays[name])
    (directory / "index.txt").write_text("\n".join(names) + "\n")


def load_named_arrays(directory: Path | str) -> dict[str, np.ndarray]:
    directory = Path(directory)
    names = [n for n in (directory / "index.txt").read_text().splitlines() if n]
    return {name: read_array(directory / name)[0] for name in names}


def require_empty_dir(path: Path | str, force: bool) -> Path:
    """Refuse to write into an existing non-empty directory unless forced."""
    path = Path(path)
    if path.exists() and any(path.iterdir()):
        if not force:
            raise FileExistsError(
                f"{path} already exists and is not empty; pass --force to overwrite"
            )
        for root, dirs, files in os.walk(path, topdown=False):
            for f in files:
                os.unlink(os.path.join(root, f))
            for d in dirs:
                os.rmdir(os.path.join(root, d))
    path.mkdir(parents=True, exist_ok=True)
    return path
