"""File formats: embeddings (TSV and GAEZ binary), node mappings, pair lists.

GAEZ binary layout: magic "GAEZ", version byte 1, little-endian u64 node
count, u64 embedding width, then n*f little-endian float64 row-major.
Rows carry no ids; pair a GAEZ file with a node-mapping sidecar.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ParseError
from .graph import NodeMapping

__all__ = [
    "save_embedding_tsv",
    "load_embedding_tsv",
    "save_embedding_gaez",
    "load_embedding_gaez",
    "save_node_mapping",
    "load_node_mapping",
    "save_pairs",
    "load_pairs",
]

_GAEZ_MAGIC = b"GAEZ"


def save_embedding_tsv(path, z: np.ndarray, node_ids=None) -> None:
    """One row per node: original id, then the embedding values."""
    ids = node_ids if node_ids is not None else np.arange(len(z))
    with open(path, "w", encoding="utf-8") as fh:
        for i, row in zip(ids, z):
            fh.write(str(int(i)))
            for v in row:
                fh.write(f"\t{float(v)!r}")
            fh.write("\n")


def load_embedding_tsv(path) -> tuple[np.ndarray, np.ndarray]:
    ids, rows = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            try:
                ids.append(int(parts[0]))
                rows.append([float(p) for p in parts[1:]])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: malformed embedding row") from None
    return np.asarray(ids, dtype=np.int64), np.asarray(rows, dtype=np.float64)


def save_embedding_gaez(path, z: np.ndarray) -> None:
    z = np.ascontiguousarray(z, dtype=np.float64)
    with open(path, "wb") as fh:
        fh.write(_GAEZ_MAGIC)
        fh.write(struct.pack("<B", 1))
        fh.write(struct.pack("<QQ", z.shape[0], z.shape[1]))
        fh.write(z.astype("<f8").tobytes())


def load_embedding_gaez(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _GAEZ_MAGIC:
            raise ParseError(f"{path}: bad magic {magic!r}")
        (version,) = struct.unpack("<B", fh.read(1))
        if version != 1:
            raise ParseError(f"{path}: unsupported GAEZ version {version}")
        n, f = struct.unpack("<QQ", fh.read(16))
        payload = fh.read(n * f * 8)
        if len(payload) != n * f * 8:
            raise ParseError(f"{path}: truncated GAEZ payload")
        return np.frombuffer(payload, dtype="<f8").reshape(n, f).copy()


def save_node_mapping(path, mapping: NodeMapping) -> None:
    """TSV sidecar: original_id <TAB> dense_id."""
    with open(path, "w", encoding="utf-8") as fh:
        for dense, orig in enumerate(mapping.original_ids):
            fh.write(f"{int(orig)}\t{dense}\n")


def load_node_mapping(path) -> NodeMapping:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                entries.append((int(parts[1]), int(parts[0])))
            except (ValueError, IndexError):
                raise ParseError(f"{path}:{lineno}: malformed mapping row") from None
    entries.sort()
    return NodeMapping(np.asarray([orig for _, orig in entries], dtype=np.int64))


def save_pairs(path, pairs: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in pairs:
            fh.write(f"{int(i)}\t{int(j)}\n")


def load_pairs(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                rows.append((int(parts[0]), int(parts[1])))
            except (ValueError, IndexError):
                raise ParseError(f"{path}:{lineno}: malformed pair row") from None
    return np.asarray(rows, dtype=np.int64).reshape(-1, 2)
