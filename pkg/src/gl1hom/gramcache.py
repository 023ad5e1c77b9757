"""On-disk Gram matrix cache: one compressed record per signature."""
from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

import numpy as np

# bump whenever evaluation or basis conventions change
CACHE_VERSION = 2


class GramStore:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, key) -> Path:
        k, positions = key
        tag = hashlib.sha1(repr((CACHE_VERSION, k, tuple(positions))).encode()).hexdigest()[:16]
        return self.directory / f"gram-v{CACHE_VERSION}-k{k}-t{len(positions)}-{tag}.npz"

    def get(self, key):
        path = self._path(key)
        if not path.exists():
            return None
        try:
            with np.load(path, allow_pickle=False) as rec:
                if int(rec["version"]) != CACHE_VERSION:
                    return None
                if int(rec["k"]) != key[0] or tuple(rec["positions"].tolist()) != tuple(key[1]):
                    return None
                return rec["matrix"].astype(np.int64)
        except (OSError, ValueError, KeyError):
            return None

    def put(self, key, matrix):
        if matrix.dtype == object:
            return  # entries beyond int64 are not persisted
        path = self._path(key)
        if path.exists():
            return
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        os.close(fd)
        try:
            with open(tmp, "wb") as fh:
                np.savez_compressed(
                    fh,
                    version=np.int64(CACHE_VERSION),
                    k=np.int64(key[0]),
                    positions=np.array(key[1], dtype=np.int64),
                    matrix=np.asarray(matrix, dtype=np.int64),
                )
            try:
                os.link(tmp, path)  # first writer wins
            except FileExistsError:
                pass
        finally:
            os.unlink(tmp)
