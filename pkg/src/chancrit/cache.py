"""Binary on-disk cache for matrix product states.

Format: magic "CHCR", format version (u32), L (u32), the L+1 bond
dimensions (u32 each), then each site tensor as row-major complex doubles,
all little-endian, and a trailing CRC32 of everything before it.
"""
from __future__ import annotations

import hashlib
import logging
import os
import struct
import zlib
from pathlib import Path

import numpy as np

from .mps import MatrixProductState

logger = logging.getLogger(__name__)

MAGIC = b"CHCR"
FORMAT_VERSION = 1


class CacheFormatError(IOError):
    pass


def save_mps(state, path):
    """Serialize an MPS; bit-exact roundtrip with load_mps."""
    dims = [t.shape[0] for t in state.tensors] + [state.tensors[-1].shape[2]]
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<II", FORMAT_VERSION, state.L)
    blob += struct.pack(f"<{len(dims)}I", *dims)
    for t in state.tensors:
        blob += np.ascontiguousarray(t, dtype="<c16").tobytes()
    blob += struct.pack("<I", zlib.crc32(bytes(blob)) & 0xFFFFFFFF)
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_bytes(bytes(blob))
    os.replace(tmp, path)


def load_mps(path):
    raw = Path(path).read_bytes()
    if len(raw) < 16 or raw[:4] != MAGIC:
        raise CacheFormatError(f"{path}: not a CHCR state file")
    if zlib.crc32(raw[:-4]) & 0xFFFFFFFF != struct.unpack("<I", raw[-4:])[0]:
        raise CacheFormatError(f"{path}: checksum mismatch (corrupted file)")
    version, L = struct.unpack("<II", raw[4:12])
    if version != FORMAT_VERSION:
        raise CacheFormatError(
            f"{path}: format version {version}, expected {FORMAT_VERSION}; "
            "recompute the state to migrate")
    off = 12
    dims = struct.unpack(f"<{L + 1}I", raw[off : off + 4 * (L + 1)])
    off += 4 * (L + 1)
    tensors = []
    for j in range(L):
        count = dims[j] * 2 * dims[j + 1]
        t = np.frombuffer(raw[off : off + 16 * count], dtype="<c16")
        if t.size != count:
            raise CacheFormatError(f"{path}: truncated tensor data")
        tensors.append(t.reshape(dims[j], 2, dims[j + 1]).copy())
        off += 16 * count
    if off != len(raw) - 4:
        raise CacheFormatError(f"{path}: trailing garbage")
    return MatrixProductState(tensors)


def ground_state_key(L, periodic, chi_max, energy_tol, seed):
    """Stable cache key for a DMRG ground state."""
    text = f"gs-v{FORMAT_VERSION}-L{L}-per{int(periodic)}-chi{chi_max}-tol{energy_tol:g}-seed{seed}"
    return hashlib.sha256(text.encode()).hexdigest()[:24]


def cached_ground_state(spec, chi_max, cache_dir, energy_tol=1e-10, seed=0):
    """DMRG ground state with a disk cache keyed by all solver inputs."""
    from .dmrg import ground_state_dmrg

    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = ground_state_key(spec.L, spec.periodic, chi_max, energy_tol, seed)
    path = cache_dir / f"{key}.chcr"
    if path.exists():
        try:
            mps = load_mps(path)
            logger.debug("ground state L=%d loaded from cache", spec.L)
            return mps
        except CacheFormatError as exc:
            logger.warning("discarding bad cache entry: %s", exc)
            path.unlink()
    mps = ground_state_dmrg(spec, chi_max=chi_max, energy_tol=energy_tol, seed=seed)
    save_mps(mps, path)
    return mps
