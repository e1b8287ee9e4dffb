"""Counter-based random streams.

Every stochastic quantity is addressed by ``(seed, stream name, trial)``.
A stream name hashes to a 128-bit Philox key; trial ``t`` owns a fixed
window of the counter space, so the draws for a trial do not depend on
which other trials are generated alongside it or in which process.
"""

from __future__ import annotations

import hashlib

import numpy as np

_WORDS_PER_BLOCK = 4  # Philox4x64 emits four uint64 words per counter step
_INV_2_53 = 1.0 / (1 << 53)


def derive_key(seed: int, *parts) -> np.ndarray:
    """Hash a seed and a tuple of labels into a Philox key (two uint64)."""
    label = "/".join(str(p) for p in (int(seed),) + parts)
    digest = hashlib.blake2b(label.encode(), digest_size=16).digest()
    return np.frombuffer(digest, dtype="<u8").copy()


def derive_seed(seed: int, *parts) -> int:
    """Derive a child 63-bit seed from a parent seed and labels."""
    return int(derive_key(seed, "child", *parts)[0] >> np.uint64(1))


def raw_words(key: np.ndarray, start: int, stop: int, words: int) -> np.ndarray:
    """uint64 words for trials ``start..stop-1``; shape ``(stop - start, words)``."""
    blocks = -(-words // _WORDS_PER_BLOCK)
    bitgen = np.random.Philox(key=key, counter=[start * blocks, 0, 0, 0])
    out = bitgen.random_raw((stop - start) * blocks * _WORDS_PER_BLOCK)
    return out.reshape(stop - start, blocks * _WORDS_PER_BLOCK)[:, :words]


def uniforms(key: np.ndarray, start: int, stop: int, count: int) -> np.ndarray:
    """Uniform draws on the half-open interval (0, 1]."""
    w = raw_words(key, start, stop, count)
    return ((w >> np.uint64(11)).astype(np.float64) + 1.0) * _INV_2_53


def complex_normals(key: np.ndarray, start: int, stop: int, count: int) -> np.ndarray:
    """Circularly symmetric CN(0, 1) draws, shape ``(stop - start, count)``.

    Polar Box-Muller: ``|z|^2 = -ln(u1)`` is Exp(1) and the phase is uniform,
    which is exactly CN(0, 1) with two words per sample.
    """
    u = uniforms(key, start, stop, 2 * count)
    radius = np.sqrt(-np.log(u[:, :count]))
    return radius * np.exp(2j * np.pi * u[:, count:])


def phases(key: np.ndarray, start: int, stop: int, count: int) -> np.ndarray:
    """Uniform phases on [-pi, pi)."""
    u = uniforms(key, start, stop, count)
    # u in (0, 1] -> 1 - u in [0, 1); rounding can still land on +pi
    theta = (1.0 - u) * 2.0 * np.pi - np.pi
    return np.where(theta >= np.pi, -np.pi, theta)
