"""Counter-based random bits.

Every random quantity is a pure function of ``(seed, trial, key, stream)``
through a splitmix64-style finaliser, so bits can be produced lazily, in any
order, and identically by the sampler, the explorers and the dynamics.
"""
from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

# stream tags keep the static bits and the dynamics clocks independent
STREAM_STATIC = 0
STREAM_CLOCK = 1
STREAM_CHOICE = 2


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def hash4(seed, trial, key, stream):
    h = mix64(np.uint64(key) + _GOLDEN)
    h = mix64(h ^ (np.uint64(trial) * _GOLDEN + np.uint64(stream)))
    return mix64(h ^ (np.uint64(seed) + _GOLDEN * np.uint64(3)))


@njit(cache=True, inline="always")
def uniform(seed, trial, key, stream):
    return float(hash4(seed, trial, key, stream) >> _S11) * _INV53


@njit(cache=True, inline="always")
def bit(seed, trial, key, p):
    return 1 if uniform(seed, trial, key, STREAM_STATIC) < p else 0


@njit(cache=True)
def _bits_kernel(seed, trial, keys, p, out):
    for i in range(keys.shape[0]):
        out[i] = bit(seed, trial, keys[i], p)


def bits(seed: int, trial: int, keys: np.ndarray, p: float = 0.5) -> np.ndarray:
    """Bernoulli(p) bits for the given cell keys (1 = open / white)."""
    out = np.empty(keys.shape[0], dtype=np.int8)
    _bits_kernel(np.uint64(seed), np.uint64(trial), keys.astype(np.uint64), float(p), out)
    return out


def uniforms(seed: int, trial: int, keys: np.ndarray, stream: int) -> np.ndarray:
    out = np.empty(keys.shape[0], dtype=np.float64)
    _uniform_kernel(np.uint64(seed), np.uint64(trial), keys.astype(np.uint64), stream, out)
    return out


@njit(cache=True)
def _uniform_kernel(seed, trial, keys, stream, out):
    for i in range(keys.shape[0]):
        out[i] = uniform(seed, trial, keys[i], stream)


def choice(seed: int, trial: int, n: int, salt: int = 0) -> int:
    """Uniform index in ``range(n)`` derived from the same counter scheme."""
    u = uniforms(seed, trial, np.array([salt], dtype=np.uint64), STREAM_CHOICE)[0]
    return min(int(u * n), n - 1)
