"""Deterministic, label-addressed random streams.

Every randomized step draws from a Philox stream keyed on the run seed plus
string labels (variable name, purpose, train/test). Draw ``i`` of a stream is
a pure function of ``(seed, labels, i)``, so results do not depend on the
order in which variables are processed or on worker-thread scheduling.
"""

from __future__ import annotations

import zlib

import numpy as np


def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def stream(seed: int, *labels: str) -> np.random.Generator:
    """Return a generator whose output depends only on (seed, labels)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_label_key(l) for l in labels]
    ss = np.random.SeedSequence(entropy)
    return np.random.Generator(np.random.Philox(ss))


def uniforms(seed: int, *labels: str, n: int) -> np.ndarray:
    """n U[0,1] draws; draw i is reproducible independently of callers."""
    return stream(seed, *labels).random(n)
