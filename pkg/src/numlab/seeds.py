"""Deterministic seed derivation: hash of master seed and a text label.

Collision-resistant and stable across runs and platforms, so parallel or
reordered experiment execution cannot change any sampled stream.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, label: str) -> int:
    digest = hashlib.sha256(f"{master}\x1f{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def derived_rng(master: int, label: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, label))
