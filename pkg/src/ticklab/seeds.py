"""Deterministic per-stage seed derivation.

One global seed drives a whole experiment; every stage draws from its
own stream keyed by (global seed, stage name), so adding or reordering
stages never perturbs another stage's draws.
"""
from __future__ import annotations

import hashlib

import numpy as np


def stage_seed(global_seed: int, stage: str) -> int:
    """64-bit sub-seed for a named stage under one global seed."""
    digest = hashlib.sha256(f"{int(global_seed)}:{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def stage_rng(global_seed: int, stage: str) -> np.random.Generator:
    return np.random.default_rng(stage_seed(global_seed, stage))
