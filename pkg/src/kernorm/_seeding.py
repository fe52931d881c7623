"""Seed derivation shared by every Monte-Carlo loop.

A child stream is identified by the root seed plus a tuple of integer keys
(replicate index, trial index, ...).  The mixing is numpy's ``SeedSequence``
hash, so a given (seed, keys) pair always yields the same stream no matter
which thread or process evaluates it.
"""

import os

import numpy as np

SEED_MASK = (1 << 64) - 1


def _sequence(seed, keys):
    return np.random.SeedSequence(int(seed) & SEED_MASK, spawn_key=tuple(int(k) for k in keys))


def derive_seed(seed, *keys):
    """Return a 64-bit unsigned child seed of ``seed`` for ``keys``."""
    return int(_sequence(seed, keys).generate_state(1, np.uint64)[0])


def make_rng(seed, *keys):
    """Generator for the child stream ``(seed, *keys)``."""
    return np.random.default_rng(_sequence(seed, keys))


def default_workers():
    env = os.environ.get("KERNORM_WORKERS")
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return os.cpu_count() or 1
