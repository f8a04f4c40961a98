"""Seeded iid single-qubit Pauli noise, one sector at a time.

Per-trial streams are derived counter-style from (master seed, trial index)
using Philox, so a sweep's trials can be executed in any order on any number
of workers and still produce bitwise identical frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Lattice
from .xcube import PauliFrame

__all__ = ["NoiseSpec", "sample", "trial_rng", "GENERATOR_ID"]

GENERATOR_ID = "numpy-philox4x64 key=(master_seed, stream) counter=(0,0,trial,0)"


@dataclass(frozen=True)
class NoiseSpec:
    """iid bit-flip noise at rate p in one sector.

    ``sector`` is "x" (Pauli-X errors, exciting cell defects) or "z"
    (Pauli-Z errors, exciting vertex defects).
    """

    p: float
    sector: str
    seed: int
    trial: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("error rate must lie in [0, 1]")
        if self.sector not in ("x", "z"):
            raise ValueError("sector must be 'x' or 'z'")


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one trial of one sweep point.

    Distinct trials occupy Philox counter blocks 2^128 apart, so streams
    cannot overlap for any feasible number of draws.
    """
    key = np.array([seed % 2 ** 64, stream % 2 ** 64], dtype=np.uint64)
    counter = np.array([0, 0, trial % 2 ** 64, trial // 2 ** 64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def sample(spec: NoiseSpec, lat: Lattice) -> PauliFrame:
    """Sample a Pauli frame with each face flipped independently at rate p."""
    rng = trial_rng(spec.seed, spec.trial)
    mask = rng.random((3, lat.L, lat.L, lat.L)) < spec.p
    if spec.sector == "x":
        return PauliFrame(lat.L, x=mask)
    return PauliFrame(lat.L, z=mask)
