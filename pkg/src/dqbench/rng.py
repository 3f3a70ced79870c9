"""Deterministic, label-addressed random streams.

Every random decision in the toolkit draws from a stream identified by a
master seed and a path of labels, e.g. ``(3, ["polluter:completeness",
"feature:age"])``. Streams with equal identity yield equal draws regardless
of the order in which work is scheduled.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


def _path_digest(path: tuple[str, ...]) -> list[int]:
    # length-prefixing each label keeps ("a", "b") and ("ab",) apart
    h = hashlib.sha256()
    for label in path:
        raw = str(label).encode("utf-8")
        h.update(len(raw).to_bytes(8, "little"))
        h.update(raw)
    digest = h.digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 32, 4)]


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    path: tuple[str, ...] = ()
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        seed = int(self.master_seed) & 0xFFFFFFFFFFFFFFFF
        entropy = [seed & 0xFFFFFFFF, seed >> 32, *_path_digest(self.path)]
        gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
        object.__setattr__(self, "_gen", gen)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def child(self, *labels: str) -> "RngStream":
        """Fresh stream one level below this one; independent of draws already made."""
        return RngStream(self.master_seed, self.path + tuple(str(x) for x in labels))

    # thin conveniences over the numpy generator
    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size=size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self._gen.normal(loc, scale, size=size)

    def random(self, size=None):
        return self._gen.random(size)


def derive_rng(master_seed: int, path=()) -> RngStream:
    if isinstance(path, str):
        path = [path]
    return RngStream(int(master_seed), tuple(str(x) for x in path))
