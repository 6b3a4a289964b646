# Copyright 2025 Beacon, shrwnsan
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Keyed random streams.

Every random draw in the package comes from a Philox (counter-based) generator
whose key is derived from ``(master seed, *key)`` through ``SeedSequence``. A
draw therefore depends only on its key, never on how many other draws happened
before it or on which thread made them.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

from beliefsearch.exceptions import ValidationError


class Purpose(IntEnum):
    """Last key component, separating unrelated uses of the same node id."""

    BOUND = 0
    LOWER = 1
    DESCENT = 2
    SIMULATION = 3
    GENERATOR = 4


class StreamFactory:
    """Factory of independent generators keyed by integer tuples."""

    def __init__(self, seed: int, prefix: tuple[int, ...] = ()):
        if not isinstance(seed, int | np.integer) or seed < 0 or seed >= 2**64:
            msg = f"Seed must be an integer in [0, 2**64), got {seed!r}"
            raise ValidationError(msg, field="seed", value=seed)
        if any(k < 0 for k in prefix):
            msg = "Stream keys must be non-negative"
            raise ValidationError(msg, field="key", value=prefix)
        self.seed = int(seed)
        self.prefix = tuple(int(k) for k in prefix)

    def stream(self, *key: int) -> np.random.Generator:
        """Return the generator for ``key``; equal keys give equal streams."""
        full_key = self.prefix + tuple(int(k) for k in key)
        if any(k < 0 for k in full_key):
            msg = "Stream keys must be non-negative"
            raise ValidationError(msg, field="key", value=full_key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=full_key)
        return np.random.Generator(np.random.Philox(sequence))

    def spawn(self, *key: int) -> StreamFactory:
        """Child factory whose stream keys all start with ``key``."""
        return StreamFactory(self.seed, self.prefix + tuple(int(k) for k in key))

    def __repr__(self) -> str:
        return f"StreamFactory(seed={self.seed}, prefix={self.prefix})"
