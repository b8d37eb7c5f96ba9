"""Shared test helpers: seeded corpora and independent reference oracles.

The oracles here deliberately recompute results by the most literal route
available (walk every block, decode then filter, histogram entropies) so the
package's faster paths are always checked against a second implementation.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from typing import Sequence

import numpy as np

from colcodec import (
    EncodedColumn,
    IdInterval,
    SchemeKind,
    ValueIdArray,
    decode_array,
    id_width_bits,
)

FAMILIES = (
    "constant",
    "sorted",
    "sequential",
    "uniform2",
    "uniform16",
    "uniform256",
    "zipf",
)


def make_array(ids: Sequence[int]) -> ValueIdArray:
    width = id_width_bits(max(ids) + 1) if len(ids) else 1
    return ValueIdArray(ids=list(ids), id_width_bits=width)


def family_column(rng: np.random.Generator, family: str, n: int) -> list[int]:
    if family == "constant":
        return [int(rng.integers(0, 64))] * n
    if family == "sorted":
        return sorted(int(v) for v in rng.integers(0, 32, n))
    if family == "sequential":
        start = int(rng.integers(0, 64))
        ids = list(range(start, start + n))
        return ids if rng.random() < 0.5 else ids[::-1]
    if family == "uniform2":
        return [int(v) for v in rng.integers(0, 2, n)]
    if family == "uniform16":
        return [int(v) for v in rng.integers(0, 16, n)]
    if family == "uniform256":
        return [int(v) for v in rng.integers(0, 256, n)]
    if family == "zipf":
        return [int(min(v, 256) - 1) for v in rng.zipf(1.2, n)]
    raise ValueError(family)


def is_sequential(ids: Sequence[int]) -> bool:
    if len(ids) < 2:
        return False
    deltas = {b - a for a, b in zip(ids, ids[1:])}
    return deltas == {1} or deltas == {-1}


def candidate_sizes_oracle(n: int) -> list[int]:
    """All powers of two in [2, n], by trial doubling."""
    out = []
    b = 2
    while b <= n:
        out.append(b)
        b *= 2
    return out


def block_walk_clusters(ids: Sequence[int], b: int) -> int:
    """Single-valued aligned full blocks, by inspecting every block."""
    s = 0
    for start in range(0, len(ids) - b + 1, b):
        block = ids[start : start + b]
        if min(block) == max(block):
            s += 1
    return s


def best_block_size_oracle(ids: Sequence[int], candidates: Sequence[int]) -> tuple[int, int]:
    """(b, F) maximizing F = S*(b-1) by exhaustive walk; first candidate wins ties."""
    best: tuple[int, int] | None = None
    for b in candidates:
        f = block_walk_clusters(ids, b) * (b - 1)
        if best is None or f > best[1]:
            best = (b, f)
    assert best is not None
    return best


def entropy_oracle(block: Sequence[int], base: int) -> float:
    """Histogram entropy via natural logs (independent of the log2 route)."""
    n = len(block)
    freqs = Counter(block)
    return -sum((c / n) * math.log(c / n) for c in freqs.values()) / math.log(base)


def mean_entropy_oracle(ids: Sequence[int], b: int) -> float:
    """Full blocks summed, ceil(N/b) blocks in the denominator."""
    total = 0.0
    for start in range(0, len(ids) - b + 1, b):
        total += entropy_oracle(ids[start : start + b], b)
    return total / math.ceil(len(ids) / b)


def scan_oracle(encoded: EncodedColumn, interval: IdInterval) -> list[int]:
    """Decode-then-filter reference for scan_id_range."""
    return [i for i, v in enumerate(decode_array(encoded)) if interval.contains(v)]


def random_interval(rng: random.Random, max_id: int) -> IdInterval:
    def bound() -> int | None:
        return None if rng.random() < 0.2 else rng.randint(-1, max_id + 1)

    return IdInterval(
        lo=bound(),
        hi=bound(),
        lo_inclusive=rng.random() < 0.5,
        hi_inclusive=rng.random() < 0.5,
    )


def scheme_plans(
    rng: random.Random, ids: Sequence[int]
) -> list[tuple[SchemeKind, int | None]]:
    """Every scheme applicable to this column, with seeded block sizes."""
    n = len(ids)
    candidates = candidate_sizes_oracle(n) or [2]
    plans: list[tuple[SchemeKind, int | None]] = [
        (SchemeKind.RAW, None),
        (SchemeKind.PREFIX, None),
        (SchemeKind.RLE, None),
        (SchemeKind.SPARSE, None),
        (SchemeKind.CLUSTER, rng.choice(candidates)),
        (SchemeKind.INDIRECT, rng.choice(candidates)),
    ]
    if is_sequential(ids):
        plans.append((SchemeKind.AFFINE, None))
    return plans
