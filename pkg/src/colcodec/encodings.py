"""Compression schemes for value-ID arrays.

Six encoded forms plus raw storage:

* prefix   -- leading run stored once as (id, count), remainder verbatim
* rle      -- maximal (id, count) runs
* sparse   -- dominant ID dropped; presence bit vector plus residual IDs
* cluster  -- fixed-size blocks; full single-valued blocks stored as one ID,
              a flag bit per block says which
* indirect -- per-block local dictionaries remap global IDs to narrower
              local IDs where that pays off
* affine   -- strictly sequential IDs stored as (start, step)

Logical sizes are tracked in bits: every stored ID costs the dictionary ID
width, indirect local IDs cost their local width, counts and lengths cost 64
bits, bit vectors cost one bit per entry. ``encoded_size_breakdown`` exposes
the per-component terms; ``encoded_size_bits`` is their sum.

``scan_id_range`` finds the row positions whose ID falls in an interval
without materializing the whole array: runs and single-valued blocks are
accepted or skipped wholesale, affine positions are solved arithmetically,
and indirect blocks are tested through their local dictionaries.
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from collections import Counter
from dataclasses import dataclass
from itertools import groupby
from typing import Callable, Sequence, Union

from .dictionary import IdInterval, ValueIdArray, id_width_bits
from .errors import EmptyColumnError, InvalidBlockSizeError, NotAffineError

__all__ = [
    "SchemeKind",
    "BitVector",
    "PrefixEncoded",
    "RleEncoded",
    "SparseEncoded",
    "ClusterEncoded",
    "DirectBlock",
    "IndirectBlock",
    "IndirectEncoded",
    "AffineEncoded",
    "EncodedColumn",
    "COUNT_BITS",
    "check_block_size",
    "encode_prefix",
    "decode_prefix",
    "encode_rle",
    "decode_rle",
    "encode_sparse",
    "decode_sparse",
    "encode_cluster",
    "decode_cluster",
    "encode_indirect",
    "decode_indirect",
    "encode_affine",
    "decode_affine",
    "encode_array",
    "decode_array",
    "encoded_size_bits",
    "encoded_size_breakdown",
    "scan_id_range",
]

# Fixed width charged for every count/length field in size accounting.
COUNT_BITS = 64


class SchemeKind(enum.Enum):
    RAW = "raw"
    PREFIX = "prefix"
    RLE = "rle"
    SPARSE = "sparse"
    CLUSTER = "cluster"
    INDIRECT = "indirect"
    AFFINE = "affine"


def check_block_size(block_size: int) -> None:
    if block_size < 2 or block_size & (block_size - 1):
        raise InvalidBlockSizeError(
            f"block size must be a power of two >= 2, got {block_size}"
        )


@dataclass(frozen=True)
class BitVector:
    """Plain bit sequence; index order is row/block order."""

    bits: list[bool]

    def __len__(self) -> int:
        return len(self.bits)

    def popcount(self) -> int:
        return sum(self.bits)


@dataclass(frozen=True)
class PrefixEncoded:
    prefix_id: int
    prefix_count: int
    rest: list[int]


@dataclass(frozen=True)
class RleEncoded:
    runs: list[tuple[int, int]]


@dataclass(frozen=True)
class SparseEncoded:
    dominant_id: int
    positions: BitVector  # one bit per row, set where the dominant ID occurs
    residual: list[int]  # the other rows' IDs, in row order


@dataclass(frozen=True)
class ClusterEncoded:
    block_size: int
    flags: BitVector  # one bit per block, set = single-valued full block
    singles: list[int]  # one ID per flagged block, in block order
    uncompressed: list[int]  # the unflagged blocks' IDs, in row order
    length: int


@dataclass(frozen=True)
class DirectBlock:
    ids: list[int]


@dataclass(frozen=True)
class IndirectBlock:
    local_dictionary: list[int]  # ascending distinct global IDs of the block
    local_ids: list[int]  # positions into local_dictionary


@dataclass(frozen=True)
class IndirectEncoded:
    block_size: int
    blocks: list[Union[DirectBlock, IndirectBlock]]
    length: int


@dataclass(frozen=True)
class AffineEncoded:
    start_id: int
    step: int  # +1 or -1
    length: int


Payload = Union[
    ValueIdArray,
    PrefixEncoded,
    RleEncoded,
    SparseEncoded,
    ClusterEncoded,
    IndirectEncoded,
    AffineEncoded,
]

_PAYLOAD_KIND: dict[type, SchemeKind] = {
    ValueIdArray: SchemeKind.RAW,
    PrefixEncoded: SchemeKind.PREFIX,
    RleEncoded: SchemeKind.RLE,
    SparseEncoded: SchemeKind.SPARSE,
    ClusterEncoded: SchemeKind.CLUSTER,
    IndirectEncoded: SchemeKind.INDIRECT,
    AffineEncoded: SchemeKind.AFFINE,
}


@dataclass(frozen=True)
class EncodedColumn:
    """One encoded column body plus the context shared by all schemes."""

    payload: Payload
    id_width_bits: int
    length: int

    @property
    def scheme(self) -> SchemeKind:
        return _PAYLOAD_KIND[type(self.payload)]


def _require_rows(ids: Sequence[int]) -> None:
    if not len(ids):
        raise EmptyColumnError("cannot encode an empty column")


def encode_prefix(ids: Sequence[int]) -> PrefixEncoded:
    """Capture the literal leading run; the remainder is stored verbatim."""
    _require_rows(ids)
    first = ids[0]
    count = 1
    n = len(ids)
    while count < n and ids[count] == first:
        count += 1
    return PrefixEncoded(prefix_id=first, prefix_count=count, rest=list(ids[count:]))


def decode_prefix(encoded: PrefixEncoded) -> list[int]:
    return [encoded.prefix_id] * encoded.prefix_count + list(encoded.rest)


def encode_rle(ids: Sequence[int]) -> RleEncoded:
    _require_rows(ids)
    return RleEncoded(runs=[(v, len(list(g))) for v, g in groupby(ids)])


def decode_rle(encoded: RleEncoded) -> list[int]:
    out: list[int] = []
    for value, count in encoded.runs:
        out.extend([value] * count)
    return out


def encode_sparse(ids: Sequence[int]) -> SparseEncoded:
    """Drop the most frequent ID; ties pick the smallest ID."""
    _require_rows(ids)
    freqs = Counter(ids)
    dominant = min(freqs, key=lambda v: (-freqs[v], v))
    return SparseEncoded(
        dominant_id=dominant,
        positions=BitVector([v == dominant for v in ids]),
        residual=[v for v in ids if v != dominant],
    )


def decode_sparse(encoded: SparseEncoded) -> list[int]:
    residual = iter(encoded.residual)
    return [
        encoded.dominant_id if present else next(residual)
        for present in encoded.positions.bits
    ]


def encode_cluster(ids: Sequence[int], block_size: int) -> ClusterEncoded:
    """Replace aligned single-valued full blocks with one ID each.

    A trailing short block (length not divisible by block_size) is never
    flagged, even when single-valued.
    """
    check_block_size(block_size)
    _require_rows(ids)
    n = len(ids)
    flags: list[bool] = []
    singles: list[int] = []
    uncompressed: list[int] = []
    for start in range(0, n, block_size):
        block = list(ids[start : start + block_size])
        if len(block) == block_size and block.count(block[0]) == block_size:
            flags.append(True)
            singles.append(block[0])
        else:
            flags.append(False)
            uncompressed.extend(block)
    return ClusterEncoded(
        block_size=block_size,
        flags=BitVector(flags),
        singles=singles,
        uncompressed=uncompressed,
        length=n,
    )


def decode_cluster(encoded: ClusterEncoded) -> list[int]:
    b = encoded.block_size
    n = encoded.length
    out: list[int] = []
    singles = iter(encoded.singles)
    cursor = 0  # position in the uncompressed stream
    for i, flag in enumerate(encoded.flags.bits):
        if flag:
            out.extend([next(singles)] * b)
        else:
            size = min(b, n - i * b)
            out.extend(encoded.uncompressed[cursor : cursor + size])
            cursor += size
    return out


def encode_indirect(
    ids: Sequence[int], block_size: int, global_width_bits: int
) -> IndirectEncoded:
    """Per block, remap to a local dictionary when that costs fewer bits.

    A block of k distinct IDs and b_eff rows goes Indirect iff
    k*W + b_eff*max(1, ceil(log2 k)) < b_eff*W with W = global_width_bits,
    strict, so Indirect never loses payload bits to Direct. The trailing
    short block uses its actual length and may go either way.
    """
    check_block_size(block_size)
    _require_rows(ids)
    blocks: list[Union[DirectBlock, IndirectBlock]] = []
    for start in range(0, len(ids), block_size):
        block = list(ids[start : start + block_size])
        local = sorted(set(block))
        k = len(local)
        b_eff = len(block)
        if k * global_width_bits + b_eff * id_width_bits(k) < b_eff * global_width_bits:
            index = {v: j for j, v in enumerate(local)}
            blocks.append(
                IndirectBlock(local_dictionary=local, local_ids=[index[v] for v in block])
            )
        else:
            blocks.append(DirectBlock(ids=block))
    return IndirectEncoded(block_size=block_size, blocks=blocks, length=len(ids))


def decode_indirect(encoded: IndirectEncoded) -> list[int]:
    out: list[int] = []
    for block in encoded.blocks:
        if isinstance(block, IndirectBlock):
            out.extend(block.local_dictionary[j] for j in block.local_ids)
        else:
            out.extend(block.ids)
    return out


def encode_affine(ids: Sequence[int]) -> AffineEncoded:
    """Store strictly sequential IDs (stride +1 or -1) as start and step."""
    n = len(ids)
    if n < 2:
        raise NotAffineError(f"affine encoding needs at least 2 rows, got {n}")
    step = ids[1] - ids[0]
    if step not in (1, -1):
        raise NotAffineError(f"stride between rows 0 and 1 is {step}, not +-1")
    for i in range(2, n):
        if ids[i] - ids[i - 1] != step:
            raise NotAffineError(f"stride breaks at row {i}")
    return AffineEncoded(start_id=ids[0], step=step, length=n)


def decode_affine(encoded: AffineEncoded) -> list[int]:
    start, step = encoded.start_id, encoded.step
    return list(range(start, start + step * encoded.length, step))


def encode_array(
    array: ValueIdArray, scheme: SchemeKind, block_size: int | None = None
) -> EncodedColumn:
    """Encode a value-ID array under one scheme."""
    ids = array.ids
    payload: Payload
    if scheme is SchemeKind.RAW:
        _require_rows(ids)
        payload = array
    elif scheme is SchemeKind.PREFIX:
        payload = encode_prefix(ids)
    elif scheme is SchemeKind.RLE:
        payload = encode_rle(ids)
    elif scheme is SchemeKind.SPARSE:
        payload = encode_sparse(ids)
    elif scheme is SchemeKind.CLUSTER:
        if block_size is None:
            raise ValueError("cluster encoding needs a block size")
        payload = encode_cluster(ids, block_size)
    elif scheme is SchemeKind.INDIRECT:
        if block_size is None:
            raise ValueError("indirect encoding needs a block size")
        payload = encode_indirect(ids, block_size, array.id_width_bits)
    elif scheme is SchemeKind.AFFINE:
        payload = encode_affine(ids)
    else:  # pragma: no cover - exhaustive over SchemeKind
        raise ValueError(f"unknown scheme {scheme!r}")
    return EncodedColumn(payload=payload, id_width_bits=array.id_width_bits, length=len(ids))


def decode_array(encoded: EncodedColumn) -> list[int]:
    """Recover the value-ID sequence. Inverse of encode_array."""
    p = encoded.payload
    if isinstance(p, ValueIdArray):
        return list(p.ids)
    if isinstance(p, PrefixEncoded):
        return decode_prefix(p)
    if isinstance(p, RleEncoded):
        return decode_rle(p)
    if isinstance(p, SparseEncoded):
        return decode_sparse(p)
    if isinstance(p, ClusterEncoded):
        return decode_cluster(p)
    if isinstance(p, IndirectEncoded):
        return decode_indirect(p)
    return decode_affine(p)


def encoded_size_breakdown(encoded: EncodedColumn) -> dict[str, int]:
    """Per-component logical size in bits; keys are stable per scheme."""
    w = encoded.id_width_bits
    p = encoded.payload
    if isinstance(p, ValueIdArray):
        return {"ids": len(p.ids) * w}
    if isinstance(p, PrefixEncoded):
        return {
            "prefix_count": COUNT_BITS,
            "prefix_id": w,
            "rest": len(p.rest) * w,
        }
    if isinstance(p, RleEncoded):
        r = len(p.runs)
        return {
            "run_count": COUNT_BITS,
            "run_lengths": r * COUNT_BITS,
            "run_values": r * w,
        }
    if isinstance(p, SparseEncoded):
        return {
            "dominant_id": w,
            "positions": len(p.positions),
            "residual": len(p.residual) * w,
        }
    if isinstance(p, ClusterEncoded):
        s = p.flags.popcount()
        return {
            "flags": len(p.flags),
            "id_payload": (p.length - s * (p.block_size - 1)) * w,
        }
    if isinstance(p, IndirectEncoded):
        indirect = [b for b in p.blocks if isinstance(b, IndirectBlock)]
        return {
            "indirect_count": COUNT_BITS,
            "local_dict_counts": len(indirect) * COUNT_BITS,
            "block_tags": len(p.blocks),
            "local_dicts": sum(len(b.local_dictionary) for b in indirect) * w,
            "block_payload": sum(
                len(b.local_ids) * id_width_bits(len(b.local_dictionary))
                if isinstance(b, IndirectBlock)
                else len(b.ids) * w
                for b in p.blocks
            ),
        }
    return {"start_id": w, "step": 1}


def encoded_size_bits(encoded: EncodedColumn) -> int:
    """Total logical payload size in bits (sum of the breakdown)."""
    return sum(encoded_size_breakdown(encoded).values())


def scan_id_range(encoded: EncodedColumn, interval: IdInterval) -> list[int]:
    """Row positions whose ID lies in the interval, ascending.

    Does not materialize the full array: runs, single-valued blocks and the
    affine form are resolved wholesale, indirect blocks through their local
    dictionaries.
    """
    norm = interval.normalize()
    if norm is None:
        return []
    lo, hi = norm

    def hit(v: int) -> bool:
        return (lo is None or v >= lo) and (hi is None or v <= hi)

    p = encoded.payload
    if isinstance(p, ValueIdArray):
        return [i for i, v in enumerate(p.ids) if hit(v)]
    if isinstance(p, PrefixEncoded):
        out = list(range(p.prefix_count)) if hit(p.prefix_id) else []
        out.extend(
            p.prefix_count + i for i, v in enumerate(p.rest) if hit(v)
        )
        return out
    if isinstance(p, RleEncoded):
        out = []
        pos = 0
        for value, count in p.runs:
            if hit(value):
                out.extend(range(pos, pos + count))
            pos += count
        return out
    if isinstance(p, SparseEncoded):
        return _scan_sparse(p, hit)
    if isinstance(p, ClusterEncoded):
        return _scan_cluster(p, hit)
    if isinstance(p, IndirectEncoded):
        return _scan_indirect(p, lo, hi)
    return _scan_affine(p, lo, hi)


def _scan_sparse(p: SparseEncoded, hit: Callable[[int], bool]) -> list[int]:
    dominant_hits = hit(p.dominant_id)
    residual = iter(p.residual)
    out = []
    for pos, present in enumerate(p.positions.bits):
        if present:
            if dominant_hits:
                out.append(pos)
        elif hit(next(residual)):
            out.append(pos)
    return out


def _scan_cluster(p: ClusterEncoded, hit: Callable[[int], bool]) -> list[int]:
    out: list[int] = []
    b = p.block_size
    single_at = 0
    cursor = 0
    for i, flag in enumerate(p.flags.bits):
        start = i * b
        if flag:
            if hit(p.singles[single_at]):
                out.extend(range(start, start + b))
            single_at += 1
        else:
            size = min(b, p.length - start)
            for offset in range(size):
                if hit(p.uncompressed[cursor + offset]):
                    out.append(start + offset)
            cursor += size
    return out


def _scan_indirect(p: IndirectEncoded, lo: int | None, hi: int | None) -> list[int]:
    out: list[int] = []
    start = 0
    for block in p.blocks:
        if isinstance(block, IndirectBlock):
            # The local dictionary is ascending, so the global interval maps
            # to a contiguous local-ID range.
            local = block.local_dictionary
            local_lo = 0 if lo is None else bisect_left(local, lo)
            local_hi = len(local) - 1 if hi is None else bisect_right(local, hi) - 1
            if local_lo <= local_hi:
                out.extend(
                    start + i
                    for i, j in enumerate(block.local_ids)
                    if local_lo <= j <= local_hi
                )
            start += len(block.local_ids)
        else:
            out.extend(
                start + i
                for i, v in enumerate(block.ids)
                if (lo is None or v >= lo) and (hi is None or v <= hi)
            )
            start += len(block.ids)
    return out


def _scan_affine(p: AffineEncoded, lo: int | None, hi: int | None) -> list[int]:
    n = p.length
    s = p.start_id
    if p.step == 1:  # id at row i is s + i
        row_lo = 0 if lo is None else max(0, lo - s)
        row_hi = n - 1 if hi is None else min(n - 1, hi - s)
    else:  # id at row i is s - i
        row_lo = 0 if hi is None else max(0, s - hi)
        row_hi = n - 1 if lo is None else min(n - 1, s - lo)
    if row_lo > row_hi:
        return []
    return list(range(row_lo, row_hi + 1))
