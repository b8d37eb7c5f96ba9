"""Per-scheme encoders/decoders, size accounting and interval scans."""

from __future__ import annotations

import random

import numpy as np
import pytest

import support
from colcodec import (
    COUNT_BITS,
    DirectBlock,
    EmptyColumnError,
    IdInterval,
    IndirectBlock,
    InvalidBlockSizeError,
    NotAffineError,
    SchemeKind,
    ValueIdArray,
    decode_array,
    encode_array,
    encoded_size_bits,
    encoded_size_breakdown,
    id_width_bits,
    scan_id_range,
)
from colcodec.encodings import (
    decode_affine,
    decode_cluster,
    decode_indirect,
    decode_prefix,
    decode_rle,
    decode_sparse,
    encode_affine,
    encode_cluster,
    encode_indirect,
    encode_prefix,
    encode_rle,
    encode_sparse,
)


def test_prefix_captures_leading_run():
    e = encode_prefix([4, 4, 4, 7, 7, 2])
    assert (e.prefix_id, e.prefix_count, e.rest) == (4, 3, [7, 7, 2])
    assert decode_prefix(e) == [4, 4, 4, 7, 7, 2]


def test_prefix_of_constant_column_swallows_everything():
    e = encode_prefix([5, 5])
    assert (e.prefix_id, e.prefix_count, e.rest) == (5, 2, [])


def test_prefix_rest_never_restarts_the_run():
    rng = random.Random(1)
    for _ in range(100):
        ids = [rng.randint(0, 3) for _ in range(rng.randint(1, 30))]
        e = encode_prefix(ids)
        assert e.prefix_count >= 1
        assert not e.rest or e.rest[0] != e.prefix_id


def test_rle_runs_are_maximal():
    e = encode_rle([0, 0, 1, 2, 2, 2])
    assert e.runs == [(0, 2), (1, 1), (2, 3)]
    assert decode_rle(e) == [0, 0, 1, 2, 2, 2]


def test_sparse_drops_the_dominant_id():
    e = encode_sparse([9, 9, 3, 9, 5])
    assert e.dominant_id == 9
    assert e.positions.bits == [True, True, False, True, False]
    assert e.residual == [3, 5]
    assert decode_sparse(e) == [9, 9, 3, 9, 5]


def test_sparse_frequency_tie_picks_smallest_id():
    assert encode_sparse([2, 1]).dominant_id == 1
    assert encode_sparse([5, 5, 3, 3]).dominant_id == 3


def test_sparse_popcount_accounts_for_every_row():
    rng = np.random.default_rng(5)
    for _ in range(50):
        ids = list(rng.integers(0, 4, size=int(rng.integers(1, 80))))
        e = encode_sparse([int(i) for i in ids])
        assert e.positions.popcount() + len(e.residual) == len(ids)
        assert e.dominant_id not in e.residual


def test_cluster_separates_single_valued_blocks():
    e = encode_cluster([1, 1, 2, 3, 3, 3], 2)
    assert e.flags.bits == [True, False, True]
    assert e.singles == [1, 3]
    assert e.uncompressed == [2, 3]
    assert decode_cluster(e) == [1, 1, 2, 3, 3, 3]


def test_cluster_trailing_partial_block_is_never_flagged():
    # last block [7] is single-valued but shorter than b, so it stays raw
    e = encode_cluster([7, 7, 7], 2)
    assert e.flags.bits == [True, False]
    assert e.singles == [7]
    assert e.uncompressed == [7]

    e = encode_cluster([4, 4, 4, 4, 4], 4)
    assert e.flags.bits == [True, False]
    assert decode_cluster(e) == [4] * 5


def test_cluster_rejects_bad_block_sizes():
    for b in (0, 1, 3, 6):
        with pytest.raises(InvalidBlockSizeError):
            encode_cluster([0, 0], b)


def test_indirect_block_goes_local_when_strictly_cheaper():
    # W=4, b=4, k=2: 2*4 + 4*1 = 12 < 16
    e = encode_indirect([0, 0, 1, 1], 4, 4)
    (block,) = e.blocks
    assert isinstance(block, IndirectBlock)
    assert block.local_dictionary == [0, 1]
    assert block.local_ids == [0, 0, 1, 1]
    assert decode_indirect(e) == [0, 0, 1, 1]


def test_indirect_all_distinct_block_stays_direct():
    # W=4, b=4, k=4: 4*4 + 4*2 = 24 > 16
    e = encode_indirect([5, 6, 7, 8], 4, 4)
    (block,) = e.blocks
    assert isinstance(block, DirectBlock)
    assert block.ids == [5, 6, 7, 8]


def test_indirect_cost_tie_stays_direct():
    # W=4, b=8, k=4: 4*4 + 8*2 = 32 == 8*4, not a strict win
    e = encode_indirect([0, 1, 2, 3, 0, 1, 2, 3], 8, 4)
    (block,) = e.blocks
    assert isinstance(block, DirectBlock)


def test_indirect_partial_tail_uses_actual_length():
    # tail [9, 9]: k=1, cost 1*4 + 2*1 = 6 < 2*4 = 8
    e = encode_indirect([0, 1, 2, 3, 9, 9], 4, 4)
    direct, tail = e.blocks
    assert isinstance(direct, DirectBlock)
    assert isinstance(tail, IndirectBlock)
    assert tail.local_dictionary == [9]
    assert decode_indirect(e) == [0, 1, 2, 3, 9, 9]


def test_indirect_local_dictionary_is_sorted_ascending():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 120))
        ids = [int(i) for i in rng.integers(0, 9, size=n)]
        e = encode_indirect(ids, 8, id_width_bits(9))
        for block in e.blocks:
            if isinstance(block, IndirectBlock):
                d = block.local_dictionary
                assert all(a < b for a, b in zip(d, d[1:]))
                assert all(0 <= i < len(d) for i in block.local_ids)
        assert decode_indirect(e) == ids


def test_affine_ascending_and_descending():
    up = encode_affine([3, 4, 5, 6])
    assert (up.start_id, up.step, up.length) == (3, 1, 4)
    assert decode_affine(up) == [3, 4, 5, 6]

    down = encode_affine([6, 5, 4])
    assert (down.start_id, down.step, down.length) == (6, -1, 3)
    assert decode_affine(down) == [6, 5, 4]


def test_affine_rejects_broken_progressions():
    with pytest.raises(NotAffineError):
        encode_affine([1, 2, 4])
    with pytest.raises(NotAffineError):
        encode_affine([1, 1])
    with pytest.raises(NotAffineError):
        encode_affine([7])
    with pytest.raises(NotAffineError):
        encode_affine([])


def test_every_scheme_round_trips_on_seeded_columns():
    rng = np.random.default_rng(23)
    plan_rng = random.Random(23)
    for family in support.FAMILIES:
        for _ in range(30):
            n = int(rng.integers(1, 160))
            if family == "sequential":
                n = max(n, 2)
            ids = support.family_column(rng, family, n)
            array = support.make_array(ids)
            for scheme, block in support.scheme_plans(plan_rng, ids):
                encoded = encode_array(array, scheme, block_size=block)
                assert encoded.scheme is scheme
                assert decode_array(encoded) == ids


def test_empty_input_is_rejected_everywhere():
    empty = ValueIdArray(ids=[], id_width_bits=1)
    for scheme in SchemeKind:
        block = 2 if scheme in (SchemeKind.CLUSTER, SchemeKind.INDIRECT) else None
        with pytest.raises((EmptyColumnError, NotAffineError)):
            encode_array(empty, scheme, block_size=block)


def test_raw_size_is_width_times_rows():
    array = ValueIdArray(ids=[1, 0, 2, 1], id_width_bits=3)
    e = encode_array(array, SchemeKind.RAW)
    assert encoded_size_breakdown(e) == {"ids": 12}
    assert encoded_size_bits(e) == 12


def test_cluster_size_matches_flag_plus_payload_formula():
    array = ValueIdArray(ids=[1, 1, 2, 3, 3, 3], id_width_bits=2)
    e = encode_array(array, SchemeKind.CLUSTER, block_size=2)
    assert encoded_size_breakdown(e) == {"flags": 3, "id_payload": 8}
    assert encoded_size_bits(e) == 11


def test_cluster_breakdown_against_block_walk():
    rng = np.random.default_rng(31)
    for _ in range(60):
        n = int(rng.integers(1, 400))
        ids = support.family_column(rng, "zipf", n)
        w = id_width_bits(max(ids) + 1)
        array = ValueIdArray(ids=ids, id_width_bits=w)
        for b in (2, 4, 8, 16):
            e = encode_array(array, SchemeKind.CLUSTER, block_size=b)
            s = support.block_walk_clusters(ids, b)
            breakdown = encoded_size_breakdown(e)
            assert breakdown["flags"] == -(-n // b)
            assert breakdown["id_payload"] == (n - s * (b - 1)) * w


def test_affine_size_is_width_plus_step_bit():
    array = ValueIdArray(ids=[3, 4, 5], id_width_bits=5)
    e = encode_array(array, SchemeKind.AFFINE)
    assert encoded_size_breakdown(e) == {"start_id": 5, "step": 1}


def test_prefix_and_rle_breakdowns_count_their_fields():
    array = ValueIdArray(ids=[4, 4, 4, 7, 7, 2], id_width_bits=3)
    p = encode_array(array, SchemeKind.PREFIX)
    assert encoded_size_breakdown(p) == {
        "prefix_count": COUNT_BITS,
        "prefix_id": 3,
        "rest": 9,
    }
    r = encode_array(ValueIdArray(ids=[0, 0, 1, 2, 2, 2], id_width_bits=2), SchemeKind.RLE)
    assert encoded_size_breakdown(r) == {
        "run_count": COUNT_BITS,
        "run_lengths": 3 * COUNT_BITS,
        "run_values": 6,
    }


def test_sparse_breakdown_counts_positions_and_residual():
    array = ValueIdArray(ids=[9, 9, 3, 9, 5], id_width_bits=4)
    e = encode_array(array, SchemeKind.SPARSE)
    assert encoded_size_breakdown(e) == {
        "dominant_id": 4,
        "positions": 5,
        "residual": 8,
    }


def test_indirect_breakdown_recomputes_per_block_costs():
    rng = np.random.default_rng(37)
    for _ in range(40):
        n = int(rng.integers(1, 300))
        ids = support.family_column(rng, "uniform16", n)
        w = id_width_bits(max(ids) + 1)
        array = ValueIdArray(ids=ids, id_width_bits=w)
        e = encode_array(array, SchemeKind.INDIRECT, block_size=8)
        breakdown = encoded_size_breakdown(e)

        blocks = e.payload.blocks
        indirect = [b for b in blocks if isinstance(b, IndirectBlock)]
        local_dict_bits = sum(len(b.local_dictionary) * w for b in indirect)
        payload = 0
        for block in blocks:
            if isinstance(block, DirectBlock):
                payload += len(block.ids) * w
            else:
                lw = max(1, (len(block.local_dictionary) - 1).bit_length())
                payload += len(block.local_ids) * lw

        assert breakdown["indirect_count"] == COUNT_BITS
        assert breakdown["local_dict_counts"] == len(indirect) * COUNT_BITS
        assert breakdown["block_tags"] == len(blocks)
        assert breakdown["local_dicts"] == local_dict_bits
        assert breakdown["block_payload"] == payload


def test_indirect_blocks_only_local_when_strictly_smaller():
    rng = np.random.default_rng(41)
    for _ in range(40):
        n = int(rng.integers(1, 300))
        ids = support.family_column(rng, "zipf", n)
        w = id_width_bits(max(ids) + 1)
        array = ValueIdArray(ids=ids, id_width_bits=w)
        e = encode_array(array, SchemeKind.INDIRECT, block_size=16)
        for block in e.payload.blocks:
            if isinstance(block, IndirectBlock):
                k = len(block.local_dictionary)
                b_eff = len(block.local_ids)
                lw = max(1, (k - 1).bit_length())
                assert k * w + b_eff * lw < b_eff * w
            else:
                b_eff = len(block.ids)
                k = len(set(block.ids))
                lw = max(1, (k - 1).bit_length())
                assert k * w + b_eff * lw >= b_eff * w


def test_scan_rle_fixture():
    array = ValueIdArray(ids=[0, 0, 1, 2, 2, 2], id_width_bits=2)
    e = encode_array(array, SchemeKind.RLE)
    rows = scan_id_range(e, IdInterval(lo=1, hi=2))
    assert rows == [2, 3, 4, 5]


def test_scan_affine_solves_arithmetically():
    up = encode_affine([10, 11, 12, 13, 14])
    e = encode_array(ValueIdArray(ids=[10, 11, 12, 13, 14], id_width_bits=4), SchemeKind.AFFINE)
    assert decode_affine(up) == decode_array(e)
    assert scan_id_range(e, IdInterval(lo=12, hi=13)) == [2, 3]

    down = encode_array(ValueIdArray(ids=[9, 8, 7], id_width_bits=4), SchemeKind.AFFINE)
    assert scan_id_range(down, IdInterval(lo=8)) == [0, 1]


def test_scan_empty_and_unbounded_intervals():
    array = ValueIdArray(ids=[2, 0, 1, 2], id_width_bits=2)
    e = encode_array(array, SchemeKind.RAW)
    assert scan_id_range(e, IdInterval.empty()) == []
    assert scan_id_range(e, IdInterval()) == [0, 1, 2, 3]


def test_scan_matches_decode_then_filter_everywhere():
    rng = np.random.default_rng(47)
    interval_rng = random.Random(47)
    plan_rng = random.Random(48)
    for family in support.FAMILIES:
        for _ in range(20):
            n = int(rng.integers(1, 120))
            if family == "sequential":
                n = max(n, 2)
            ids = support.family_column(rng, family, n)
            array = support.make_array(ids)
            for scheme, block in support.scheme_plans(plan_rng, ids):
                e = encode_array(array, scheme, block_size=block)
                for _ in range(4):
                    interval = support.random_interval(interval_rng, max(ids))
                    assert scan_id_range(e, interval) == support.scan_oracle(e, interval)


def test_scan_rows_are_strictly_increasing():
    rng = np.random.default_rng(53)
    plan_rng = random.Random(53)
    ids = support.family_column(rng, "zipf", 200)
    array = support.make_array(ids)
    for scheme, block in support.scheme_plans(plan_rng, ids):
        e = encode_array(array, scheme, block_size=block)
        rows = scan_id_range(e, IdInterval(lo=0, hi=1))
        assert all(a < b for a, b in zip(rows, rows[1:]))
