import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_depth, naive_count
from switchcode.repeats import max_repeat_length


@pytest.mark.parametrize("z, depth, witness", [(b"abab", 2, b"ab"), (b"aaaa", 3, b"aaa"), (b"abc", 0, b""), (b"", 0, b""), (b"a", 0, b"")])
def test_examples(z, depth, witness):
    result = max_repeat_length(z)
    assert result.depth == depth
    assert bytes(result.witness) == witness


def _check(z, method):
    result = max_repeat_length(z, method=method)
    assert result.depth == brute_depth(z)
    if result.depth:
        assert naive_count(result.witness, z) >= 2
        assert tuple(z[result.offset : result.offset + result.depth]) == result.witness


@pytest.mark.parametrize("method", ["automaton", "doubling"])
def test_oracle_random_and_adversarial(method):
    rng = random.Random(1)
    cases = [[0] * 300, [0, 1] * 150, [0, 1, 2] * 100 + [3], list(range(200))]
    cases += [[rng.randrange(D) for _ in range(rng.randrange(0, 500))] for D in (2, 3, 4, 26) for _ in range(10)]
    for z in cases:
        _check(z, method)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), max_size=60))
def test_monotone_in_prefix(z):
    depths = [max_repeat_length(z[:n]).depth for n in range(len(z) + 1)]
    assert depths == sorted(depths)
    assert max_repeat_length(z, "doubling").depth == depths[-1]


def test_random_bytes_depth_is_small():
    z = np.random.default_rng(0).integers(0, 256, size=10**6)
    result = max_repeat_length(z)
    assert 2 <= result.depth <= 9
    w = np.array(result.witness)
    windows = np.lib.stride_tricks.sliding_window_view(z, result.depth)
    assert (windows == w).all(axis=1).sum() >= 2
    # no repeat one longer: check through the unique-row count of the windows
    longer = np.lib.stride_tricks.sliding_window_view(z, result.depth + 1)
    assert len(np.unique(longer, axis=0)) == len(longer)
