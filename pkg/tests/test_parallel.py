from __future__ import annotations

import os

import numpy as np

from stereopipe.parallel import WorkerPool, resolve_workers
from stereopipe.synthetic import random_texture, synthetic_shifted_pair


def test_non_positive_requests_use_every_cpu() -> None:
    expected = max(1, os.cpu_count() or 1)
    assert resolve_workers(None) == expected
    assert resolve_workers(0) == expected
    assert resolve_workers(3) == 3


def test_bands_cover_the_range_contiguously() -> None:
    with WorkerPool(4) as pool:
        assert pool.bands(10) == [(0, 3), (3, 6), (6, 8), (8, 10)]
        assert pool.bands(2) == [(0, 1), (1, 2)]


def test_run_bands_visits_every_index_once() -> None:
    seen = np.zeros(37, dtype=np.int64)

    def mark(start: int, stop: int) -> None:
        seen[start:stop] += 1

    with WorkerPool(5) as pool:
        pool.run_bands(mark, 37)
    assert (seen == 1).all()


def test_synthetic_pair_has_constant_disparity() -> None:
    left, right = synthetic_shifted_pair(20, 6, 3, seed=1)
    np.testing.assert_array_equal(left.data[:, 3:], right.data[:, :-3])


def test_block_texture_repeats_samples() -> None:
    texture = random_texture(7, 5, seed=2, block=2)
    assert texture.shape == (5, 7)
    assert (texture[0, 0] == texture[1, 1]) and (texture[2, 2] == texture[3, 3])
