import itertools
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infotop import _kernels
from infotop._kernels import python_backend

compiled = _kernels.compiled_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="extension not built")


def brute_min(masks, full):
    for r in range(len(masks) + 1):
        for combo in itertools.combinations(range(len(masks)), r):
            acc = 0
            for j in combo:
                acc |= masks[j]
            if acc & full == full:
                return r
    return None


problems = st.integers(min_value=1, max_value=10).flatmap(
    lambda nbits: st.tuples(
        st.lists(st.integers(min_value=0, max_value=(1 << nbits) - 1), min_size=0, max_size=9),
        st.just((1 << nbits) - 1),
    )
)


@settings(max_examples=200, deadline=None)
@given(problems)
def test_python_kernel_is_minimal(prob):
    masks, full = prob
    got = python_backend.min_set_cover(masks, full)
    want = brute_min(masks, full)
    if want is None:
        assert got is None
    else:
        assert len(got) == want
        acc = 0
        for j in got:
            acc |= masks[j]
        assert acc & full == full


@needs_compiled
@settings(max_examples=300, deadline=None)
@given(problems)
def test_backends_agree_on_min_cover(prob):
    masks, full = prob
    assert compiled.min_set_cover(masks, full) == python_backend.min_set_cover(masks, full)


@needs_compiled
@settings(max_examples=100, deadline=None)
@given(problems)
def test_backends_agree_on_covering_subsets(prob):
    masks, full = prob
    assert compiled.covering_subsets(masks, full) == python_backend.covering_subsets(masks, full)


@needs_compiled
def test_wide_masks_beyond_one_word():
    # 130 cells: spans three 64-bit words in the compiled core
    full = (1 << 130) - 1
    masks = [((1 << 65) - 1), ((1 << 130) - 1) ^ ((1 << 65) - 1), 1 << 129, (1 << 70) - 1]
    assert compiled.min_set_cover(masks, full) == python_backend.min_set_cover(masks, full) == [1, 3]


def test_edge_cases():
    for be in filter(None, (python_backend, compiled)):
        assert be.min_set_cover([], 0) == []
        assert be.min_set_cover([1], 3) is None
        assert be.covering_subsets([], 0) == [0]


def test_env_forces_python():
    env = dict(os.environ, INFOTOP_PURE_PYTHON="1")
    r = subprocess.run(
        [sys.executable, "-c", "from infotop import _kernels; print(_kernels.BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
    )
    assert r.stdout.strip() == "python"
