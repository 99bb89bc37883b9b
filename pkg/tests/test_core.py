import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tinybo.core import (
    Dataset,
    InvalidArgument,
    ObjectiveSpec,
    RngStream,
    Sample,
    clamp_to_box,
    latin_or_uniform_init,
)


@pytest.mark.parametrize(
    "x, expected",
    [([0.5, 0.5], [0.5, 0.5]), ([-0.2, 1.7], [0.0, 1.0]), ([1.0, 0.0], [1.0, 0.0])],
)
def test_clamp_to_box(x, expected):
    np.testing.assert_array_equal(clamp_to_box(x), expected)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=8))
def test_clamp_is_idempotent_and_in_box(x):
    c = clamp_to_box(x)
    assert np.all((c >= 0) & (c <= 1))
    np.testing.assert_array_equal(clamp_to_box(c), c)


def test_rng_stream_determinism_and_independence():
    a = RngStream(7, 3).generator().random(5)
    b = RngStream(7, 3).generator().random(5)
    c = RngStream(7, 4).generator().random(5)
    d = RngStream(7, 3).child(1).generator().random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_rng_stream_accepts_negative_and_huge_seeds():
    RngStream(-1).generator().random()
    RngStream(2**64 - 1).generator().random()
    with pytest.raises(InvalidArgument):
        RngStream(0, -1)


def test_init_single_point_in_box():
    pts = latin_or_uniform_init(3, 1, RngStream(123))
    assert len(pts) == 1
    assert np.all((pts[0] >= 0) & (pts[0] <= 1))


@pytest.mark.parametrize("strategy", ["uniform", "latin"])
def test_init_deterministic(strategy):
    a = latin_or_uniform_init(2, 10, RngStream(5, 1), strategy)
    b = latin_or_uniform_init(2, 10, RngStream(5, 1), strategy)
    assert all(np.array_equal(p, q) for p, q in zip(a, b))


def test_init_uniform_mean():
    # uniform law: mean 0.5, sd of the mean sqrt(1/12/1000) ~ 0.009
    pts = np.array(latin_or_uniform_init(1, 1000, RngStream(2024)))
    assert abs(pts.mean() - 0.5) <= 0.05


def test_latin_hypercube_strata():
    pts = np.array(latin_or_uniform_init(3, 20, RngStream(9), "latin"))
    for j in range(3):
        assert sorted(np.floor(pts[:, j] * 20).astype(int)) == list(range(20))


def test_init_rejects_zero_and_unknown_strategy():
    with pytest.raises(InvalidArgument):
        latin_or_uniform_init(2, 0, RngStream(0))
    with pytest.raises(InvalidArgument):
        latin_or_uniform_init(2, 3, RngStream(0), "sobol")


def test_init_accepts_objective_spec():
    spec = ObjectiveSpec(4, 1, lambda x: x.sum())
    assert latin_or_uniform_init(spec, 2, RngStream(0))[0].shape == (4,)


def test_objective_spec_validation():
    with pytest.raises(InvalidArgument):
        ObjectiveSpec(0, 1, lambda x: 0.0)
    spec = ObjectiveSpec(2, 2, lambda x: [1.0])
    with pytest.raises(InvalidArgument):
        spec(np.zeros(2))
    np.testing.assert_array_equal(ObjectiveSpec(2, 1, lambda x: 3.0)(np.zeros(2)), [3.0])


def test_dataset_append_preserves_samples():
    ds = Dataset(dim_in=2)
    ds1 = ds.append([0.1, 0.2], 1.0)
    ds2 = ds1.append([0.3, 0.4], 2.0)
    assert len(ds) == 0 and len(ds1) == 1 and len(ds2) == 2
    assert ds2.samples[0] == ds1.samples[0]
    assert ds2.samples[1] == Sample(np.array([0.3, 0.4]), np.array([2.0]))
    np.testing.assert_array_equal(ds2.y, [1.0, 2.0])


def test_dataset_is_read_only_and_checks_shapes():
    ds = Dataset([[0.5]], [1.0])
    with pytest.raises(ValueError):
        ds.X[0, 0] = 0.2
    with pytest.raises(InvalidArgument):
        ds.append([0.1, 0.2], 1.0)
    with pytest.raises(InvalidArgument):
        Dataset([[1.5]], [0.0])
    with pytest.raises(InvalidArgument):
        Dataset()


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(-10, 10)), min_size=1, max_size=10))
def test_dataset_roundtrip_from_samples(rows):
    ds = Dataset([[x] for x, _ in rows], [y for _, y in rows])
    assert Dataset.from_samples(ds.samples) == ds
