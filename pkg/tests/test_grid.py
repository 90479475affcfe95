import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sf2d import Field2D, LagRangeError, ParameterError, increment_moments, lowpass

from conftest import checkerboard


def test_constant_field_has_zero_moments():
    ms = increment_moments(Field2D(np.full((10, 12), 5.0)), (3, 2))
    assert ms.count == (12 - 3) * (10 - 2)
    assert (ms.mean, ms.m2, ms.m3, ms.m4) == (0.0, 0.0, 0.0, 0.0)


def test_zero_lag(rng):
    ms = increment_moments(Field2D(rng.normal(size=(9, 7))), (0, 0))
    assert ms.count == 63
    assert (ms.mean, ms.m2, ms.m3, ms.m4) == (0.0, 0.0, 0.0, 0.0)


def test_checkerboard_two_point_distribution():
    ms = increment_moments(checkerboard(8), (1, 0))
    assert ms.count == 7 * 8
    assert ms.mean == 0.0
    assert ms.m2 == 4.0
    assert ms.m3 == 0.0
    assert ms.m4 == 16.0


def test_lag_out_of_range():
    f = Field2D(np.zeros((4, 6)))
    with pytest.raises(LagRangeError):
        increment_moments(f, (6, 0))
    with pytest.raises(LagRangeError):
        increment_moments(f, (0, -4))
    increment_moments(f, (-5, 3))


def test_no_valid_pairs_gives_undefined_moments():
    values = np.arange(16.0).reshape(4, 4)
    mask = np.zeros((4, 4), bool)
    mask[0, 0] = True
    ms = increment_moments(Field2D(values, 1.0, mask), (1, 0))
    assert ms.count == 0
    assert all(math.isnan(v) for v in ms[1:])


def test_masked_pairs_are_dropped():
    values = np.array([[0.0, 1.0, 3.0, 6.0]] * 2)
    mask = np.ones_like(values, bool)
    mask[:, 2] = False
    ms = increment_moments(Field2D(values, 1.0, mask), (1, 0))
    # only the pairs (0 -> 1) survive in each row
    assert ms.count == 2
    assert ms.mean == 1.0 and ms.m2 == 0.0


def test_field_validation():
    with pytest.raises(ParameterError):
        Field2D(np.zeros(5))
    with pytest.raises(ParameterError):
        Field2D(np.zeros((1, 5)))
    with pytest.raises(ParameterError):
        Field2D(np.zeros((3, 3)), pixel_size=0.0)
    with pytest.raises(ParameterError):
        Field2D(np.zeros((3, 3)), pixel_size=math.inf)
    with pytest.raises(ParameterError):
        Field2D(np.array([[0.0, np.nan], [0.0, 0.0]]), 1.0, np.ones((2, 2), bool))
    f = Field2D(np.array([[0.0, np.nan], [1.0, 2.0]]))
    assert f.n_valid == 3
    assert not f.values.flags.writeable


# --- invariants --------------------------------------------------------------

small_fields = st.integers(3, 9).flatmap(
    lambda n: st.tuples(
        arrays(np.int64, (n, n + 1), elements=st.integers(-64, 64)),
        arrays(np.bool_, (n, n + 1), elements=st.booleans()),
        st.integers(-(n - 1), n - 1),
        st.integers(-(n - 1), n - 1),
    )
)


@settings(max_examples=60, deadline=None)
@given(small_fields)
def test_counts_equal_for_opposite_lags(data):
    ints, mask, lx, ly = data
    f = Field2D(ints / 8.0, 1.0, mask)
    assert increment_moments(f, (lx, ly)).count == increment_moments(f, (-lx, -ly)).count


@settings(max_examples=60, deadline=None)
@given(small_fields, st.integers(-1000, 1000))
def test_adding_a_constant_leaves_moments_unchanged(data, b):
    # dyadic values keep every increment exact, so equality is exact
    ints, mask, lx, ly = data
    f = Field2D(ints / 8.0, 1.0, mask)
    g = f.map_values(1.0, float(b))
    a, c = increment_moments(f, (lx, ly)), increment_moments(g, (lx, ly))
    np.testing.assert_array_equal(np.array(a[:5]), np.array(c[:5]))


@settings(max_examples=60, deadline=None)
@given(small_fields, st.floats(0.1, 10.0))
def test_scaling(data, a):
    ints, mask, lx, ly = data
    f = Field2D(ints / 8.0 + 0.3, 1.0, mask)
    ref = increment_moments(f, (lx, ly))
    got = increment_moments(f.map_values(a), (lx, ly))
    if ref.count == 0:
        return
    for k, p in (("mean", 1), ("m2", 2), ("m3", 3), ("m4", 4)):
        want = getattr(ref, k) * a**p
        scale = (ref.m2 ** (p / 2) if ref.m2 > 0 else 1.0) * a**p
        assert abs(getattr(got, k) - want) <= 1e-12 * max(abs(want), scale)


def test_bit_reproducible(rng):
    f = Field2D(rng.normal(size=(80, 70)) * 1e3 + 17.0, 1.0, rng.random((80, 70)) > 0.2)
    a = increment_moments(f, (7, -3))
    b = increment_moments(f, (7, -3))
    assert np.array(a).tobytes() == np.array(b).tobytes()


# --- low-pass ----------------------------------------------------------------


def box_filter_1d(signal, side):
    """Brute-force centered box average with half-sample symmetric edges."""
    n = len(signal)
    half = side // 2
    out = []
    for i in range(n):
        acc = 0.0
        for j in range(i - half, i + half + 1):
            k = j
            while k < 0 or k >= n:
                k = -k - 1 if k < 0 else 2 * n - k - 1
            acc += signal[k]
        out.append(acc / side)
    return np.array(out)


def test_lowpass_constant_field():
    f = Field2D(np.full((30, 40), 3.25), 50.0)
    out = lowpass(f, 200.0)
    assert out.shape == f.shape and out.mask.all()
    np.testing.assert_allclose(out.values, 3.25, rtol=1e-14)


def test_lowpass_window_is_odd_forced():
    # 200 m at 50 m/px gives 4 px, bumped to 5; compare against the 1D oracle
    x = np.arange(64)
    row = np.sin(2 * np.pi * x / 7.0) + 0.01 * x
    f = Field2D(np.tile(row, (12, 1)), 50.0)
    out = lowpass(f, 200.0)
    np.testing.assert_allclose(out.values[5], box_filter_1d(row, 5), atol=1e-12)


def test_lowpass_removes_sinusoid_at_window_wavelength():
    side = 5
    x = np.arange(120)
    row = np.sin(2 * np.pi * x / side)
    oracle = box_filter_1d(row, side)
    f = Field2D(np.tile(row, (20, 1)), 10.0)
    out = lowpass(f, side * 10.0)
    np.testing.assert_allclose(out.values[10], oracle, atol=1e-12)
    interior = slice(side, -side)
    assert np.abs(oracle[interior]).max() < 0.05 * np.abs(row).max()
    assert np.abs(out.values[:, interior]).max() < 0.05


def test_lowpass_preserves_mean(rng):
    f = Field2D(rng.normal(size=(50, 37)) + 4.0, 20.0)
    out = lowpass(f, 100.0)
    assert abs(out.values.mean() - f.values.mean()) <= 1e-10 * abs(f.values.mean())


def test_lowpass_mask_rule():
    values = np.ones((15, 15))
    mask = np.ones((15, 15), bool)
    mask[7, 7] = False
    out = lowpass(Field2D(values, 1.0, mask), 3.0)
    assert out.mask.all()
    np.testing.assert_allclose(out.values, 1.0)

    mask = np.ones((15, 15), bool)
    mask[:, :8] = False
    out = lowpass(Field2D(values, 1.0, mask), 3.0)
    # a 3-wide window centered on column 8 sees 2 of 3 valid columns
    assert out.mask[:, 8].all() and not out.mask[:, 7].any()


def test_lowpass_rejects_small_cutoff():
    with pytest.raises(ParameterError):
        lowpass(Field2D(np.zeros((8, 8)), 50.0), 60.0)
