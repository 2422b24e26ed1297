import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import voxaug as vx
from voxaug.volume import LabelMap, ProbabilityVolume, Sample, Volume


def test_volume_casts_to_float32():
    v = Volume(np.ones((2, 3, 4), dtype=np.float64))
    assert v.data.dtype == np.float32
    assert v.spacing == (1.0, 1.0, 1.0)


def test_volume_rejects_non_3d():
    with pytest.raises(ValueError):
        Volume(np.zeros((4, 4)))


def test_volume_rejects_nonfinite_with_index():
    data = np.zeros((3, 3, 3))
    data[1, 2, 0] = np.nan
    with pytest.raises(ValueError, match=r"non-finite"):
        Volume(data)


def test_volume_rejects_bad_spacing():
    with pytest.raises(ValueError):
        Volume(np.zeros((2, 2, 2)), spacing=(1.0, 0.0, 1.0))


def test_labelmap_raw_alphabet():
    lm = LabelMap(np.array([[[0, 1], [2, 4]]], dtype=np.int64))
    assert lm.data.dtype == np.uint8
    assert lm.alphabet == (0, 1, 2, 4)


def test_labelmap_rejects_bad_value_with_location():
    data = np.zeros((2, 2, 2), dtype=np.int64)
    data[1, 0, 1] = 3
    with pytest.raises(ValueError, match=r"3"):
        LabelMap(data)


def test_labelmap_canonical_convention():
    lm = LabelMap(np.array([[[0, 3]]], dtype=np.uint8), convention="canonical")
    assert lm.convention == "canonical"
    with pytest.raises(ValueError):
        LabelMap(np.array([[[4]]], dtype=np.uint8), convention="canonical")


def test_sample_requires_matching_grids():
    a = Volume(np.zeros((4, 4, 4)))
    b = Volume(np.zeros((4, 4, 5)))
    with pytest.raises(ValueError):
        Sample(channels=(a, b))
    c = Volume(np.zeros((4, 4, 4)), spacing=(2.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        Sample(channels=(a, c))
    with pytest.raises(ValueError):
        Sample(channels=())


def test_probability_volume_checks():
    good = ProbabilityVolume(np.full((2, 2, 2, 2), 0.5))
    good.check_normalized()
    assert good.num_classes == 2
    bad = ProbabilityVolume(np.full((2, 2, 2, 2), 0.4))
    with pytest.raises(ValueError):
        bad.check_normalized(tol=1e-5)
    with pytest.raises(ValueError):
        ProbabilityVolume(np.zeros((2, 2, 2, 1)))


def test_normalize_minmax_example():
    v = Volume(np.array([2.0, 4.0, 6.0]).reshape(1, 1, 3))
    out = vx.normalize_minmax(v)
    np.testing.assert_allclose(out.data, [[[0.0, 0.5, 1.0]]], atol=1e-7)


def test_normalize_minmax_unit_span_unchanged():
    v = Volume(np.array([0.0, 0.25, 1.0]).reshape(1, 1, 3))
    np.testing.assert_array_equal(vx.normalize_minmax(v).data, v.data)


def test_normalize_minmax_constant_to_zeros():
    v = Volume(np.full((2, 2, 2), 5.0))
    assert not vx.normalize_minmax(v).data.any()


def test_normalize_minmax_idempotent():
    v = Volume(np.random.default_rng(0).random((4, 4, 4)))
    once = vx.normalize_minmax(v)
    twice = vx.normalize_minmax(once)
    np.testing.assert_array_equal(once.data, twice.data)


def test_center_offsets_brats_shape():
    assert vx.center_offsets((240, 240, 155), (128, 128, 128)) == (56, 56, 13)


def test_center_offsets_small_case():
    assert vx.center_offsets((10, 10, 10), (4, 4, 4)) == (3, 3, 3)


def test_center_offsets_patch_too_large():
    with pytest.raises(ValueError, match="patch exceeds volume"):
        vx.center_offsets((16, 16, 16), (17, 16, 16))


def test_extract_center_patch_matches_manual_slice(phantom_sample):
    patch = vx.extract_center_patch(phantom_sample, (16, 20, 12))
    off = vx.center_offsets(phantom_sample.shape, (16, 20, 12))
    sl = tuple(slice(o, o + p) for o, p in zip(off, (16, 20, 12)))
    np.testing.assert_array_equal(patch.channels[0].data, phantom_sample.channels[0].data[sl])
    np.testing.assert_array_equal(patch.labels.data, phantom_sample.labels.data[sl])
    assert patch.spacing == phantom_sample.spacing


def test_extract_center_patch_identity(phantom_sample):
    same = vx.extract_center_patch(phantom_sample, phantom_sample.shape)
    np.testing.assert_array_equal(same.channels[0].data, phantom_sample.channels[0].data)


def test_label_relabeling_bijection():
    raw = LabelMap(np.array([0, 1, 2, 4], dtype=np.uint8).reshape(1, 1, 4))
    canon = vx.raw_to_canonical_labels(raw)
    np.testing.assert_array_equal(canon.data.ravel(), [0, 1, 2, 3])
    back = vx.canonical_to_raw_labels(canon)
    np.testing.assert_array_equal(back.data, raw.data)


def test_label_relabeling_convention_guard():
    raw = LabelMap(np.zeros((1, 1, 1), dtype=np.uint8))
    with pytest.raises(ValueError):
        vx.canonical_to_raw_labels(raw)


@given(
    arrays(
        np.uint8,
        st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)),
        elements=st.sampled_from([0, 1, 2, 4]),
    )
)
def test_label_roundtrip_property(data):
    raw = LabelMap(data)
    back = vx.canonical_to_raw_labels(vx.raw_to_canonical_labels(raw))
    np.testing.assert_array_equal(back.data, raw.data)


def test_make_phantom_deterministic():
    a = vx.make_phantom(0, (32, 32, 32))
    b = vx.make_phantom(0, (32, 32, 32))
    for ca, cb in zip(a.channels, b.channels):
        np.testing.assert_array_equal(ca.data, cb.data)
    np.testing.assert_array_equal(a.labels.data, b.labels.data)


def test_make_phantom_full_alphabet_and_range():
    s = vx.make_phantom(0, (32, 32, 32))
    assert set(np.unique(s.labels.data)) == {0, 1, 2, 4}
    assert len(s.channels) == 4
    for ch in s.channels:
        assert 0.0 <= float(ch.data.min()) and float(ch.data.max()) <= 1.0


def test_make_phantom_seed_moves_tumor():
    centers = []
    for seed in range(10):
        s = vx.make_phantom(seed, (32, 32, 32))
        centers.append(tuple(np.argwhere(s.labels.data == 4).mean(axis=0).round(2)))
    assert len(set(centers)) > 1


def test_make_phantom_too_small():
    with pytest.raises(ValueError):
        vx.make_phantom(0, (8, 8, 8))


@given(st.integers(0, 10_000))
def test_phantom_labels_always_valid(seed):
    s = vx.make_phantom(seed, (16, 16, 16))
    assert set(np.unique(s.labels.data)) <= {0, 1, 2, 4}
