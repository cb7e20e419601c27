import gzip
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from digitsim.errors import (
    ConfigError,
    DimensionError,
    EmptyClassError,
    FormatError,
    LabelRangeError,
    TruncationError,
)
from digitsim.imagery import (
    GrayImage,
    LabeledImage,
    load_idx_images,
    load_idx_labels,
    load_labeled,
    load_pgm,
    load_templates,
    split_dataset,
    write_pgm,
)

from conftest import IMAGES, LABELS, TEMPLATES, labeled


def idx_images(path, payload: bytes, count, rows=28, cols=28, magic=2051):
    path.write_bytes(struct.pack(">IIII", magic, count, rows, cols) + payload)
    return path


def idx_labels(path, payload: bytes, count=None, magic=2049):
    count = len(payload) if count is None else count
    path.write_bytes(struct.pack(">II", magic, count) + payload)
    return path


class TestIdxImages:
    def test_empty_container(self, tmp_path):
        assert load_idx_images(idx_images(tmp_path / "a", b"", 0)) == []

    def test_single_zero_record(self, tmp_path):
        (img,) = load_idx_images(idx_images(tmp_path / "a", bytes(784), 1))
        assert img.pixels.shape == (28, 28)
        assert not img.pixels.any()

    def test_two_records_byte_exact(self, tmp_path):
        first = bytes(range(256)) * 3 + bytes(range(16))
        second = bytes((7 * i + 3) % 256 for i in range(784))
        images = load_idx_images(idx_images(tmp_path / "a", first + second, 2))
        assert [im.tobytes() for im in images] == [first, second]
        # row-major: pixel (r, c) is byte r*28 + c
        assert images[1].pixels[2, 5] == second[2 * 28 + 5]

    def test_bad_magic(self, tmp_path):
        with pytest.raises(FormatError):
            load_idx_images(idx_images(tmp_path / "a", bytes(784), 1, magic=2049))

    def test_truncated_payload(self, tmp_path):
        with pytest.raises(TruncationError):
            load_idx_images(idx_images(tmp_path / "a", bytes(700), 1))

    def test_truncated_header(self, tmp_path):
        p = tmp_path / "a"
        p.write_bytes(struct.pack(">II", 2051, 1))
        with pytest.raises(TruncationError):
            load_idx_images(p)

    def test_wrong_dimensions(self, tmp_path):
        with pytest.raises(DimensionError):
            load_idx_images(idx_images(tmp_path / "a", bytes(27 * 28), 1, rows=27))

    def test_gzip(self, tmp_path):
        raw = struct.pack(">IIII", 2051, 1, 28, 28) + bytes([9]) * 784
        p = tmp_path / "a.gz"
        p.write_bytes(gzip.compress(raw))
        (img,) = load_idx_images(p)
        assert (img.pixels == 9).all()


class TestIdxLabels:
    def test_empty(self, tmp_path):
        assert load_idx_labels(idx_labels(tmp_path / "l", b"")) == []

    def test_direct_mapping(self, tmp_path):
        assert load_idx_labels(idx_labels(tmp_path / "l", bytes([3, 7]))) == [3, 7]

    def test_out_of_range(self, tmp_path):
        with pytest.raises(LabelRangeError):
            load_idx_labels(idx_labels(tmp_path / "l", bytes([1, 12])))

    def test_bad_magic(self, tmp_path):
        with pytest.raises(FormatError):
            load_idx_labels(idx_labels(tmp_path / "l", bytes([1]), magic=2051))

    def test_truncated(self, tmp_path):
        with pytest.raises(TruncationError):
            load_idx_labels(idx_labels(tmp_path / "l", bytes([1]), count=3))


def test_fixture_dataset_loads():
    data = load_labeled(IMAGES, LABELS)
    assert len(data) == 5000
    assert np.bincount([d.label for d in data]).tolist() == [500] * 10
    assert all(d.image.pixels.dtype == np.uint8 for d in data[:10])


class TestPgm:
    def test_all_white(self, tmp_path):
        p = tmp_path / "w.pgm"
        p.write_bytes(b"P5\n28 28\n255\n" + bytes([255]) * 784)
        assert (load_pgm(p).pixels == 255).all()

    def test_wrong_width(self, tmp_path):
        p = tmp_path / "w.pgm"
        p.write_bytes(b"P5\n27 28\n255\n" + bytes(27 * 28))
        with pytest.raises(FormatError):
            load_pgm(p)

    def test_wide_maxval(self, tmp_path):
        p = tmp_path / "w.pgm"
        p.write_bytes(b"P5\n28 28\n65535\n" + bytes(2 * 784))
        with pytest.raises(FormatError):
            load_pgm(p)

    def test_ascii_pgm_rejected(self, tmp_path):
        p = tmp_path / "w.pgm"
        p.write_bytes(b"P2\n28 28\n255\n" + b"0 " * 784)
        with pytest.raises(FormatError):
            load_pgm(p)

    def test_comment_in_header(self, tmp_path):
        p = tmp_path / "c.pgm"
        body = bytes(range(256)) * 3 + bytes(16)
        p.write_bytes(b"P5\n# made by hand\n28 28\n255\n" + body)
        assert load_pgm(p).tobytes() == body

    def test_truncated_body(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n28 28\n255\n" + bytes(100))
        with pytest.raises(TruncationError):
            load_pgm(p)

    @settings(max_examples=30, deadline=None)
    @given(st.binary(min_size=784, max_size=784))
    def test_round_trip(self, tmp_path_factory, raw):
        img = GrayImage.frombytes(raw)
        p = tmp_path_factory.mktemp("pgm") / "x.pgm"
        write_pgm(p, img)
        assert load_pgm(p) == img


def test_gray_image_rejects_out_of_range():
    with pytest.raises(ValueError):
        GrayImage(np.full((28, 28), 256))
    with pytest.raises(ValueError):
        GrayImage(np.full((28, 28), -1))


def test_labeled_image_rejects_non_digit():
    with pytest.raises(LabelRangeError):
        LabeledImage(GrayImage(np.zeros((28, 28))), 10)


def test_templates_layout(templates):
    assert sorted(templates) == list(range(10))
    for names, images in templates.values():
        assert len(names) == len(images) == 10
        assert names == sorted(names)


def test_templates_missing_digit(tmp_path):
    for d in range(10):
        if d != 4:
            (tmp_path / str(d)).mkdir()
            write_pgm(tmp_path / str(d) / "f.pgm", GrayImage(np.zeros((28, 28))))
    with pytest.raises(ConfigError, match=r"templates.4|[/\\]4"):
        load_templates(tmp_path)


def _samples(counts: dict[int, int]):
    out, idx = [], 0
    for d, n in counts.items():
        for _ in range(n):
            out.append(labeled(np.full((28, 28), idx % 256), d, idx))
            idx += 1
    return out


class TestSplit:
    def test_eighty_twenty(self):
        split = split_dataset(_samples({0: 10}), 0.8, 1000, seed=7)
        assert (len(split.train[0]), len(split.test[0])) == (8, 2)

    def test_deterministic(self):
        data = _samples({0: 30, 5: 17})
        a = split_dataset(data, 0.8, 1000, seed=99)
        b = split_dataset(data, 0.8, 1000, seed=99)
        for d in range(10):
            assert [s.index for s in a.train[d]] == [s.index for s in b.train[d]]
            assert [s.index for s in a.test[d]] == [s.index for s in b.test[d]]

    def test_seed_changes_order(self):
        data = _samples({0: 50})
        a = split_dataset(data, 0.8, 1000, seed=1)
        b = split_dataset(data, 0.8, 1000, seed=2)
        assert [s.index for s in a.train[0]] != [s.index for s in b.train[0]]

    def test_cap(self):
        split = split_dataset(_samples({0: 10}), 0.8, per_digit_cap=5, seed=3)
        assert len(split.train[0]) + len(split.test[0]) == 5
        assert len(split.train[0]) == 4

    def test_disjoint_and_ratio(self):
        data = _samples({d: 20 + 3 * d for d in range(10)})
        split = split_dataset(data, 0.8, 1000, seed=11)
        for d in range(10):
            tr = {s.index for s in split.train[d]}
            te = {s.index for s in split.test[d]}
            assert not tr & te
            n = 20 + 3 * d
            assert abs(len(tr) - 0.8 * n) <= 1
            assert all(s.label == d for s in split.train[d] + split.test[d])

    def test_full_scale_counts(self):
        split = split_dataset(_samples({3: 1000}), 0.8, 1000, seed=0)
        assert (len(split.train[3]), len(split.test[3])) == (800, 200)

    def test_missing_required_digit(self):
        with pytest.raises(EmptyClassError):
            split_dataset(_samples({0: 5}), 0.8, 10, seed=0, digits=range(10))

    def test_empty_input(self):
        with pytest.raises(EmptyClassError):
            split_dataset([], 0.8, 10, seed=0)

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.5])
    def test_bad_ratio(self, ratio):
        with pytest.raises(ValueError):
            split_dataset(_samples({0: 5}), ratio, 10, seed=0)

    def test_frozen_permutation(self):
        # pins the generator: PCG64 seeded via SeedSequence(seed, spawn_key=(digit,))
        split = split_dataset(_samples({0: 10}), 0.8, 1000, seed=2024)
        expected = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(2024, spawn_key=(0,)))
        ).permutation(10)
        assert [s.index for s in split.train[0] + split.test[0]] == expected.tolist()
