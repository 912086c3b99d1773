import gzip
import struct

import numpy as np
import pytest

from adaptact import data
from adaptact import network as nw
from adaptact.errors import CountMismatch, IdxError, MagicMismatch, TruncatedFile
from adaptact.optim import sgd_step


def write_pair(tmp_path, pixels, labels, rows=2, cols=2, img_magic=0x803, lab_magic=0x801,
               n_labels=None):
    n = len(labels)
    img = tmp_path / "img"
    lab = tmp_path / "lab"
    img.write_bytes(struct.pack(">IIII", img_magic, n, rows, cols) + bytes(pixels))
    lab.write_bytes(struct.pack(">II", lab_magic, n if n_labels is None else n_labels)
                    + bytes(labels))
    return img, lab


class TestLoadIdx:
    def test_two_image_fixture(self, tmp_path):
        img, lab = write_pair(tmp_path, [0, 255, 255, 0, 0, 0, 0, 255], [3, 7])
        ds = data.load_idx(img, lab, class_count=10)
        assert ds.images.shape == (2, 4)
        assert ds.images.tolist() == [[0.0, 1.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
        assert ds.labels.tolist() == [3, 7]
        assert ds.class_count == 10
        assert ds.split == "train"

    def test_row_major(self, tmp_path):
        img, lab = write_pair(tmp_path, [1, 2, 3, 4, 5, 6], [0], rows=2, cols=3)
        ds = data.load_idx(img, lab)
        assert np.array_equal(ds.images[0] * 255, [1, 2, 3, 4, 5, 6])

    def test_truncated_labels(self, tmp_path):
        img, lab = write_pair(tmp_path, [0] * 8, [1, 2])
        lab.write_bytes(lab.read_bytes()[:-1])
        with pytest.raises(TruncatedFile):
            data.load_idx(img, lab)

    def test_truncated_header(self, tmp_path):
        img, lab = write_pair(tmp_path, [0] * 8, [1, 2])
        img.write_bytes(img.read_bytes()[:10])
        with pytest.raises(TruncatedFile):
            data.load_idx(img, lab)

    def test_magic(self, tmp_path):
        img, lab = write_pair(tmp_path, [0] * 8, [1, 2], img_magic=0x801)
        with pytest.raises(MagicMismatch):
            data.load_idx(img, lab)
        img, lab = write_pair(tmp_path, [0] * 8, [1, 2], lab_magic=0x803)
        with pytest.raises(MagicMismatch):
            data.load_idx(img, lab)

    def test_count_mismatch(self, tmp_path):
        img, lab = write_pair(tmp_path, [0] * 8, [1, 2, 3], n_labels=3)
        # three labels but the image header says three images with only 8 bytes
        img.write_bytes(struct.pack(">IIII", 0x803, 2, 2, 2) + bytes(8))
        with pytest.raises(CountMismatch):
            data.load_idx(img, lab)

    def test_errors_are_distinct(self):
        assert len({CountMismatch, MagicMismatch, TruncatedFile}) == 3
        for e in (CountMismatch, MagicMismatch, TruncatedFile):
            assert issubclass(e, IdxError)

    def test_gzip_sniffed(self, tmp_path):
        img, lab = write_pair(tmp_path, [0, 51, 102, 255, 0, 0, 0, 0], [1, 0])
        plain = data.load_idx(img, lab)
        gz = tmp_path / "img.anything"
        gz.write_bytes(gzip.compress(img.read_bytes()))
        zipped = data.load_idx(gz, lab)
        assert np.array_equal(plain.images, zipped.images)

    def test_pad_to(self, tmp_path):
        img, lab = write_pair(tmp_path, [255] * 4, [0])
        ds = data.load_idx(img, lab, pad_to=4)
        assert ds.images.shape == (1, 16)
        assert ds.images.reshape(4, 4)[1:3, 1:3].tolist() == [[1.0, 1.0], [1.0, 1.0]]
        assert ds.images.sum() == 4.0

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        pix = rng.integers(0, 256, size=(5, 12)).astype(np.float64) / 255.0
        ds = data.Dataset(pix, rng.integers(0, 10, size=5), 10)
        data.write_idx(ds, tmp_path / "i", tmp_path / "l", shape=(3, 4))
        back = data.load_idx(tmp_path / "i", tmp_path / "l", class_count=10)
        assert np.array_equal(back.images, ds.images)
        assert np.array_equal(back.labels, ds.labels)

    def test_mnist_directory(self, tmp_path):
        rng = np.random.default_rng(1)
        for split, n in (("train", 6), ("test", 3)):
            ds = data.Dataset(rng.integers(0, 256, size=(n, 784)) / 255.0,
                              rng.integers(0, 10, size=n), 10)
            img, lab = data.STANDARD_NAMES[split]
            data.write_idx(ds, tmp_path / img, tmp_path / lab)
        train, test = data.load_mnist(tmp_path)
        assert (len(train), len(test), train.width) == (6, 3, 784)
        assert train.split == "train" and test.split == "test"

    def test_missing_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            data.load_mnist(tmp_path)


class TestBlobs:
    def test_deterministic(self):
        a = data.synth_blobs(50, 3, 4.0, seed=5)
        b = data.synth_blobs(50, 3, 4.0, seed=5)
        assert np.array_equal(a.images, b.images)
        assert np.array_equal(a.labels, b.labels)

    def test_balanced(self):
        ds = data.synth_blobs(100, 4, 3.0, seed=0)
        assert np.bincount(ds.labels).tolist() == [25] * 4

    def test_centre_spacing(self):
        ds = data.synth_blobs(4000, 2, 10.0, seed=0)
        means = [ds.images[ds.labels == k].mean(axis=0) for k in range(2)]
        assert np.linalg.norm(means[0] - means[1]) == pytest.approx(10.0, abs=0.2)

    def test_bad_args(self):
        with pytest.raises(ValueError):
            data.synth_blobs(0)
        with pytest.raises(ValueError):
            data.synth_blobs(10, separation=-1.0)

    @staticmethod
    def _fit_linear(ds, steps, lr=0.1):
        net = nw.init_network([ds.width, ds.class_count], activation=None, seed=0)
        used = 0
        for used in range(steps + 1):
            if nw.accuracy(net, ds.images, ds.labels) == 1.0:
                break
            out, cache = nw.forward_pass(net, ds.images)
            grads = nw.gradient_arrays(nw.backward_pass(net, cache, ds.labels))
            net = nw.with_parameters(net, sgd_step(nw.parameters(net), grads, lr))
        return net, used

    def test_separated_classes_fit_quickly(self):
        ds = data.synth_blobs(200, 2, 10.0, seed=0)
        net, used = self._fit_linear(ds, 200)
        assert nw.accuracy(net, ds.images, ds.labels) == 1.0
        assert used <= 200

    def test_no_separation_is_chance(self):
        train = data.synth_blobs(2000, 2, 0.0, seed=0)
        test = data.synth_blobs(2000, 2, 0.0, seed=1)
        net, _ = self._fit_linear(train, 200)
        assert abs(nw.accuracy(net, test.images, test.labels) - 0.5) < 0.05


class TestBatches:
    def ds(self, n=10):
        return data.Dataset(np.arange(n, dtype=np.float64)[:, None], np.zeros(n, dtype=np.int64), 1)

    def test_sizes(self):
        assert [len(y) for _, y in data.batches(self.ds(), 4)] == [4, 4, 2]

    def test_no_shuffle(self):
        xs = np.concatenate([x[:, 0] for x, _ in data.batches(self.ds(), 4, shuffle=False)])
        assert xs.tolist() == list(range(10))

    def test_same_seed(self):
        a = [x.tolist() for x, _ in data.batches(self.ds(), 3, seed=7)]
        b = [x.tolist() for x, _ in data.batches(self.ds(), 3, seed=7)]
        assert a == b

    @pytest.mark.parametrize("seed", [0, 1, 2, [3, 4], 99])
    def test_epoch_covers_every_index_once(self, seed):
        xs = np.concatenate([x[:, 0] for x, _ in data.batches(self.ds(37), 8, seed=seed)])
        assert sorted(xs.tolist()) == list(range(37))

    def test_bad_batch_size(self):
        with pytest.raises(ValueError):
            list(data.batches(self.ds(), 0))


@pytest.mark.slow
def test_mnist_shapes(mnist):
    train, test = mnist
    assert train.images.shape == (60000, 784)
    assert test.images.shape == (10000, 784)
    assert train.class_count == 10
    assert train.images.min() == 0.0 and train.images.max() == 1.0
    assert set(np.unique(train.labels)) == set(range(10))
