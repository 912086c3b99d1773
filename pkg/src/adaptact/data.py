"""MNIST-style IDX ingestion, synthetic blobs and mini-batching."""

from __future__ import annotations

import gzip
import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import CountMismatch, MagicMismatch, TruncatedFile

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

# Both the dashed originals and the dotted variants some mirrors ship.
STANDARD_NAMES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


@dataclass(frozen=True, eq=False)
class Dataset:
    images: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64
    class_count: int
    split: str = "train"

    def __post_init__(self):
        if self.images.ndim != 2 or self.labels.shape != (self.images.shape[0],):
            raise CountMismatch(
                f"{self.images.shape[0] if self.images.ndim else 0} images vs "
                f"{self.labels.shape} labels"
            )

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def width(self) -> int:
        return self.images.shape[1]


def _read_bytes(path) -> bytes:
    raw = Path(path).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def _parse_idx(raw: bytes, magic: int, path) -> tuple[tuple[int, ...], np.ndarray]:
    if len(raw) < 4:
        raise TruncatedFile(f"{path}: shorter than the IDX magic number")
    (got,) = struct.unpack(">I", raw[:4])
    if got != magic:
        raise MagicMismatch(f"{path}: magic 0x{got:08x}, expected 0x{magic:08x}")
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise TruncatedFile(f"{path}: header cut short")
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    expected = math.prod(dims)
    payload = len(raw) - header
    if payload < expected:
        raise TruncatedFile(f"{path}: {payload} payload bytes, header promises {expected}")
    return dims, np.frombuffer(raw, dtype=np.uint8, count=expected, offset=header)


def load_idx(images_path, labels_path, split: str = "train",
             class_count: int | None = None, pad_to: int | None = None) -> Dataset:
    """Load an image/label IDX pair (plain or gzip) as a :class:`Dataset`.

    Pixels are divided by 255 and flattened row-major. ``pad_to`` zero-pads
    each image symmetrically to ``pad_to x pad_to`` first.
    """
    img_dims, pixels = _parse_idx(_read_bytes(images_path), IMAGES_MAGIC, images_path)
    lab_dims, labels = _parse_idx(_read_bytes(labels_path), LABELS_MAGIC, labels_path)
    n, rows, cols = img_dims
    if lab_dims[0] != n:
        raise CountMismatch(f"{n} images in {images_path} but {lab_dims[0]} labels")
    images = pixels.reshape(n, rows, cols)
    if pad_to is not None and (pad_to > rows or pad_to > cols):
        top, left = (pad_to - rows) // 2, (pad_to - cols) // 2
        images = np.pad(images, ((0, 0), (top, pad_to - rows - top), (left, pad_to - cols - left)))
    images = images.reshape(n, -1).astype(np.float64) / 255.0
    labels = labels.astype(np.int64)
    if class_count is None:
        class_count = int(labels.max()) + 1 if n else 0
    return Dataset(images, labels, class_count, split)


def write_idx(ds: Dataset, images_path, labels_path, shape: tuple[int, int] | None = None) -> None:
    """Write ``ds`` back out in IDX format (pixels rounded to bytes)."""
    n, d = ds.images.shape
    if shape is None:
        side = int(math.isqrt(d))
        shape = (side, d // side) if side * side == d else (1, d)
    rows, cols = shape
    pix = np.rint(ds.images * 255.0).clip(0, 255).astype(np.uint8)
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">IIII", IMAGES_MAGIC, n, rows, cols))
        fh.write(pix.tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">II", LABELS_MAGIC, n))
        fh.write(ds.labels.astype(np.uint8).tobytes())


def _find(data_dir: Path, stem: str) -> Path:
    img_kind = stem.rsplit("-", 2)
    candidates = [stem, stem + ".gz"]
    # e.g. train-images.idx3-ubyte
    dotted = "-".join(img_kind[:-2]) + "." + "-".join(img_kind[-2:])
    candidates += [dotted, dotted + ".gz"]
    for name in candidates:
        p = data_dir / name
        if p.exists():
            return p
    raise FileNotFoundError(f"no {stem}[.gz] in {data_dir}")


def load_mnist(data_dir, pad_to: int | None = None) -> tuple[Dataset, Dataset]:
    """Load the standard train/test pair from a directory."""
    data_dir = Path(data_dir)
    out = []
    for split, (img, lab) in STANDARD_NAMES.items():
        out.append(load_idx(_find(data_dir, img), _find(data_dir, lab), split=split,
                            class_count=10, pad_to=pad_to))
    return out[0], out[1]


def default_mnist_dir() -> Path:
    return Path(os.environ.get("ADAPTACT_MNIST_DIR", "/root/data/mnist"))


def synth_blobs(n: int, class_count: int = 2, separation: float = 4.0, seed: int = 0,
                dim: int = 2, split: str = "train") -> Dataset:
    """Isotropic unit-variance Gaussian clusters.

    Centres sit on a circle in the first two coordinates, spaced so that
    neighbouring centres are ``separation`` apart. Extra dimensions are noise.
    Features are not rescaled into [0, 1].
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if separation < 0:
        raise ValueError("separation must be non-negative")
    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(class_count) / class_count
    radius = separation / (2 * np.sin(np.pi / class_count)) if class_count > 1 else 0.0
    centres = np.zeros((class_count, dim))
    centres[:, 0] = radius * np.cos(angles)
    centres[:, 1] = radius * np.sin(angles)
    labels = rng.permutation(np.arange(n) % class_count).astype(np.int64)
    images = centres[labels] + rng.standard_normal((n, dim))
    return Dataset(images, labels, class_count, split)


def batches(ds: Dataset, batch_size: int, seed: int | None = 0,
            shuffle: bool = True) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(images, labels)`` mini-batches covering every row once.

    The last batch may be short. Shuffling is a seeded Fisher-Yates
    permutation (numpy's ``Generator.permutation``).
    """
    if batch_size <= 0:
        raise ValueError("batch_size must be positive")
    n = len(ds)
    order = np.random.default_rng(seed).permutation(n) if shuffle else np.arange(n)
    for start in range(0, n, batch_size):
        idx = order[start:start + batch_size]
        yield ds.images[idx], ds.labels[idx]
