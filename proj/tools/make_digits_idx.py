#!/usr/bin/env python3
"""Build a small IDX-format handwritten-digit set from the 5000-image MNIST
subset bundled with the mlxtend wheel (500 images per digit).

Writes train-images-idx3-ubyte / train-labels-idx1-ubyte (4000 images) and
t10k-images-idx3-ubyte / t10k-labels-idx1-ubyte (1000 images), packed into
digits5k.tar.gz.

    pip download --no-deps -d /tmp/w mlxtend
    python3 tools/make_digits_idx.py /tmp/w/mlxtend-*.whl data/digits5k.tar.gz
"""
import gzip
import io
import random
import struct
import sys
import tarfile
import zipfile


def read_subset(wheel_path):
    with zipfile.ZipFile(wheel_path) as z:
        raw = gzip.decompress(z.read("mlxtend/data/data/mnist_5k.csv.gz"))
    images, labels = [], []
    for line in raw.decode().splitlines():
        if not line.strip():
            continue
        vals = [int(float(t)) for t in line.split(",")]
        # 784 pixels followed by the label
        labels.append(vals[-1])
        images.append(bytes(vals[:-1]))
    return images, labels


def idx_images(images):
    head = struct.pack(">IIII", 0x00000803, len(images), 28, 28)
    return head + b"".join(images)


def idx_labels(labels):
    return struct.pack(">II", 0x00000801, len(labels)) + bytes(labels)


def main():
    wheel, out = sys.argv[1], sys.argv[2]
    images, labels = read_subset(wheel)
    assert all(len(im) == 784 for im in images)
    order = list(range(len(images)))
    random.Random(20240101).shuffle(order)
    test_idx, train_idx = order[:1000], order[1000:]
    files = {
        "train-images-idx3-ubyte": idx_images([images[i] for i in train_idx]),
        "train-labels-idx1-ubyte": idx_labels([labels[i] for i in train_idx]),
        "t10k-images-idx3-ubyte": idx_images([images[i] for i in test_idx]),
        "t10k-labels-idx1-ubyte": idx_labels([labels[i] for i in test_idx]),
    }
    with tarfile.open(out, "w:gz") as tar:
        for name, payload in files.items():
            info = tarfile.TarInfo(name)
            info.size = len(payload)
            info.mtime = 0
            tar.addfile(info, io.BytesIO(payload))


if __name__ == "__main__":
    main()
