import numpy as np
import pytest

from sidu_xai.errors import TensorFormatError
from sidu_xai.tensorio import image_hash, read_tensor_file, write_tensor_file


def test_round_trip_exact(tmp_path):
    t = np.arange(1.0, 7.0).reshape(2, 3)
    path = tmp_path / "t.stf"
    write_tensor_file(t, path)
    back = read_tensor_file(path)
    assert back.shape == (2, 3)
    assert np.array_equal(back, t)  # small integers survive f32 exactly


def test_round_trip_f32_precision(tmp_path, rng):
    t = rng.uniform(size=(4, 5, 2))
    path = tmp_path / "t.stf"
    write_tensor_file(t, path)
    assert np.array_equal(read_tensor_file(path), t.astype(np.float32).astype(np.float64))


def test_rank0_rejected(tmp_path):
    with pytest.raises(TensorFormatError):
        write_tensor_file(np.float64(1.0), tmp_path / "t.stf")


def test_bad_magic(tmp_path):
    path = tmp_path / "t.stf"
    path.write_bytes(b"NOPE" + b"\x00" * 20)
    with pytest.raises(TensorFormatError, match="magic"):
        read_tensor_file(path)


def test_truncated_payload_reports_byte_counts(tmp_path):
    path = tmp_path / "t.stf"
    write_tensor_file(np.ones((2, 3)), path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-5])
    with pytest.raises(TensorFormatError, match="expected"):
        read_tensor_file(path)


def test_hash_stable_and_content_sensitive():
    img = np.zeros((4, 4, 3))
    h1 = image_hash(img)
    assert h1 == image_hash(img.copy())
    assert len(h1) == 16
    img2 = img.copy()
    img2[0, 0, 0] = 1.0
    assert image_hash(img2) != h1
