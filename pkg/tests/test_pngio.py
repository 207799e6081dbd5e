import numpy as np
import pytest

from lightlayers.image import ImageRGB, gamma_encode
from lightlayers.pngio import read_png, write_png


def test_quantized_roundtrip(tmp_path, rng):
    data = rng.random((8, 8, 3), dtype=np.float32)
    img = ImageRGB(data, gamma=2.0)
    path = tmp_path / "a.png"
    write_png(img, path)
    back = read_png(path)
    assert back.gamma == 2.0
    np.testing.assert_allclose(back.data, data, atol=0.5 / 255)


def test_exact_levels_survive(tmp_path):
    levels = np.arange(256, dtype=np.float32) / 255.0
    data = np.stack([levels] * 3, axis=-1).reshape(16, 16, 3)
    img = ImageRGB(data, gamma=2.0)
    path = tmp_path / "levels.png"
    write_png(img, path)
    np.testing.assert_array_equal(read_png(path).data, data)


def test_write_rejects_linear(tmp_path):
    with pytest.raises(ValueError, match="gamma"):
        write_png(ImageRGB.constant(2, 2, (0.5, 0.5, 0.5)), tmp_path / "x.png")


def test_write_read_deterministic(tmp_path, rng):
    img = gamma_encode(ImageRGB(rng.random((12, 12, 3), dtype=np.float32)))
    p1, p2 = tmp_path / "a.png", tmp_path / "b.png"
    write_png(img, p1)
    write_png(img, p2)
    assert p1.read_bytes() == p2.read_bytes()
