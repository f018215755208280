import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quartermask.mask import QuarterMask  # noqa: E402
from quartermask.pnm import write_pgm  # noqa: E402


def random_grid(rng, h, w):
    pos = rng.integers(0, 4, size=(h // 2, w // 2))
    grid = np.zeros((h // 2, 2, w // 2, 2), dtype=bool)
    bi, bj = np.indices(pos.shape)
    grid[bi, pos // 2, bj, pos % 2] = True
    return grid.reshape(h, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def mask_from():
    def make(transparent, h, w):
        grid = np.zeros((h, w), dtype=bool)
        for p in transparent:
            grid[p] = True
        return QuarterMask(grid)

    return make


def natural_corpus_dir(tmp_path_factory):
    """Directory of >= 512x512 natural grayscale images.

    ``QSM_CORPUS`` points at a user directory; otherwise photographs bundled
    with scikit-image are written out as PGM files.
    """
    user = os.environ.get("QSM_CORPUS")
    if user:
        return Path(user)
    data = pytest.importorskip("skimage.data")
    luma = np.array([0.299, 0.587, 0.114])
    images = {
        "astronaut": data.astronaut() @ luma,
        "brick": data.brick(),
        "camera": data.camera(),
        "moon": data.moon(),
    }
    out = tmp_path_factory.mktemp("corpus")
    for name, img in images.items():
        write_pgm(out / f"{name}.pgm", img)
    return out


@pytest.fixture(scope="session")
def natural_corpus_path(tmp_path_factory):
    return natural_corpus_dir(tmp_path_factory)


@pytest.fixture(scope="session")
def small_corpus_path(tmp_path_factory):
    """Three 64x64 synthetic test images, quick enough for FSR in unit tests."""
    out = tmp_path_factory.mktemp("small_corpus")
    r, c = np.indices((64, 64))
    write_pgm(out / "a_waves.pgm", 128 + 60 * np.sin(r / 3.0) * np.cos(c / 5.0))
    write_pgm(out / "b_disc.pgm", np.where((r - 30) ** 2 + (c - 35) ** 2 < 300, 200, 40))
    noise = np.random.default_rng(3).normal(0, 20, (64, 64))
    write_pgm(out / "c_ramp.pgm", np.clip(2 * r + c + noise, 0, 255))
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
