import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

DATA_DIR = pathlib.Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def xoshiro_vectors() -> dict[int, list[int]]:
    """Frozen reference outputs: seed -> first 1000 u64 words."""
    vectors: dict[int, list[int]] = {}
    current: list[int] | None = None
    for line in (DATA_DIR / "xoshiro_vectors.txt").read_text().splitlines():
        if line.startswith("seed "):
            current = vectors.setdefault(int(line.split()[1]), [])
        elif line:
            current.append(int(line, 16))
    return vectors
