import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scvc import example  # noqa: E402

EX1_PATH = Path(__file__).resolve().parents[1] / "src" / "scvc" / "data" / "ex1.sch"

Z3 = shutil.which("z3")
needs_z3 = pytest.mark.skipif(Z3 is None, reason="z3 binary not installed")


@pytest.fixture(scope="session")
def ex1():
    return example("ex1")


@pytest.fixture(scope="session")
def ex1_text():
    return EX1_PATH.read_text()
