import os
import shutil
from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def gdd_bin():
    path = os.environ.get("GDD_BIN") or shutil.which("gdd")
    if not path or not Path(path).exists():
        pytest.skip("gdd executable not found (set GDD_BIN)")
    return path
