import os
import shutil

import pytest


@pytest.fixture
def rhsim_bin():
    path = os.environ.get("RHSIM_BIN") or shutil.which("rhsim")
    if not path:
        pytest.skip("rhsim binary not available")
    return path
