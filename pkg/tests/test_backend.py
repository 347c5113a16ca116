import os
import subprocess
import sys

import rspeckle
from rspeckle._backend import available_backends


class TestBackendSelection:
    def test_reported_backend_is_available(self):
        assert rspeckle.BACKEND in available_backends()

    def test_python_fallback_always_present(self):
        assert "python" in available_backends()

    def test_env_var_forces_python(self):
        env = dict(os.environ, RSPECKLE_BACKEND="python")
        out = subprocess.run(
            [sys.executable, "-c", "import rspeckle; print(rspeckle.BACKEND)"],
            capture_output=True,
            text=True,
            env=env,
        )
        assert out.returncode == 0
        assert out.stdout.strip() == "python"

    def test_env_var_rejects_unknown(self):
        env = dict(os.environ, RSPECKLE_BACKEND="fortran")
        out = subprocess.run(
            [sys.executable, "-c", "import rspeckle"],
            capture_output=True,
            text=True,
            env=env,
        )
        assert out.returncode != 0
        assert "fortran" in out.stderr
