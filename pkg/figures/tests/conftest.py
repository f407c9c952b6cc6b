import subprocess
import sys

import pytest

# The run directory is produced through the glsbi CLI, the documented
# external interface of the simulation package; nothing is imported from it.

CONFIG = """\
n = 25
T = 1500
K = 2
grid_start = 0.05
grid_step = 0.05
grid_count = 5
eval_start = 0.08
eval_step = 0.06
eval_count = 3
s = 4
n_estimations = 10
diag_points = 0.1,0.2
diag_pairs = 60
diag_vectors = 40
seed = 99
"""


def _cli(*args):
    result = subprocess.run(
        [sys.executable, "-m", "glsbi.cli", *args],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    return result.stdout


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    cfg = out / "run.cfg"
    cfg.write_text(CONFIG + f"out = {out}\n")
    _cli("build-table", "--config", str(cfg))
    table = out / "table_spikefreq.csv"
    _cli("evaluate", "--config", str(cfg), "--table", str(table))
    _cli("diagnostics", "--config", str(cfg), "--table", str(table))
    _cli("baseline", "--config", str(cfg))
    return out
