from __future__ import annotations

import sys
from subprocess import PIPE, Popen
from typing import Sequence


def run_cli(*args: str, cwd: str | None = None) -> tuple[str, str, int]:
    """Run ``python -m uavrelay ARGS`` and return stdout, stderr and exit code."""
    cmd = [sys.executable, "-m", "uavrelay", *args]
    p = Popen(cmd, stdout=PIPE, stderr=PIPE, cwd=cwd)  # noqa: S603
    out, err = p.communicate()
    return out.decode("utf8", "replace"), err.decode("utf8", "replace"), p.returncode


def check_help_output(subcommand: Sequence[str] = ()) -> str:
    """`uavrelay [subcommand] -h` exits cleanly and lists the options."""
    out, err, rc = run_cli(*subcommand, "-h")
    assert rc == 0, err
    assert "Traceback" not in err
    assert "Options" in out
    assert "--help-all" in out
    return out
