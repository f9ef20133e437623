import contextlib
import io
import json

import pytest

from limitless.cli import main


@pytest.fixture
def run_cli():
    def run(args):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(args)
        return code, buf.getvalue()

    return run


@pytest.fixture
def run_cli_json(run_cli):
    def run(args):
        code, out = run_cli(args + ["--output", "json"])
        return code, (json.loads(out) if out.strip() else None)

    return run
