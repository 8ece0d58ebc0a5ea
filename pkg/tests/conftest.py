import json
import os
import pathlib
import random

import pytest

from rasv.dsl import load

SEED = int(os.environ.get("RASV_SEED", "20260823"))
ROOT = pathlib.Path(__file__).resolve().parent.parent
SPECS = ROOT / "specs"
SCHEMA_PATH = ROOT / "docs" / "verdict_schema.json"


@pytest.fixture
def rng(request):
    # independent stream per test so reordering one test does not shift
    # the draws of another
    return random.Random(f"{SEED}:{request.node.name}")


@pytest.fixture(scope="session")
def jobhiring():
    return load(str(SPECS / "jobhiring.ras"))


@pytest.fixture(scope="session")
def flight():
    return load(str(SPECS / "flight.ras"))


@pytest.fixture(scope="session")
def jobhiring_ext():
    return load(str(SPECS / "jobhiring_ext.ras"))


@pytest.fixture(scope="session")
def verdict_schema():
    with open(SCHEMA_PATH, encoding="utf-8") as fh:
        return json.load(fh)
