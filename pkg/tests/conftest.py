from pathlib import Path

import pytest

from tmkit.dsl import parse_events, parse_model, parse_script
from tmkit.dynamics import parse_behavior

CORPUS = Path(__file__).resolve().parents[1] / "src" / "tmkit" / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"
SCENARIOS = ("correct_stay", "wrong_password", "away", "readiness")

MINIMAL = """
thimac panel {
  create x -> release x -> transfer x out
}
"""


def corpus_text(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def model():
    return parse_model(corpus_text("safehome.tm"), "safehome.tm")


@pytest.fixture(scope="session")
def dyn(model):
    return parse_events(corpus_text("safehome.tme"), model, "safehome.tme")


@pytest.fixture(scope="session")
def beh(dyn):
    return parse_behavior(corpus_text("safehome.tmb"), dyn, "safehome.tmb")


@pytest.fixture(scope="session")
def declared(dyn):
    return parse_behavior(corpus_text("safehome_declared.tmb"), dyn, "safehome_declared.tmb")


@pytest.fixture(scope="session")
def scripts():
    return {name: parse_script(corpus_text(f"{name}.tms"), f"{name}.tms") for name in SCENARIOS}
