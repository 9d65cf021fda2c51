import pathlib

import pytest

from stancegen import ingest

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixture_corpus():
    return ingest.parse_corpus_file(DATA / "fixture_corpus.jsonl")


@pytest.fixture(scope="session")
def fixture_split(fixture_corpus):
    return ingest.stratified_split(fixture_corpus, 0.1, 0.1, seed=13)
