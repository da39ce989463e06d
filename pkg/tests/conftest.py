from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import jazz_corpus  # noqa: E402

from contrafact.corpus import Corpus, dump_corpus  # noqa: E402
from contrafact.embedding import build_model  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def tiny_path() -> Path:
    return FIXTURES / "tiny.jsonl"


@pytest.fixture(scope="session")
def jazz() -> Corpus:
    return Corpus(jazz_corpus())


@pytest.fixture(scope="session")
def jazz_model(jazz):
    return build_model(jazz)


@pytest.fixture(scope="session")
def jazz_path(tmp_path_factory, jazz) -> Path:
    path = tmp_path_factory.mktemp("corpus") / "jazz.jsonl"
    dump_corpus(jazz, path)
    return path
