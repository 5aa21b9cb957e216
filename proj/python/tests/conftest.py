import os
import pathlib

import pytest

DATA = pathlib.Path(
    os.environ.get("BLURBKIT_TEST_DATA", pathlib.Path(__file__).resolve().parents[2] / "tests" / "data")
)


@pytest.fixture(scope="session")
def vocab_path():
    return DATA / "bert-base-uncased-vocab.txt"


@pytest.fixture(scope="session")
def tok(vocab_path):
    import blurbkit

    return blurbkit.load(vocab_path)


@pytest.fixture(scope="session")
def golden_texts():
    import json

    with open(DATA / "tokenizer_golden.jsonl", encoding="utf-8") as f:
        return [json.loads(line)["text"] for line in f]
