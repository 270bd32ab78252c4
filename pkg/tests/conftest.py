from __future__ import annotations

import pytest


@pytest.fixture
def tiny_corpus_tsv() -> str:
    return (
        "# a two-line corpus\n"
        "p1\tanne\t1\t1\t1\tThe view of earthly glory: men might say\t0101010101\n"
        "p1\tanne\t1\t1\t2\tTill this time pomp was single, but now married\t00110100110\n"
    )
