"""Shared seeded corpora for the oracle-equivalence and decay tests."""

from __future__ import annotations

import pytest

from covercount import (
    from_hypergraph,
    gen_random_deg4_hypergraph,
    gen_random_read5_cnf,
    normalize,
    wellform,
)

CNF_CORPUS_SIZE = 500
AMO_CORPUS_SIZE = 300


def make_cnf_corpus(size=CNF_CORPUS_SIZE):
    """(seed, raw, wellformed) triples: read-5 monotone CNF, 4..12 variables."""
    out = []
    for seed in range(size):
        n = 4 + seed % 9
        m = max(2, n + (seed // 7) % 6)
        raw = gen_random_read5_cnf(seed, n, m, (2, 5))
        out.append((seed, raw, wellform(raw)))
    return out


def make_amo_corpus(size=AMO_CORPUS_SIZE):
    """(seed, hypergraph, instance) triples, <= 14 edges, degree <= 4.

    Even seeds are plain graphs, odd seeds 3-uniform hypergraphs.
    """
    out = []
    for seed in range(size):
        if seed % 2 == 0:
            v = 6 + seed % 7
            e = min(14, v + seed % 5)
            h = gen_random_deg4_hypergraph(seed, v, e, (2, 2))
        else:
            v = 7 + seed % 6
            e = min(14, 4 + seed % 9)
            h = gen_random_deg4_hypergraph(seed, v, e, 3)
        out.append((seed, h, from_hypergraph(h)))
    return out


@pytest.fixture(scope="session")
def cnf_corpus():
    return make_cnf_corpus()


@pytest.fixture(scope="session")
def amo_corpus():
    return make_amo_corpus()


@pytest.fixture(scope="session")
def amo_corpus_normalized(amo_corpus):
    return [(seed, h, normalize(inst)) for seed, h, inst in amo_corpus]
