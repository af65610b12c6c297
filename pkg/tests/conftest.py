import pytest

from invmeans import ScanConfig, construct_invariant, mean2, sample_pairs, sample_triples


@pytest.fixture(scope="session")
def L3():
    return construct_invariant(mean2("L"))


def triples(n, seed=1729, box=(0.1, 10.0)):
    return list(sample_triples(ScanConfig(box=box, samples=n, seed=seed)))


def pairs(n, seed=1729, box=(0.1, 10.0)):
    return list(sample_pairs(ScanConfig(box=box, samples=n, seed=seed)))


def min_rel_gap(values):
    s = sorted(values)
    return min((s[i + 1] - s[i]) / s[i + 1] for i in range(len(s) - 1))
