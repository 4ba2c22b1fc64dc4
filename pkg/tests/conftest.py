import random

import pytest

from frobenius_pushforward.ring import SparsePoly


def make_random_poly(rng, ring, max_terms=4, max_degree=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exponents = [0] * ring.ngens
        for _ in range(rng.randint(0, max_degree)):
            exponents[rng.randrange(ring.ngens)] += 1
        terms[tuple(exponents)] = rng.randrange(1, ring.p)
    return SparsePoly(ring, terms)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def random_poly(rng):
    def build(ring, max_terms=4, max_degree=4):
        return make_random_poly(rng, ring, max_terms, max_degree)
    return build
