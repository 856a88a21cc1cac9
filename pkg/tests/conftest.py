import random
from fractions import Fraction

import pytest

from modules.model_module import BUILTIN_PRODUCT_MODELS, ModelHypersurface, fiber_data
from modules.series_module import GaussianRational, TruncatedSeries


@pytest.fixture
def quadric():
    return ModelHypersurface.quadric(Fraction(1, 2))


@pytest.fixture
def bishop():
    return ModelHypersurface.bishop(Fraction(1, 4))


@pytest.fixture
def silly():
    return BUILTIN_PRODUCT_MODELS["silly-cubic"]


@pytest.fixture
def quadric_fd(quadric):
    return fiber_data(quadric, 8)


@pytest.fixture
def bishop_fd(bishop):
    return fiber_data(bishop, 6)


@pytest.fixture
def silly_fd(silly):
    return fiber_data(silly, 12)


def random_coefficient(rng: random.Random, height: int = 5) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(-height, height), rng.randint(1, height)),
                            Fraction(rng.randint(-height, height), rng.randint(1, height)))


def random_series(rng: random.Random, signature, order: int, terms: int = 6, height: int = 5) -> TruncatedSeries:
    out = {}
    for _ in range(terms):
        exps = tuple(rng.randint(0, order // w) for w in signature.weights)
        while signature.degree(exps) > order:
            i = rng.randrange(len(exps))
            exps = exps[:i] + (max(0, exps[i] - 1),) + exps[i + 1:]
        out[exps] = random_coefficient(rng, height)
    return TruncatedSeries(signature, order, out)


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture
def make_series():
    return random_series


@pytest.fixture
def make_coefficient():
    return random_coefficient
