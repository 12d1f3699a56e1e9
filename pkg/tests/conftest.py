import random

import pytest

from arithmetic.padic import PadicParams
from engine.normalizer import Normalizer
from engine.rules import compile_rules


@pytest.fixture
def rng():
    return random.Random(20240101)


@pytest.fixture
def p5k6():
    return PadicParams(5, 6)


@pytest.fixture(scope='session')
def rules_n2():
    """n=2, p=5, K=3, M=10: deep enough for the depth-1 oracle (t=5)"""
    return compile_rules(2, 5, 3, 10)


@pytest.fixture(scope='session')
def rules_n3():
    return compile_rules(3, 5, 3, 12)


@pytest.fixture
def normalizer_n2(rules_n2):
    return Normalizer(rules_n2)


@pytest.fixture
def normalizer_n3(rules_n3):
    return Normalizer(rules_n3)
