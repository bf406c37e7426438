import pytest

from kirillov.algebra import pattern, trunc_poly, u_n
from kirillov.chars import Engine

# the algebras every acceptance criterion is run on
TEST_ALGEBRAS = {
    "u_2(2)": lambda: u_n(2, 2),
    "u_3(2)": lambda: u_n(3, 2),
    "u_3(3)": lambda: u_n(3, 3),
    "u_4(2)": lambda: u_n(4, 2),
    "trunc_poly(2,4)": lambda: trunc_poly(2, 4),
    "trunc_poly(3,3)": lambda: trunc_poly(3, 3),
    "pattern(3;1-2,1-3,1-4,2-3)": lambda: pattern(3, [(1, 2), (1, 3), (1, 4), (2, 3)]),
}


def engine_for(name: str) -> Engine:
    return Engine.of(TEST_ALGEBRAS[name]())


@pytest.fixture(params=sorted(TEST_ALGEBRAS))
def test_engine(request) -> Engine:
    return engine_for(request.param)
