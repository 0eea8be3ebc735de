import pytest

from tests.helpers import A, N
from wcindex.services.errors import BudgetExceededError
from wcindex.services.oracles import exact_interval, oracle_enumerate, oracle_scan


@pytest.mark.parametrize("pattern, expected", [
    ("?a", [0, 2, 4]),
    ("a?a", [1, 3]),
    ("", [0, 1, 2, 3, 4, 5]),
    ("???????", []),
    ("na", [2, 4]),
])
def test_scan_and_enumerate_agree(banana_text, pattern, expected):
    assert oracle_scan("banana", pattern) == expected
    assert oracle_enumerate(banana_text, pattern) == expected


def test_enumerate_unknown_byte(banana_text):
    assert oracle_enumerate(banana_text, "?x") == []


def test_enumerate_budget(banana_text):
    with pytest.raises(BudgetExceededError) as info:
        oracle_enumerate(banana_text, "a???", budget=26)
    assert info.value.required == 27
    assert oracle_enumerate(banana_text, "a???", budget=27) == [1]


def test_exact_interval(banana_text):
    assert exact_interval(banana_text, (A, N, A)) == (2, 4)
    lo, hi = exact_interval(banana_text, (N, N))
    assert lo == hi
