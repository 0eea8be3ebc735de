import pytest

from wcindex.services.suffix_core import build_text_index
from wcindex.services.suffix_tree import build_suffix_tree
from wcindex.services.wildcard_engine import build_index

from tests.helpers import BANANA


@pytest.fixture(scope="session")
def banana_text():
    return build_text_index(BANANA)


@pytest.fixture(scope="session")
def banana_tree(banana_text):
    return build_suffix_tree(banana_text)


@pytest.fixture(scope="session")
def banana_index():
    return build_index(BANANA, tau=2, lambda_=2, sampling="full", c_d=2, c_h=2, micro_block=2, verify=True)


@pytest.fixture(scope="session", params=["full", "compact", "sampled"])
def banana_index_any_level(request):
    return build_index(BANANA, tau=2, lambda_=3, sampling=request.param, c_d=2, c_h=2, micro_block=2)
