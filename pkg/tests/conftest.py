import pytest

from cusped.groups import FreeAbelian, GroupPair
from cusped.horoball import build_horoball
from cusped.sampling import set_threads


@pytest.fixture(autouse=True)
def _single_thread():
    set_threads(1)
    yield
    set_threads(1)


@pytest.fixture(scope="session")
def z_horoball_30():
    return build_horoball(FreeAbelian(1), 30, 5)


@pytest.fixture(scope="session")
def free_pair():
    return GroupPair.build({"kind": "free", "rank": 2}, [("a",)])


@pytest.fixture(scope="session")
def z_z2_pair():
    return GroupPair.build(
        {"kind": "free_product", "factors": [{"kind": "free_abelian", "rank": 1}, {"kind": "free_abelian", "rank": 2}]},
        [("b", "c")],
    )
