import pytest

from klcells import build_full_table, build_system


@pytest.fixture(scope="session")
def groups():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_system(name)
        return cache[name]
    return get


@pytest.fixture(scope="session")
def tables(groups):
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_full_table(groups(name))
        return cache[name]
    return get


@pytest.fixture(scope="session")
def D4(groups):
    return groups("D4")


@pytest.fixture(scope="session")
def D4_table(tables):
    return tables("D4")
