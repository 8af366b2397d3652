from __future__ import annotations

from functools import lru_cache

import pytest

from principal_unipotent.catalog import builtin_catalog
from principal_unipotent.unipotent import classify

CATALOG = builtin_catalog()
GROUPS = tuple(sorted(CATALOG))


@lru_cache(maxsize=None)
def report_for(name: str):
    return classify(CATALOG[name])


@pytest.fixture(scope="session")
def catalog():
    return CATALOG


@pytest.fixture(scope="session")
def reports():
    return report_for
