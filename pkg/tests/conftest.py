import pytest

from stokesdarcy import CaseConfig, build_system
from stokesdarcy.schur import SchurSystem


@pytest.fixture(scope="session")
def schur_cache():
    """Shared per-(case, level) Schur systems; factorizations are reused
    across tests to keep the suite fast."""
    cache = {}

    def get(label: str, level: int) -> SchurSystem:
        key = (label, level)
        if key not in cache:
            cache[key] = SchurSystem(build_system(CaseConfig(label, level)))
        return cache[key]

    return get
