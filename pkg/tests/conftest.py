import pytest

from higher_tc import cyclic, orientable


@pytest.fixture
def clear_caches():
    """Drop memoised structure maps (needed around monkeypatched constants)."""
    def clear():
        for fn in (orientable._chi, orientable._delta, orientable.chi_s_terms):
            fn.cache_clear()
        for fn in (cyclic.cyclic_slot, cyclic.twisted_slot, cyclic.free_slot):
            fn.cache_clear()
    clear()
    yield
    clear()
