import pytest

import wattshop as ws


@pytest.fixture(scope="session")
def default_scenario():
    return ws.load_default_scenario()


@pytest.fixture(scope="session")
def synthetic_prices():
    """400-day synthetic series shared across tests (read-only)."""
    return ws.generate_synthetic_prices(400, base_seed=7)
