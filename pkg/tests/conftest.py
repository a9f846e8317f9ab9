import pytest

from geoleak.harness import emit_scatter
from geoleak.obfuscation import HORNET_DEFAULT


@pytest.fixture(scope="session")
def hornet_scatter_samples():
    # 3000 positions x 30 queries over (0, 3000] m; shared by the obfuscation
    # closed-loop tests and the acceptance suite
    return emit_scatter(HORNET_DEFAULT, 3000, 30, 3000.0, seed=2016)
