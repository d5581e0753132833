import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from unibandit.env import BanditConfig  # noqa: E402
from unibandit.graph import UnimodalGraph  # noqa: E402

FIXED_MEANS = (0, 0.2, 0.4, 0.6, 0.8, 1, 0.8, 0.6, 0.4, 0.2, 0)


@pytest.fixture
def fixed_config():
    return BanditConfig("gaussian", FIXED_MEANS, UnimodalGraph.path(11))
