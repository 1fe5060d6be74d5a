import os
import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("workbench", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("workbench")


@pytest.fixture
def rng() -> random.Random:
    """Seeded generator; FANLAB_SEED moves every randomized test together."""
    return random.Random(int(os.environ.get("FANLAB_SEED", "0")))
