import math
import random

import pytest

from hypertsp.geometry import PoincarePoint


def disk_point(rng: random.Random, max_radius: float = 0.95) -> PoincarePoint:
    r = max_radius * math.sqrt(rng.random())
    theta = 2.0 * math.pi * rng.random()
    return PoincarePoint(r * math.cos(theta), r * math.sin(theta))


@pytest.fixture
def rng():
    return random.Random(0xD15C)
