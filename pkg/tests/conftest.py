import random

import pytest

from runwayseq.separation import Task, builtin_model
from runwayseq.sequence import Aircraft


@pytest.fixture(scope="session")
def single_model():
    return builtin_model("heathrow-recat-single")


@pytest.fixture(scope="session")
def dual_model():
    return builtin_model("heathrow-recat-dual")


def random_aircraft(rng: random.Random, n: int, mode: str, spread: int = 600, width: int | None = None):
    """Small random instances; ``mode`` is landing, takeoff or mixed."""
    out = []
    for i in range(n):
        if mode == "landing":
            task = Task.LANDING
        elif mode == "takeoff":
            task = Task.TAKEOFF
        else:
            task = rng.choice((Task.LANDING, Task.TAKEOFF))
        fmin = rng.randint(0, spread)
        fmax = float("inf") if width is None else fmin + width
        out.append(Aircraft(f"a{i}", rng.randint(1, 6), task, fmin, fmax))
    return out
