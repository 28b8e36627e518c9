import math
from pathlib import Path

import numpy as np
import pytest

from eulerflock.spectral import PeriodicGrid

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def grid256():
    return PeriodicGrid(256)


@pytest.fixture
def scenario_dir():
    return SCENARIOS


def trig_poly(grid, rng, degree=8):
    """Random real trigonometric polynomial of the given degree on ``grid``."""
    x = grid.x
    f = np.full_like(x, rng.standard_normal())
    for k in range(1, degree + 1):
        a, b = rng.standard_normal(2)
        f += a * np.cos(k * 2 * math.pi / grid.L * x) + b * np.sin(k * 2 * math.pi / grid.L * x)
    return f


AGENT_SEEDS = (0, 1, 2, 3, 4)
AGENT_COUNTS = (200, 500, 2000)


@pytest.fixture(scope="session")
def agents_study():
    """Particle-vs-PDE density errors at t = 5 for every (seed, N) pair.

    Shared by the agent property test and the acceptance suite: one PDE
    run, fifteen particle runs.
    """
    from eulerflock.runner import run_agents, simulate
    from eulerflock.scenario import load_scenario

    s = load_scenario(SCENARIOS / "agents_compare.scn")
    traj = simulate(s)
    errors = {}
    for seed in AGENT_SEEDS:
        for N in AGENT_COUNTS:
            info, _ = run_agents(s.replace(agents={**s.agents, "N": N, "seed": seed}), traj)
            errors[seed, N] = info["l1_density"]
    return errors
