import numpy as np
import pytest

from sysimportance import FGM, Clayton, Exponential, Product, SystemModel, SystemStructure, Uniform, Weibull
from sysimportance.structure import series

BRIDGE = SystemStructure(3, [[1], [2, 3]])
SHIP = SystemStructure(4, [[1], [2, 3], [2, 4]])


def bridge(rates=(1.0, 1.0, 1.0), copula=None):
    return SystemModel(BRIDGE, [Exponential(r) for r in rates], copula or Product(3))


def series_model(rates, copula=None):
    n = len(rates)
    return SystemModel(series(n), [Exponential(r) for r in rates], copula or Product(n))


def ship(theta=1.0):
    return SystemModel(SHIP, [Exponential(1 / 60), Exponential(1 / 50), Exponential(1 / 45), Exponential(1 / 45)],
                       FGM(theta, 4))


def mixed_models():
    """Models covering every copula family and every marginal family."""
    return {
        "bridge_product": bridge(),
        "bridge_clayton": bridge((1.0, 0.7, 1.6), Clayton(2.0, 3)),
        "bridge_fgm": bridge((0.5, 1.0, 2.0), FGM(-0.6, 3)),
        "ship_weibull_clayton": SystemModel(SHIP, [Weibull(11, 1.5), Weibull(9, 2.0), Weibull(11, 0.8), Weibull(13, 1.2)],
                                            Clayton(1.5, 4)),
        "ship_fgm": ship(0.7),
        "parallel_uniform_fgm": SystemModel(SystemStructure(2, [[1], [2]]), [Uniform(0, 2), Uniform(0, 3)], FGM(0.8, 2)),
        "series_uniform_clayton": SystemModel(series(3), [Uniform(0, 1), Uniform(0, 2), Exponential(1.0)], Clayton(0.9, 3)),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
