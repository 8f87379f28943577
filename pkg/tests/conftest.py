import numpy as np
import pytest

from pupcm.config import config_from_dict
from pupcm.fem import Material, MaterialTable
from pupcm.rve import VoxelGrid


def slab_grid(n, axis, edge_length=1.0):
    """Two half-slabs: phase 0 on the low half of ``axis``, phase 1 on the high half."""
    phase = np.zeros((n, n, n), dtype=np.uint8)
    idx = [slice(None)] * 3
    idx[axis] = slice(n // 2, None)
    phase[tuple(idx)] = 1
    return VoxelGrid(n_per_axis=n, cell_size=edge_length / n, phase=phase)


def two_phase(k0, k1):
    return MaterialTable({0: Material(k0), 1: Material(k1)})


@pytest.fixture(scope="session")
def reference_config():
    return config_from_dict({})


@pytest.fixture(scope="session")
def reference_comparison(reference_config):
    from pupcm.building import compare_scenarios
    cfg = reference_config
    return compare_scenarios(cfg.base_model(), cfg.pcm_model(), cfg.load_weather(), dt=60.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
