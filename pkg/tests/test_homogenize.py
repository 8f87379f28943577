import csv
import io
import json

import numpy as np
import pytest

from conftest import slab_grid, two_phase
from pupcm.fem import Material, MaterialTable
from pupcm.homogenize import (BoundViolation, ConductivityTensor, EnsembleReport,
                              convergence_study, effective_component, effective_tensor,
                              isotropy_deviation, reuss_voigt_bounds, run_ensemble,
                              tensor_for_grid)
from pupcm.params import pu_pcm_materials
from pupcm.rve import RveSpec, VoxelGrid, generate_packing, voxelize

COMPONENTS = ("kxx", "kyy", "kzz")


@pytest.mark.parametrize("t, expected", [((0.06, 0.06, 0.06), 0.0),
                                         ((0.06, 0.066, 0.063), 0.0952)])
def test_isotropy_examples(t, expected):
    assert isotropy_deviation(ConductivityTensor(*t)) == pytest.approx(expected, abs=5e-5)


def test_uniform_tensor_is_isotropic():
    g = VoxelGrid(10, 0.1, np.zeros((10, 10, 10), np.uint8))
    t = tensor_for_grid(g, MaterialTable({0: Material(0.036)}))
    np.testing.assert_allclose(t.as_array(), 0.036, rtol=1e-6)
    assert isotropy_deviation(t) <= 1e-6


def test_zero_fraction_gives_matrix_conductivity():
    t = effective_tensor(RveSpec(target_volume_fraction=0.0), pu_pcm_materials(), 8)
    np.testing.assert_allclose(t.as_array(), 0.036, rtol=1e-9)


def test_reuss_voigt_table_values():
    lo, hi = reuss_voigt_bounds([0.036, 0.56], [0.8, 0.2])
    assert lo == pytest.approx(1 / (0.8 / 0.036 + 0.2 / 0.56))
    assert hi == pytest.approx(0.8 * 0.036 + 0.2 * 0.56)
    assert round(lo, 4) == 0.0443 and round(hi, 4) == 0.1408


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_laminates(axis):
    mats = two_phase(0.1, 0.4)
    g = slab_grid(16, axis)
    name = "xyz"[axis]
    other = "xyz"[(axis + 1) % 3]
    assert effective_component(g, mats, name) == pytest.approx(0.16, rel=1e-9)
    assert effective_component(g, mats, other, bc_kind="temperature") == pytest.approx(
        0.25, rel=1e-9)


def test_bound_violation_is_hard_error(monkeypatch):
    import pupcm.homogenize as hom
    g = voxelize(generate_packing(RveSpec(rng_seed=1)), 8)
    monkeypatch.setattr(hom, "grid_bounds", lambda grid, m: (1.0, 2.0))
    with pytest.raises(BoundViolation):
        hom.tensor_for_grid(g, pu_pcm_materials())


@pytest.fixture(scope="module")
def small_grid():
    return voxelize(generate_packing(RveSpec(rng_seed=6)), 20)


def test_flux_magnitude_invariance(small_grid):
    mats = pu_pcm_materials()
    a = tensor_for_grid(small_grid, mats, q_bar=1.0).as_array()
    b = tensor_for_grid(small_grid, mats, q_bar=2.0).as_array()
    np.testing.assert_allclose(b, a, rtol=1e-9)


def test_linearity_in_conductivity(small_grid):
    mats = pu_pcm_materials()
    a = tensor_for_grid(small_grid, mats).as_array()
    b = tensor_for_grid(small_grid, mats.scaled(3.0)).as_array()
    np.testing.assert_allclose(b, 3.0 * a, rtol=1e-6)


def test_grid_refinement_contracts():
    s = generate_packing(RveSpec(rng_seed=4))
    mats = pu_pcm_materials()
    k = {n: effective_component(voxelize(s, n), mats, "x") for n in (16, 32, 48)}
    assert abs(k[32] - k[48]) <= abs(k[16] - k[32])


def test_single_seed_report_flags_single_sample():
    r = run_ensemble(RveSpec(), pu_pcm_materials(), [5], n_per_axis=12)
    assert r.single_sample
    np.testing.assert_array_equal(r.std, 0.0)
    assert not r.accepted()


def test_same_seed_twice_identical_rows():
    r = run_ensemble(RveSpec(), pu_pcm_materials(), [1, 1], n_per_axis=12)
    assert r.per_seed[0] == r.per_seed[1]
    np.testing.assert_array_equal(r.std, 0.0)


def test_report_json_and_csv():
    r = run_ensemble(RveSpec(), pu_pcm_materials(), [1, 2], n_per_axis=12, workers=2)
    doc = json.loads(r.to_json())
    for key in ("spec", "materials", "per_seed", "mean", "std", "isotropy_deviation"):
        assert key in doc
    assert {"seed", "kxx", "kyy", "kzz", "iters"} <= set(doc["per_seed"][0])
    back = EnsembleReport.from_dict(doc)
    assert back.to_json() == r.to_json()
    rows = list(csv.DictReader(io.StringIO(r.to_csv())))
    assert [int(x["seed"]) for x in rows] == [1, 2]
    assert float(rows[1]["kzz"]) == r.per_seed[1]["kzz"]


def test_parallel_matches_serial():
    args = (RveSpec(), pu_pcm_materials(), [3, 4, 5])
    a = run_ensemble(*args, n_per_axis=12, workers=1)
    b = run_ensemble(*args, n_per_axis=12, workers=3)
    assert a.to_json() == b.to_json()


def decreasing_with_one_inversion(values, slack=0.2):
    bumps = [(a, b) for a, b in zip(values, values[1:]) if b > a]
    return len(bumps) <= 1 and all(b <= a * (1 + slack) for a, b in bumps)


@pytest.mark.slow
def test_convergence_study_trend():
    reports = convergence_study(RveSpec(), pu_pcm_materials(), [8, 27, 64], [1, 2, 3],
                                n_per_axis=48, workers=3)
    assert [r.per_seed[0]["sphere_count"] for r in reports] == [8, 27, 64]
    iso = [r.mean_seed_isotropy_deviation for r in reports]
    scatter = [float(np.mean(r.std / r.mean)) for r in reports]
    assert decreasing_with_one_inversion(iso), iso
    assert decreasing_with_one_inversion(scatter), scatter
