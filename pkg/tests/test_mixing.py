import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pupcm.errors import EmptySamples, NegativeWeight, ZeroWeightSum
from pupcm.fem import Material, MaterialTable
from pupcm.homogenize import EnsembleReport
from pupcm.mixing import WeightedSamples, macro_json, rule_of_mixtures, upscale_ensemble
from pupcm.rve import RveSpec

values = st.lists(st.floats(1e-4, 10.0), min_size=1, max_size=12)


def samples_with_weights():
    return values.flatmap(lambda v: st.tuples(
        st.just(v),
        st.lists(st.one_of(st.just(0.0), st.floats(1e-6, 100.0)),
                 min_size=len(v), max_size=len(v))
        .filter(lambda w: sum(w) > 0)))


@pytest.mark.parametrize("vals, w, expected", [
    ([0.12], [7], 0.12),
    ([0.05, 0.06, 0.07], None, 0.06),
    ([0.05, 0.07], [1, 3], 0.065),
])
def test_examples(vals, w, expected):
    assert rule_of_mixtures(WeightedSamples(vals, w)) == pytest.approx(expected, rel=1e-12)


def test_errors():
    with pytest.raises(EmptySamples):
        WeightedSamples([])
    with pytest.raises(ZeroWeightSum):
        WeightedSamples([1.0, 2.0], [0.0, 0.0])
    with pytest.raises(NegativeWeight):
        WeightedSamples([1.0, 2.0], [1.0, -0.5])
    with pytest.raises(ValueError):
        WeightedSamples([1.0, 2.0], [1.0])


@settings(max_examples=1000)
@given(samples_with_weights())
def test_convexity(vw):
    v, w = vw
    x = rule_of_mixtures(WeightedSamples(v, w))
    assert min(v) <= x <= max(v)


@settings(max_examples=1000)
@given(samples_with_weights(), st.floats(1e-3, 1e3))
def test_weight_scale_invariance(vw, c):
    v, w = vw
    a = rule_of_mixtures(WeightedSamples(v, w))
    b = rule_of_mixtures(WeightedSamples(v, [c * x for x in w]))
    assert b == pytest.approx(a, rel=1e-12)


@settings(max_examples=300)
@given(samples_with_weights(), st.randoms())
def test_permutation_invariance(vw, rnd):
    v, w = vw
    pairs = list(zip(v, w))
    rnd.shuffle(pairs)
    a = rule_of_mixtures(WeightedSamples(v, w))
    b = rule_of_mixtures(WeightedSamples(*zip(*pairs)))
    assert b == pytest.approx(a, rel=1e-12)


@settings(max_examples=300)
@given(samples_with_weights())
def test_matches_exact_rational_oracle(vw):
    v, w = vw
    exact = sum(Fraction(x) * Fraction(p) for x, p in zip(v, w)) / sum(map(Fraction, w))
    assert rule_of_mixtures(WeightedSamples(v, w)) == pytest.approx(float(exact), rel=1e-13)


def report(rows):
    mats = MaterialTable({0: Material(0.036), 1: Material(0.56)})
    per_seed = [{"seed": i, "sphere_count": 48, "volume_fraction": phi, "kxx": k[0],
                 "kyy": k[1], "kzz": k[2], "iters": [1, 1, 1]}
                for i, (phi, k) in enumerate(rows)]
    return EnsembleReport(RveSpec(), mats, 12, per_seed)


def test_identical_tensors_upscale_to_themselves():
    t = upscale_ensemble(report([(0.2, (0.05, 0.06, 0.07))] * 3))
    assert t.as_array().tolist() == [0.05, 0.06, 0.07]


def test_two_diagonal_tensors_average():
    t = upscale_ensemble(report([(0.2, (0.05,) * 3), (0.2, (0.07,) * 3)]))
    assert t.as_array() == pytest.approx([0.06] * 3, rel=1e-12)


def test_five_seed_uniform_equals_brute_mean():
    rows = [(0.19 + 0.005 * i, (0.05 + 0.001 * i, 0.051 + 0.002 * i, 0.049 + 0.0015 * i))
            for i in range(5)]
    t = upscale_ensemble(report(rows))
    for c in range(3):
        brute = 0.0
        for _, k in rows:
            brute += k[c]
        assert t.as_array()[c] == pytest.approx(brute / 5, rel=1e-12)


def test_volume_fraction_weighting():
    t = upscale_ensemble(report([(0.1, (0.05,) * 3), (0.3, (0.07,) * 3)]),
                         "volume_fraction")
    assert t.kxx == pytest.approx((0.1 * 0.05 + 0.3 * 0.07) / 0.4, rel=1e-12)


def test_unknown_weighting_rejected():
    with pytest.raises(ValueError):
        upscale_ensemble(report([(0.2, (0.05,) * 3)]), "by_mass")


def test_macro_json_shape():
    t = upscale_ensemble(report([(0.2, (0.05, 0.06, 0.07))]))
    doc = json.loads(macro_json(t, "uniform"))
    assert doc == {"k_macro": {"kxx": 0.05, "kyy": 0.06, "kzz": 0.07}, "weighting": "uniform"}
