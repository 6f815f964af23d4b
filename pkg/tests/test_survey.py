import math

import numpy as np
import pytest

from qvol.errors import OverlappingRanges, UnknownPreset
from qvol.linalg import BipartiteDims
from qvol.sampling import sample_features
from qvol.survey import (
    SurveyConfig,
    Tally,
    VolumeEstimate,
    aggregate,
    evaluate_features,
    preset,
    run_many,
    run_survey,
    split_ranges,
    tally_range,
)

D22 = BipartiteDims(2, 2)
D23 = BipartiteDims(2, 3)
ALL = ("entropic_positive", "ppt", "majorization", "ppt_agreement", "monotonic_tsallis", "monotonic_renyi")


def test_aggregate_sums():
    est = aggregate([Tally("ppt", None, 3, 0, 10), Tally("ppt", None, 7, 10, 20)])
    assert (est.hits, est.samples, est.fraction) == (10, 20, 0.5)


def test_aggregate_single():
    est = aggregate([Tally("ppt", None, 4, 5, 15)])
    assert (est.hits, est.samples) == (4, 10)


def test_aggregate_rejects_overlap():
    with pytest.raises(OverlappingRanges):
        aggregate([Tally("ppt", None, 3, 0, 10), Tally("ppt", None, 7, 5, 15)])


def test_aggregate_rejects_mixed_keys():
    with pytest.raises(ValueError):
        aggregate([Tally("ppt", None, 3, 0, 10), Tally("majorization", None, 7, 10, 20)])


def test_stderr():
    e = VolumeEstimate("ppt", None, 30, 100)
    assert e.stderr == math.sqrt(0.3 * 0.7 / 100)
    assert VolumeEstimate("ppt", None, 0, 1000).stderr == 3 / 1000
    assert VolumeEstimate("ppt", None, 1000, 1000).stderr == 3 / 1000
    with pytest.raises(ValueError):
        VolumeEstimate("ppt", None, 11, 10)


REFERENCE_FRACTIONS = (0.972, 0.719, 0.850, 0.434, 0.204, 0.003, 0.996, 0.888, 0.99, 0.79,
                 0.96, 0.64, 0.84, 0.38, 0.32)


def test_stderr_at_ten_million():
    m = 10**7
    for f in REFERENCE_FRACTIONS:
        e = VolumeEstimate("ppt", None, int(round(f * m)), m)
        assert e.stderr < 1e-3 * max(e.fraction, 0.05)


def test_stderr_bound_band_at_ten_million():
    """The 1e-3 * max(f, 0.05) bound only fails for f in (0.02565, 1/11)."""
    m = 10**7
    for f in np.linspace(0.0, 1.0, 2001):
        e = VolumeEstimate("ppt", None, int(round(f * m)), m)
        inside = 0.02565 < e.fraction < 1 / 11
        assert (e.stderr < 1e-3 * max(e.fraction, 0.05)) != inside


def test_config_validation():
    with pytest.raises(ValueError):
        SurveyConfig(D22, samples=0)
    with pytest.raises(ValueError):
        SurveyConfig(D22, predicates=())
    with pytest.raises(ValueError):
        SurveyConfig(D22, predicates=("entropic_positive",))  # needs q
    with pytest.raises(ValueError):
        SurveyConfig(D22, predicates=("witness",))
    with pytest.raises(ValueError):
        SurveyConfig(D22, q_list=(0.5,))
    assert SurveyConfig(D23, q_list=(2,)).rank == 6


def test_keys_order():
    c = SurveyConfig(D22, q_list=(2.0, math.inf), predicates=("ppt", "entropic_positive"))
    assert c.keys() == [("ppt", None), ("entropic_positive", 2.0), ("entropic_positive", math.inf)]


def test_worker_count_invariance():
    base = SurveyConfig(D23, samples=3000, seed=9, q_list=(2.0, math.inf), predicates=ALL)
    one = run_survey(base)
    for w in (2, 3, 8):
        assert run_survey(SurveyConfig(**{**base.__dict__, "workers": w})) == one


def test_split_ranges_cover():
    r = split_ranges(10, 3)
    assert r[0][0] == 0 and r[-1][1] == 10
    assert all(a[1] == b[0] for a, b in zip(r, r[1:]))
    assert split_ranges(2, 8) == [(0, 1), (1, 2)]


def test_chunking_invariance():
    c = SurveyConfig(D22, samples=1000, seed=1, q_list=(2.0,), predicates=("entropic_positive", "ppt"))
    assert tally_range(c, 0, 1000, chunk=64) == tally_range(c, 0, 1000, chunk=1000)


def test_pure_state_cross_check():
    c = SurveyConfig(D22, rank=1, samples=10_000, seed=3, q_list=(2.0,), predicates=("entropic_positive",))
    (est,) = run_survey(c)
    f = sample_features(D22, 1, 3, 0, 10_000, want_pt=False)
    hits = evaluate_features(f, c)["entropic_positive", 2.0]
    assert est.hits == int(hits.sum())
    # a pure state only passes when it is a product state
    assert np.all(np.abs(f.reduced_b[hits, 0] - 1) <= 1e-9)
    separable = np.abs(f.reduced_b[:, 0] - 1) <= 1e-9
    assert est.fraction == separable.mean()


def test_run_many_matches_individual_runs():
    cfgs = [
        SurveyConfig(D22, samples=800, seed=2, predicates=("monotonic_tsallis",)),
        SurveyConfig(D22, samples=800, seed=2, predicates=("monotonic_renyi",)),
        SurveyConfig(D22, samples=800, seed=2, q_list=(4.0,), predicates=("entropic_positive",)),
        SurveyConfig(D23, samples=500, seed=2, predicates=("ppt",)),
    ]
    assert run_many(cfgs) == [run_survey(c) for c in cfgs]


def test_preset_table1():
    cfgs = preset("table1")
    combos = {(str(c.dims), c.rank, c.predicates) for c in cfgs}
    assert len(cfgs) == 16 and len(combos) == 16
    assert all(c.experiment == "table1" for c in cfgs)


def test_preset_positivity_vs_dim():
    cfgs = preset("positivity_vs_dim", {"n1": 2})
    assert sum(len(c.q_list) for c in cfgs) == 45
    assert [c.dims.n2 for c in cfgs] == list(range(2, 11))
    three = preset("positivity_vs_dim", {"n1": 3})
    assert [c.dims.n2 for c in three] == list(range(3, 8))


def test_preset_ppt_agreement():
    (c,) = preset("ppt_agreement", {"d": 4})
    assert c.dims == BipartiteDims(4, 4) and math.inf in c.q_list
    assert min(c.q_list) == 2 and max(q for q in c.q_list if q < math.inf) == 20
    assert len(preset("ppt_agreement")) == 2


def test_preset_majorization_volumes():
    cfgs = preset("majorization_volumes", {"samples": 10})
    assert all(set(c.predicates) == {"majorization", "entropic_positive"} and c.q_list == (math.inf,) for c in cfgs)
    assert {c.dims.n1 for c in cfgs} == {2, 3}
    assert all(c.samples == 10 for c in cfgs)


def test_preset_positivity_vs_q():
    cfgs = preset("positivity_vs_q", {"n1": 3})
    assert all(c.q_list[0] == 1.0 and c.q_list[-1] == math.inf for c in cfgs)


def test_preset_errors():
    with pytest.raises(UnknownPreset):
        preset("figure9")
    with pytest.raises(ValueError):
        preset("table1", {"colour": "red"})
