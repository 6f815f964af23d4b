import math

import numpy as np
import pytest

from qvol import criteria
from qvol.criteria import (
    QGrid,
    entropic_inequalities_hold,
    entropic_positive_batch,
    evaluate,
    majorization_batch,
    majorization_holds,
    monotonicity_scan,
    monotone_scan_batch,
    ppt_agreement,
    ppt_holds,
)
from qvol.linalg import BipartiteDims
from qvol.sampling import DensityMatrix, SampleSpec, sample_features, sample_state

from conftest import D22, random_density, werner_matrix


def werner(x):
    return DensityMatrix.from_matrix(werner_matrix(x), D22)


@pytest.fixture
def mixed_product(rng):
    m = np.kron(random_density(rng, 2), random_density(rng, 3))
    return DensityMatrix.from_matrix(m, BipartiteDims(2, 3))


def test_entropic_examples(mixed_product, bell):
    assert entropic_inequalities_hold(mixed_product, 2)
    assert not entropic_inequalities_hold(bell, 2)
    assert not entropic_inequalities_hold(werner(0.5), math.inf)
    assert entropic_inequalities_hold(werner(0.3), math.inf)


def test_ppt_examples(mixed_product, bell):
    assert ppt_holds(mixed_product)
    assert not ppt_holds(bell)
    assert criteria.pt_min_eigenvalue(bell) == pytest.approx(-0.5, abs=1e-14)
    assert ppt_holds(werner(1 / 3))
    assert not ppt_holds(werner(0.34))


def test_majorization_examples(maximally_mixed, bell, product_pure):
    assert majorization_holds(maximally_mixed)
    assert not majorization_holds(bell)
    assert majorization_holds(product_pure)


def test_majorized_padding():
    # 0.25,0.5,0.75,1 against 0.5,1,1,1
    assert criteria.majorized_batch(np.full(4, 0.25), np.array([0.5, 0.5]))
    assert not criteria.majorized_batch(np.array([1.0, 0, 0, 0]), np.array([0.5, 0.5]))


def test_ppt_agreement_examples(mixed_product, bell):
    assert ppt_agreement(bell, 2)
    assert not ppt_agreement(werner(0.5), 2)
    for q in (1.0, 2.0, 8.0, math.inf):
        assert ppt_agreement(mixed_product, q)


def test_monotonicity_examples(bell, product_pure):
    for cond in ("A", "B", "both"):
        assert monotonicity_scan(bell, cond, "tsallis")
        assert monotonicity_scan(bell, cond, "renyi")
        assert monotonicity_scan(product_pure, cond, "tsallis")


def test_bell_curve_is_decreasing(bell):
    grid = QGrid.default()
    curve = criteria.conditional_curve(bell.spectrum, np.array([0.5, 0.5]), "tsallis", grid)
    assert np.all(np.diff(curve) < 0)
    assert curve[-1] == -math.inf


def test_non_monotone_state_exists():
    """Random two-qubit states occasionally rise with q before falling."""
    grid = QGrid.default()
    for idx in range(200):
        rho = sample_state(SampleSpec(D22, 4, seed=0, sample_index=idx))
        if not monotonicity_scan(rho, "A", "tsallis", grid):
            break
    else:
        pytest.fail("no non-monotone state in 200 draws")
    ra = criteria.reduced_spectrum(rho, "A")
    curve = criteria.conditional_curve(rho.spectrum, ra, "tsallis", grid)
    assert np.any(curve[1:] > curve[:-1] + grid.tolerance)


def test_qgrid_validation():
    g = QGrid.default()
    assert len(g.points) == 60 and g.values()[-1] == math.inf
    assert g.points[0] == pytest.approx(1.001) and g.points[-1] == pytest.approx(100)
    with pytest.raises(ValueError):
        QGrid((2.0, 1.5))
    with pytest.raises(ValueError):
        QGrid((0.5, 2.0))
    with pytest.raises(ValueError):
        QGrid((1.5, 2.0), tolerance=-1)
    with pytest.raises(ValueError):
        QGrid.parse("1:2")
    p = QGrid.parse("1.1:100:60")
    assert len(p.values()) == 61
    assert not QGrid.parse("1.1:100:60:noinf").include_inf


def test_verdict_fields(bell):
    v = evaluate(bell)
    assert v.entropic_positive_at == {2.0: False, 4.0: False, 8.0: False, 16.0: False, math.inf: False}
    assert not v.ppt and not v.majorization
    assert v.monotonic_tsallis and v.monotonic_renyi


@pytest.mark.parametrize("dims", [BipartiteDims(2, 2), BipartiteDims(2, 3), BipartiteDims(3, 3), BipartiteDims(2, 5)])
def test_majorization_implies_positivity(dims):
    f = sample_features(dims, dims.n, 13, 0, 20_000, want_pt=False)
    maj = majorization_batch(f.joint, f.reduced_a, f.reduced_b)
    for q in (1.001, 1.5, 2.0, 4.0, 8.0, 16.0, 100.0, math.inf):
        pos = entropic_positive_batch(f.joint, f.reduced_a, f.reduced_b, q)
        assert not np.any(maj & ~pos)


def test_ppt_independent_of_transposed_subsystem():
    for idx in range(200):
        rho = sample_state(SampleSpec(BipartiteDims(2, 3), 6, seed=3, sample_index=idx))
        assert ppt_holds(rho, "A") == ppt_holds(rho, "B")
        assert criteria.pt_min_eigenvalue(rho, "A") == pytest.approx(criteria.pt_min_eigenvalue(rho, "B"), abs=1e-13)


def test_verdict_majorization_invariant():
    for idx in range(100):
        v = evaluate(sample_state(SampleSpec(BipartiteDims(2, 3), 6, seed=4, sample_index=idx)))
        if v.majorization:
            assert all(v.entropic_positive_at.values())


def test_scan_conditioning_both_is_conjunction():
    f = sample_features(BipartiteDims(2, 3), 3, 2, 0, 3000, want_pt=False)
    grid = QGrid.default()
    a = monotone_scan_batch(f.joint, f.reduced_a, f.reduced_b, "renyi", grid, "A")
    b = monotone_scan_batch(f.joint, f.reduced_a, f.reduced_b, "renyi", grid, "B")
    both = monotone_scan_batch(f.joint, f.reduced_a, f.reduced_b, "renyi", grid, "both")
    assert np.array_equal(both, a & b)
    with pytest.raises(ValueError):
        monotone_scan_batch(f.joint, f.reduced_a, f.reduced_b, "renyi", grid, "C")
