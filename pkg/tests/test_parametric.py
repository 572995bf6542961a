# tests/test_parametric.py

import numpy as np
import pytest
from numpy.testing import assert_allclose

from core.errors import AllPointsUnstableError, BadOrderError, BadParameterError, DimensionMismatchError
from core.gramian import gramians
from core.parametric import (
    CONSTRUCTIONS,
    continuity_check,
    cross_gramian,
    global_basis_gap,
    parse_grid,
    sweep,
    tensor_grid,
)
from core.system import LtiSystem, ParameterRange, ParametricLtiSystem
from models import generate


def _shifted_family(shift):
    """A(p) = shift + p, p in [1, 2]."""
    base = LtiSystem([[shift]], [[1.0]], [[1.0]], name="shifted_base")
    term = LtiSystem([[1.0]], [[0.0]], [[0.0]], name="shifted_p")
    return ParametricLtiSystem(base, (term,), (ParameterRange('p', 1.0, 2.0),), name="shifted")


def test_parse_grid():
    assert parse_grid('21') == (21,)
    assert parse_grid('11x5') == (11, 5)
    assert parse_grid('11,5') == (11, 5)
    with pytest.raises(BadParameterError):
        parse_grid('0')
    with pytest.raises(BadParameterError):
        parse_grid('a,b')


def test_tensor_grid(scalar_family):
    points, counts = tensor_grid(scalar_family, (1,))
    assert_allclose(points, [[1.5]])
    points, counts = tensor_grid(scalar_family, 5)
    assert counts == (5,)
    assert_allclose(points[:, 0], np.linspace(1.0, 2.0, 5))
    with pytest.raises(DimensionMismatchError):
        tensor_grid(scalar_family, (3, 3))


def test_scalar_family_lower_bound(scalar_family):
    res = sweep(scalar_family, counts=(11,))
    assert_allclose(res.sigma_table[:, 0], 1.0 / (2.0 * res.points[:, 0]), rtol=1e-12)
    assert res.lower_bound(0) == pytest.approx(0.5, abs=1e-10)
    assert_allclose(res.argmax(0), [1.0])
    assert res.lower_bound(1) == 0.0
    with pytest.raises(BadOrderError):
        res.lower_bound(2)


def test_sweep_with_explicit_points(scalar_family):
    res = sweep(scalar_family, points=[[1.0], [2.0]])
    assert_allclose(res.sigma_table[:, 0], [0.5, 0.25], rtol=1e-12)
    with pytest.raises(BadParameterError):
        sweep(scalar_family)
    with pytest.raises(DimensionMismatchError):
        sweep(scalar_family, points=[[1.0, 2.0]])


def test_unstable_points_are_excluded():
    res = sweep(_shifted_family(-2.5), counts=(5,))
    # A(p) = p - 2.5: устойчива при p < 2.5, т.е. везде
    assert res.stable.all()
    res = sweep(_shifted_family(-1.5), counts=(5,))
    # A(p) = p - 1.5: p = 1.5, 1.75, 2 исключены
    assert res.stable.tolist() == [True, True, False, False, False]
    assert np.isnan(res.sigma_table[2:]).all()
    assert res.excluded.shape == (3, 1)
    assert res.lower_bound(0) == pytest.approx(2.0, rel=1e-12)


def test_all_points_unstable():
    with pytest.raises(AllPointsUnstableError):
        sweep(_shifted_family(0.0), counts=(3,))


def test_heat_sigma_is_continuous():
    psys = generate('heat1d', 6)
    res = sweep(psys, counts=(11,))
    for i in (1, 2):
        report = continuity_check(res, i)
        assert report.passed
        assert report.flagged == ()
    with pytest.raises(BadOrderError):
        continuity_check(res, 7)


def test_continuity_flags_a_jump(scalar_family):
    res = sweep(scalar_family, counts=(21,))
    table = res.sigma_table.copy()
    table[10, 0] *= 10.0
    broken = type(res)(res.psys, res.points, table, res.stable, res.counts)
    report = continuity_check(broken, 1)
    assert not report.passed
    assert len(report.flagged) == 2


def test_cross_gramian_reduces_to_observability(two_state):
    assert_allclose(cross_gramian(two_state, two_state), gramians(two_state).Q, atol=1e-14)


@pytest.mark.parametrize('construction', CONSTRUCTIONS)
def test_global_basis_respects_lower_bound(construction):
    psys = generate('heat1d', 6)
    s1 = float(np.nanmax(sweep(psys, counts=(7,)).sigma_table[:, 0]))
    report = global_basis_gap(psys, 2, counts=(7,), draws=5, seed=3, construction=construction)
    assert report.construction == construction
    assert report.gap >= -1e-8 * s1
    assert report.local_basis_error == pytest.approx(report.lower_bound, rel=1e-9)
    assert report.draw_minimum >= report.lower_bound - 1e-8 * s1
    assert len(report.point_errors) == 7


def test_global_basis_scalar_family(scalar_family):
    report = global_basis_gap(scalar_family, 0, counts=(5,), draws=0)
    assert report.achieved == pytest.approx(0.5, abs=1e-10)
    assert report.gap == pytest.approx(0.0, abs=1e-10)


def test_global_basis_unknown_construction(scalar_family):
    with pytest.raises(BadParameterError):
        global_basis_gap(scalar_family, 0, counts=(3,), construction='svd')


def test_sweep_is_invariant_under_point_order():
    psys = generate('heat1d', 5)
    grid, _ = tensor_grid(psys, (9,))
    order = np.random.default_rng(4).permutation(len(grid))
    straight = sweep(psys, points=grid)
    shuffled = sweep(psys, points=grid[order])
    assert_allclose(shuffled.sigma_table, straight.sigma_table[order], rtol=1e-12)
    assert shuffled.lower_bound(2) == pytest.approx(straight.lower_bound(2), rel=1e-12)
    assert_allclose(shuffled.argmax(2), straight.argmax(2))


def test_heat_sigma_scales_inversely_with_diffusivity():
    res = sweep(generate('heat1d', 6), points=[[0.5], [1.0], [2.0]])
    assert_allclose(res.sigma_table[0, :3], 2.0 * res.sigma_table[1, :3], rtol=1e-8)
    assert_allclose(res.sigma_table[2, :3], 0.5 * res.sigma_table[1, :3], rtol=1e-8)
    assert_allclose(res.argmax(0), [0.5])


def test_global_basis_reuses_sweep(scalar_family):
    res = sweep(scalar_family, counts=(5,))
    assert all(s is not None for s in res.spectra)
    report = global_basis_gap(scalar_family, 0, draws=0, res=res)
    assert report.achieved == pytest.approx(0.5, abs=1e-10)
    fresh = global_basis_gap(scalar_family, 0, counts=(5,), draws=0)
    assert report.point_errors == pytest.approx(fresh.point_errors, rel=1e-12)
    with pytest.raises(BadParameterError):
        global_basis_gap(generate('heat1d', 3), 0, draws=0, res=res)


@pytest.mark.slow
@pytest.mark.parametrize('seed', [1, 2, 3])
def test_heat_global_basis_never_beats_lower_bound(seed):
    # heat1d, N = 10, 21 точка сетки, n = 3: три построения глобального базиса на каждый seed
    psys = generate('heat1d', 10)
    res = sweep(psys, counts=(21,))
    bound = res.lower_bound(3)
    for construction in CONSTRUCTIONS:
        report = global_basis_gap(psys, 3, draws=5, seed=seed, construction=construction, res=res)
        assert report.lower_bound == bound
        assert report.achieved >= bound - 1e-8
        assert report.draw_minimum >= bound - 1e-8
