import numpy as np
import pytest

from staropt.discrepancy import (
    BudgetExceededError,
    DiscrepancyBound,
    Grid,
    box_counts,
    exact_star_discrepancy,
    grid_local_value,
    local_discrepancy,
)
from staropt.sequence import PointSet

from oracles import naive_star_discrepancy, twelve_point_example


def test_exact_matches_naive_enumeration():
    rng = np.random.default_rng(101)
    for _ in range(30):
        n = int(rng.integers(1, 11))
        d = int(rng.integers(1, 4))
        points = PointSet(rng.random((n, d)))
        got = exact_star_discrepancy(points)
        assert got.kind == "exact"
        assert got.value == naive_star_discrepancy(points.coords)


def test_box_counts_strict_and_weak():
    points = PointSet(np.array([[0.2, 0.2], [0.5, 0.5], [0.5, 0.1], [0.9, 0.9]]))
    open_count, closed_count = box_counts(np.array([0.5, 0.5]), points)
    assert (open_count, closed_count) == (1, 3)
    with pytest.raises(ValueError):
        box_counts(np.array([0.5]), points)


def test_twelve_point_local_value():
    coords, y = twelve_point_example()
    points = PointSet(coords)
    value = local_discrepancy(y, points)
    assert value == 2 / 3 * 1 / 2 - 3 / 12
    assert abs(value - 1 / 12) < 1e-16
    assert grid_local_value(y, points) == value


def test_grid_local_value_sides():
    # One point pinned at the corner: closed count exceeds the open count.
    points = PointSet(np.array([[0.5, 0.5], [0.2, 0.2]]))
    y = np.array([0.5, 0.5])
    assert box_counts(y, points) == (1, 2)
    assert grid_local_value(y, points) == max(0.25 - 0.5, 1.0 - 0.25)


def test_grid_local_value_never_negative_at_max():
    # Individual terms can be negative, the two-sided value cannot.
    points = PointSet(np.full((4, 1), 0.05))
    y = np.array([0.9])
    open_count, closed_count = box_counts(y, points)
    assert 0.9 - open_count / 4 < 0
    assert grid_local_value(y, points) > 0


def test_centered_one_dimensional_grid():
    for n in (1, 2, 3, 10, 16):
        points = PointSet(((2 * np.arange(n) + 1.0) / (2 * n)).reshape(-1, 1))
        value = exact_star_discrepancy(points).value
        assert value == pytest.approx(1 / (2 * n), abs=1e-12)


def test_grid_axes_and_point_access():
    points = PointSet(np.array([[0.5, 0.2], [0.25, 0.2], [0.5, 0.8]]))
    grid = Grid.from_points(points)
    np.testing.assert_array_equal(grid.axes[0], [0.25, 0.5, 1.0])
    np.testing.assert_array_equal(grid.axes[1], [0.2, 0.8, 1.0])
    assert grid.cell_count == 9
    gp = grid.point((1, 2))
    np.testing.assert_array_equal(gp.y, [0.5, 1.0])
    assert grid_local_value(gp, points) == grid_local_value(gp.y, points)
    with pytest.raises(ValueError):
        grid.point((0,))


def test_budget_refusal_reports_estimate():
    rng = np.random.default_rng(5)
    points = PointSet(rng.random((9, 3)))
    with pytest.raises(BudgetExceededError) as err:
        exact_star_discrepancy(points, cost_budget=999)
    assert err.value.estimated_cells == 1000
    assert err.value.budget == 999
    assert exact_star_discrepancy(points, cost_budget=1000).kind == "exact"


def test_bound_validation():
    with pytest.raises(ValueError):
        DiscrepancyBound(value=0.5, kind="estimate")
    with pytest.raises(ValueError):
        DiscrepancyBound(value=1.5, kind="exact")
    bound = DiscrepancyBound(value=0.5, kind="lower_bound", runs=10)
    assert bound.runs == 10


def test_pruning_does_not_change_result():
    # Sets with heavy clustering exercise the subtree cutoff paths.
    rng = np.random.default_rng(17)
    for _ in range(10):
        base = rng.random((6, 2)) * 0.2
        coords = np.vstack([base, rng.random((6, 2))])
        points = PointSet(coords)
        assert exact_star_discrepancy(points).value == naive_star_discrepancy(
            points.coords
        )


def test_duplicate_coordinates():
    points = PointSet(np.array([[0.5, 0.5], [0.5, 0.5], [0.1, 0.9]]))
    assert exact_star_discrepancy(points).value == naive_star_discrepancy(
        points.coords
    )
