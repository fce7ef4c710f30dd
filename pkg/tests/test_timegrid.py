from datetime import datetime, timedelta

import pytest

from railway_ems import DataError, TimeGrid

START = datetime(2024, 6, 17)


def test_daily_grid_covers_24h():
    grid = TimeGrid.daily(START, dt_minutes=15)
    assert grid.steps == 96
    assert abs(grid.steps * grid.dt_hours - 24.0) <= 1e-9
    assert grid.is_daily


def test_one_minute_grid_is_daily_within_tolerance():
    grid = TimeGrid.daily(START, dt_minutes=1)
    assert grid.steps == 1440
    assert abs(grid.steps * grid.dt_hours - 24.0) <= 1e-9


def test_short_grid_allowed_but_not_daily():
    grid = TimeGrid(start=START, steps=4, dt_hours=1.0)
    assert not grid.is_daily
    with pytest.raises(DataError):
        grid.require_daily()


@pytest.mark.parametrize("steps,dt", [(0, 1.0), (-3, 1.0), (10, 0.0), (10, -0.5)])
def test_invalid_grid_rejected(steps, dt):
    with pytest.raises(DataError):
        TimeGrid(start=START, steps=steps, dt_hours=dt)


def test_floor_and_ceil_indices():
    grid = TimeGrid.daily(START, dt_minutes=15)
    t = START + timedelta(hours=8, minutes=7)
    assert grid.floor_index(t) == 32  # 08:00
    assert grid.ceil_index(t) == 33   # 08:15
    on_boundary = START + timedelta(hours=8)
    assert grid.floor_index(on_boundary) == 32
    assert grid.ceil_index(on_boundary) == 32


def test_time_at_and_end():
    grid = TimeGrid.daily(START, dt_minutes=15)
    assert grid.time_at(0) == START
    assert grid.time_at(95) == START + timedelta(hours=23, minutes=45)
    assert grid.end == START + timedelta(days=1)
