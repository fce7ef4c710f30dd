from datetime import datetime, timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from railway_ems import DataError, GapError, Profile, TimeGrid, ingest_profile
from railway_ems.profiles import zeros_profile

START = datetime(2024, 6, 17)


def write_csv(path, start, step_minutes, values, header="timestamp,value",
              skip_indices=()):
    lines = [header]
    for k, v in enumerate(values):
        if k in skip_indices:
            continue
        ts = start + timedelta(minutes=step_minutes * k)
        lines.append(f"{ts.isoformat()},{v}")
    path.write_text("\n".join(lines) + "\n")
    return path


def test_profile_length_must_match_grid():
    grid = TimeGrid(start=START, steps=4, dt_hours=1.0)
    with pytest.raises(DataError):
        Profile(grid=grid, values=np.zeros(3), kind="demand")


def test_profile_rejects_non_finite_and_negative():
    grid = TimeGrid(start=START, steps=2, dt_hours=1.0)
    with pytest.raises(DataError):
        Profile(grid=grid, values=[1.0, np.nan], kind="demand")
    with pytest.raises(DataError):
        Profile(grid=grid, values=[1.0, -2.0], kind="demand")
    # prices may be negative
    Profile(grid=grid, values=[0.1, -0.05], kind="price")


def test_profile_values_are_immutable():
    grid = TimeGrid(start=START, steps=2, dt_hours=1.0)
    prof = Profile(grid=grid, values=[1.0, 2.0], kind="demand")
    with pytest.raises(ValueError):
        prof.values[0] = 5.0


def test_downsample_mean_one_minute_to_quarter_hour(tmp_path):
    # each 15-min output value is the mean of its 15 one-minute inputs
    grid = TimeGrid.daily(START, dt_minutes=15)
    values = np.arange(1440, dtype=float)
    path = write_csv(tmp_path / "demand.csv", START, 1, values)
    prof = ingest_profile(path, "demand", grid)
    expected = values.reshape(96, 15).mean(axis=1)
    np.testing.assert_allclose(prof.values, expected, rtol=0, atol=0)


def test_price_unit_conversion_eur_mwh(tmp_path):
    grid = TimeGrid(start=START, steps=24, dt_hours=1.0)
    path = write_csv(tmp_path / "price.csv", START, 60, [100.0] * 24,
                     header="timestamp,value_eur_mwh")
    prof = ingest_profile(path, "price", grid)
    assert prof.values[0] == pytest.approx(0.1, abs=0)


def test_gap_error_names_the_interval(tmp_path):
    grid = TimeGrid.daily(START, dt_minutes=15)
    values = [100.0] * 96
    # drop 08:00 and 08:15 -> a 30-minute hole
    path = write_csv(tmp_path / "demand.csv", START, 15, values,
                     skip_indices=(32, 33))
    with pytest.raises(GapError) as err:
        ingest_profile(path, "demand", grid)
    assert "08:00" in str(err.value)
    assert len(err.value.gaps) == 1


def test_missing_head_or_tail_is_a_gap(tmp_path):
    grid = TimeGrid.daily(START, dt_minutes=15)
    path = write_csv(tmp_path / "demand.csv", START + timedelta(minutes=15), 15,
                     [1.0] * 95)
    with pytest.raises(GapError):
        ingest_profile(path, "demand", grid)


def test_negative_demand_rejected_with_timestamp(tmp_path):
    grid = TimeGrid(start=START, steps=24, dt_hours=1.0)
    values = [50.0] * 24
    values[5] = -1.0
    path = write_csv(tmp_path / "demand.csv", START, 60, values)
    with pytest.raises(DataError) as err:
        ingest_profile(path, "demand", grid)
    assert "05:00" in str(err.value)


def test_unknown_unit_tag_rejected(tmp_path):
    grid = TimeGrid(start=START, steps=24, dt_hours=1.0)
    path = write_csv(tmp_path / "p.csv", START, 60, [1.0] * 24,
                     header="timestamp,value_usd_gallon")
    with pytest.raises(DataError) as err:
        ingest_profile(path, "price", grid)
    assert "usd_gallon" in str(err.value)


def test_bad_header_rejected(tmp_path):
    grid = TimeGrid(start=START, steps=24, dt_hours=1.0)
    path = write_csv(tmp_path / "p.csv", START, 60, [1.0] * 24,
                     header="time,power")
    with pytest.raises(DataError):
        ingest_profile(path, "demand", grid)


def test_price_upsample_repeats_hourly_values(tmp_path):
    grid = TimeGrid.daily(START, dt_minutes=15)
    hourly = list(np.linspace(0.05, 0.28, 24))
    path = write_csv(tmp_path / "price.csv", START, 60, hourly)
    prof = ingest_profile(path, "price", grid)
    np.testing.assert_allclose(prof.values, np.repeat(hourly, 4))


def test_price_downsample_takes_matching_stamp(tmp_path):
    grid = TimeGrid(start=START, steps=24, dt_hours=1.0)
    per_15min = np.arange(96, dtype=float)
    path = write_csv(tmp_path / "price.csv", START, 15, per_15min)
    prof = ingest_profile(path, "price", grid)
    np.testing.assert_allclose(prof.values, per_15min.reshape(24, 4)[:, 0])


def test_power_upsample_conserves_energy(tmp_path):
    coarse = TimeGrid(start=START, steps=24, dt_hours=1.0)
    fine = TimeGrid.daily(START, dt_minutes=15)
    hourly = list(np.linspace(100.0, 900.0, 24))
    path = write_csv(tmp_path / "demand.csv", START, 60, hourly)
    prof = ingest_profile(path, "demand", fine)
    assert prof.energy_kwh() == pytest.approx(sum(hourly) * 1.0, rel=1e-12)
    del coarse


@settings(max_examples=60, deadline=None)
@given(
    steps=st.integers(min_value=1, max_value=8),
    factor=st.integers(min_value=2, max_value=15),
    data=st.data(),
)
def test_resampling_conserves_energy_property(tmp_path_factory, steps, factor, data):
    values = data.draw(st.lists(
        st.floats(min_value=0.0, max_value=5000.0,
                  allow_nan=False, allow_infinity=False),
        min_size=steps * factor, max_size=steps * factor,
    ))
    grid = TimeGrid(start=START, steps=steps, dt_hours=factor / 60.0)
    path = tmp_path_factory.mktemp("prop") / "demand.csv"
    write_csv(path, START, 1, values)
    prof = ingest_profile(path, "demand", grid)
    energy_in = sum(values) * (1.0 / 60.0)
    assert prof.energy_kwh() == pytest.approx(energy_in, rel=1e-9, abs=1e-9)


def test_ingestion_is_deterministic(tmp_path):
    grid = TimeGrid.daily(START, dt_minutes=15)
    rng = np.random.default_rng(7)
    values = np.round(rng.uniform(0, 2000, 1440), 3)
    path = write_csv(tmp_path / "demand.csv", START, 1, values)
    first = ingest_profile(path, "demand", grid)
    second = ingest_profile(path, "demand", grid)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    first.to_csv(out1)
    second.to_csv(out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_zeros_profile_helper():
    grid = TimeGrid(start=START, steps=5, dt_hours=1.0)
    assert zeros_profile(grid, "rb").values.sum() == 0.0
