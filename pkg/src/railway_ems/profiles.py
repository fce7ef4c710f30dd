"""Time-series profiles: the Profile type, CSV ingestion, and resampling.

Internal unit conventions are fixed package-wide: power in kW, energy in
kWh, prices in EUR/kWh, solar radiation in W/m2. Ingestion normalizes
everything to these units so downstream energy arithmetic is always
`power * dt_hours` with no hidden factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataError, GapError
from .timegrid import TimeGrid


@dataclass(frozen=True)
class ProfileKind:
    """Ingestion rules for one class of time series."""

    name: str
    internal_unit: str
    # unit tag (lowercase, as it appears in the CSV header) -> factor into internal unit
    unit_scales: dict[str, float]
    default_unit: str
    non_negative: bool
    # "mean" for rate-like series (power, radiation), "stamp" for prices
    downsample: str


PROFILE_KINDS: dict[str, ProfileKind] = {
    "demand": ProfileKind(
        name="demand", internal_unit="kW",
        unit_scales={"kw": 1.0, "mw": 1000.0}, default_unit="kw",
        non_negative=True, downsample="mean",
    ),
    "rb": ProfileKind(
        name="rb", internal_unit="kW",
        unit_scales={"kw": 1.0, "mw": 1000.0}, default_unit="kw",
        non_negative=True, downsample="mean",
    ),
    "radiation": ProfileKind(
        name="radiation", internal_unit="W/m2",
        unit_scales={"w_m2": 1.0}, default_unit="w_m2",
        non_negative=True, downsample="mean",
    ),
    "price": ProfileKind(
        name="price", internal_unit="EUR/kWh",
        unit_scales={"eur_kwh": 1.0, "eur_mwh": 1e-3}, default_unit="eur_kwh",
        non_negative=False, downsample="stamp",
    ),
    # derived kinds, produced internally rather than ingested
    "pv_power": ProfileKind(
        name="pv_power", internal_unit="kW",
        unit_scales={"kw": 1.0}, default_unit="kw",
        non_negative=True, downsample="mean",
    ),
    "ev_demand": ProfileKind(
        name="ev_demand", internal_unit="kW",
        unit_scales={"kw": 1.0}, default_unit="kw",
        non_negative=True, downsample="mean",
    ),
}


@dataclass(frozen=True)
class Profile:
    """Values on a TimeGrid, in the internal unit of the declared kind.

    Immutable after construction; the backing array is made read-only.
    """

    grid: TimeGrid
    values: np.ndarray
    kind: str = "demand"

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise DataError(f"unknown profile kind {self.kind!r}")
        arr = np.asarray(self.values, dtype=float).copy()
        if arr.ndim != 1:
            raise DataError(f"profile values must be 1-D, got shape {arr.shape}")
        if arr.shape[0] != self.grid.steps:
            raise DataError(
                f"profile has {arr.shape[0]} values but the grid has {self.grid.steps} steps"
            )
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DataError(f"profile contains a non-finite value at step {bad}")
        spec = PROFILE_KINDS[self.kind]
        if spec.non_negative and np.any(arr < 0):
            bad = int(np.flatnonzero(arr < 0)[0])
            raise DataError(
                f"{self.kind} profile must be non-negative; value {arr[bad]} at step {bad}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def unit(self) -> str:
        return PROFILE_KINDS[self.kind].internal_unit

    def __len__(self) -> int:
        return self.grid.steps

    def energy_kwh(self) -> float:
        """Total energy of a power-like profile over its span."""
        return float(self.values.sum() * self.grid.dt_hours)

    def to_csv(self, path: str | Path) -> None:
        """Serialize as `timestamp,value` rows (deterministic byte-for-byte)."""
        lines = ["timestamp,value"]
        for ts, v in zip(self.grid.times(), self.values):
            lines.append(f"{ts.isoformat()},{v!r}")
        Path(path).write_text("\n".join(lines) + "\n")


def constant_profile(grid: TimeGrid, value: float, kind: str) -> Profile:
    return Profile(grid=grid, values=np.full(grid.steps, float(value)), kind=kind)


def zeros_profile(grid: TimeGrid, kind: str = "demand") -> Profile:
    return constant_profile(grid, 0.0, kind)


def _parse_header_unit(column: str, spec: ProfileKind) -> float:
    """Map the value-column header onto a scale factor into internal units."""
    col = column.strip().lower()
    if col == "value":
        return spec.unit_scales[spec.default_unit]
    if col.startswith("value_"):
        tag = col[len("value_"):]
        if tag in spec.unit_scales:
            return spec.unit_scales[tag]
        raise DataError(
            f"unrecognized unit tag {tag!r} for {spec.name} profile; "
            f"expected one of {sorted(spec.unit_scales)}"
        )
    raise DataError(
        f"value column must be named 'value' or 'value_<unit>', got {column!r}"
    )


def _read_series(path: Path, spec: ProfileKind) -> tuple[pd.DatetimeIndex, np.ndarray]:
    if not path.exists():
        raise DataError(f"profile file not found: {path}")
    frame = pd.read_csv(path)
    if frame.shape[1] != 2 or frame.columns[0].strip().lower() != "timestamp":
        raise DataError(
            f"{path}: expected header 'timestamp,value[...]', got {list(frame.columns)}"
        )
    scale = _parse_header_unit(frame.columns[1], spec)
    try:
        stamps = pd.DatetimeIndex(pd.to_datetime(frame.iloc[:, 0], format="ISO8601"))
    except (ValueError, TypeError) as exc:
        raise DataError(f"{path}: unparseable ISO-8601 timestamp ({exc})") from exc
    values = pd.to_numeric(frame.iloc[:, 1], errors="coerce").to_numpy(dtype=float)
    if np.any(~np.isfinite(values)):
        row = int(np.flatnonzero(~np.isfinite(values))[0])
        raise DataError(f"{path}: missing or non-numeric value at {stamps[row]}")
    if len(stamps) == 0:
        raise DataError(f"{path}: empty profile")
    if not stamps.is_monotonic_increasing or stamps.has_duplicates:
        raise DataError(f"{path}: timestamps must be strictly increasing")
    return stamps, values * scale


def _check_coverage(path: Path, stamps: pd.DatetimeIndex, grid: TimeGrid) -> float:
    """Validate spacing and span; return the source resolution in hours."""
    if len(stamps) == 1:
        src_hours = grid.span_hours
    else:
        diffs = np.diff(stamps.values).astype("timedelta64[s]").astype(float) / 3600.0
        src_hours = float(diffs.min())
        if src_hours <= 0:
            raise DataError(f"{path}: duplicate timestamps")
        ratios = diffs / src_hours
        if np.any(np.abs(ratios - np.round(ratios)) > 1e-6):
            raise DataError(f"{path}: irregular timestamp spacing")
        gaps = []
        for i in np.flatnonzero(np.round(ratios).astype(int) > 1):
            gap_start = stamps[i] + timedelta(hours=src_hours)
            gap_end = stamps[i + 1]
            gaps.append((gap_start.to_pydatetime(), gap_end.to_pydatetime()))
        if gaps:
            ranges = "; ".join(f"[{a.isoformat()} .. {b.isoformat()})" for a, b in gaps)
            raise GapError(f"{path}: missing timestamps in {ranges}", gaps=gaps)

    first, last = stamps[0].to_pydatetime(), stamps[-1].to_pydatetime()
    if first != grid.start or last != grid.end - timedelta(hours=src_hours):
        raise GapError(
            f"{path}: series covers [{first.isoformat()} .. {last.isoformat()}] but the "
            f"grid needs [{grid.start.isoformat()} .. {grid.end.isoformat()})",
            gaps=[(grid.start, first), (last, grid.end)],
        )
    return src_hours


def _resample(values: np.ndarray, src_hours: float, grid: TimeGrid, spec: ProfileKind) -> np.ndarray:
    """Resample from the source resolution onto the grid.

    Rate-like kinds are block-averaged when the source is finer (energy
    conserving) and repeated when coarser; prices take the value at the
    matching step-start stamp.
    """
    ratio = grid.dt_hours / src_hours
    if abs(ratio - 1.0) < 1e-9:
        return values
    if ratio > 1:
        k = round(ratio)
        if abs(ratio - k) > 1e-6:
            raise DataError(
                f"source resolution {src_hours} h is not an integer divisor of "
                f"dt={grid.dt_hours} h"
            )
        if len(values) != grid.steps * k:
            raise DataError(
                f"expected {grid.steps * k} source rows for {grid.steps} steps, got {len(values)}"
            )
        blocks = values.reshape(grid.steps, k)
        if spec.downsample == "stamp":
            return blocks[:, 0].copy()
        return blocks.mean(axis=1)
    inv = 1.0 / ratio
    k = round(inv)
    if abs(inv - k) > 1e-6:
        raise DataError(
            f"source resolution {src_hours} h is not an integer multiple of "
            f"dt={grid.dt_hours} h"
        )
    return np.repeat(values, k)


def ingest_profile(path: str | Path, kind: str, grid: TimeGrid) -> Profile:
    """Read a `timestamp,value` CSV, validate it, and resample onto the grid.

    The value column may carry a unit tag (e.g. `value_eur_mwh`); values
    are normalized to the package's internal units. Raises GapError for
    missing timestamps, DataError for format/unit/negativity problems.
    """
    if kind not in PROFILE_KINDS:
        raise DataError(f"unknown profile kind {kind!r}")
    spec = PROFILE_KINDS[kind]
    path = Path(path)
    stamps, values = _read_series(path, spec)
    if spec.non_negative and np.any(values < 0):
        row = int(np.flatnonzero(values < 0)[0])
        raise DataError(
            f"{path}: {kind} values must be non-negative; {values[row]} at {stamps[row]}"
        )
    src_hours = _check_coverage(path, stamps, grid)
    resampled = _resample(values, src_hours, grid, spec)
    try:
        return Profile(grid=grid, values=resampled, kind=kind)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc
