"""Solar radiation to PV active power conversion.

The power curve has three regimes: a quadratic ramp below the threshold
r_c where output responds strongly to radiation, a linear section up to
the standard-environment radiation r_std, and saturation at the plant
rating beyond it. The curve is continuous at both breakpoints; breakpoint
membership uses half-open intervals (r_c and r_std belong to the branch
on their right).
"""

from __future__ import annotations

import numpy as np

from .errors import DataError
from .profiles import Profile
from .stationconfig import PvParams


def pv_power(beta: float, params: PvParams) -> float:
    """Active power (kW) for one radiation measurement (W/m2)."""
    if not (beta >= 0):
        raise DataError(f"radiation must be non-negative, got {beta}")
    if beta >= params.r_std_wm2:
        return params.rated_kw
    if beta >= params.r_c_wm2:
        return beta / params.r_std_wm2 * params.rated_kw
    return beta * beta / (params.r_c_wm2 * params.r_std_wm2) * params.rated_kw


def pv_profile(radiation: Profile, params: PvParams) -> Profile:
    """Pointwise conversion of a radiation profile to a PV power profile."""
    beta = radiation.values
    if np.any(beta < 0):
        t = int(np.flatnonzero(beta < 0)[0])
        raise DataError(f"radiation must be non-negative; {beta[t]} at step {t}")
    quad = beta * beta / (params.r_c_wm2 * params.r_std_wm2) * params.rated_kw
    lin = beta / params.r_std_wm2 * params.rated_kw
    values = np.where(
        beta >= params.r_std_wm2, params.rated_kw,
        np.where(beta >= params.r_c_wm2, lin, quad),
    )
    return Profile(grid=radiation.grid, values=values, kind="pv_power")


def size_pv_from_penetration(peak_demand_kw: float, penetration: float) -> float:
    """Plant rating as a fraction of the peak train demand."""
    if peak_demand_kw <= 0:
        raise DataError(f"peak demand must be positive, got {peak_demand_kw}")
    if not (0.0 <= penetration <= 1.0):
        raise DataError(f"penetration must be in [0, 1], got {penetration}")
    return penetration * peak_demand_kw
