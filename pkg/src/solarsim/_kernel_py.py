"""Pure-Python hour-integration kernel.

Reference implementation of the driving inner loop. The compiled extension
in `_kernel.pyx` mirrors this code operation-for-operation so both produce
bit-identical IEEE-754 results; keep the two in sync when editing.
"""

from __future__ import annotations

IMPLEMENTATION = "python"

_EPS_T = 1e-12  # seconds considered "no time left"
_EPS_M = 1e-9  # meters considered "segment finished"


def drive_hour(
    cum,  # float64[nseg+1] cumulative distance, meters
    grade,  # float64[nseg] effective elevation change per meter (regen-scaled)
    cos_incline,  # float64[nseg]
    cos_heading,  # float64[nseg]
    sin_heading,  # float64[nseg]
    zone_idx,  # int32[nseg] index into the per-zone arrays below
    wind_x,  # float64[nzones] wind_speed * cos(from_dir) for this hour
    wind_y,  # float64[nzones] wind_speed * sin(from_dir) for this hour
    charge_w,  # float64[nzones] array output power, W
    drag_coef,  # float64[nzones] 0.5 * rho * C_d * A_frontal
    roll_coef,  # float: m * g * C_rr
    grav_coef,  # float: m * g
    sys_w,  # float: constant power loss, W
    speed,  # float: commanded speed, m/s, > 0
    start_index,  # int: segment containing start_odo
    start_odo,  # float: meters
    battery,  # float: Wh
    capacity,  # float: Wh
    time_budget,  # float: seconds of wall clock available (normally 3600)
    substep,  # float: max integration chunk, meters
):
    """Advance the vehicle for up to `time_budget` seconds at constant speed.

    Within the call the environment is frozen (one weather hour); zone
    changes along crossed segments are honored. On mid-drive depletion the
    vehicle halts and spends the remaining time charging where it stopped.

    Returns (dist_m, drive_s, battery_wh, e_drag, e_roll, e_grav, e_sys,
    e_charge, e_spill, halted, arrived).
    """
    nseg = len(grade)
    i = start_index
    odo = start_odo
    t_left = time_budget
    dist = 0.0
    drive_s = 0.0
    e_drag = e_roll = e_grav = e_sys = e_charge = e_spill = 0.0
    halted = False
    arrived = False

    while t_left > _EPS_T:
        if i >= nseg:
            arrived = True
            break
        vw = wind_x[zone_idx[i]] * cos_heading[i] + wind_y[zone_idx[i]] * sin_heading[i]
        air = speed + vw
        p_drag = drag_coef[zone_idx[i]] * air * air * speed
        p_roll = roll_coef * cos_incline[i] * speed
        p_grav = grav_coef * grade[i] * speed
        p_charge = charge_w[zone_idx[i]]
        net = p_charge - (p_drag + p_roll + p_grav + sys_w)
        remaining = cum[i + 1] - odo
        while remaining > _EPS_M and t_left > _EPS_T:
            chunk = substep if substep < remaining else remaining
            t_chunk = chunk / speed
            if t_chunk > t_left:
                t_chunk = t_left
                chunk = speed * t_chunk
            if net < 0.0:
                t_dep = battery * 3600.0 / (-net)
                if t_dep < t_chunk:
                    f = t_dep / 3600.0
                    e_drag += p_drag * f
                    e_roll += p_roll * f
                    e_grav += p_grav * f
                    e_sys += sys_w * f
                    e_charge += p_charge * f
                    dist += speed * t_dep
                    odo += speed * t_dep
                    drive_s += t_dep
                    t_left -= t_dep
                    battery = 0.0
                    halted = True
                    break
            f = t_chunk / 3600.0
            e_drag += p_drag * f
            e_roll += p_roll * f
            e_grav += p_grav * f
            e_sys += sys_w * f
            e_charge += p_charge * f
            battery += net * f
            if battery > capacity:
                e_spill += battery - capacity
                battery = capacity
            dist += chunk
            odo += chunk
            drive_s += t_chunk
            t_left -= t_chunk
            remaining -= chunk
        if halted:
            break
        if remaining <= _EPS_M:
            i += 1
            if i <= nseg:
                odo = cum[i]

    if (halted or arrived) and t_left > _EPS_T:
        zi = zone_idx[i if i < nseg else nseg - 1]
        p_charge = charge_w[zi]
        f = t_left / 3600.0
        e_charge += p_charge * f
        e_sys += sys_w * f
        battery += (p_charge - sys_w) * f
        if battery > capacity:
            e_spill += battery - capacity
            battery = capacity
        if battery < 0.0:
            battery = 0.0

    return (
        dist,
        drive_s,
        battery,
        e_drag,
        e_roll,
        e_grav,
        e_sys,
        e_charge,
        e_spill,
        halted,
        arrived,
    )
