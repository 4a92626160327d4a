# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hour-integration kernel.

Mirrors `_kernel_py.drive_hour` operation-for-operation; both run plain
IEEE-754 double arithmetic in the same order, so results are bit-identical.
Keep the two in sync when editing.
"""

IMPLEMENTATION = "cython"

DEF EPS_T = 1e-12
DEF EPS_M = 1e-9


def drive_hour(
    double[::1] cum,
    double[::1] grade,
    double[::1] cos_incline,
    double[::1] cos_heading,
    double[::1] sin_heading,
    int[::1] zone_idx,
    double[::1] wind_x,
    double[::1] wind_y,
    double[::1] charge_w,
    double[::1] drag_coef,
    double roll_coef,
    double grav_coef,
    double sys_w,
    double speed,
    int start_index,
    double start_odo,
    double battery,
    double capacity,
    double time_budget,
    double substep,
):
    cdef int nseg = grade.shape[0]
    cdef int i = start_index
    cdef double odo = start_odo
    cdef double t_left = time_budget
    cdef double dist = 0.0
    cdef double drive_s = 0.0
    cdef double e_drag = 0.0, e_roll = 0.0, e_grav = 0.0
    cdef double e_sys = 0.0, e_charge = 0.0, e_spill = 0.0
    cdef bint halted = False
    cdef bint arrived = False
    cdef double vw, air, p_drag, p_roll, p_grav, p_charge, net
    cdef double remaining, chunk, t_chunk, t_dep, f
    cdef int zi

    while t_left > EPS_T:
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
        while remaining > EPS_M and t_left > EPS_T:
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
        if remaining <= EPS_M:
            i += 1
            if i <= nseg:
                odo = cum[i]

    if (halted or arrived) and t_left > EPS_T:
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
