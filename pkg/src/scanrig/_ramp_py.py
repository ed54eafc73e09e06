"""Pure-Python step-delay generator, fallback for the compiled kernel.

Must stay in lockstep with _ramp.pyx: both perform the identical sequence of
double-precision operations so the two paths emit bit-identical delays.
"""

from math import ceil, floor, sqrt

COMPILED = False


def step_delays_us(n_steps: int, steps_per_s: float, steps_per_s2: float) -> list[int]:
    """Inter-step delays (whole microseconds) for a constant-acceleration move.

    Ramp timing follows t(i) = sqrt(2*i/a) for the i-th step from rest, capped
    at the cruise rate 1/v. Produces a trapezoid when the move is long enough
    to reach cruise speed, otherwise a symmetric triangle; an odd leftover
    middle step runs at the triangle's peak rate.
    """
    if n_steps <= 0:
        return []
    cruise = int(floor(1e6 / steps_per_s + 0.5))
    if cruise < 1:
        cruise = 1
    n_full = int(ceil(steps_per_s * steps_per_s / (2.0 * steps_per_s2)))
    half = n_steps // 2
    n_ramp = n_full if n_full < half else half

    out = [0] * n_steps
    t_prev = 0.0
    for i in range(1, n_ramp + 1):
        t = sqrt(2.0 * i / steps_per_s2)
        d = int(floor((t - t_prev) * 1e6 + 0.5))
        if d < cruise:
            d = cruise
        out[i - 1] = d
        out[n_steps - i] = d
        t_prev = t

    if n_ramp == n_full or n_ramp == 0:
        filler = cruise  # cruise phase reached (or single-step move)
    else:
        filler = out[n_ramp - 1]  # triangular: leftover middle step at peak rate
    for i in range(n_ramp, n_steps - n_ramp):
        out[i] = filler
    return out
