# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled step-delay generator.

Mirrors _ramp_py.step_delays_us operation-for-operation; the two must emit
bit-identical delay sequences.
"""

from libc.math cimport ceil, floor, sqrt

COMPILED = True


def step_delays_us(Py_ssize_t n_steps, double steps_per_s, double steps_per_s2):
    """Inter-step delays (whole microseconds) for a constant-acceleration move.

    See _ramp_py.step_delays_us for the profile definition.
    """
    if n_steps <= 0:
        return []
    cdef long long cruise = <long long>floor(1e6 / steps_per_s + 0.5)
    if cruise < 1:
        cruise = 1
    cdef Py_ssize_t n_full = <Py_ssize_t>ceil(steps_per_s * steps_per_s / (2.0 * steps_per_s2))
    cdef Py_ssize_t half = n_steps // 2
    cdef Py_ssize_t n_ramp = n_full if n_full < half else half

    out = [0] * n_steps
    cdef double t_prev = 0.0
    cdef double t
    cdef long long d
    cdef long long filler
    cdef Py_ssize_t i
    for i in range(1, n_ramp + 1):
        t = sqrt(2.0 * i / steps_per_s2)
        d = <long long>floor((t - t_prev) * 1e6 + 0.5)
        if d < cruise:
            d = cruise
        out[i - 1] = d
        out[n_steps - i] = d
        t_prev = t

    if n_ramp == n_full or n_ramp == 0:
        filler = cruise
    else:
        filler = out[n_ramp - 1]
    for i in range(n_ramp, n_steps - n_ramp):
        out[i] = filler
    return out
