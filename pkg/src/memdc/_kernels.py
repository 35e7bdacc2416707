"""Hot numeric kernels: pulse dynamics and the write/verify feedback loop.

The same Python source is compiled with numba ``@njit`` when available and
used as-is (pure Python / numpy scalars) otherwise.  Both flavors execute
identical IEEE-754 arithmetic, so trajectories are bit-identical between
the two paths.  Set ``MEMDC_DISABLE_NUMBA=1`` to force the fallback;
``benchmarks/bench_kernels.py`` times the two against each other.

Device parameters are passed as a flat float64 array with the layout given
by the ``P_*`` index constants below (see ``DataDrivenParams.as_array``).
"""

import math
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _env_flag_disabled() -> bool:
    return os.environ.get("MEMDC_DISABLE_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
        "on",
    )


USE_NUMBA = HAVE_NUMBA and not _env_flag_disabled()

# Parameter array layout (resistances in ohm, voltages in volt, widths in s).
P_R_ON = 0
P_R_OFF = 1
P_A_P = 2
P_T_P = 3
P_A_N = 4
P_T_N = 5
P_RP0 = 6
P_RP1 = 7
P_RN0 = 8
P_RN1 = 9
PARAM_ARRAY_LEN = 10


def _boundary_impl(v, p):
    # Boundary resistance r_b(V): linear in V per polarity, clamped to
    # [r_on, r_off].  Caller guarantees v != 0.
    if v > 0.0:
        raw = p[P_RP0] + p[P_RP1] * v
    else:
        raw = p[P_RN0] + p[P_RN1] * v
    if raw < p[P_R_ON]:
        return p[P_R_ON]
    if raw > p[P_R_OFF]:
        return p[P_R_OFF]
    return raw


def _rate_impl(v, p):
    # Switching rate magnitude kappa(V) >= 0; exponential in |V| with the
    # polarity-matched prefactor/voltage-scale magnitudes.
    if v == 0.0:
        return 0.0
    if v > 0.0:
        return abs(p[P_A_P]) * (math.exp(abs(v) / abs(p[P_T_P])) - 1.0)
    return abs(p[P_A_N]) * (math.exp(abs(v) / abs(p[P_T_N])) - 1.0)


def _write_step_impl(r, v, width, p):
    # Noise-free constant-voltage relaxation toward r_b over `width`.
    # Identity when the pulse cannot drive the state (near side / degenerate).
    if v == 0.0 or width <= 0.0:
        return r
    rb = _boundary(v, p)
    gap = r - rb
    if v > 0.0:
        if gap <= 0.0:
            return r
    else:
        if gap >= 0.0:
            return r
    kappa = _rate(v, p)
    return rb + gap / (1.0 + kappa * abs(gap) * width)


def _feedback_program_impl(
    resistance,
    target,
    p,
    v_p_min,
    v_n_min,
    amp_step,
    amp_cap,
    tolerance,
    max_writes,
    verify_reads,
    write_width,
    sigma_icpt,
    sigma_slope,
    write_err,
    write_noise,
    read_noise,
    out_write_amp,
    out_write_r,
    out_read_r,
):
    """Closed-loop write/verify programming of one device.

    Reads, then alternates write/read until the read lands within the
    relative tolerance band around `target` or `max_writes` writes have been
    spent.  Write amplitude ramps linearly from v_p_min / v_n_min by
    amp_step (capped at |amp_cap|) and restarts on polarity change.  On
    entering the band the confirming read counts as the first of
    `verify_reads` verification reads.

    Noise draws are consumed sequentially from `write_noise` / `read_noise`
    (one per pulse; write draws clipped at +-4 sigma).  Returns
    (resistance, writes, reads, reached, measured_mean) where measured_mean
    averages the verification reads (NaN when the budget ran out).
    """
    r_on = p[P_R_ON]
    r_off = p[P_R_OFF]
    lo = target * (1.0 - tolerance)
    hi = target * (1.0 + tolerance)
    writes = 0
    reads = 0
    amp = 0.0

    sigma = sigma_icpt + sigma_slope * (resistance - r_on)
    rd = resistance + sigma * read_noise[reads]
    if rd < r_on:
        rd = r_on
    elif rd > r_off:
        rd = r_off
    out_read_r[reads] = rd
    reads += 1

    while rd < lo or rd > hi:
        if writes >= max_writes:
            return resistance, writes, reads, 0, math.nan
        if rd > hi:
            # Too resistive: SET (positive pulse lowers R).
            if amp > 0.0:
                amp = min(amp + amp_step, amp_cap)
            else:
                amp = v_p_min
        else:
            # Too conductive: RESET (negative pulse raises R).
            if amp < 0.0:
                amp = max(amp - amp_step, -amp_cap)
            else:
                amp = v_n_min
        resistance = _write_step(resistance, amp, write_width, p)
        z = write_noise[writes]
        if z > 4.0:
            z = 4.0
        elif z < -4.0:
            z = -4.0
        resistance = resistance * (1.0 + write_err * z)
        if resistance < r_on:
            resistance = r_on
        elif resistance > r_off:
            resistance = r_off
        out_write_amp[writes] = amp
        out_write_r[writes] = resistance
        writes += 1

        sigma = sigma_icpt + sigma_slope * (resistance - r_on)
        rd = resistance + sigma * read_noise[reads]
        if rd < r_on:
            rd = r_on
        elif rd > r_off:
            rd = r_off
        out_read_r[reads] = rd
        reads += 1

    verify_sum = rd
    for _ in range(verify_reads - 1):
        sigma = sigma_icpt + sigma_slope * (resistance - r_on)
        rd = resistance + sigma * read_noise[reads]
        if rd < r_on:
            rd = r_on
        elif rd > r_off:
            rd = r_off
        out_read_r[reads] = rd
        reads += 1
        verify_sum += rd
    return resistance, writes, reads, 1, verify_sum / verify_reads


if USE_NUMBA:
    _njit = numba.njit(cache=True)
    _boundary = _njit(_boundary_impl)
    _rate = _njit(_rate_impl)
    _write_step = _njit(_write_step_impl)
    feedback_program = _njit(_feedback_program_impl)
else:
    _boundary = _boundary_impl
    _rate = _rate_impl
    _write_step = _write_step_impl
    feedback_program = _feedback_program_impl

# Stable aliases for callers and the benchmark.
boundary = _boundary
rate = _rate
write_step = _write_step


def backend_name() -> str:
    """'numba' when kernels are jitted, 'numpy' on the fallback path."""
    return "numba" if USE_NUMBA else "numpy"
