"""Programmable-gain DC source: output law, design equations, per-device
target-state distributions and exhaustive output enumeration.

The output voltage is v_in * R_tot / r_load with R_tot the parallel
crossbar resistance, giving the range, ideal resolution and peak-power
relations implemented here.  Distributions assign each device n_s target
resistances sharing the r_on/r_off endpoints, with per-device interior
offsets so the n_s^n_m combination outputs are pairwise distinct.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .crossbar import Crossbar, total_resistance
from .device import DataDrivenParams
from .errors import (
    DegenerateDistributionError,
    EnumerationTooLargeError,
    TargetOutOfRangeError,
)

#: Exhaustive-enumeration ceiling (~2e6 combinations, 5^9 fits).
ENUMERATION_LIMIT = 2_097_152


@dataclass(frozen=True)
class DcSourceSpec:
    """Circuit constants: supply v_in (V), load r_load (ohm), device count
    n_m, states per device n_s."""

    v_in: float
    r_load: float
    n_m: int
    n_s: int

    def __post_init__(self):
        if self.v_in <= 0 or self.r_load <= 0:
            raise ValueError("v_in and r_load must be positive")
        if self.n_m < 1 or self.n_s < 2:
            raise ValueError("require n_m >= 1 and n_s >= 2")

    @classmethod
    def default(cls) -> "DcSourceSpec":
        return cls(v_in=1e-3, r_load=1.0, n_m=9, n_s=5)


@dataclass(frozen=True)
class StateDistribution:
    """Per-device ordered target resistances, n_s entries each, strictly
    increasing, endpoints pinned to r_on / r_off for every device."""

    resistances: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for states in self.resistances:
            if len(states) < 2:
                raise ValueError("each device needs at least two states")
            if any(b <= a for a, b in zip(states, states[1:])):
                raise ValueError("states must be strictly increasing")

    @property
    def n_devices(self) -> int:
        return len(self.resistances)

    @property
    def n_states(self) -> int:
        return len(self.resistances[0])

    def device_states(self, index: int) -> tuple[float, ...]:
        return self.resistances[index]

    def to_json_dict(self) -> dict:
        return {str(i): list(states) for i, states in enumerate(self.resistances)}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "StateDistribution":
        keys = sorted(obj, key=int)
        return cls(tuple(tuple(float(x) for x in obj[k]) for k in keys))


def output_voltage(spec: DcSourceSpec, xbar: Crossbar) -> float:
    """V_out = v_in * R_tot / r_load."""
    return spec.v_in * total_resistance(xbar) / spec.r_load


def voltage_range(spec: DcSourceSpec, params: DataDrivenParams) -> float:
    """Theoretical output span: v_in * (r_off - r_on) / (r_load * n_m)."""
    return spec.v_in * (params.r_off - params.r_on) / (spec.r_load * spec.n_m)


def ideal_resolution(spec: DcSourceSpec, params: DataDrivenParams) -> float:
    """Range divided by the combination count n_s^n_m (uniform-spacing
    idealization)."""
    return voltage_range(spec, params) / float(spec.n_s) ** spec.n_m


def max_power(spec: DcSourceSpec, params: DataDrivenParams) -> float:
    """Peak feedback-loop dissipation (v_in/r_load)^2 * r_off/n_m, reached
    at the maximum output voltage."""
    return (spec.v_in / spec.r_load) ** 2 * (params.r_off / spec.n_m)


def source_budget_count(spec: DcSourceSpec, params: DataDrivenParams, cooling_budget_w: float = 1.5, opamp_power_w: float = 50e-6) -> int:
    """How many sources fit a stage cooling budget, op-amp included."""
    return int(cooling_budget_w / (max_power(spec, params) + opamp_power_w))


def output_bounds(spec: DcSourceSpec, params: DataDrivenParams) -> tuple[float, float]:
    """Attainable (V_min, V_max) with every device at r_on / r_off."""
    scale = spec.v_in / (spec.r_load * spec.n_m)
    return scale * params.r_on, scale * params.r_off


def _base_conductance_states(spec: DcSourceSpec, params: DataDrivenParams, device: int) -> np.ndarray:
    """Descending conductances for one device: endpoints at g_on/g_off,
    interior uniform in conductance shifted per device index."""
    g_on = 1.0 / params.r_on
    g_off = 1.0 / params.r_off
    span = g_on - g_off
    g = g_on - np.arange(spec.n_s, dtype=np.float64) * (span / (spec.n_s - 1))
    if spec.n_s > 2:
        g[1:-1] += device * span / (spec.n_s * spec.n_m * 8.0)
    return g


def _distribution_from_conductances(per_device_g: list[np.ndarray]) -> StateDistribution:
    lists = []
    for g in per_device_g:
        r = np.sort(1.0 / g)
        lists.append(tuple(float(x) for x in r))
    return StateDistribution(tuple(lists))


def _find_collision(voltages_sorted: np.ndarray, order: np.ndarray) -> tuple[int, int] | None:
    eq = np.flatnonzero(voltages_sorted[1:] == voltages_sorted[:-1])
    if eq.size == 0:
        return None
    i = int(eq[0])
    return int(order[i]), int(order[i + 1])


def build_state_distributions(
    spec: DcSourceSpec,
    params: DataDrivenParams,
    seed: int = 0,
    strict: bool = True,
    max_attempts: int = 5,
) -> StateDistribution:
    """Construct per-device target lists with all parallel-sum outputs
    pairwise distinct.

    Interior points start uniform in conductance, offset per device, and
    are re-jittered deterministically (seed-derived) if the enumeration
    check finds a collision.  With shared endpoints and no interior points
    (n_s = 2, n_m >= 2) distinctness is impossible by multiset symmetry;
    strict mode raises DegenerateDistributionError with a colliding pair,
    strict=False returns the base distribution anyway (enumeration then
    reports distinct_count < n_s^n_m).
    """
    per_device = [_base_conductance_states(spec, params, k) for k in range(spec.n_m)]
    combos = spec.n_s**spec.n_m
    verifiable = combos <= ENUMERATION_LIMIT

    for attempt in range(max_attempts):
        dist = _distribution_from_conductances(per_device)
        if not verifiable:
            return dist
        result = enumerate_outputs(spec, dist)
        if result.distinct_count == combos:
            return dist
        if attempt == max_attempts - 1 or spec.n_s == 2:
            break
        # Deterministic re-jitter of interior points only.
        rng = np.random.default_rng(np.random.SeedSequence([seed, attempt]))
        g_on = 1.0 / params.r_on
        g_off = 1.0 / params.r_off
        span = g_on - g_off
        for k in range(spec.n_m):
            jitter = rng.uniform(-1.0, 1.0, size=spec.n_s - 2)
            per_device[k][1:-1] += jitter * span / (spec.n_s * spec.n_m * 64.0)
            per_device[k][1:-1] = np.clip(
                per_device[k][1:-1], g_off + span * 1e-4, g_on - span * 1e-4
            )

    dist = _distribution_from_conductances(per_device)
    if not strict:
        return dist
    result = enumerate_outputs(spec, dist)
    pair = _find_collision(result.voltages, result.combo_order)
    raise DegenerateDistributionError(
        f"output collision for combination pair {pair} "
        f"({result.distinct_count} distinct of {combos})",
        colliding_pair=pair,
    )


@dataclass(frozen=True)
class EnumerationResult:
    """Sorted combination outputs with adjacent-gap statistics.

    voltages is ascending; combo_order[i] is the row-major combination
    index (device 0 most significant) that produced voltages[i].
    """

    voltages: np.ndarray
    combo_order: np.ndarray
    distinct_count: int
    min_gap: float
    mean_gap: float
    max_gap: float
    resolution: float  # max adjacent gap over the central 90% of the span

    @property
    def span(self) -> float:
        return float(self.voltages[-1] - self.voltages[0])


def _central_band_max_gap(voltages: np.ndarray) -> float:
    span = voltages[-1] - voltages[0]
    if span <= 0.0:
        return 0.0
    lo = voltages[0] + 0.05 * span
    hi = voltages[-1] - 0.05 * span
    gaps = np.diff(voltages)
    inside = (voltages[:-1] >= lo) & (voltages[1:] <= hi)
    if not inside.any():
        return float(gaps.max())
    return float(gaps[inside].max())


def conductance_sums(dist: StateDistribution) -> np.ndarray:
    """Total conductance of every state combination, in row-major
    combination order (device 0 most significant digit)."""
    totals = np.zeros(1, dtype=np.float64)
    for states in dist.resistances:
        g = 1.0 / np.asarray(states, dtype=np.float64)
        totals = (totals[:, None] + g[None, :]).ravel()
    return totals


def enumerate_outputs(spec: DcSourceSpec, dist: StateDistribution, limit: int = ENUMERATION_LIMIT) -> EnumerationResult:
    """All combination outputs, sorted ascending, plus gap statistics.

    Raises EnumerationTooLargeError above `limit` combinations (sample
    instead of enumerating for larger spaces).
    """
    combos = dist.n_states**dist.n_devices
    if combos > limit:
        raise EnumerationTooLargeError(
            f"{combos} combinations exceed the {limit} enumeration limit; use sampling"
        )
    g_tot = conductance_sums(dist)
    v = spec.v_in * (1.0 / g_tot) / spec.r_load
    order = np.argsort(v, kind="stable").astype(np.int64)
    v_sorted = v[order]
    gaps = np.diff(v_sorted)
    distinct = int(np.unique(v_sorted).size)
    if gaps.size == 0:
        return EnumerationResult(v_sorted, order, distinct, 0.0, 0.0, 0.0, 0.0)
    return EnumerationResult(
        voltages=v_sorted,
        combo_order=order,
        distinct_count=distinct,
        min_gap=float(gaps.min()),
        mean_gap=float(gaps.mean()),
        max_gap=float(gaps.max()),
        resolution=_central_band_max_gap(v_sorted),
    )


def brute_force_outputs(spec: DcSourceSpec, dist: StateDistribution) -> list[float]:
    """Independent enumeration oracle: explicit product loop, same
    left-to-right conductance accumulation, sorted ascending."""
    outputs = []
    for combo in itertools.product(*(range(dist.n_states) for _ in range(dist.n_devices))):
        g = 0.0
        for device, state in enumerate(combo):
            g += 1.0 / dist.resistances[device][state]
        outputs.append(spec.v_in * (1.0 / g) / spec.r_load)
    outputs.sort()
    return outputs


def decode_combination(dist: StateDistribution, combo_index: int) -> tuple[int, ...]:
    """Row-major combination index -> per-device state indices."""
    n_s = dist.n_states
    digits = []
    for _ in range(dist.n_devices):
        combo_index, rem = divmod(combo_index, n_s)
        digits.append(rem)
    return tuple(reversed(digits))


@dataclass(frozen=True)
class Assignment:
    """One chosen combination: per-device state indices and resistances."""

    state_indices: tuple[int, ...]
    resistances: tuple[float, ...]
    ideal_voltage: float


class OutputTable:
    """Precomputed sorted voltage table for nearest-output lookups."""

    def __init__(self, spec: DcSourceSpec, dist: StateDistribution, result: EnumerationResult | None = None):
        self.spec = spec
        self.dist = dist
        self.result = result if result is not None else enumerate_outputs(spec, dist)

    @property
    def v_min(self) -> float:
        return float(self.result.voltages[0])

    @property
    def v_max(self) -> float:
        return float(self.result.voltages[-1])

    def lookup(self, target: float) -> Assignment:
        """Assignment whose ideal output is nearest `target`; exact-midpoint
        ties break toward the lower voltage."""
        v = self.result.voltages
        if not (self.v_min <= target <= self.v_max):
            raise TargetOutOfRangeError(
                f"target {target} V outside [{self.v_min}, {self.v_max}] V"
            )
        pos = int(np.searchsorted(v, target))
        if pos == 0:
            best = 0
        elif pos >= v.size:
            best = v.size - 1
        else:
            below = pos - 1
            # tie toward the lower voltage
            best = below if target - v[below] <= v[pos] - target else pos
        combo = int(self.result.combo_order[best])
        indices = decode_combination(self.dist, combo)
        res = tuple(self.dist.resistances[d][s] for d, s in enumerate(indices))
        return Assignment(indices, res, float(v[best]))


def lookup_configuration(dist: StateDistribution, target: float, spec: DcSourceSpec, table: OutputTable | None = None) -> Assignment:
    """Nearest-output state assignment for a target voltage (builds a
    one-shot table unless one is supplied)."""
    if table is None:
        table = OutputTable(spec, dist)
    return table.lookup(target)
