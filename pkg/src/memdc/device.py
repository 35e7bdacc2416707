"""Behavioral memristor model: pulse-driven resistance dynamics plus
read/write variability.

The device relaxes toward a voltage-dependent boundary resistance under
write pulses, with a closed-form solution for constant-amplitude pulses,
and stays clamped to [r_on, r_off] at all times.  Reads are non-disturbing
(0.2 V default is below the switching regime) and carry additive noise
whose standard deviation grows linearly with resistance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from . import _kernels
from .errors import NoSwitchingDirectionError

#: JSON keys of the fitted-parameter file, in canonical order.
PARAM_JSON_KEYS = (
    "r_on",
    "r_off",
    "a_p",
    "a_n",
    "t_p",
    "t_n",
    "a_p_win",
    "b_p_win",
    "a_n_win",
    "b_n_win",
    "r_p0",
    "r_p1",
    "r_n0",
    "r_n1",
)

DEFAULT_WRITE_WIDTH_S = 200e-9
DEFAULT_READ_WIDTH_S = 10e-6
DEFAULT_READ_AMPLITUDE_V = 0.2


@dataclass(frozen=True)
class DataDrivenParams:
    """Fitted constants of the pulse-response model.

    Resistances in ohm, voltage scales in volt (stored signed, as fitted;
    only magnitudes enter the rate law), rate prefactors in 1/(ohm*s).
    The *_win window constants are carried for file-format fidelity but are
    unused by the v1 dynamics (read conduction is ohmic).
    """

    r_on: float
    r_off: float
    a_p: float
    a_n: float
    t_p: float
    t_n: float
    r_p0: float
    r_p1: float
    r_n0: float
    r_n1: float
    a_p_win: float = 0.0
    b_p_win: float = 0.0
    a_n_win: float = 0.0
    b_n_win: float = 0.0
    temperature_tag: str = "4.2K"

    def __post_init__(self):
        if not (0.0 < self.r_on < self.r_off):
            raise ValueError("require 0 < r_on < r_off")
        if not (self.a_p > 0.0 and self.a_n < 0.0):
            raise ValueError("require a_p > 0 and a_n < 0 (Table sign convention)")
        if self.t_p == 0.0 or self.t_n == 0.0:
            raise ValueError("voltage scales t_p, t_n must be nonzero")

    def as_array(self) -> np.ndarray:
        """Flat float64 layout consumed by the kernels."""
        return np.array(
            [
                self.r_on,
                self.r_off,
                self.a_p,
                self.t_p,
                self.a_n,
                self.t_n,
                self.r_p0,
                self.r_p1,
                self.r_n0,
                self.r_n1,
            ],
            dtype=np.float64,
        )

    def to_json_dict(self) -> dict:
        return {key: getattr(self, key) for key in PARAM_JSON_KEYS}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "DataDrivenParams":
        missing = [k for k in PARAM_JSON_KEYS if k not in obj]
        if missing:
            raise ValueError(f"parameter file missing keys: {missing}")
        kwargs = {k: float(obj[k]) for k in PARAM_JSON_KEYS}
        if "temperature_tag" in obj:
            kwargs["temperature_tag"] = str(obj["temperature_tag"])
        return cls(**kwargs)


def load_params(path_or_name: str = "4k") -> DataDrivenParams:
    """Load fitted parameters from a JSON file.

    ``"4k"`` loads the packaged cryogenic parameter set (params_4k.json);
    anything else is treated as a filesystem path.
    """
    if path_or_name == "4k":
        text = resources.files("memdc.data").joinpath("params_4k.json").read_text()
    else:
        with open(path_or_name, "r", encoding="utf-8") as fh:
            text = fh.read()
    return DataDrivenParams.from_json_dict(json.loads(text))


def save_params(params: DataDrivenParams, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class Pulse:
    """One voltage pulse.  amplitude in V (signed), width in s."""

    amplitude: float
    width: float
    kind: str  # "write" | "read"

    def __post_init__(self):
        if self.kind not in ("write", "read"):
            raise ValueError("pulse kind must be 'write' or 'read'")
        if self.width < 0.0:
            raise ValueError("pulse width must be >= 0")

    @classmethod
    def write(cls, amplitude: float, width: float = DEFAULT_WRITE_WIDTH_S) -> "Pulse":
        return cls(amplitude=amplitude, width=width, kind="write")

    @classmethod
    def read(
        cls,
        amplitude: float = DEFAULT_READ_AMPLITUDE_V,
        width: float = DEFAULT_READ_WIDTH_S,
    ) -> "Pulse":
        return cls(amplitude=amplitude, width=width, kind="read")


@dataclass(frozen=True)
class VariabilityModel:
    """Noise knobs; all zero gives a noise-free device.

    Read noise is additive with sigma(R) = intercept + slope * (R - r_on);
    write noise is multiplicative (1 + eps) with eps ~ N(0, write_error
    fraction) clipped at +-4 sigma.
    """

    read_sigma_intercept: float = 0.0  # ohm
    read_sigma_slope: float = 0.0  # ohm per ohm
    write_error_fraction: float = 0.0

    def __post_init__(self):
        if min(self.read_sigma_intercept, self.read_sigma_slope, self.write_error_fraction) < 0:
            raise ValueError("variability parameters must be >= 0")

    @classmethod
    def none(cls) -> "VariabilityModel":
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def default(cls) -> "VariabilityModel":
        # Sub-1% read variability growing linearly with R, 0.5% write error.
        return cls(read_sigma_intercept=10.0, read_sigma_slope=0.003, write_error_fraction=0.005)

    def read_sigma(self, resistance: float, r_on: float) -> float:
        return self.read_sigma_intercept + self.read_sigma_slope * (resistance - r_on)


@dataclass
class MemristorState:
    """One device: current resistance plus its private random stream.

    Single-owner mutation: exactly one logical task applies pulses to a
    state at a time.  States clone with their full RNG state so trajectories
    are reproducible and transferable.
    """

    resistance: float
    params: DataDrivenParams
    variability: VariabilityModel = field(default_factory=VariabilityModel.none)
    rng: np.random.Generator = None
    stream_key: tuple = ()

    def __post_init__(self):
        if self.rng is None:
            self.rng = np.random.default_rng(np.random.SeedSequence(list(self.stream_key) or 0))
        if not (self.params.r_on <= self.resistance <= self.params.r_off):
            raise ValueError("resistance outside [r_on, r_off]")

    @classmethod
    def create(
        cls,
        params: DataDrivenParams,
        variability: VariabilityModel | None = None,
        seed=0,
        resistance: float | None = None,
    ) -> "MemristorState":
        key = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
        rng = np.random.default_rng(np.random.SeedSequence(list(key)))
        return cls(
            resistance=params.r_off if resistance is None else resistance,
            params=params,
            variability=variability or VariabilityModel.none(),
            rng=rng,
            stream_key=key,
        )

    def clone(self) -> "MemristorState":
        dup = np.random.default_rng(np.random.SeedSequence(list(self.stream_key) or 0))
        dup.bit_generator.state = self.rng.bit_generator.state
        return MemristorState(
            resistance=self.resistance,
            params=self.params,
            variability=self.variability,
            rng=dup,
            stream_key=self.stream_key,
        )


def boundary_resistance(params: DataDrivenParams, amplitude: float) -> float:
    """Voltage-dependent boundary resistance r_b(V), clamped to the device
    bounds.  Raises for amplitude 0 (no switching direction)."""
    if amplitude == 0.0:
        raise NoSwitchingDirectionError("amplitude 0 V selects no switching direction")
    return _kernels.boundary(float(amplitude), params.as_array())


def switching_rate(params: DataDrivenParams, amplitude: float) -> float:
    """Rate magnitude kappa(V) in 1/(ohm*s); 0 at zero amplitude."""
    return _kernels.rate(float(amplitude), params.as_array())


def write_update_noise_free(params: DataDrivenParams, resistance: float, amplitude: float, width: float) -> float:
    """Closed-form noise-free resistance after one constant write pulse."""
    return _kernels.write_step(float(resistance), float(amplitude), float(width), params.as_array())


def apply_write_pulse(state: MemristorState, pulse: Pulse) -> MemristorState:
    """Apply one write pulse in place (and return the state).

    Degenerate pulses (zero width or amplitude) are the identity and draw
    no noise; every effective write consumes exactly one noise draw.
    """
    if pulse.kind != "write":
        raise ValueError("apply_write_pulse requires a write pulse")
    if pulse.amplitude == 0.0 or pulse.width <= 0.0:
        return state
    p = state.params
    r = _kernels.write_step(state.resistance, pulse.amplitude, pulse.width, p.as_array())
    z = float(state.rng.standard_normal())
    z = min(max(z, -4.0), 4.0)
    r *= 1.0 + state.variability.write_error_fraction * z
    state.resistance = min(max(r, p.r_on), p.r_off)
    return state


def read_resistance(state: MemristorState, pulse: Pulse | None = None) -> float:
    """Measure the resistance with one read pulse.

    Returns R plus additive noise, clamped to the physical bounds; the
    device state is untouched (reads are sub-threshold by construction).
    """
    if pulse is None:
        pulse = Pulse.read()
    if pulse.kind != "read":
        raise ValueError("read_resistance requires a read pulse")
    p = state.params
    sigma = state.variability.read_sigma(state.resistance, p.r_on)
    value = state.resistance + sigma * float(state.rng.standard_normal())
    return min(max(value, p.r_on), p.r_off)
