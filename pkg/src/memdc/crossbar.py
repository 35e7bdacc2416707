"""Word-line/bit-line array of memristors acting as one parallel feedback
resistor.

Selection is ideal: a pulse routed to an address touches exactly that
device (no sneak paths, line resistance, or half-select disturb).  All
devices sit electrically in parallel between supply and virtual ground, so
the aggregate is a plain conductance sum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .device import (
    DataDrivenParams,
    MemristorState,
    Pulse,
    VariabilityModel,
    apply_write_pulse,
    read_resistance,
)
from .errors import BadAddressError


@dataclass(frozen=True)
class Address:
    row: int
    col: int


class Crossbar:
    """rows x cols grid of MemristorState, row-major."""

    def __init__(self, rows: int, cols: int, devices: list[MemristorState]):
        if rows < 1 or cols < 1 or len(devices) != rows * cols:
            raise ValueError("device list must hold rows*cols states")
        self.rows = rows
        self.cols = cols
        self.devices = devices

    @classmethod
    def uniform(
        cls,
        rows: int,
        cols: int,
        params: DataDrivenParams,
        variability: VariabilityModel | None = None,
        seed=0,
        initial_resistance: float | None = None,
    ) -> "Crossbar":
        """All devices share one parameter set; per-device RNG streams are
        derived deterministically from (seed, device index)."""
        base = tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)
        devices = [
            MemristorState.create(
                params,
                variability=variability,
                seed=base + (index,),
                resistance=initial_resistance,
            )
            for index in range(rows * cols)
        ]
        return cls(rows, cols, devices)

    @property
    def n_devices(self) -> int:
        return self.rows * self.cols

    def _flat_index(self, addr: Address) -> int:
        if not (0 <= addr.row < self.rows and 0 <= addr.col < self.cols):
            raise BadAddressError(f"address ({addr.row},{addr.col}) outside {self.rows}x{self.cols} array")
        return addr.row * self.cols + addr.col

    def at(self, addr: Address) -> MemristorState:
        return self.devices[self._flat_index(addr)]

    def device(self, index: int) -> MemristorState:
        return self.devices[index]

    def address_of(self, index: int) -> Address:
        return Address(index // self.cols, index % self.cols)

    def resistances(self) -> np.ndarray:
        return np.array([d.resistance for d in self.devices], dtype=np.float64)

    def clone(self) -> "Crossbar":
        return Crossbar(self.rows, self.cols, [d.clone() for d in self.devices])

    def snapshot(self) -> dict:
        """JSON-serializable snapshot: geometry, flat resistances, noise
        settings, and exact RNG states for bit-reproducible resume."""
        return {
            "rows": self.rows,
            "cols": self.cols,
            "resistances_ohm": [d.resistance for d in self.devices],
            "variability": [
                {
                    "read_sigma_intercept": d.variability.read_sigma_intercept,
                    "read_sigma_slope": d.variability.read_sigma_slope,
                    "write_error_fraction": d.variability.write_error_fraction,
                }
                for d in self.devices
            ],
            "stream_keys": [list(d.stream_key) for d in self.devices],
            "rng_states": [json.loads(json.dumps(d.rng.bit_generator.state)) for d in self.devices],
            "params": self.devices[0].params.to_json_dict(),
        }

    @classmethod
    def restore(cls, snap: dict) -> "Crossbar":
        params = DataDrivenParams.from_json_dict(snap["params"])
        devices = []
        for i, r in enumerate(snap["resistances_ohm"]):
            var = VariabilityModel(**snap["variability"][i])
            state = MemristorState.create(
                params, variability=var, seed=tuple(snap["stream_keys"][i]), resistance=r
            )
            state.rng.bit_generator.state = snap["rng_states"][i]
            devices.append(state)
        return cls(snap["rows"], snap["cols"], devices)


def total_resistance(xbar: Crossbar) -> float:
    """Parallel combination (sum of conductances, inverted)."""
    return 1.0 / float(np.sum(1.0 / xbar.resistances()))


def apply_pulse_at(xbar: Crossbar, addr: Address, pulse: Pulse):
    """Route one pulse to the addressed device.

    Write pulses mutate only that device and return None; read pulses
    return the measured resistance.  Out-of-range addresses raise
    BadAddressError.
    """
    state = xbar.at(addr)
    if pulse.kind == "write":
        apply_write_pulse(state, pulse)
        return None
    return read_resistance(state, pulse)
