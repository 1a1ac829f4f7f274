"""Parametric external-memory bus timing.

Two access patterns are distinguished:

* streaming -- long sequential bursts (s2/s3).  A fraction ``stream_efficiency``
  (eta) of the peak beat rate is achieved; the resulting stall cycles are
  spread evenly through the transfer.
* discrete -- on-demand single-burst reads (s1).  Each burst pays one transfer
  cycle plus ``burst_overhead_cycles`` of fixed latency (precharge, row
  activation and the like, folded into one knob).

Fractional overheads are realized deterministically with an error
accumulator, keeping schedules reproducible.  Ideal mode pins eta = 1 and
overhead = 0, which makes the stream schedule the identity and a discrete
access cost exactly one cycle.

Throughput and I/O efficiency are always derived from simulated cycle
counts, never stored independently:

    throughput      = table bits / (total_cycles / clock)
    I/O efficiency  = throughput / theoretical bandwidth
                    = table bits / (total_cycles * bus width)
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


class BusError(ValueError):
    """Raised for invalid bus configurations or request patterns."""


@dataclass(frozen=True)
class BusModel:
    bus_width_b: int = 256
    clock_mhz: float = 100.0
    mode: str = "ideal"  # "ideal" | "calibrated"
    stream_efficiency: float = 1.0
    burst_overhead_cycles: float = 0.0

    def __post_init__(self) -> None:
        if self.bus_width_b <= 0:
            raise BusError("bus width must be positive")
        if self.clock_mhz <= 0:
            raise BusError("clock must be positive")
        if self.mode not in ("ideal", "calibrated"):
            raise BusError(f"unknown bus mode {self.mode!r}")
        if not 0.0 < self.stream_efficiency <= 1.0:
            raise BusError("stream_efficiency must lie in (0, 1]")
        if self.burst_overhead_cycles < 0:
            raise BusError("burst_overhead_cycles must be >= 0")
        if self.mode == "ideal" and (self.stream_efficiency != 1.0
                                     or self.burst_overhead_cycles != 0.0):
            raise BusError("ideal mode implies eta = 1 and zero burst overhead")

    @property
    def theoretical_bandwidth_gbps(self) -> float:
        """Peak rate: bus width times clock (25.6 Gbps at 256 bits, 100 MHz)."""
        return self.bus_width_b * self.clock_mhz / 1000.0

    def describe(self) -> dict:
        return {
            "mode": self.mode,
            "bus_width_b": self.bus_width_b,
            "clock_mhz": self.clock_mhz,
            "stream_efficiency": self.stream_efficiency,
            "burst_overhead_cycles": self.burst_overhead_cycles,
        }


IDEAL_BUS = BusModel()


def calibrated_bus(stream_efficiency: float, burst_overhead_cycles: float,
                   bus_width_b: int = 256, clock_mhz: float = 100.0) -> BusModel:
    return BusModel(bus_width_b=bus_width_b, clock_mhz=clock_mhz,
                    mode="calibrated", stream_efficiency=stream_efficiency,
                    burst_overhead_cycles=burst_overhead_cycles)


def ideal_bus(bus_width_b: int = 256, clock_mhz: float = 100.0) -> BusModel:
    return replace(IDEAL_BUS, bus_width_b=bus_width_b, clock_mhz=clock_mhz)


class StallSequence:
    """Deterministic integer realization of a fractional per-burst stall.

    The mean is interpreted at centesimal resolution (the calibration grid
    step) and accumulated in exact integer arithmetic, so the realized sum
    over n bursts is floor(n * mean) regardless of n.
    """

    RESOLUTION = 100

    def __init__(self, mean_cycles: float):
        if mean_cycles < 0:
            raise BusError("stall mean must be >= 0")
        self.mean = mean_cycles
        self._num = round(mean_cycles * self.RESOLUTION)
        self._acc = 0

    def __next__(self) -> int:
        self._acc += self._num
        stall, self._acc = divmod(self._acc, self.RESOLUTION)
        return stall

    def take(self, count: int) -> np.ndarray:
        return np.fromiter((next(self) for _ in range(count)), dtype=np.int64,
                           count=count)


def stream_schedule(bus: BusModel, beat_count: int) -> np.ndarray:
    """Availability cycle of each beat of a sequential burst.

    Beat b becomes available at ceil((b+1)/eta) - 1, the first cycle by
    whose end b+1 beats' worth of transfer credit has accrued; the transfer
    spans ceil(beat_count/eta) cycles with the stalls distributed evenly.
    eta is interpreted at millesimal resolution (the calibration grid step)
    and the schedule computed in exact integer arithmetic.  Ideal mode
    yields cycles 0..beat_count-1.
    """
    if beat_count <= 0:
        raise BusError("beat_count must be positive")
    num = round(bus.stream_efficiency * 1000)
    if num >= 1000:
        return np.arange(beat_count, dtype=np.int64)
    credits = np.arange(1, beat_count + 1, dtype=np.int64) * 1000
    return -(-credits // num) - 1  # ceil division


def discrete_schedule(bus: BusModel, request_cycles) -> np.ndarray:
    """Availability cycle of each discretely requested burst.

    availability(i) = max(request(i), previous availability) + 1 + stall(i),
    with stall(i) the deterministic realization of the burst overhead.
    """
    requests = np.asarray(request_cycles, dtype=np.int64)
    if requests.ndim != 1 or requests.size == 0:
        raise BusError("request_cycles must be a non-empty 1-d sequence")
    if np.any(np.diff(requests) <= 0):
        raise BusError("request cycles must be strictly increasing")
    stalls = StallSequence(bus.burst_overhead_cycles)
    out = np.empty(requests.size, dtype=np.int64)
    prev = np.iinfo(np.int64).min
    for i, req in enumerate(requests):
        prev = max(int(req), prev) + 1 + next(stalls)
        out[i] = prev
    return out


def update_throughput_gbps(table_bits: int, total_cycles: int, bus: BusModel) -> float:
    if total_cycles <= 0:
        raise BusError("total_cycles must be positive")
    seconds = total_cycles / (bus.clock_mhz * 1e6)
    return table_bits / seconds / 1e9


def update_io_efficiency(table_bits: int, total_cycles: int, bus: BusModel) -> float:
    if total_cycles <= 0:
        raise BusError("total_cycles must be positive")
    return table_bits / (total_cycles * bus.bus_width_b)
