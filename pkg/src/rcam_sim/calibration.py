"""Fit the two bus-model knobs to measured end-to-end I/O efficiencies.

The measured numbers fold every real-system loss (bank interleaving limits,
precharge, row activation, refresh) into three end-to-end efficiencies, so
reproducing them is a calibration, not a prediction: a grid search runs the
actual update engines at the anchor configurations and picks the
(stream efficiency, burst overhead) pair minimizing the maximum relative
error.  Residuals are always reported, never hidden.

Anchor configurations: the streaming architectures at 65,536x8 and the
traditional one at 8,192x64 (its efficiency grows with width, so the widest
variant is the published comparison point).
"""

from __future__ import annotations

from dataclasses import dataclass


from .bus import calibrated_bus, ideal_bus, update_io_efficiency
from .engines import build_engine
from .geometry import geometry_for
from .payload import generate_payload

S1_ANCHOR = (8192, 64)
STREAM_ANCHOR = (65536, 8)

# Defaults obtained by running calibrate() against the built-in targets.
DEFAULT_TARGETS = {"s1": 0.101, "s2": 0.498, "s3": 0.968}
DEFAULT_CALIBRATED_ETA = 0.976
DEFAULT_CALIBRATED_OVERHEAD = 1.90


@dataclass(frozen=True)
class CalibrationResult:
    stream_efficiency: float
    burst_overhead_cycles: float
    simulated: dict[str, float]
    targets: dict[str, float]
    residuals: dict[str, float]  # relative errors
    max_residual: float

    def to_dict(self) -> dict:
        return {
            "stream_efficiency": self.stream_efficiency,
            "burst_overhead_cycles": self.burst_overhead_cycles,
            "simulated": dict(self.simulated),
            "targets": dict(self.targets),
            "residuals": dict(self.residuals),
            "max_residual": self.max_residual,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationResult":
        return cls(
            stream_efficiency=data["stream_efficiency"],
            burst_overhead_cycles=data["burst_overhead_cycles"],
            simulated=dict(data["simulated"]), targets=dict(data["targets"]),
            residuals=dict(data["residuals"]),
            max_residual=data["max_residual"])


def _simulated_efficiency(arch: str, bus) -> float:
    depth, width = S1_ANCHOR if arch == "s1" else STREAM_ANCHOR
    geometry = geometry_for(arch, depth, width, bus.bus_width_b)
    engine = build_engine(geometry, bus, record_events=False)
    trace = engine.update(generate_payload(1, geometry))
    return update_io_efficiency(geometry.table_bits, trace.total_cycles, bus)


def calibrate(targets: dict[str, float] | None = None,
              eta_grid=(0.90, 1.00, 0.001),
              overhead_grid=(0.0, 4.0, 0.05),
              bus_width_b: int = 256,
              clock_mhz: float = 100.0) -> CalibrationResult:
    """Grid-search (eta, overhead) against measured efficiencies.

    ``targets`` maps architecture name to efficiency in (0, 1]; omitted
    architectures do not constrain the fit.  The traditional architecture
    depends only on the burst overhead and the streaming ones only on eta,
    so each knob's simulations are memoized and the full grid is evaluated
    from them.
    """
    targets = dict(DEFAULT_TARGETS if targets is None else targets)
    if not targets:
        raise ValueError("at least one target is required")
    for arch, eff in targets.items():
        if arch not in ("s1", "s2", "s3"):
            raise ValueError(f"unknown architecture {arch!r}")
        if not 0.0 < eff <= 1.0:
            raise ValueError(
                f"target for {arch} must lie in (0, 1], got {eff}")

    etas = _grid(eta_grid)
    overheads = _grid(overhead_grid)

    def bus_for(eta: float, overhead: float):
        if eta == 1.0 and overhead == 0.0:
            return ideal_bus(bus_width_b, clock_mhz)
        return calibrated_bus(eta, overhead, bus_width_b, clock_mhz)

    s1_sims = {}
    if "s1" in targets:
        for oh in overheads:
            s1_sims[oh] = _simulated_efficiency("s1", bus_for(1.0, oh))
    stream_sims: dict[float, dict[str, float]] = {}
    stream_archs = [a for a in ("s2", "s3") if a in targets]
    if stream_archs:
        for eta in etas:
            stream_sims[eta] = {a: _simulated_efficiency(a, bus_for(eta, 0.0))
                                for a in stream_archs}

    # Minimize the maximum relative error; ties go to the smaller error sum
    # (the max is often pinned by one architecture, leaving the other knob
    # free otherwise).
    best = None
    for eta in (etas if stream_archs else etas[-1:]):
        stream_errs = []
        if stream_archs:
            stream_errs = [abs(stream_sims[eta][a] - targets[a]) / targets[a]
                           for a in stream_archs]
        for oh in (overheads if "s1" in targets else overheads[:1]):
            errs = list(stream_errs)
            if "s1" in targets:
                errs.append(abs(s1_sims[oh] - targets["s1"]) / targets["s1"])
            key = (max(errs), sum(errs))
            if best is None or key < best[0]:
                best = (key, eta, oh)

    _, eta, overhead = best
    bus = bus_for(eta, overhead)
    simulated = {arch: _simulated_efficiency(arch, bus) for arch in sorted(targets)}
    residuals = {arch: abs(simulated[arch] - targets[arch]) / targets[arch]
                 for arch in simulated}
    return CalibrationResult(
        stream_efficiency=eta, burst_overhead_cycles=overhead,
        simulated=simulated, targets={a: targets[a] for a in sorted(targets)},
        residuals=residuals, max_residual=max(residuals.values()))


def _grid(bounds) -> list[float]:
    lo, hi, step = bounds
    count = int(round((hi - lo) / step))
    return [round(lo + i * step, 10) for i in range(count + 1)]
