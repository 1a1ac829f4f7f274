"""Experiment orchestration: configs, runs, sweeps and report emission.

Reports are deterministic: identical configs produce byte-identical JSON and
CSV (no timestamps unless explicitly stamped into the metadata field), and
every report embeds the config it came from, the code version and any
calibration residuals.  Throughput and I/O efficiency are recomputed from
the simulated cycle counts at emission time, never stored independently.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from ._version import __version__
from .bus import BusModel, calibrated_bus, ideal_bus
from .calibration import (DEFAULT_CALIBRATED_ETA, DEFAULT_CALIBRATED_OVERHEAD,
                          CalibrationResult)
from .engines import build_engine
from .geometry import ARCHITECTURES, CamGeometry, geometry_for
from .oracle import ReferenceCam, equivalence_check
from .payload import generate_payload, load_payload, splitmix64
from .resources import m10k_report

SCHEMA_VERSION = 1

# Width sweep with a constant 64-KB table, the published comparison grid.
SWEEP_TABLE_BITS = 65536 * 8
SWEEP_WIDTHS = (8, 16, 32, 64)


class ConfigError(ValueError):
    """Raised for invalid experiment configurations."""


class OracleDivergenceError(RuntimeError):
    """An engine disagreed with the brute-force reference."""

    def __init__(self, architecture: str, geometry: CamGeometry, divergence):
        key, index = divergence
        super().__init__(
            f"{architecture} at {geometry.depth_n}x{geometry.word_width_w}: "
            f"match vector for key {key:#x} diverges at word {index}")
        self.architecture = architecture
        self.divergence = divergence


@dataclass
class ExperimentConfig:
    depth_n: int = 65536
    word_width_w: int = 8
    bus_width_b: int = 256
    partitions_p: int = 8
    clock_mhz: float = 100.0
    architectures: tuple[str, ...] = ("s1", "s2", "s3")
    bus_mode: str = "ideal"
    stream_efficiency: float | None = None
    burst_overhead_cycles: float | None = None
    seed: int = 1
    payload_path: str | None = None
    key_count: int = 1000
    verify_oracle: bool = True
    record_events: bool = False
    trace_path: str | None = None

    def __post_init__(self) -> None:
        self.architectures = tuple(self.architectures)
        for arch in self.architectures:
            if arch not in ARCHITECTURES:
                raise ConfigError(f"unknown architecture {arch!r}")
        if not self.architectures:
            raise ConfigError("at least one architecture is required")
        if self.bus_mode not in ("ideal", "calibrated"):
            raise ConfigError(f"unknown bus mode {self.bus_mode!r}")
        if self.key_count < 0:
            raise ConfigError("key_count must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned value")
        # Geometry constraints surface now, not mid-run.
        for arch in self.architectures:
            geometry_for(arch, self.depth_n, self.word_width_w,
                         self.bus_width_b, self.partitions_p)

    def bus(self) -> BusModel:
        if self.bus_mode == "ideal":
            return ideal_bus(self.bus_width_b, self.clock_mhz)
        eta = (DEFAULT_CALIBRATED_ETA if self.stream_efficiency is None
               else self.stream_efficiency)
        overhead = (DEFAULT_CALIBRATED_OVERHEAD
                    if self.burst_overhead_cycles is None
                    else self.burst_overhead_cycles)
        return calibrated_bus(eta, overhead, self.bus_width_b, self.clock_mhz)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["architectures"] = list(self.architectures)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a single JSON object")
    return ExperimentConfig.from_dict(data)


@dataclass
class ArchResult:
    architecture: str
    geometry: dict
    bus: dict
    total_cycles: int
    trace: dict
    resources: dict
    oracle: dict

    @property
    def table_bits(self) -> int:
        return self.geometry["depth_n"] * self.geometry["word_width_w"]

    def throughput_gbps(self) -> float:
        bits = self.table_bits
        seconds = self.total_cycles / (self.bus["clock_mhz"] * 1e6)
        return bits / seconds / 1e9

    def io_efficiency(self) -> float:
        return self.table_bits / (self.total_cycles * self.bus["bus_width_b"])

    def to_dict(self) -> dict:
        return {
            "architecture": self.architecture,
            "geometry": self.geometry,
            "total_cycles": self.total_cycles,
            "update_throughput_gbps": self.throughput_gbps(),
            "io_efficiency": self.io_efficiency(),
            "trace": self.trace,
            "resources": self.resources,
            "oracle": self.oracle,
        }


@dataclass
class EfficiencyReport:
    config: dict
    bus: dict
    results: list[ArchResult]
    calibration: dict | None = None
    metadata: dict = field(default_factory=dict)

    def ratios(self) -> dict:
        by_key = {(r.architecture, r.geometry["word_width_w"]): r
                  for r in self.results}
        widths = sorted({r.geometry["word_width_w"] for r in self.results})
        per_width = []
        for w in widths:
            entry = {"word_width_w": w}
            s1 = by_key.get(("s1", w))
            for arch in ("s2", "s3"):
                other = by_key.get((arch, w))
                if s1 is not None and other is not None:
                    entry[f"{arch}_over_s1"] = (other.io_efficiency()
                                                / s1.io_efficiency())
            per_width.append(entry)
        headline = None
        s1_64 = by_key.get(("s1", 64))
        s3_any = [r for r in self.results if r.architecture == "s3"]
        if s1_64 is not None and s3_any:
            headline = s3_any[0].io_efficiency() / s1_64.io_efficiency()
        return {"per_width": per_width, "s3_over_s1_at_w64": headline}

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "code_version": __version__,
            "config": self.config,
            "bus": self.bus,
            "calibration": self.calibration,
            "results": [r.to_dict() for r in self.results],
            "ratios": self.ratios(),
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


CSV_COLUMNS = [
    "architecture", "depth_n", "word_width_w", "bus_mode",
    "stream_efficiency", "burst_overhead_cycles", "total_cycles",
    "update_throughput_gbps", "io_efficiency", "rcu_blocks", "erase_blocks",
    "total_m10k", "saving_vs_s1", "erase_span_first", "erase_span_last",
    "write_span_first", "write_span_last", "catch_up_cycles", "stall_cycles",
    "oracle_checked", "oracle_passed",
]


def report_csv(report: EfficiencyReport) -> str:
    """One row per (architecture, width), stable column order."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.results:
        writer.writerow([
            r.architecture, r.geometry["depth_n"], r.geometry["word_width_w"],
            report.bus["mode"], report.bus["stream_efficiency"],
            report.bus["burst_overhead_cycles"], r.total_cycles,
            f"{r.throughput_gbps():.6f}", f"{r.io_efficiency():.8f}",
            r.resources["rcu_blocks"], r.resources["erase_blocks"],
            r.resources["total_m10k"], f"{r.resources['saving_vs_s1']:.6f}",
            r.trace["erase_span"][0], r.trace["erase_span"][1],
            r.trace["write_span"][0], r.trace["write_span"][1],
            r.trace["catch_up_cycles"], r.trace["stall_cycles"],
            r.oracle["keys_checked"], r.oracle["passed"],
        ])
    return out.getvalue()


def emit_report(report: EfficiencyReport, out_path, fmt: str = "json") -> Path:
    path = Path(out_path)
    if fmt == "json":
        path.write_text(report.to_json(), encoding="utf-8")
    elif fmt == "csv":
        path.write_text(report_csv(report), encoding="utf-8")
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    return path


def _search_keys(seed: int, payload: np.ndarray, geometry: CamGeometry,
                 count: int) -> np.ndarray:
    """Deterministic key sample: half uniform, half drawn from the payload."""
    if count == 0:
        return np.empty(0, dtype=np.uint64)
    base = np.uint64(seed ^ 0xD6E8FEB86659FD93) + np.arange(count, dtype=np.uint64)
    keys = splitmix64(base) & np.uint64(geometry.word_mask)
    hits = count // 2
    if hits and payload.size:
        idx = (splitmix64(base[:hits] ^ np.uint64(0xA5A5A5A5A5A5A5A5))
               % np.uint64(payload.size)).astype(np.intp)
        keys[:hits] = payload[idx]
    return keys


def _resolve_payload(config: ExperimentConfig, geometry: CamGeometry) -> np.ndarray:
    if config.payload_path is not None:
        return load_payload(config.payload_path, geometry)
    return generate_payload(config.seed, geometry)


def run_experiment(config: ExperimentConfig,
                   calibration: CalibrationResult | None = None) -> EfficiencyReport:
    """Run the selected architectures at one geometry and report.

    Any oracle divergence aborts the run with diagnostics; verification can
    be disabled through the config.
    """
    bus = config.bus()
    results = []
    for arch in config.architectures:
        geometry = geometry_for(arch, config.depth_n, config.word_width_w,
                                config.bus_width_b, config.partitions_p)
        payload = _resolve_payload(config, geometry)
        engine = build_engine(geometry, bus, record_events=config.record_events)
        trace = engine.update(payload)
        oracle_info = {"keys_checked": 0, "passed": None}
        if config.verify_oracle and config.key_count:
            reference = ReferenceCam(geometry.depth_n, geometry.word_width_w)
            reference.load_full(payload)
            keys = _search_keys(config.seed, payload, geometry, config.key_count)
            verdict = equivalence_check(engine, reference, keys)
            if not verdict.passed:
                raise OracleDivergenceError(arch, geometry,
                                            verdict.first_divergence)
            oracle_info = {"keys_checked": verdict.keys_checked, "passed": True}
        if config.trace_path and trace.events is not None:
            tpath = Path(str(config.trace_path).replace("{arch}", arch))
            tpath.write_text(trace.to_jsonl(), encoding="utf-8")
        results.append(ArchResult(
            architecture=arch, geometry=geometry.describe(),
            bus=bus.describe(), total_cycles=trace.total_cycles,
            trace=trace.summary(), resources=m10k_report(geometry, arch).to_dict(),
            oracle=oracle_info))
    return EfficiencyReport(
        config=config.to_dict(), bus=bus.describe(), results=results,
        calibration=calibration.to_dict() if calibration else None)


def run_sweep(architectures=("s1", "s2", "s3"), bus_mode: str = "ideal",
              stream_efficiency: float | None = None,
              burst_overhead_cycles: float | None = None,
              seed: int = 1, key_count: int = 256,
              partitions_p: int = 8, bus_width_b: int = 256,
              clock_mhz: float = 100.0, verify_oracle: bool = True,
              calibration: CalibrationResult | None = None) -> EfficiencyReport:
    """Constant-table-size width sweep (one row per architecture x width)."""
    results = []
    bus_desc = None
    for width in SWEEP_WIDTHS:
        config = ExperimentConfig(
            depth_n=SWEEP_TABLE_BITS // width, word_width_w=width,
            bus_width_b=bus_width_b, partitions_p=partitions_p,
            clock_mhz=clock_mhz, architectures=tuple(architectures),
            bus_mode=bus_mode, stream_efficiency=stream_efficiency,
            burst_overhead_cycles=burst_overhead_cycles, seed=seed,
            key_count=key_count, verify_oracle=verify_oracle)
        sub = run_experiment(config, calibration)
        bus_desc = sub.bus
        results.extend(sub.results)
    sweep_config = {
        "kind": "width_sweep", "table_bits": SWEEP_TABLE_BITS,
        "widths": list(SWEEP_WIDTHS), "architectures": list(architectures),
        "bus_mode": bus_mode, "stream_efficiency": stream_efficiency,
        "burst_overhead_cycles": burst_overhead_cycles, "seed": seed,
        "key_count": key_count, "partitions_p": partitions_p,
        "bus_width_b": bus_width_b, "clock_mhz": clock_mhz,
    }
    return EfficiencyReport(
        config=sweep_config, bus=bus_desc, results=results,
        calibration=calibration.to_dict() if calibration else None)
