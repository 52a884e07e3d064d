"""Per-run packet/energy bookkeeping and CSV reporting."""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DROP_REASONS = ("no-route", "collision", "snr", "queue-overflow", "depleted")

CSV_COLUMNS = (
    "scenario_id", "protocol", "seed", "node_count", "lambda", "mobile_fraction",
    "pdr", "avg_delay_s", "jitter_s", "total_energy_j", "lifetime_s", "ctrl_msgs",
    "drops_no_route", "drops_collision", "drops_snr", "drops_queue", "drops_depleted", "in_flight",
)
_DROP_COLUMNS = {
    "no-route": "drops_no_route", "collision": "drops_collision", "snr": "drops_snr",
    "queue-overflow": "drops_queue", "depleted": "drops_depleted",
}
AGGREGATE_METRICS = ("pdr", "avg_delay_s", "jitter_s", "total_energy_j", "lifetime_s", "ctrl_msgs")
AGGREGATE_COLUMNS = ("scenario_id", "protocol", "node_count", "lambda", "mobile_fraction", "runs") + tuple(
    f"{m}_{s}" for m in AGGREGATE_METRICS for s in ("median", "iqr"))

UNDEFINED = "NA"


class AccountingError(RuntimeError):
    """A packet was settled twice or never generated."""


@dataclass
class DelayRecord:
    origin: int
    seq: int
    created_s: float
    delivered_s: float
    hops: int
    proc_s: float
    queue_s: float
    prop_s: float
    trans_s: float

    @property
    def total_s(self) -> float:
        return self.delivered_s - self.created_s

    @property
    def component_sum_s(self) -> float:
        return self.proc_s + self.queue_s + self.prop_s + self.trans_s


def account_delay(proc_s, queue_s, prop_s, trans_s) -> float:
    """End-to-end delay as the sum of the per-hop components."""
    return math.fsum(proc_s) + math.fsum(queue_s) + math.fsum(prop_s) + math.fsum(trans_s)


@dataclass
class MetricsReport:
    scenario_id: str
    protocol: str
    seed: int
    node_count: int
    traffic_lambda: float
    mobile_fraction: float
    generated: int
    delivered: int
    pdr: float | None
    avg_delay_s: float | None
    jitter_s: float | None
    total_energy_j: float
    per_node_energy_j: tuple
    lifetime_s: float
    control_overhead: dict
    drops: dict
    in_flight: int
    delays: list = field(default_factory=list, repr=False)

    @property
    def ctrl_msgs(self) -> int:
        return sum(self.control_overhead.values())

    def row(self) -> dict:
        row = {
            "scenario_id": self.scenario_id,
            "protocol": self.protocol,
            "seed": self.seed,
            "node_count": self.node_count,
            "lambda": _fmt(self.traffic_lambda),
            "mobile_fraction": _fmt(self.mobile_fraction),
            "pdr": _fmt(self.pdr),
            "avg_delay_s": _fmt(self.avg_delay_s),
            "jitter_s": _fmt(self.jitter_s),
            "total_energy_j": _fmt(self.total_energy_j),
            "lifetime_s": _fmt(self.lifetime_s),
            "ctrl_msgs": self.ctrl_msgs,
            "in_flight": self.in_flight,
        }
        for reason, col in _DROP_COLUMNS.items():
            row[col] = self.drops.get(reason, 0)
        return row


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return UNDEFINED
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


class MetricsCollector:
    """Settles each generated packet exactly once: delivered, dropped, or in flight."""

    def __init__(self):
        self._open: dict[tuple, object] = {}
        self._settled: set[tuple] = set()
        self.generated = 0
        self.delivered = 0
        self.drops: Counter = Counter()
        self.delays: list[DelayRecord] = []
        self.control_sent: Counter = Counter()
        self.data_tx = 0

    @staticmethod
    def _key(packet):
        return (packet.origin, packet.seq)

    def record_generation(self, packet, now=None):
        key = self._key(packet)
        if key in self._open or key in self._settled:
            raise AccountingError(f"packet {key} generated twice")
        self._open[key] = packet
        self.generated += 1

    def _settle(self, packet):
        key = self._key(packet)
        if key not in self._open:
            state = "settled" if key in self._settled else "unknown"
            raise AccountingError(f"packet {key} is {state}")
        del self._open[key]
        self._settled.add(key)

    def record_delivery(self, packet, now: float):
        self._settle(packet)
        self.delivered += 1
        self.delays.append(DelayRecord(packet.origin, packet.seq, packet.created_s, now, packet.hops,
                                       packet.proc_s, packet.queue_s, packet.prop_s, packet.trans_s))

    def record_drop(self, packet, reason: str, now: float):
        if reason not in DROP_REASONS:
            raise ValueError(f"unknown drop reason {reason!r}")
        self._settle(packet)
        self.drops[reason] += 1

    def record_control(self, kind: str):
        self.control_sent[kind] += 1

    @property
    def in_flight(self) -> int:
        return len(self._open)

    def finalize(self, *, scenario_id, protocol, seed, node_count, traffic_lambda, mobile_fraction,
                 per_node_energy_j, lifetime_s) -> MetricsReport:
        settled = self.generated - self.in_flight
        pdr = self.delivered / settled if settled > 0 else None
        totals = [d.total_s for d in self.delays]
        avg = statistics.fmean(totals) if totals else None
        jitter = statistics.pstdev(totals) if totals else None
        energy = tuple(per_node_energy_j)
        return MetricsReport(
            scenario_id=scenario_id, protocol=protocol, seed=seed, node_count=node_count,
            traffic_lambda=traffic_lambda, mobile_fraction=mobile_fraction,
            generated=self.generated, delivered=self.delivered, pdr=pdr,
            avg_delay_s=avg, jitter_s=jitter, total_energy_j=math.fsum(energy),
            per_node_energy_j=energy, lifetime_s=lifetime_s,
            control_overhead=dict(sorted(self.control_sent.items())),
            drops={r: self.drops.get(r, 0) for r in DROP_REASONS},
            in_flight=self.in_flight, delays=list(self.delays),
        )


# ---------------------------------------------------------------- CSV output

class RowWriter:
    """Appends report rows to a CSV file, flushing after each one."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="")
        self._w = csv.DictWriter(self._fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        self._w.writeheader()
        self._fh.flush()

    def write(self, report: MetricsReport):
        self._w.writerow(report.row())
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _quantile(values, q):
    return float(np.percentile(np.asarray(values, float), q * 100.0, method="linear"))


def aggregate_rows(rows: list[dict]) -> list[dict]:
    """Median and interquartile range per (scenario, protocol, load) group."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        key = (r["scenario_id"], r["protocol"], str(r["node_count"]), str(r["lambda"]), str(r["mobile_fraction"]))
        groups.setdefault(key, []).append(r)
    out = []
    for key, members in groups.items():
        agg = dict(zip(("scenario_id", "protocol", "node_count", "lambda", "mobile_fraction"), key))
        agg["runs"] = len(members)
        for m in AGGREGATE_METRICS:
            vals = [float(r[m]) for r in members if str(r[m]) != UNDEFINED]
            if vals:
                agg[f"{m}_median"] = _fmt(_quantile(vals, 0.5))
                agg[f"{m}_iqr"] = _fmt(_quantile(vals, 0.75) - _quantile(vals, 0.25))
            else:
                agg[f"{m}_median"] = agg[f"{m}_iqr"] = UNDEFINED
        out.append(agg)
    return out


def aggregate_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + "_aggregate" + (path.suffix or ".csv"))


def write_aggregate(rows: list[dict], path: str | Path) -> Path:
    dest = aggregate_path(path)
    with open(dest, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=AGGREGATE_COLUMNS, lineterminator="\n")
        w.writeheader()
        for agg in aggregate_rows(rows):
            w.writerow(agg)
    return dest


def write_csv(reports: list[MetricsReport], destination: str | Path) -> tuple[Path, Path]:
    """Write one row per run plus the companion aggregate file."""
    if not reports:
        raise ValueError("no reports to write")
    destination = Path(destination)
    with RowWriter(destination) as w:
        for r in reports:
            w.write(r)
    rows = read_rows(destination)
    return destination, write_aggregate(rows, destination)


def read_rows(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def rows_to_text(reports: list[MetricsReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()
