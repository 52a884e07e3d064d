import csv
from dataclasses import dataclass

import pytest
from hypothesis import given, settings, strategies as st

from rpluw import metrics
from rpluw.metrics import AccountingError, MetricsCollector


@dataclass
class Pkt:
    origin: int
    seq: int
    created_s: float = 0.0
    hops: int = 1
    proc_s: float = 0.0
    queue_s: float = 0.0
    prop_s: float = 0.0
    trans_s: float = 0.0


def _finalize(col, **kw):
    args = dict(scenario_id="s", protocol="rpluw-swara", seed=1, node_count=3, traffic_lambda=0.1,
                mobile_fraction=0.0, per_node_energy_j=[1.0, 2.0], lifetime_s=600.0)
    args.update(kw)
    return col.finalize(**args)


def _collect(generated, delays, drops=()):
    col = MetricsCollector()
    pkts = [Pkt(1, i) for i in range(generated)]
    for p in pkts:
        col.record_generation(p)
    for p, d in zip(pkts, delays):
        col.record_delivery(p, p.created_s + d)
    for p, reason in zip(pkts[len(delays):], drops):
        col.record_drop(p, reason, 1.0)
    return col


def test_pdr_ratio():
    r = _finalize(_collect(100, [0.5] * 80, ["collision"] * 20))
    assert r.pdr == 0.8 and r.in_flight == 0


def test_zero_jitter_for_equal_delays():
    r = _finalize(_collect(3, [1.0, 1.0, 1.0]))
    assert r.avg_delay_s == 1.0 and r.jitter_s == 0.0


def test_two_point_statistics():
    r = _finalize(_collect(2, [1.0, 3.0]))
    assert r.avg_delay_s == 2.0 and r.jitter_s == 1.0


def test_no_packets_gives_undefined_marker():
    r = _finalize(MetricsCollector())
    assert r.pdr is None and r.row()["pdr"] == "NA" and r.row()["avg_delay_s"] == "NA"


def test_in_flight_excluded_from_pdr_but_reported():
    r = _finalize(_collect(10, [1.0] * 6, ["snr"] * 2))
    assert r.in_flight == 2 and r.pdr == pytest.approx(6 / 8)
    assert r.delivered + sum(r.drops.values()) + r.in_flight == r.generated


def test_double_settle_is_an_error():
    col = _collect(1, [1.0])
    with pytest.raises(AccountingError):
        col.record_drop(Pkt(1, 0), "snr", 2.0)
    with pytest.raises(AccountingError):
        col.record_delivery(Pkt(9, 9), 2.0)
    with pytest.raises(AccountingError):
        col.record_generation(Pkt(1, 0))


def test_unknown_drop_reason():
    col = _collect(1, [])
    with pytest.raises(ValueError):
        col.record_drop(Pkt(1, 0), "gremlins", 1.0)


def test_lifetime_and_energy_pass_through():
    r = _finalize(_collect(1, [1.0]), lifetime_s=400.0)
    assert r.lifetime_s == 400.0 and r.total_energy_j == 3.0


def test_delay_components():
    assert metrics.account_delay([0.001], [0.0], [150 / 1500], [400 / 30000]) == pytest.approx(0.11433333333, abs=1e-9)
    assert metrics.account_delay([0.001], [], [], []) == 0.001
    one = metrics.account_delay([0.001], [0.0], [0.1], [400 / 30000])
    two = metrics.account_delay([0.001] * 2, [0.0] * 2, [0.1] * 2, [400 / 30000] * 2)
    assert two == pytest.approx(2 * one)


def test_csv_header_is_exact(tmp_path):
    rows, agg = metrics.write_csv([_finalize(_collect(2, [1.0, 2.0]))], tmp_path / "m.csv")
    header = rows.read_text().splitlines()[0]
    assert header == ("scenario_id,protocol,seed,node_count,lambda,mobile_fraction,pdr,avg_delay_s,jitter_s,"
                      "total_energy_j,lifetime_s,ctrl_msgs,drops_no_route,drops_collision,drops_snr,drops_queue,"
                      "drops_depleted,in_flight")
    assert agg.name == "m_aggregate.csv"


def test_ten_iterations_give_ten_rows_and_one_aggregate(tmp_path):
    reports = [_finalize(_collect(10, [0.1 * (i + 1)] * (i % 10)), seed=i) for i in range(10)]
    rows, agg = metrics.write_csv(reports, tmp_path / "m.csv")
    assert len(metrics.read_rows(rows)) == 10
    assert len(metrics.read_rows(agg)) == 1
    again = tmp_path / "n.csv"
    metrics.write_csv(reports, again)
    assert again.read_bytes() == rows.read_bytes()


def test_empty_report_list_writes_nothing(tmp_path):
    with pytest.raises(ValueError):
        metrics.write_csv([], tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()


def test_unwritable_destination(tmp_path):
    with pytest.raises(OSError):
        metrics.write_csv([_finalize(MetricsCollector())], tmp_path / "no" / "such" / "x.csv")


def _brute_quantile(vals, q):
    # textbook linear interpolation between order statistics
    s = sorted(vals)
    pos = q * (len(s) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (s[hi] - s[lo]) * (pos - lo)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=15))
def test_aggregate_matches_brute_force(pdrs):
    rows = []
    for i, p in enumerate(pdrs):
        r = _finalize(_collect(0, []), seed=i)
        row = r.row()
        row["pdr"] = metrics._fmt(p)
        rows.append(row)
    agg = metrics.aggregate_rows(rows)[0]
    vals = [float(metrics._fmt(p)) for p in pdrs]
    assert float(agg["pdr_median"]) == pytest.approx(_brute_quantile(vals, 0.5), abs=1e-9)
    iqr = _brute_quantile(vals, 0.75) - _brute_quantile(vals, 0.25)
    assert float(agg["pdr_iqr"]) == pytest.approx(iqr, abs=1e-9)
    assert agg["avg_delay_s_median"] == "NA"


def test_row_writer_flushes_each_row(tmp_path):
    p = tmp_path / "inc.csv"
    w = metrics.RowWriter(p)
    w.write(_finalize(_collect(1, [1.0])))
    with open(p, newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 1
    w.close()
