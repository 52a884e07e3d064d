import math

import pytest

from rpluw import config
from rpluw.config import ConfigError, TABLE3


def test_table3_preset_matches_published_values_field_by_field():
    c = config.preset("table3-default")
    r, e = c.radio, c.energy
    pairs = [
        (c.topology, TABLE3["network_topology"]),
        (r.frequency_khz, TABLE3["frequency_khz"]),
        (c.area_m, TABLE3["deployment_area_m"]),
        (e.node_initial_j, TABLE3["initial_node_energy_j"]),
        (r.bandwidth_bps, TABLE3["max_bandwidth_bps"]),
        (e.sink_initial_j, TABLE3["initial_sink_energy_j"]),
        (r.data_packet_bytes, TABLE3["packet_size_bytes"]),
        (c.node_count, TABLE3["number_of_nodes"][0]),
        (r.control_packet_bytes, TABLE3["dio_packet_bytes"]),
        (r.control_packet_bytes, TABLE3["dao_packet_bytes"]),
        (r.control_packet_bytes, TABLE3["dao_ack_packet_bytes"]),
        (r.control_packet_bytes, TABLE3["dis_packet_bytes"]),
        (c.speed_range_mps, TABLE3["node_speed_mps"]),
        (c.mobile_fraction, TABLE3["mobile_fraction"]),
        (e.tx_long_w, TABLE3["tx_long_w"]),
        (e.tx_short_w, TABLE3["tx_short_w"]),
        (e.rx_w, TABLE3["rx_w"]),
        (e.idle_w, TABLE3["idle_w"]),
        (e.aggregation_w, TABLE3["aggregation_w"]),
        (c.traffic_rate_lambda, TABLE3["traffic_rate_pkt_s"][0]),
        (r.memory_bytes, TABLE3["memory_bytes"]),
        (c.sink_position, TABLE3["sink_position_m"]),
        (r.antenna, TABLE3["antenna"]),
        (c.sim_duration_s, TABLE3["simulation_time_s"]),
        (r.comm_range_m, TABLE3["asn_comm_range_m"]),
        (c.dodag.neighbor_range_m, TABLE3["asn_comm_range_m"]),
        (c.iterations, TABLE3["iterations"]),
        (r.acoustic_range_m, TABLE3["acoustic_range_m"]),
        (r.band_khz, TABLE3["channel_band_khz"]),
        (r.spreading_factor, TABLE3["spreading_factor"]),
    ]
    for got, want in pairs:
        assert got == want
    assert c.dodag.kappa == 4


@pytest.mark.parametrize("name,n", [("table3-50", 50), ("table3-100", 100), ("table3-200", 200)])
def test_node_count_presets(name, n):
    assert config.preset(name).node_count == n


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        config.preset("table9")


def test_unknown_key_names_its_path():
    with pytest.raises(ConfigError, match=r"radio\.bogus: unknown key"):
        config.from_mapping({"radio": {"bogus": 1}})
    with pytest.raises(ConfigError, match=r"^nodes: unknown key"):
        config.from_mapping({"scenario": {"nodes": 5}})
    with pytest.raises(ConfigError, match=r"dodag\.trickle\.imin: unknown key"):
        config.from_mapping({"dodag": {"trickle": {"imin": 1}}})


def test_type_and_range_errors_name_the_field():
    with pytest.raises(ConfigError, match="node_count"):
        config.from_mapping({"node_count": "many"})
    with pytest.raises(ConfigError, match="mobile_fraction"):
        config.from_mapping({"mobile_fraction": 1.5})
    with pytest.raises(ConfigError, match="node_count"):
        config.from_mapping({"node_count": 0})
    with pytest.raises(ConfigError, match="protocol"):
        config.from_mapping({"protocol": "ctp"})
    with pytest.raises(ConfigError, match="environment"):
        config.from_mapping({"environment": {"temperature_c": 80.0}})
    with pytest.raises(ConfigError, match="sink_position"):
        config.from_mapping({"sink_position": [2000.0, 0.0, 0.0]})


def test_nested_overrides_and_inf():
    c = config.from_mapping({
        "preset": "table3-100",
        "scenario": {"traffic_rate_lambda": 0.2, "rng_seed": 9},
        "dodag": {"gamma_degree_limit": 2, "timers": {"linkage_lt_s": 30}},
        "radio": {"forced_loss": 0.25},
    })
    assert c.node_count == 100 and c.traffic_rate_lambda == 0.2 and c.rng_seed == 9
    assert c.dodag.gamma_degree_limit == 2.0 and c.dodag.timers.linkage_lt_s == 30.0
    assert c.dodag.timers.mobility_mt_s == 10.0
    assert c.radio.forced_loss == 0.25
    assert config.from_mapping({"dodag": {"gamma_degree_limit": "inf"}}).dodag.gamma_degree_limit == math.inf


def test_round_trip_through_toml(tmp_path):
    c = config.table3_default(name="rt", node_count=5, mobile_ids=(2, 3),
                              positions=((1.0, 2.0, 3.0),) * 5, rng_seed=4)
    c = c.replace(dodag=config.DodagConfig(gamma_degree_limit=3.0))
    p = tmp_path / "c.toml"
    p.write_text(config.dumps(c))
    assert config.load(p) == c


def test_default_round_trip(tmp_path):
    p = tmp_path / "d.toml"
    p.write_text(config.dumps(config.table3_default()))
    assert config.load(p) == config.table3_default()


def test_load_reports_missing_and_malformed_files(tmp_path):
    with pytest.raises(OSError):
        config.load(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("node_count = = 3\n")
    with pytest.raises(ConfigError, match="bad.toml"):
        config.load(bad)


def test_positions_must_match_node_count():
    with pytest.raises(ConfigError, match="positions"):
        config.table3_default(node_count=2, positions=((0.0, 0.0, 0.0),))
