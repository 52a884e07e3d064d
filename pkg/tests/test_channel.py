import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rpluw import channel as ch
from rpluw.channel import EnvironmentProfile

import oracles

ENV = EnvironmentProfile()


def test_sound_speed_constant_term_presets():
    env = EnvironmentProfile(temperature_c=0.0, salinity_ppt=35.0)
    assert ch.sound_speed(env, 0.0) == pytest.approx(1448.96, abs=1e-12)
    verbatim = ch.sound_speed_preset("paper-verbatim")
    assert ch.sound_speed(env, 0.0, verbatim) == 1349.0


def test_sound_speed_ten_degrees():
    env = EnvironmentProfile(temperature_c=10.0)
    assert ch.sound_speed(env, 0.0) == pytest.approx(1489.80, abs=0.01)


def test_sound_speed_rejects_negative_depth():
    with pytest.raises(ch.ChannelDomainError, match="depth_m"):
        ch.sound_speed(ENV, -1.0)


def test_unknown_preset():
    with pytest.raises(ch.ChannelDomainError):
        ch.sound_speed_preset("del-grosso")


def test_environment_validation():
    with pytest.raises(ch.ChannelDomainError, match="salinity_ppt"):
        EnvironmentProfile(salinity_ppt=50)
    with pytest.raises(ch.ChannelDomainError, match="water_density"):
        EnvironmentProfile(water_density_kg_m3=0)


def test_sound_speed_increases_with_temperature():
    temps = np.arange(0.0, 30.0 + 1e-9, 0.5)
    speeds = [ch.sound_speed(EnvironmentProfile(temperature_c=t), 0.0) for t in temps]
    assert all(b > a for a, b in zip(speeds, speeds[1:]))


def test_paper_verbatim_is_unphysical_at_depth():
    # the printed T*d^3 coefficient is 1e10 too large
    env = EnvironmentProfile(temperature_c=10.0)
    assert ch.sound_speed(env, 100.0, ch.sound_speed_preset("paper-verbatim")) < 0


def test_absorption_zero_frequency():
    assert ch.absorption_db_per_km(0.0, ENV, 0.25) == 0.0


def test_absorption_reference_point():
    env = EnvironmentProfile(temperature_c=14.0, salinity_ppt=35.0, ph=8.0)
    # frozen from the scalar oracle
    assert ch.absorption_db_per_km(30.5, env, 0.25) == pytest.approx(2.5704658326032135, rel=1e-12)


def test_absorption_monotone_in_frequency():
    assert ch.absorption_db_per_km(60.0, ENV) > ch.absorption_db_per_km(30.0, ENV)
    grid = np.linspace(0.0, 100.0, 401)
    vals = [ch.absorption_db_per_km(f, ENV, 0.1) for f in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(v > 0 for v in vals[1:])


def test_absorption_negative_frequency():
    with pytest.raises(ch.ChannelDomainError, match="frequency_khz"):
        ch.absorption_db_per_km(-1.0, ENV)


def test_noise_components_reference():
    env = EnvironmentProfile(shipping_activity=0.5, wind_speed_mps=0.0)
    comps, total = ch.noise_psd(30.5, env)
    assert comps.turbulence_db == pytest.approx(-27.528995180403577, rel=1e-12)
    assert comps.shipping_db == pytest.approx(-10.491812434903267, rel=1e-12)
    assert comps.wind_db == pytest.approx(20.087657609942333, rel=1e-12)
    assert comps.thermal_db == pytest.approx(14.685996786935718, rel=1e-12)
    assert total == pytest.approx(21.190810999752735, rel=1e-12)


@given(st.floats(0.01, 1000.0), st.floats(0.0, 1.0), st.floats(0.0, 30.0))
def test_noise_is_power_sum(f, s, w):
    comps, total = ch.noise_psd(f, EnvironmentProfile(shipping_activity=s, wind_speed_mps=w))
    linear = sum(10 ** (c / 10) for c in comps.as_tuple())
    assert 10 ** (total / 10) == pytest.approx(linear, rel=1e-12)


def test_thermal_noise_dominates_at_high_frequency():
    comps, _ = ch.noise_psd(1000.0, EnvironmentProfile(wind_speed_mps=0.0))
    assert comps.thermal_db > max(comps.turbulence_db, comps.shipping_db, comps.wind_db)


def test_noise_rejects_nonpositive_frequency():
    with pytest.raises(ch.ChannelDomainError):
        ch.noise_psd(0.0, ENV)


def test_path_loss_examples():
    assert ch.path_loss_db(1.0, 1.3, 7.0) == pytest.approx(0.007)
    assert ch.path_loss_db(1000.0, 1.3, 5.0) == pytest.approx(44.0, abs=1e-12)
    alpha = ch.absorption_db_per_km(30.5, ENV, 0.25)
    assert ch.path_loss_db(200.0, 1.3, alpha) == pytest.approx(30.427483110152398, rel=1e-12)
    with pytest.raises(ch.ChannelDomainError):
        ch.path_loss_db(0.0)


@given(st.floats(1.0, 1e5), st.floats(1.0, 1e5))
def test_path_loss_strictly_increasing(a, b):
    if a == b:
        return
    lo, hi = sorted((a, b))
    assert ch.path_loss_db(hi, 1.3, 2.0) > ch.path_loss_db(lo, 1.3, 2.0)


def _budget(loss, bw=30000.0):
    return ch.LinkBudget(1.3, 150.0, 30.5, bw, 1.3, loss)


def test_snr_db_arithmetic():
    base = ch.snr_db(_budget(40.0), 20.0)
    assert ch.snr_db(_budget(43.0), 20.0) == pytest.approx(base - 3.0, abs=1e-12)
    assert ch.snr_db(_budget(40.0), 30.0) == pytest.approx(base - 10.0, abs=1e-12)


def test_snr_reference_link():
    # hand-composed chain: SL(1.3 W) - A(150 m) - (N + 10 log10 B)
    budget = ch.link_budget(1.3, 150.0, 30.5, 30000.0, ENV, 1.3, 0.25)
    alpha = oracles.absorption(30.5, 14.0, 35.0, 8.0, 0.25)
    pl = oracles.path_loss(150.0, 1.3, alpha)
    noise = oracles.noise(30.5, 0.5, 0.0)[4]
    expected = oracles.snr(1.3, pl, noise, 30000.0)
    assert budget.snr_db == pytest.approx(float(expected), rel=1e-12)
    assert budget.capacity_bps == pytest.approx(float(oracles.capacity(expected, 30000.0)), rel=1e-12)


def test_capacity_examples():
    assert ch.channel_capacity_bps(0.0, 30000.0) == pytest.approx(30000.0)
    assert ch.channel_capacity_bps(-math.inf, 30000.0) == 0.0
    assert ch.channel_capacity_bps(-400.0, 30000.0) == pytest.approx(0.0, abs=1e-30)
    assert ch.channel_capacity_bps(10.0, 30000.0) == pytest.approx(103782.94855911891, rel=1e-12)


@given(st.floats(-50, 100), st.floats(-50, 100), st.floats(1.0, 1e6))
def test_capacity_monotone_and_linear(a, b, bw):
    if a < b - 1e-6:
        assert ch.channel_capacity_bps(a, bw) < ch.channel_capacity_bps(b, bw)
    elif a <= b:
        assert ch.channel_capacity_bps(a, bw) <= ch.channel_capacity_bps(b, bw)
    assert ch.channel_capacity_bps(a, 2 * bw) == pytest.approx(2 * ch.channel_capacity_bps(a, bw), rel=1e-12)


def test_propagation_delay():
    assert ch.propagation_delay_s(1500.0, 1500.0) == 1.0
    assert ch.propagation_delay_s(0.0, 1500.0) == 0.0
    c = ch.sound_speed(EnvironmentProfile(temperature_c=10.0), 100.0)
    assert ch.propagation_delay_s(200.0, c) == pytest.approx(0.13409903274356946, rel=1e-12)
    with pytest.raises(ch.ChannelDomainError):
        ch.propagation_delay_s(1.0, 0.0)


def test_depth_from_pressure():
    env = EnvironmentProfile()
    assert ch.depth_from_pressure(env.water_density_kg_m3 * env.gravity_mps2, env) == pytest.approx(1.0)
    assert ch.depth_difference(5e5, 5e5, env) == 0.0
    assert ch.depth_from_pressure(1.01e6, env) == pytest.approx(100.445, abs=1e-3)
    with pytest.raises(ch.ChannelDomainError):
        ch.depth_from_pressure(-1.0, env)


def test_pure_functions_repeatable():
    a = ch.link_budget(0.8, 123.4, 30.5, 30000.0, ENV)
    b = ch.link_budget(0.8, 123.4, 30.5, 30000.0, ENV)
    assert a == b
