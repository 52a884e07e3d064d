"""Underwater acoustic channel models.

Every function here is pure. Frequencies are in kHz unless a name says
otherwise, distances in metres, levels in dB (re 1 uPa for pressure
levels, re 1 uPa^2/Hz for noise spectral densities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType


class ChannelDomainError(ValueError):
    """An input lies outside the domain of a channel model."""

    def __init__(self, field: str, value, reason: str):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r}: {reason}")


# dB re 1 uPa @ 1 m for 1 W of radiated acoustic power
SOURCE_LEVEL_CONSTANT_DB = 170.8


@dataclass(frozen=True)
class EnvironmentProfile:
    temperature_c: float = 14.0
    salinity_ppt: float = 35.0
    ph: float = 8.0
    shipping_activity: float = 0.5
    wind_speed_mps: float = 0.0
    water_density_kg_m3: float = 1025.0
    gravity_mps2: float = 9.81

    def __post_init__(self):
        _check_range("temperature_c", self.temperature_c, -2.0, 40.0)
        _check_range("salinity_ppt", self.salinity_ppt, 0.0, 45.0)
        _check_range("ph", self.ph, 6.0, 9.0)
        _check_range("shipping_activity", self.shipping_activity, 0.0, 1.0)
        if not self.wind_speed_mps >= 0:
            raise ChannelDomainError("wind_speed_mps", self.wind_speed_mps, "must be >= 0")
        if not self.water_density_kg_m3 > 0:
            raise ChannelDomainError("water_density_kg_m3", self.water_density_kg_m3, "must be > 0")
        if not self.gravity_mps2 > 0:
            raise ChannelDomainError("gravity_mps2", self.gravity_mps2, "must be > 0")


def _check_range(field, value, lo, hi):
    if not lo <= value <= hi:
        raise ChannelDomainError(field, value, f"must lie in [{lo}, {hi}]")


@dataclass(frozen=True)
class SoundSpeedCoefficients:
    """Coefficients of the nine-term sound-speed polynomial.

    ``c = c0 + t1*T + t2*T^2 + t3*T^3 + s1*(S-35) + d1*D + d2*D^2
    + ts*T*(S-35) + td3*T*D^3``
    """

    name: str
    c0: float
    t1: float
    t2: float
    t3: float
    s1: float
    d1: float
    d2: float
    ts: float
    td3: float


SOUND_SPEED_PRESETS = MappingProxyType({
    # Mackenzie (1981), the physically meaningful set; simulator default
    "mackenzie-standard": SoundSpeedCoefficients(
        "mackenzie-standard", 1448.96, 4.591, -5.304e-2, 2.374e-4,
        1.340, 1.630e-2, 1.675e-7, -1.025e-2, -7.139e-13,
    ),
    # as typeset in the RPLUW write-up; kept for documentation only
    "paper-verbatim": SoundSpeedCoefficients(
        "paper-verbatim", 1349.0, 4.601, -5.303e-2, 2.369e-4,
        1.35, 1.64e-2, 1.685e-7, 1.026e-2, -7.140e-3,
    ),
})

DEFAULT_COEFFICIENTS = SOUND_SPEED_PRESETS["mackenzie-standard"]


def sound_speed_preset(name: str) -> SoundSpeedCoefficients:
    try:
        return SOUND_SPEED_PRESETS[name]
    except KeyError:
        raise ChannelDomainError("coeffs", name, f"unknown preset, expected one of {sorted(SOUND_SPEED_PRESETS)}") from None


def sound_speed(env: EnvironmentProfile, depth_m: float,
                coeffs: SoundSpeedCoefficients = DEFAULT_COEFFICIENTS) -> float:
    """Speed of sound in sea water, m/s."""
    if not depth_m >= 0:
        raise ChannelDomainError("depth_m", depth_m, "must be >= 0")
    t = env.temperature_c
    ds = env.salinity_ppt - 35.0
    d = depth_m
    k = coeffs
    return (k.c0 + k.t1 * t + k.t2 * t * t + k.t3 * t ** 3
            + k.s1 * ds + k.d1 * d + k.d2 * d * d
            + k.ts * t * ds + k.td3 * t * d ** 3)


def relaxation_frequencies(env: EnvironmentProfile) -> tuple[float, float]:
    """Boric-acid and magnesium-sulphate relaxation frequencies in kHz."""
    t = env.temperature_c
    f1 = 0.78 * math.sqrt(env.salinity_ppt / 35.0) * math.exp(t / 26.0)
    f2 = 42.0 * math.exp(t / 17.0)
    return f1, f2


def absorption_db_per_km(frequency_khz: float, env: EnvironmentProfile, depth_km: float = 0.0) -> float:
    """Three-term absorption coefficient in dB/km.

    The coefficients are used exactly as typeset for RPLUW, including the
    ``(1 + T)/43`` and ``S/25`` factors of the magnesium-sulphate term.
    """
    if not frequency_khz >= 0:
        raise ChannelDomainError("frequency_khz", frequency_khz, "must be >= 0")
    if not depth_km >= 0:
        raise ChannelDomainError("depth_km", depth_km, "must be >= 0")
    f2sq = frequency_khz * frequency_khz
    t = env.temperature_c
    f1, f2 = relaxation_frequencies(env)
    boric = 0.111 * f1 * f2sq / (f1 * f1 + f2sq) * math.exp((env.ph - 8.0) / 0.56)
    mgso4 = (0.52 * (1.0 + t) / 43.0 * (env.salinity_ppt / 25.0)
             * f2 * f2sq / (f2 * f2 + f2sq) * math.exp(-depth_km / 6.0))
    pure = 5e-4 * f2sq * math.exp(-t / 27.0 - depth_km / 17.0)
    return boric + mgso4 + pure


@dataclass(frozen=True)
class NoiseComponents:
    turbulence_db: float
    shipping_db: float
    wind_db: float
    thermal_db: float

    def as_tuple(self):
        return (self.turbulence_db, self.shipping_db, self.wind_db, self.thermal_db)

    @property
    def total_linear(self) -> float:
        return sum(db_to_power(x) for x in self.as_tuple())


def db_to_power(db: float) -> float:
    return 10.0 ** (db / 10.0)


def power_to_db(p: float) -> float:
    return 10.0 * math.log10(p)


def noise_psd(frequency_khz: float, env: EnvironmentProfile) -> tuple[NoiseComponents, float]:
    """Ambient noise spectral density: the four components and their power sum."""
    if not frequency_khz > 0:
        raise ChannelDomainError("frequency_khz", frequency_khz, "must be > 0")
    f = frequency_khz
    lf = math.log10(f)
    s = env.shipping_activity
    w = env.wind_speed_mps
    comps = NoiseComponents(
        turbulence_db=17.0 - 30.0 * lf,
        shipping_db=40.0 + 20.0 * (s - 0.5) + 26.0 * lf - 60.0 * math.log10(f + 0.03),
        wind_db=50.0 + 7.5 * math.sqrt(w) + 20.0 * lf - 40.0 * math.log10(f + 0.4),
        thermal_db=-15.0 + 20.0 * lf,
    )
    return comps, power_to_db(comps.total_linear)


def path_loss_db(distance_m: float, spreading_factor: float = 1.3, alpha_db_per_km: float = 0.0) -> float:
    """Spreading plus absorption loss, k*10*log10(d) + (d/1000)*alpha."""
    if not distance_m > 0:
        raise ChannelDomainError("distance_m", distance_m, "must be > 0")
    if not 1.0 <= spreading_factor <= 2.0:
        raise ChannelDomainError("spreading_factor", spreading_factor, "must lie in [1, 2]")
    return spreading_factor * 10.0 * math.log10(distance_m) + distance_m / 1000.0 * alpha_db_per_km


def source_level_db(tx_power_w: float) -> float:
    if not tx_power_w > 0:
        raise ChannelDomainError("tx_power_w", tx_power_w, "must be > 0")
    return SOURCE_LEVEL_CONSTANT_DB + 10.0 * math.log10(tx_power_w)


@dataclass(frozen=True)
class LinkBudget:
    tx_power_w: float
    distance_m: float
    frequency_khz: float
    bandwidth_hz: float
    spreading_factor: float
    path_loss_db: float
    snr_db: float = math.nan
    capacity_bps: float = math.nan

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ChannelDomainError("bandwidth_hz", self.bandwidth_hz, "must be > 0")
        if not 1.0 <= self.spreading_factor <= 2.0:
            raise ChannelDomainError("spreading_factor", self.spreading_factor, "must lie in [1, 2]")


def snr_db(budget: LinkBudget, noise_total_db: float) -> float:
    """SL - A(d,f) - (N(f) + 10 log10 B)."""
    noise_in_band = noise_total_db + 10.0 * math.log10(budget.bandwidth_hz)
    return source_level_db(budget.tx_power_w) - budget.path_loss_db - noise_in_band


def channel_capacity_bps(snr: float, bandwidth_hz: float) -> float:
    """Shannon capacity B*log2(1 + SNR) with the SNR given in dB."""
    if not bandwidth_hz > 0:
        raise ChannelDomainError("bandwidth_hz", bandwidth_hz, "must be > 0")
    if snr == -math.inf:
        return 0.0
    return bandwidth_hz * math.log2(1.0 + 10.0 ** (snr / 10.0))


def link_budget(tx_power_w: float, distance_m: float, frequency_khz: float, bandwidth_hz: float,
                env: EnvironmentProfile, spreading_factor: float = 1.3, depth_km: float = 0.0) -> LinkBudget:
    """Evaluate path loss, SNR and capacity for one link."""
    alpha = absorption_db_per_km(frequency_khz, env, depth_km)
    loss = path_loss_db(distance_m, spreading_factor, alpha)
    partial = LinkBudget(tx_power_w, distance_m, frequency_khz, bandwidth_hz, spreading_factor, loss)
    _, noise = noise_psd(frequency_khz, env)
    snr = snr_db(partial, noise)
    return LinkBudget(tx_power_w, distance_m, frequency_khz, bandwidth_hz, spreading_factor,
                      loss, snr, channel_capacity_bps(snr, bandwidth_hz))


def propagation_delay_s(distance_m: float, sound_speed_mps: float) -> float:
    if not distance_m >= 0:
        raise ChannelDomainError("distance_m", distance_m, "must be >= 0")
    if not sound_speed_mps > 0:
        raise ChannelDomainError("sound_speed_mps", sound_speed_mps, "must be > 0")
    return distance_m / sound_speed_mps


def depth_from_pressure(pressure_pa: float, env: EnvironmentProfile) -> float:
    """Hydrostatic depth P/(rho*g), metres."""
    if not pressure_pa >= 0:
        raise ChannelDomainError("pressure_pa", pressure_pa, "must be >= 0")
    return pressure_pa / (env.water_density_kg_m3 * env.gravity_mps2)


def depth_difference(p1_pa: float, p2_pa: float, env: EnvironmentProfile) -> float:
    return depth_from_pressure(p1_pa, env) - depth_from_pressure(p2_pa, env)


def pressure_at_depth(depth_m: float, env: EnvironmentProfile) -> float:
    """Inverse of :func:`depth_from_pressure`, used by the simulated depth gauge."""
    return depth_m * env.water_density_kg_m3 * env.gravity_mps2
