"""Global carbon cycle, non-CO2 gases, radiative forcing, temperature, national pattern scaling and sea level.

Coefficients are the usual simple-climate-model values and are all overridable from the run config.
"""
from dataclasses import dataclass, field, replace
from math import log as ln
from typing import Mapping

import numpy as np

from natscc.errors import ClimateError, ConfigError
from natscc.emissions import EmissionsVector


# CH4/N2O overlap term
OVERLAP_SCALE = 0.47
OVERLAP_A = 2.01e-5
OVERLAP_B = 5.31e-15


@dataclass(frozen=True)
class CarbonCycleParams:
    shares: tuple = (0.13, 0.20, 0.32, 0.25, 0.10)
    lifetimes: tuple = (float('inf'), 363.0, 74.0, 17.0, 2.0)
    preindustrial_concentration: float = 280.0
    ppm_per_gtc: float = 0.47

    def __post_init__(self):
        object.__setattr__(self, 'shares', tuple(float(share) for share in self.shares))
        object.__setattr__(self, 'lifetimes', tuple(float(tau) for tau in self.lifetimes))
        if len(self.shares) != len(self.lifetimes):
            raise ConfigError('Carbon cycle shares and lifetimes must have the same length')
        if abs(sum(self.shares) - 1.0) > 1e-9 or min(self.shares) < 0:
            raise ConfigError('Carbon cycle shares must be non-negative and sum to 1')
        if min(self.lifetimes) <= 0:
            raise ConfigError('Carbon cycle lifetimes must be positive')

    @property
    def decay(self) -> np.ndarray:
        return np.exp(-1.0 / np.array(self.lifetimes))


@dataclass(frozen=True)
class GasParams:
    preindustrial: float
    lifetime: float
    per_emission: float


def _default_gases() -> dict:
    return {
        'ch4': GasParams(preindustrial=790.0, lifetime=12.0, per_emission=0.3597),
        'n2o': GasParams(preindustrial=285.0, lifetime=114.0, per_emission=0.2079),
        'sf6': GasParams(preindustrial=0.0, lifetime=3200.0, per_emission=0.0416),
    }


@dataclass(frozen=True)
class ClimateParams:
    ecs: float = 3.0
    response_time: float = 40.0
    f2x: float = 3.71
    gases: Mapping = field(default_factory=_default_gases)
    ch4_forcing: float = 0.036
    n2o_forcing: float = 0.12
    sf6_efficiency: float = 0.00052
    cfc11_efficiency: float = 0.00025
    cfc12_efficiency: float = 0.00032
    so2_forcing: float = 0.01
    slr_equilibrium_per_degree: float = 0.5
    slr_response_time: float = 500.0

    def __post_init__(self):
        for name in ('ecs', 'response_time', 'f2x', 'slr_equilibrium_per_degree', 'slr_response_time'):
            if not getattr(self, name) > 0:
                raise ConfigError(f'Climate parameter {name} must be positive')
        for gas in ('ch4', 'n2o', 'sf6'):
            if gas not in self.gases or self.gases[gas].lifetime <= 0:
                raise ConfigError(f'Climate parameters need a positive lifetime for {gas}')


@dataclass(frozen=True)
class ClimateState:
    year: int
    box_masses: np.ndarray
    co2_ppm: float
    ch4_ppb: float
    n2o_ppb: float
    sf6_ppt: float
    cfc11_ppt: float = 0.0
    cfc12_ppt: float = 0.0
    so2: float = 0.0
    forcing: float = 0.0
    t_global: float = 0.0
    sea_level: float = 0.0
    sea_level_change: float = 0.0


def preindustrial_state(year: int, carbon: CarbonCycleParams, params: ClimateParams) -> ClimateState:
    return ClimateState(year, np.zeros(len(carbon.shares)), carbon.preindustrial_concentration,
                        params.gases['ch4'].preindustrial, params.gases['n2o'].preindustrial,
                        params.gases['sf6'].preindustrial)


def step_carbon_cycle(state: ClimateState, params: CarbonCycleParams, co2_emissions: float) -> ClimateState:
    """Each box receives its share of the emissions, then decays by exp(-1/lifetime)

    Args:
        state (ClimateState): current state
        params (CarbonCycleParams): box shares and lifetimes
        co2_emissions (float): global emissions (GtC)

    Returns:
        ClimateState: state with new box masses and CO2 concentration
    """
    masses = (np.asarray(state.box_masses) + np.array(params.shares) * co2_emissions) * params.decay
    return replace(state, box_masses=masses,
                   co2_ppm=params.preindustrial_concentration + params.ppm_per_gtc * float(masses.sum()))


def airborne_fraction(years: float, params: CarbonCycleParams) -> float:
    """Share of a unit pulse still airborne after the given number of years"""
    return float(np.sum(np.array(params.shares) * np.exp(-years / np.array(params.lifetimes))))


def _decay_toward(value: float, gas: GasParams, emissions: float) -> float:
    return gas.preindustrial + (value - gas.preindustrial) * np.exp(-1.0 / gas.lifetime) + gas.per_emission * emissions


def step_ghg_concentrations(state: ClimateState, params: ClimateParams, emissions: EmissionsVector,
                            prescribed: Mapping, year: int) -> ClimateState:
    """One-box decay toward preindustrial for CH4, N2O and SF6, prescribed CFC11 and CFC12 concentrations

    Args:
        state (ClimateState): current state
        params (ClimateParams): gas parameters
        emissions (EmissionsVector): global emissions of the year
        prescribed (Mapping): 'cfc11' and 'cfc12' TimeSeries (ppt)
        year (int): year being simulated

    Raises:
        ClimateError: the prescribed series do not cover the year

    Returns:
        ClimateState: state with new concentrations
    """
    try:
        cfc11 = prescribed['cfc11'].value(year)
        cfc12 = prescribed['cfc12'].value(year)
    except (KeyError, ConfigError) as error:
        raise ClimateError(f'No prescribed CFC concentration for {year}: {error}') from error
    return replace(
        state,
        ch4_ppb=float(_decay_toward(state.ch4_ppb, params.gases['ch4'], emissions.ch4)),
        n2o_ppb=float(_decay_toward(state.n2o_ppb, params.gases['n2o'], emissions.n2o)),
        sf6_ppt=float(_decay_toward(state.sf6_ppt, params.gases['sf6'], emissions.sf6)),
        cfc11_ppt=cfc11,
        cfc12_ppt=cfc12,
        so2=float(emissions.so2),
    )


def _overlap(ch4: float, n2o: float) -> float:
    product = ch4 * n2o
    return OVERLAP_SCALE * ln(1 + OVERLAP_A * product ** 0.75 + OVERLAP_B * ch4 * product ** 1.52)


def radiative_forcing(state: ClimateState, params: ClimateParams, carbon: CarbonCycleParams) -> float:
    """Total radiative forcing (W/m2): logarithmic CO2, square-root CH4 and N2O with overlap correction, linear SF6,
    CFC11 and CFC12, negative linear SO2 (in emissions)

    Args:
        state (ClimateState): concentrations
        params (ClimateParams): forcing coefficients
        carbon (CarbonCycleParams): preindustrial CO2

    Raises:
        ClimateError: non-positive CO2 or negative concentrations

    Returns:
        float: forcing
    """
    if state.co2_ppm <= 0:
        raise ClimateError(f'CO2 concentration must be positive, got {state.co2_ppm}')
    if min(state.ch4_ppb, state.n2o_ppb, state.sf6_ppt, state.cfc11_ppt, state.cfc12_ppt) < 0:
        raise ClimateError('Concentrations must be non-negative')
    ch4_0 = params.gases['ch4'].preindustrial
    n2o_0 = params.gases['n2o'].preindustrial
    co2 = params.f2x / ln(2) * ln(state.co2_ppm / carbon.preindustrial_concentration)
    ch4 = (params.ch4_forcing * (state.ch4_ppb ** 0.5 - ch4_0 ** 0.5)
           - (_overlap(state.ch4_ppb, n2o_0) - _overlap(ch4_0, n2o_0)))
    n2o = (params.n2o_forcing * (state.n2o_ppb ** 0.5 - n2o_0 ** 0.5)
           - (_overlap(ch4_0, state.n2o_ppb) - _overlap(ch4_0, n2o_0)))
    halogens = (params.sf6_efficiency * state.sf6_ppt + params.cfc11_efficiency * state.cfc11_ppt
                + params.cfc12_efficiency * state.cfc12_ppt)
    return co2 + ch4 + n2o + halogens - params.so2_forcing * state.so2


def step_temperature(state: ClimateState, params: ClimateParams, forcing: float) -> float:
    """T(t+1) = T(t) + (ecs * F / f2x - T(t)) / response_time"""
    return state.t_global + (params.ecs * forcing / params.f2x - state.t_global) / params.response_time


def national_temperature(t_global, pattern):
    """Pattern-scaled national warming: pattern * global warming. pattern is a CountryRecord, a float or an array"""
    pattern = getattr(pattern, 'temperature_pattern', pattern)
    return pattern * t_global


def absolute_national_temperature(t_global: float, record) -> float:
    return record.base_temperature + national_temperature(t_global, record)


def step_sea_level(state: ClimateState, params: ClimateParams) -> float:
    """S(t+1) = S(t) + (equilibrium_per_degree * T(t) - S(t)) / response_time"""
    return state.sea_level + (params.slr_equilibrium_per_degree * state.t_global - state.sea_level) \
        / params.slr_response_time


def step_climate(state: ClimateState, carbon: CarbonCycleParams, params: ClimateParams, emissions: EmissionsVector,
                 prescribed: Mapping, year: int) -> ClimateState:
    """Advance the climate one year: carbon cycle, other gases, forcing, sea level (on last year's temperature) and
    temperature

    Args:
        state (ClimateState): previous year state
        carbon (CarbonCycleParams): carbon cycle parameters
        params (ClimateParams): climate parameters
        emissions (EmissionsVector): global emissions of the year (pulse included)
        prescribed (Mapping): prescribed CFC series
        year (int): year being simulated

    Returns:
        ClimateState: state of the year
    """
    new = step_carbon_cycle(state, carbon, emissions.co2)
    new = step_ghg_concentrations(new, params, emissions, prescribed, year)
    forcing = radiative_forcing(new, params, carbon)
    sea_level = step_sea_level(state, params)
    return replace(new, year=year, forcing=forcing, t_global=step_temperature(state, params, forcing),
                   sea_level=sea_level, sea_level_change=sea_level - state.sea_level)


def benchmark_climate(t_global: float, carbon: CarbonCycleParams, params: ClimateParams,
                      year: int = 0) -> ClimateState:
    """Warming-consistent climate used to evaluate impacts at a given global warming: CO2 at C0 * 2^(T/ecs), other
    gases preindustrial, sea level at its equilibrium and sea-level change equal to equilibrium over response time

    Args:
        t_global (float): global warming (C)
        carbon (CarbonCycleParams): carbon cycle parameters
        params (ClimateParams): climate parameters
        year (int, optional): year label. Defaults to 0.

    Returns:
        ClimateState: benchmark state
    """
    sea_level = params.slr_equilibrium_per_degree * t_global
    co2 = carbon.preindustrial_concentration * 2 ** (t_global / params.ecs)
    masses = np.array(carbon.shares) * (co2 - carbon.preindustrial_concentration) / carbon.ppm_per_gtc
    return replace(preindustrial_state(year, carbon, params), box_masses=masses, co2_ppm=co2,
                   forcing=params.f2x * t_global / params.ecs, t_global=t_global, sea_level=sea_level,
                   sea_level_change=sea_level / params.slr_response_time)
