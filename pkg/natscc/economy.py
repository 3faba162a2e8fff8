"""Per-country Cobb-Douglas growth with market damages feeding back on output.

All state fields are numpy arrays with one entry per country (scalars work too), so one call advances every country
of a world for one year.
"""
from dataclasses import dataclass, replace
from logging import Logger
from typing import Sequence

import numpy as np

from natscc.errors import ConfigError, EconomyError
from natscc.logger import get_logger


POPULATION_FLOOR = 1000.0
INCOME_FLOOR = 100.0


@dataclass(frozen=True)
class EconomyParams:
    capital_share: float = 0.3
    depreciation: float = 0.1
    initial_capital_to_output: float = 3.0

    def __post_init__(self):
        if not 0 < self.capital_share < 1:
            raise ConfigError('capital_share must lie in (0, 1)')
        if not 0 < self.depreciation < 1:
            raise ConfigError('depreciation must lie in (0, 1)')
        if self.initial_capital_to_output <= 0:
            raise ConfigError('initial_capital_to_output must be positive')


@dataclass(frozen=True)
class ScenarioSlice:
    """Exogenous drivers for one year"""
    year: int
    population: np.ndarray
    tfp_growth: np.ndarray
    savings_rate: np.ndarray


@dataclass(frozen=True)
class CountryState:
    year: int
    population: np.ndarray
    tfp: np.ndarray
    capital: np.ndarray
    gross_output: np.ndarray
    net_output: np.ndarray
    investment: np.ndarray
    consumption: np.ndarray
    per_capita_income: np.ndarray

    @property
    def consumption_per_capita(self) -> np.ndarray:
        return self.consumption / self.population


def _produce(year: int, population, tfp, capital, params: EconomyParams, savings_rate,
             damage_fraction) -> CountryState:
    gross_output = tfp * capital ** params.capital_share * population ** (1 - params.capital_share)
    net_output = gross_output * (1 - damage_fraction)
    investment = savings_rate * net_output
    consumption = net_output - investment
    return CountryState(year, population, tfp, capital, gross_output, net_output, investment, consumption,
                        net_output / population)


def initial_state(base_gdp: np.ndarray, params: EconomyParams, scenario: ScenarioSlice) -> CountryState:
    """Base-year state: capital from the capital-output ratio, TFP backed out so gross output equals base GDP

    Args:
        base_gdp (np.ndarray): base-year GDP per country (US$/yr)
        params (EconomyParams): economy parameters
        scenario (ScenarioSlice): base-year drivers

    Returns:
        CountryState: base-year state without damages
    """
    base_gdp = np.asarray(base_gdp, dtype=float)
    population = np.asarray(scenario.population, dtype=float)
    capital = params.initial_capital_to_output * base_gdp
    tfp = base_gdp / (capital ** params.capital_share * population ** (1 - params.capital_share))
    return _produce(scenario.year, population, tfp, capital, params, scenario.savings_rate, 0.0)


def step_economy(state: CountryState, params: EconomyParams, scenario: ScenarioSlice, market_damage_fraction,
                 isos: Sequence = None) -> CountryState:
    """Advance one year: capital accumulates last year's investment, TFP and population follow the scenario, then
    output is produced and reduced by the market damage fraction.

    Args:
        state (CountryState): previous year state
        params (EconomyParams): economy parameters
        scenario (ScenarioSlice): drivers for the new year
        market_damage_fraction (np.ndarray|float): market damages as a fraction of gross output
        isos (Sequence, optional): country labels for error messages. Defaults to None.

    Raises:
        EconomyError: a damage fraction of one or more annihilates the economy

    Returns:
        CountryState: state of the new year
    """
    damage = np.asarray(market_damage_fraction, dtype=float)
    if np.any(damage >= 1):
        index = int(np.argmax(np.atleast_1d(damage) >= 1))
        country = isos[index] if isos is not None else str(index)
        raise EconomyError(f'Market damages annihilate the economy of {country} in {scenario.year}',
                           country, scenario.year)
    capital = (1 - params.depreciation) * state.capital + state.investment
    tfp = state.tfp * np.exp(scenario.tfp_growth)
    return _produce(scenario.year, np.asarray(scenario.population, dtype=float), tfp, capital, params,
                    scenario.savings_rate, damage)


def apply_floors(state: CountryState, isos: Sequence = None, logger: Logger = None) -> CountryState:
    """Enforce the population (1,000 persons) and income (100 US$/person) floors. Flows are rescaled together so
    consumption + investment = net output still holds.

    Args:
        state (CountryState): state to bound
        isos (Sequence, optional): country labels for the floor log. Defaults to None.
        logger (Logger, optional): logger. Defaults to None.

    Returns:
        CountryState: bounded state, the same object when no floor binds
    """
    population = np.maximum(state.population, POPULATION_FLOOR)
    income = state.net_output / population
    low_income = income < INCOME_FLOOR
    population_bound = population != state.population
    if not np.any(population_bound) and not np.any(low_income):
        return state
    log = logger or get_logger('natscc')
    for index in np.flatnonzero(np.atleast_1d(population_bound | low_income)):
        country = isos[index] if isos is not None else str(index)
        which = 'population' if np.atleast_1d(population_bound)[index] else 'income'
        log.warning('%s floor binds for %s in %s', which.capitalize(), country, state.year)
    net_output = np.where(low_income, INCOME_FLOOR * population, state.net_output)
    with np.errstate(divide='ignore', invalid='ignore'):
        scale = np.where(state.net_output > 0, net_output / state.net_output, 0.0)
    investment = np.where(low_income, state.investment * scale, state.investment)
    consumption = np.where(low_income, net_output - investment, state.consumption)
    return replace(state, population=population, net_output=net_output, investment=investment,
                   consumption=consumption, per_capita_income=np.maximum(net_output / population, INCOME_FLOOR))
