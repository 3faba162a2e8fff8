"""The simulated world and the annual economy -> emissions -> climate -> impacts loop.

A World bundles the country table, the exogenous drivers as (years, countries) arrays, every model parameter and
the damage settings. run_world advances it from the start year to the horizon and returns a Trajectory.
"""
from dataclasses import dataclass, fields, replace
from logging import Logger
from typing import Mapping

import numpy as np
import pandas as pd

from natscc.climate import CarbonCycleParams, ClimateParams, ClimateState, national_temperature, step_climate
from natscc.config import DamageConfig, RunConfig, config_hash
from natscc.damage_functions import apply_income_elasticity
from natscc.economy import EconomyParams, ScenarioSlice, apply_floors, initial_state, step_economy
from natscc.errors import ConfigError
from natscc.emissions import GASES, EmissionsVector, PulseSpec, advance_intensity, compute_emissions, emissions_path, \
    inject_pulse
from natscc.impacts import SECTORS, ImpactParams, calibrate_national_params, collapse_benchmarks, evaluate_impacts, \
    load_benchmarks, load_calibration, uncalibrated_params
from natscc.logger import get_logger
from natscc.scenario_io import WORLD_ISO, CountryTable, collapse_table, load_country_table, load_intensities, \
    load_scenario, validate_world_totals


@dataclass(frozen=True)
class World:
    table: CountryTable
    years: np.ndarray
    population: np.ndarray
    tfp_growth: np.ndarray
    savings_rate: np.ndarray
    intensity_rates: EmissionsVector
    base_intensity: EmissionsVector
    prescribed: Mapping
    economy: EconomyParams
    carbon: CarbonCycleParams
    climate: ClimateParams
    initial_climate: ClimateState
    damage: DamageConfig
    impacts: ImpactParams = None
    benchmarks: Mapping = None
    impact_overrides: Mapping = None
    key: str = ''

    @property
    def isos(self) -> tuple:
        return self.table.isos

    @property
    def start_year(self) -> int:
        return int(self.years[0])

    @property
    def horizon(self) -> int:
        return int(self.years[-1])

    def scenario_slice(self, index: int) -> ScenarioSlice:
        return ScenarioSlice(int(self.years[index]), self.population[index], self.tfp_growth[index],
                             self.savings_rate[index])

    def damages(self, state, climate: ClimateState, t_national) -> tuple:
        """Market and non-market damages (US$) of every country for one year. With a nonzero income elasticity damages
        are reweighted by (income / world income) ** elasticity, both incomes taken in the same year. A country keeps
        its weight while it grows with the world. The below/above average split of the elasticity sweep uses base-year
        incomes.

        Args:
            state (CountryState): economy of the year
            climate (ClimateState): climate of the year
            t_national (np.ndarray): national warming

        Returns:
            tuple: (market, nonmarket, per-sector matrix or None)
        """
        if self.damage.aggregate:
            market = self.damage.fraction(t_national) * state.gross_output
            nonmarket = np.zeros_like(market)
            sectors = None
        else:
            breakdown = evaluate_impacts(state, climate, self.impacts, t_national)
            market, nonmarket, sectors = breakdown.market, breakdown.nonmarket_value, breakdown.sectors
        if self.damage.income_elasticity != 0:
            world_income = float(state.net_output.sum() / state.population.sum())
            market = apply_income_elasticity(market, state.per_capita_income, world_income,
                                             self.damage.income_elasticity)
            nonmarket = apply_income_elasticity(nonmarket, state.per_capita_income, world_income,
                                                self.damage.income_elasticity)
            if sectors is not None:
                sectors = apply_income_elasticity(sectors, state.per_capita_income, world_income,
                                                  self.damage.income_elasticity)
        return market, nonmarket, sectors

    def with_damage(self, damage: DamageConfig, impacts: ImpactParams = None) -> 'World':
        """Same world under other damage settings. Sectoral mode needs calibrated impacts"""
        impacts = impacts or self.impacts
        if not damage.aggregate and impacts is None:
            if self.benchmarks is None:
                raise ConfigError('Sectoral damages need regional benchmarks to calibrate')
            impacts = calibrate_national_params(self.benchmarks, self.table,
                                                uncalibrated_params(self.table, self.impact_overrides,
                                                                    self.carbon.preindustrial_concentration),
                                                self.carbon, self.climate).params
        return replace(self, damage=damage, impacts=impacts, key=f'{self.key}|{damage.mode}')

    def collapse(self) -> 'World':
        """The world as one aggregate region. Drivers are GDP weighted, intensity change rates base-emission
        weighted, sectoral impacts recalibrated on the summed regional benchmarks.

        Returns:
            World: single-region world
        """
        table = collapse_table(self.table)
        key = f'{self.key}|single-region'
        if len(self.table) == 1:
            return replace(self, table=table, key=key)
        gdp = self.table.column('base_gdp')
        base_emissions = {gas: intensity * gdp for gas, intensity in self.base_intensity.as_dict().items()}
        rates = {}
        for gas, matrix in self.intensity_rates.as_dict().items():
            weights = base_emissions[gas] if base_emissions[gas].sum() > 0 else gdp
            rates[gas] = _weighted(matrix, weights)
        intensity = {gas: np.array([base_emissions[gas].sum() / gdp.sum()]) for gas in GASES}
        impacts = None
        if self.impacts is not None:
            if self.benchmarks is None:
                raise ConfigError('Collapsing sectoral impacts needs the regional benchmarks')
            benchmarks = collapse_benchmarks(self.benchmarks, self.table.regions, WORLD_ISO)
            impacts = calibrate_national_params(benchmarks, table,
                                                uncalibrated_params(table, self.impact_overrides,
                                                                    self.carbon.preindustrial_concentration),
                                                self.carbon, self.climate).params
        return replace(
            self,
            table=table,
            population=self.population.sum(axis=1, keepdims=True),
            tfp_growth=_weighted(self.tfp_growth, gdp),
            savings_rate=_weighted(self.savings_rate, gdp),
            intensity_rates=EmissionsVector.from_mapping(rates),
            base_intensity=EmissionsVector.from_mapping(intensity),
            impacts=impacts,
            key=key,
        )


def _weighted(matrix: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (matrix @ weights / weights.sum())[:, None]


@dataclass(frozen=True)
class Trajectory:
    """Annual model output, (years, countries) arrays in table order"""
    isos: tuple
    years: np.ndarray
    population: np.ndarray
    capital: np.ndarray
    gross_output: np.ndarray
    net_output: np.ndarray
    investment: np.ndarray
    consumption: np.ndarray
    per_capita_income: np.ndarray
    t_national: np.ndarray
    co2_emissions: np.ndarray
    market_damage: np.ndarray
    nonmarket_damage: np.ndarray
    climate: pd.DataFrame
    sector_damage: np.ndarray = None
    key: str = ''

    @property
    def damages(self) -> np.ndarray:
        return self.market_damage + self.nonmarket_damage

    @property
    def consumption_per_capita(self) -> np.ndarray:
        return self.consumption / self.population

    def year_index(self, year: int) -> int:
        index = int(year) - int(self.years[0])
        if not 0 <= index < len(self.years):
            raise IndexError(f'Year {year} outside {self.years[0]}-{self.years[-1]}')
        return index

    def to_frame(self) -> pd.DataFrame:
        """Country-year rows"""
        columns = ('population', 'capital', 'gross_output', 'net_output', 'investment', 'consumption',
                   'per_capita_income', 't_national', 'co2_emissions', 'market_damage', 'nonmarket_damage')
        frame = pd.DataFrame({
            'iso': np.tile(np.array(self.isos, dtype=object), len(self.years)),
            'year': np.repeat(self.years, len(self.isos)),
        })
        for column in columns:
            frame[column] = getattr(self, column).reshape(-1)
        frame['consumption_per_capita'] = self.consumption_per_capita.reshape(-1)
        return frame

    def climate_frame(self) -> pd.DataFrame:
        return self.climate.reset_index()

    def identical(self, other: 'Trajectory') -> bool:
        """Bit-identical arrays and climate"""
        for item in fields(self):
            mine, theirs = getattr(self, item.name), getattr(other, item.name)
            if isinstance(mine, pd.DataFrame):
                if not mine.equals(theirs):
                    return False
            elif isinstance(mine, np.ndarray) or isinstance(theirs, np.ndarray):
                if mine is None or theirs is None or not np.array_equal(mine, theirs):
                    return False
            elif mine != theirs:
                return False
        return True


CLIMATE_COLUMNS = ('co2_emissions', 'co2_ppm', 'ch4_ppb', 'n2o_ppb', 'sf6_ppt', 'cfc11_ppt', 'cfc12_ppt', 'so2',
                   'forcing', 't_global', 'sea_level')


def run_world(world: World, pulse: PulseSpec = None, emissions_override: pd.DataFrame = None,
              logger: Logger = None) -> Trajectory:
    """Simulate every year from the start year to the horizon. Each year the economy steps with last year's market
    damage fraction, floors are enforced, emissions follow gross output plus any added global emissions, the climate
    steps and impacts are evaluated.

    Args:
        world (World): world to simulate
        pulse (PulseSpec, optional): extra emission added to the global total. Defaults to None.
        emissions_override (pd.DataFrame, optional): per-year additional global emissions by gas, replaces the zero
            path the pulse is injected into. Defaults to None.
        logger (Logger, optional): logger for floor warnings. Defaults to None.

    Raises:
        EconomyError: market damages of one or more of output
        EmissionsError: pulse outside the horizon
        ClimateError: invalid concentrations or missing prescribed gases

    Returns:
        Trajectory: annual output
    """
    log = logger or get_logger('natscc')
    years = world.years
    extra = emissions_override if emissions_override is not None else emissions_path(years)
    if pulse is not None:
        extra = inject_pulse(extra, pulse)
    extra = extra.reindex(years, fill_value=0.0)[list(GASES)].to_numpy(dtype=float)
    isos = world.isos
    count = (len(years), len(isos))
    record = {name: np.empty(count) for name in ('population', 'capital', 'gross_output', 'net_output', 'investment',
                                                 'consumption', 'per_capita_income', 't_national', 'co2_emissions',
                                                 'market_damage', 'nonmarket_damage')}
    sector_damage = None if world.damage.aggregate else np.empty((len(years), len(SECTORS), len(isos)))
    climate_rows = []
    pattern = world.table.column('temperature_pattern')
    base_gdp = world.table.column('base_gdp')
    state = apply_floors(initial_state(base_gdp, world.economy, world.scenario_slice(0)), isos, log)
    intensity = world.base_intensity
    climate = world.initial_climate
    damage_fraction = np.zeros(len(isos))
    for index, year in enumerate(years):
        if index > 0:
            state = step_economy(state, world.economy, world.scenario_slice(index), damage_fraction, isos)
            state = apply_floors(state, isos, log)
            rates = EmissionsVector(**{gas: rate[index - 1] for gas, rate in world.intensity_rates.as_dict().items()})
            intensity = advance_intensity(intensity, rates)
        emissions = compute_emissions(state.gross_output, intensity)
        totals = emissions.total()
        totals = EmissionsVector(**{gas: value + extra[index, column]
                                    for column, (gas, value) in enumerate(totals.as_dict().items())})
        climate = step_climate(climate, world.carbon, world.climate, totals, world.prescribed, int(year))
        t_national = national_temperature(climate.t_global, pattern)
        market, nonmarket, sectors = world.damages(state, climate, t_national)
        damage_fraction = market / state.gross_output if world.damage.market_feedback else np.zeros(len(isos))
        for name in ('population', 'capital', 'gross_output', 'net_output', 'investment', 'consumption',
                     'per_capita_income'):
            record[name][index] = getattr(state, name)
        record['t_national'][index] = t_national
        record['co2_emissions'][index] = emissions.co2
        record['market_damage'][index] = market
        record['nonmarket_damage'][index] = nonmarket
        if sector_damage is not None:
            sector_damage[index] = sectors
        climate_rows.append((int(year), totals.co2, climate.co2_ppm, climate.ch4_ppb, climate.n2o_ppb, climate.sf6_ppt,
                             climate.cfc11_ppt, climate.cfc12_ppt, climate.so2, climate.forcing, climate.t_global,
                             climate.sea_level))
    climate_frame = pd.DataFrame(climate_rows, columns=('year',) + CLIMATE_COLUMNS).set_index('year')
    return Trajectory(isos, np.asarray(years), climate=climate_frame, sector_damage=sector_damage, key=world.key,
                      **record)


def build_world(config: RunConfig, logger: Logger = None) -> World:
    """Load inputs, extrapolate the scenario to the horizon and calibrate impacts when damages are sectoral

    Args:
        config (RunConfig): run configuration
        logger (Logger, optional): logger. Defaults to None.

    Raises:
        ConfigError: invalid inputs
        CalibrationError: calibration failures

    Returns:
        World: world ready to run
    """
    log = logger or get_logger('natscc')
    paths = config.paths
    start, horizon = config.economy.start_year, config.economy.horizon
    table = load_country_table(paths.countries)
    scenario = load_scenario(paths.scenarios, table, start, horizon, logger=log)
    if scenario.needs_extrapolation:
        scenario = scenario.extrapolated(horizon, config.economy.extrapolation, log)
    intensities = load_intensities(paths.intensities, table)
    gdp = table.column('base_gdp')
    validate_world_totals(table, config.global_reference, {gas: value * gdp for gas, value in intensities.items()},
                          log)
    carbon = config.climate.carbon_params()
    climate = config.climate.climate_params()
    benchmarks = load_benchmarks(paths.benchmarks) if paths.benchmarks is not None and paths.benchmarks.is_file() \
        else None
    overrides = dict(config.impacts.sectors)
    impacts = None
    if not config.damage.aggregate:
        params = uncalibrated_params(table, overrides, carbon.preindustrial_concentration)
        if paths.calibration is not None and paths.calibration.is_file():
            log.info('Loading calibration from %s', paths.calibration)
            impacts = load_calibration(paths.calibration, table, params)
        else:
            if benchmarks is None:
                raise ConfigError(f'Benchmark file not found: {paths.benchmarks}')
            impacts = calibrate_national_params(benchmarks, table, params, carbon, climate, logger=log).params
    rates = {gas: scenario.matrix(f'{gas}_intensity_rate', table.isos, start, horizon) for gas in GASES}
    return World(
        table=table,
        years=np.arange(start, horizon + 1),
        population=scenario.matrix('population', table.isos, start, horizon),
        tfp_growth=scenario.matrix('tfp_growth', table.isos, start, horizon),
        savings_rate=scenario.matrix('savings_rate', table.isos, start, horizon),
        intensity_rates=EmissionsVector.from_mapping(rates),
        base_intensity=EmissionsVector.from_mapping(intensities),
        prescribed=dict(scenario.global_series),
        economy=config.economy.params(),
        carbon=carbon,
        climate=climate,
        initial_climate=config.climate.initial_state(start - 1),
        damage=config.damage,
        impacts=impacts,
        benchmarks=benchmarks,
        impact_overrides=overrides,
        key=config_hash(config)[:16],
    )
