"""Sectoral national impacts with income-dependent vulnerability and the benchmark-rescaling calibration.

Every sector follows

    impact = GDP * alpha * g(driver) * exposure * (y / y_base) ** elasticity

with g(0) = 0. Health sectors count deaths valued at 200 times per-capita income, agriculture subtracts a CO2
fertilisation term, and the sea-level sectors are driven by sea level (dryland, wetland) or its annual rise
(protection, migration). The shapes of g are simplified reconstructions documented in SECTOR_DEFAULTS.

Calibration imputes provisional national parameters from covariates and the income elasticity, then rescales all
countries of a region by one common factor so national impacts at 2.5 C global warming add up to the regional
benchmark.
"""
from dataclasses import dataclass, replace
from enum import Enum
from logging import Logger
from pathlib import Path
from typing import Mapping

import numpy as np
import pandas as pd

from natscc.climate import CarbonCycleParams, ClimateParams, ClimateState, benchmark_climate, national_temperature
from natscc.economy import CountryState
from natscc.errors import CalibrationError, ConfigError, ImpactError
from natscc.logger import get_logger
from natscc.scenario_io import CountryTable, collapse_table


BENCHMARK_WARMING = 2.5
VSL_INCOME_MULTIPLE = 200.0


class Sector(str, Enum):
    AGRICULTURE = 'agriculture'
    COOLING = 'cooling'
    HEATING = 'heating'
    HURRICANES = 'hurricanes'
    EXTRATROPICAL_STORMS = 'extratropical_storms'
    FORESTS = 'forests'
    WATER = 'water'
    CARDIOVASCULAR = 'cardiovascular'
    RESPIRATORY = 'respiratory'
    DIARRHOEA = 'diarrhoea'
    VECTOR_BORNE = 'vector_borne'
    BIODIVERSITY = 'biodiversity'
    SLR_DRYLAND = 'slr_dryland'
    SLR_WETLAND = 'slr_wetland'
    SLR_PROTECTION = 'slr_protection'
    SLR_MIGRATION = 'slr_migration'


SECTORS = tuple(Sector)
MARKET_SECTORS = frozenset({
    Sector.AGRICULTURE, Sector.COOLING, Sector.HEATING, Sector.HURRICANES, Sector.EXTRATROPICAL_STORMS,
    Sector.FORESTS, Sector.WATER, Sector.SLR_DRYLAND, Sector.SLR_PROTECTION, Sector.SLR_MIGRATION,
})
HEALTH_SECTORS = frozenset({Sector.CARDIOVASCULAR, Sector.RESPIRATORY, Sector.DIARRHOEA, Sector.VECTOR_BORNE})
NON_NEGATIVE_SECTORS = frozenset({Sector.SLR_PROTECTION, Sector.SLR_MIGRATION})
MARKET_MASK = np.array([sector in MARKET_SECTORS for sector in SECTORS])

# exposure: covariate scaling the sector within a country
#   rural = 1 - urban share, urban = urban share, coast = coast km, wetland = wetland km2, land = dryland km2
SECTOR_DEFAULTS = {
    Sector.AGRICULTURE: {'income_elasticity': -0.31, 'exposure': 'rural', 'optimum_temperature': 1.0,
                         'fertilization': 0.0005},
    Sector.COOLING: {'income_elasticity': 0.8, 'exposure': 'urban'},
    Sector.HEATING: {'income_elasticity': 0.8, 'exposure': None},
    Sector.HURRICANES: {'income_elasticity': -0.514, 'exposure': None},
    Sector.EXTRATROPICAL_STORMS: {'income_elasticity': -0.514, 'exposure': None},
    Sector.FORESTS: {'income_elasticity': -0.31, 'exposure': 'land'},
    Sector.WATER: {'income_elasticity': -0.85, 'exposure': None},
    Sector.CARDIOVASCULAR: {'income_elasticity': 0.0, 'exposure': 'urban'},
    Sector.RESPIRATORY: {'income_elasticity': 0.0, 'exposure': 'urban'},
    Sector.DIARRHOEA: {'income_elasticity': -1.58, 'exposure': 'rural'},
    Sector.VECTOR_BORNE: {'income_elasticity': -2.65, 'exposure': 'rural'},
    Sector.BIODIVERSITY: {'income_elasticity': 1.0, 'exposure': None},
    Sector.SLR_DRYLAND: {'income_elasticity': 1.0, 'exposure': 'coast'},
    Sector.SLR_WETLAND: {'income_elasticity': 1.16, 'exposure': 'wetland'},
    Sector.SLR_PROTECTION: {'income_elasticity': 0.0, 'exposure': 'coast'},
    Sector.SLR_MIGRATION: {'income_elasticity': 1.0, 'exposure': 'coast'},
}
SECTOR_SETTINGS = ('income_elasticity', 'exposure', 'optimum_temperature', 'fertilization')


def to_sector(name) -> Sector:
    try:
        return Sector(name)
    except ValueError:
        raise ImpactError(f'Unknown sector: {name}') from None


def _exposure(table: CountryTable, kind: str) -> np.ndarray:
    if kind is None:
        return np.ones(len(table))
    columns = {'urban': 'urban_share', 'coast': 'coast_length', 'wetland': 'wetland_area', 'land': 'dryland_area'}
    if kind == 'rural':
        return 1.0 - table.column('urban_share')
    if kind not in columns:
        raise ConfigError(f'Unknown exposure covariate: {kind}')
    return table.column(columns[kind])


@dataclass(frozen=True)
class SectorParams:
    sector: Sector
    income_elasticity: float
    exposure: np.ndarray
    alpha: np.ndarray = None
    optimum_temperature: float = 0.0
    fertilization: float = 0.0

    @property
    def calibrated(self) -> bool:
        return self.alpha is not None


@dataclass(frozen=True)
class ImpactParams:
    sectors: Mapping
    base_income: np.ndarray
    preindustrial_co2: float = 280.0

    @property
    def calibrated(self) -> bool:
        return all(params.calibrated for params in self.sectors.values())

    def with_alpha(self, alphas: Mapping) -> 'ImpactParams':
        sectors = dict(self.sectors)
        for sector, alpha in alphas.items():
            sectors[sector] = replace(sectors[sector], alpha=np.asarray(alpha, dtype=float))
        return replace(self, sectors=sectors)

    def scaled(self, multipliers: np.ndarray) -> 'ImpactParams':
        """Calibrated alphas times a (sectors, countries) multiplier matrix"""
        return self.with_alpha({sector: self.sectors[sector].alpha * multipliers[index]
                                for index, sector in enumerate(SECTORS)})

    def alpha_frame(self, isos) -> pd.DataFrame:
        rows = [{'iso': iso, 'sector': sector.value, 'alpha': float(self.sectors[sector].alpha[index])}
                for sector in SECTORS for index, iso in enumerate(isos)]
        return pd.DataFrame(rows, columns=['iso', 'sector', 'alpha'])


def uncalibrated_params(table: CountryTable, overrides: Mapping = None,
                        preindustrial_co2: float = 280.0) -> ImpactParams:
    """Sector parameters with exposures and elasticities set, alphas still missing

    Args:
        table (CountryTable): country table
        overrides (Mapping, optional): sector name -> setting overrides. Defaults to None.
        preindustrial_co2 (float, optional): C0 for the fertilisation term. Defaults to 280.0.

    Returns:
        ImpactParams: parameters awaiting calibration
    """
    overrides = overrides or {}
    unknown = [name for name in overrides if name not in {sector.value for sector in SECTORS}]
    if unknown:
        raise ConfigError(f'Unknown sector(s) in impact settings: {", ".join(unknown)}')
    sectors = {}
    for sector in SECTORS:
        settings = {**SECTOR_DEFAULTS[sector], **overrides.get(sector.value, {})}
        bad = [key for key in settings if key not in SECTOR_SETTINGS]
        if bad:
            raise ConfigError(f'Unknown setting(s) for sector {sector.value}: {", ".join(bad)}')
        sectors[sector] = SectorParams(
            sector=sector,
            income_elasticity=float(settings['income_elasticity']),
            exposure=_exposure(table, settings['exposure']),
            optimum_temperature=float(settings.get('optimum_temperature', 0.0)),
            fertilization=float(settings.get('fertilization', 0.0)),
        )
    return ImpactParams(sectors, table.column('base_gdp') / table.column('base_population'), preindustrial_co2)


def sector_driver(sector: Sector, params: SectorParams, t_national, climate: ClimateState) -> np.ndarray:
    """Climate driver g of a sector, zero without warming or sea-level rise"""
    t = np.asarray(t_national, dtype=float)
    if sector is Sector.AGRICULTURE:
        return t * (t - 2 * params.optimum_temperature)
    if sector is Sector.COOLING:
        return np.sign(t) * np.abs(t) ** 1.5
    if sector is Sector.HEATING:
        return -t
    if sector in (Sector.SLR_DRYLAND, Sector.SLR_WETLAND):
        return np.full_like(t, climate.sea_level)
    if sector in (Sector.SLR_PROTECTION, Sector.SLR_MIGRATION):
        return np.full_like(t, max(climate.sea_level_change, 0.0))
    return t


def sector_impact(sector, state: CountryState, climate: ClimateState, params: ImpactParams,
                  t_national) -> np.ndarray:
    """Impact of one sector for every country (US$, positive = damage)

    Args:
        sector (Sector|str): sector
        state (CountryState): economy of the year
        climate (ClimateState): climate of the year
        params (ImpactParams): calibrated parameters
        t_national (np.ndarray): national warming (C)

    Raises:
        ImpactError: unknown sector or uncalibrated parameters

    Returns:
        np.ndarray: impacts per country
    """
    sector = to_sector(sector)
    sector_params = params.sectors.get(sector)
    if sector_params is None or not sector_params.calibrated:
        raise ImpactError(f'Sector {sector.value} is not calibrated')
    income_factor = (state.per_capita_income / params.base_income) ** sector_params.income_elasticity
    scaled = sector_params.alpha * sector_driver(sector, sector_params, t_national, climate) * sector_params.exposure
    if sector in HEALTH_SECTORS:
        deaths = scaled * state.population * income_factor
        return VSL_INCOME_MULTIPLE * state.per_capita_income * deaths
    if sector is Sector.AGRICULTURE:
        fertilization = sector_params.fertilization * np.log(climate.co2_ppm / params.preindustrial_co2)
        return state.gross_output * (scaled - fertilization) * income_factor
    impact = state.gross_output * scaled * income_factor
    if sector in NON_NEGATIVE_SECTORS:
        return np.maximum(impact, 0.0)
    return impact


@dataclass(frozen=True)
class ImpactBreakdown:
    year: int
    sectors: np.ndarray
    gross_output: np.ndarray

    @property
    def market(self) -> np.ndarray:
        return self.sectors[MARKET_MASK].sum(axis=0)

    @property
    def nonmarket_value(self) -> np.ndarray:
        return self.sectors[~MARKET_MASK].sum(axis=0)

    @property
    def total(self) -> np.ndarray:
        return self.sectors.sum(axis=0)

    @property
    def market_fraction_of_gdp(self) -> np.ndarray:
        return self.market / self.gross_output

    def sector(self, sector) -> np.ndarray:
        return self.sectors[SECTORS.index(to_sector(sector))]

    def scaled(self, factor) -> 'ImpactBreakdown':
        return replace(self, sectors=self.sectors * factor)


def evaluate_impacts(state: CountryState, climate: ClimateState, params: ImpactParams,
                     t_national) -> ImpactBreakdown:
    sectors = np.vstack([sector_impact(sector, state, climate, params, t_national) for sector in SECTORS])
    return ImpactBreakdown(state.year, sectors, state.gross_output)


def base_year_state(table: CountryTable) -> CountryState:
    """Economy at the table's base values, used to evaluate benchmark impacts"""
    population = table.column('base_population')
    gdp = table.column('base_gdp')
    zeros = np.zeros(len(table))
    return CountryState(0, population, zeros + 1.0, zeros, gdp, gdp, zeros, gdp, gdp / population)


def load_benchmarks(path) -> dict:
    """Regional benchmark impacts at 2.5 C: (region, sector) -> US$

    Args:
        path (str|Path): benchmarks.csv path

    Raises:
        ConfigError: missing file or column, unknown sector, unparseable value, duplicates

    Returns:
        dict: benchmarks
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f'Benchmark file not found: {path}')
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [column for column in ('region', 'sector', 'impact_usd_at_2p5C') if column not in frame.columns]
    if missing:
        raise ConfigError(f'{path.name}: missing required column(s) {", ".join(missing)}')
    benchmarks = {}
    for row_number, row in enumerate(frame.to_dict('records'), start=2):
        try:
            sector = Sector(row['sector'].strip())
        except ValueError:
            raise ConfigError(f'{path.name} row {row_number}, column sector: unknown sector {row["sector"]!r}') \
                from None
        try:
            value = float(row['impact_usd_at_2p5C'])
        except ValueError:
            raise ConfigError(f'{path.name} row {row_number}, column impact_usd_at_2p5C: cannot parse '
                              f'{row["impact_usd_at_2p5C"]!r}') from None
        key = (row['region'].strip(), sector)
        if key in benchmarks:
            raise ConfigError(f'{path.name} row {row_number}: duplicate benchmark for {key[0]}/{sector.value}')
        benchmarks[key] = value
    return benchmarks


def collapse_benchmarks(benchmarks: Mapping, regions, region: str) -> dict:
    """Sum the benchmarks of several regions into one region"""
    return {(region, sector): sum(benchmarks.get((member, sector), 0.0) for member in regions) for sector in SECTORS}


@dataclass(frozen=True)
class CalibrationResult:
    params: ImpactParams
    scales: pd.DataFrame

    @property
    def max_residual(self) -> float:
        return float(self.scales['relative_residual'].abs().max())


def calibrate_national_params(benchmarks: Mapping, table: CountryTable, params: ImpactParams,
                              carbon: CarbonCycleParams, climate: ClimateParams,
                              warming: float = BENCHMARK_WARMING, logger: Logger = None) -> CalibrationResult:
    """Impute provisional national alphas from the income elasticity, (y_n / y_region) ** elasticity, and rescale
    each region and sector by one factor so national impacts at the benchmark warming add up to the benchmark

    Args:
        benchmarks (Mapping): (region, sector) -> regional impact (US$) at the benchmark warming
        table (CountryTable): country table
        params (ImpactParams): uncalibrated parameters
        carbon (CarbonCycleParams): carbon cycle parameters (benchmark CO2)
        climate (ClimateParams): climate parameters (benchmark CO2 and sea level)
        warming (float, optional): benchmark global warming. Defaults to 2.5.
        logger (Logger, optional): logger. Defaults to None.

    Raises:
        CalibrationError: missing benchmarks, zero provisional impact with a nonzero target, or a negative scale for
            a cost-only sector; all failing (region, sector) pairs are listed

    Returns:
        CalibrationResult: calibrated parameters and per-region scale report
    """
    log = logger or get_logger('natscc')
    state = base_year_state(table)
    bench_climate = benchmark_climate(warming, carbon, climate)
    t_national = national_temperature(warming, table.column('temperature_pattern'))
    gdp = table.column('base_gdp')
    population = table.column('base_population')
    region_of = np.array([record.region_id for record in table])
    failures = []
    rows = []
    alphas = {}
    for sector in SECTORS:
        provisional = np.ones(len(table))
        for region in table.regions:
            members = region_of == region
            region_income = gdp[members].sum() / population[members].sum()
            provisional[members] = (gdp[members] / population[members] / region_income) \
                ** params.sectors[sector].income_elasticity
        with_alpha = params.with_alpha({sector: provisional})
        without_alpha = params.with_alpha({sector: np.zeros(len(table))})
        fixed = sector_impact(sector, state, bench_climate, without_alpha, t_national)
        scalable = sector_impact(sector, state, bench_climate, with_alpha, t_national) - fixed
        alpha = np.zeros(len(table))
        for region in table.regions:
            members = region_of == region
            if (region, sector) not in benchmarks:
                failures.append((region, sector.value))
                log.error('No benchmark for %s/%s', region, sector.value)
                continue
            benchmark = benchmarks[(region, sector)]
            target = benchmark - fixed[members].sum()
            denominator = scalable[members].sum()
            if denominator == 0:
                if target != 0:
                    failures.append((region, sector.value))
                    log.error('Zero provisional impact for %s/%s with benchmark %s', region, sector.value, benchmark)
                    continue
                scale = 1.0
            else:
                scale = target / denominator
            if scale < 0 and sector in NON_NEGATIVE_SECTORS:
                failures.append((region, sector.value))
                log.error('Negative scale for cost-only sector %s/%s', region, sector.value)
                continue
            log.debug('Calibration scale %s/%s: %s', region, sector.value, scale)
            alpha[members] = provisional[members] * scale
            rows.append({'region': region, 'sector': sector.value, 'scale': scale, 'benchmark': benchmark})
        alphas[sector] = alpha
    if failures:
        pairs = ', '.join(f'{region}/{sector}' for region, sector in failures)
        raise CalibrationError(f'Calibration failed for {pairs}', failures)
    calibrated = params.with_alpha(alphas)
    breakdown = evaluate_impacts(state, bench_climate, calibrated, t_national)
    for row in rows:
        members = region_of == row['region']
        total = float(breakdown.sector(row['sector'])[members].sum())
        row['calibrated_sum'] = total
        row['relative_residual'] = (total - row['benchmark']) / max(abs(row['benchmark']), 1.0)
    scales = pd.DataFrame(rows, columns=['region', 'sector', 'scale', 'benchmark', 'calibrated_sum',
                                         'relative_residual'])
    return CalibrationResult(calibrated, scales)


def write_calibration(result: CalibrationResult, isos, directory) -> tuple:
    """Write calibration.csv (iso, sector, alpha) and calibration_scales.csv

    Args:
        result (CalibrationResult): calibration to write
        isos (Sequence): country order of the alphas
        directory (str|Path): output directory

    Returns:
        tuple: paths written
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    alpha_path = directory / 'calibration.csv'
    scales_path = directory / 'calibration_scales.csv'
    result.params.alpha_frame(isos).to_csv(alpha_path, index=False, float_format='%.17g')
    result.scales.to_csv(scales_path, index=False, float_format='%.17g')
    return alpha_path, scales_path


def load_calibration(path, table: CountryTable, params: ImpactParams) -> ImpactParams:
    """Read calibration.csv back into the parameters of a table

    Args:
        path (str|Path): calibration.csv
        table (CountryTable): country table
        params (ImpactParams): uncalibrated parameters

    Raises:
        ConfigError: missing file or an (iso, sector) pair without an alpha

    Returns:
        ImpactParams: calibrated parameters
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f'Calibration file not found: {path}')
    frame = pd.read_csv(path, dtype={'iso': str, 'sector': str})
    lookup = {(row.iso, row.sector): float(row.alpha) for row in frame.itertuples(index=False)}
    alphas = {}
    for sector in SECTORS:
        missing = [iso for iso in table.isos if (iso, sector.value) not in lookup]
        if missing:
            raise ConfigError(f'{path.name}: no {sector.value} alpha for {", ".join(missing)}')
        alphas[sector] = np.array([lookup[(iso, sector.value)] for iso in table.isos])
    return params.with_alpha(alphas)


def regional_impacts(table: CountryTable, benchmarks: Mapping, carbon: CarbonCycleParams, climate: ClimateParams,
                     t_global: float, overrides: Mapping = None) -> pd.DataFrame:
    """Compare the sum of calibrated national impacts with the region evaluated as a single country. Both agree
    at the benchmark warming by construction and differ elsewhere when a sector is nonlinear.

    Args:
        table (CountryTable): country table
        benchmarks (Mapping): regional benchmarks
        carbon (CarbonCycleParams): carbon cycle parameters
        climate (ClimateParams): climate parameters
        t_global (float): global warming to evaluate
        overrides (Mapping, optional): sector setting overrides. Defaults to None.

    Returns:
        pd.DataFrame: region, sector, national_sum, regional
    """
    national = calibrate_national_params(benchmarks, table, uncalibrated_params(table, overrides), carbon, climate)
    warmed = benchmark_climate(t_global, carbon, climate)
    breakdown = evaluate_impacts(base_year_state(table), warmed, national.params,
                                 national_temperature(t_global, table.column('temperature_pattern')))
    region_of = np.array([record.region_id for record in table])
    rows = []
    for region in table.regions:
        members = CountryTable([record for record in table if record.region_id == region])
        single = collapse_table(members, iso='REG', region=region, name=region)
        regional = calibrate_national_params(benchmarks, single, uncalibrated_params(single, overrides), carbon,
                                             climate)
        regional_breakdown = evaluate_impacts(base_year_state(single), warmed, regional.params,
                                              national_temperature(t_global, single.column('temperature_pattern')))
        for index, sector in enumerate(SECTORS):
            rows.append({'region': region, 'sector': sector.value,
                         'national_sum': float(breakdown.sectors[index][region_of == region].sum()),
                         'regional': float(regional_breakdown.sectors[index][0])})
    return pd.DataFrame(rows, columns=['region', 'sector', 'national_sum', 'regional'])
