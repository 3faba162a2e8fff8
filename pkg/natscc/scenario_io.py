"""Country master table, scenario trajectories and their extrapolation.

CSV with a fixed header is the only ingestion format:

- ``countries.csv``: ``iso,name,region,pop,gdp,temp,coast_km,wetland_km2,dryland_km2,urban_share,temp_pattern``
- ``scenario_<var>.csv``: ``iso,year,value`` long format (``value_pct`` is divided by 100). Global series use iso
  ``WLD``.
- ``intensities.csv``: ``iso,co2,ch4,n2o,sf6,so2`` base-year emissions per US$ of output.
"""
from dataclasses import dataclass, field
from logging import Logger
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np
import pandas as pd

from natscc.errors import ConfigError
from natscc.logger import get_logger


WORLD_ISO = 'WLD'
CONSTANT_RATE = 'constant-rate'
CONSTANT_LEVEL = 'constant-level'
RATE_WINDOW = 10
COVERAGE_THRESHOLD = 0.99

# csv column -> CountryRecord field
COUNTRY_COLUMNS = {
    'iso': 'iso_code',
    'name': 'name',
    'region': 'region_id',
    'pop': 'base_population',
    'gdp': 'base_gdp',
    'temp': 'base_temperature',
    'coast_km': 'coast_length',
    'wetland_km2': 'wetland_area',
    'dryland_km2': 'dryland_area',
    'urban_share': 'urban_share',
    'temp_pattern': 'temperature_pattern',
}
OPTIONAL_COLUMNS = ('coast_km', 'wetland_km2')
NUMERIC_COLUMNS = ('pop', 'gdp', 'temp', 'coast_km', 'wetland_km2', 'dryland_km2', 'urban_share', 'temp_pattern')

COUNTRY_VARIABLES = (
    'population',
    'tfp_growth',
    'savings_rate',
    'co2_intensity_rate',
    'ch4_intensity_rate',
    'n2o_intensity_rate',
    'sf6_intensity_rate',
    'so2_intensity_rate',
)
GLOBAL_VARIABLES = ('cfc11', 'cfc12')
FRACTION_VARIABLES = ('savings_rate',)
DEFAULT_EXTRAPOLATION = {
    'population': CONSTANT_RATE,
    'tfp_growth': CONSTANT_RATE,
    'savings_rate': CONSTANT_LEVEL,
    'co2_intensity_rate': CONSTANT_RATE,
    'ch4_intensity_rate': CONSTANT_RATE,
    'n2o_intensity_rate': CONSTANT_RATE,
    'sf6_intensity_rate': CONSTANT_RATE,
    'so2_intensity_rate': CONSTANT_RATE,
    'cfc11': CONSTANT_LEVEL,
    'cfc12': CONSTANT_LEVEL,
}
INTENSITY_GASES = ('co2', 'ch4', 'n2o', 'sf6', 'so2')


@dataclass(frozen=True)
class CountryRecord:
    iso_code: str
    name: str
    region_id: str
    base_population: float
    base_gdp: float
    base_temperature: float
    coast_length: float = 0.0
    wetland_area: float = 0.0
    dryland_area: float = 0.0
    urban_share: float = 0.0
    temperature_pattern: float = 1.0

    def __post_init__(self):
        if len(self.iso_code) != 3:
            raise ConfigError(f'{self.iso_code!r}: iso code must have 3 characters')
        if self.base_population < 1 or self.base_gdp <= 0:
            raise ConfigError(f'{self.iso_code}: population and GDP must be positive')
        if min(self.coast_length, self.wetland_area, self.dryland_area) < 0:
            raise ConfigError(f'{self.iso_code}: coast, wetland and dryland must be non-negative')
        if not 0 <= self.urban_share <= 1:
            raise ConfigError(f'{self.iso_code}: urban share must be within [0, 1]')
        if self.temperature_pattern <= 0:
            raise ConfigError(f'{self.iso_code}: temperature pattern must be positive')

    @property
    def base_income(self) -> float:
        return self.base_gdp / self.base_population


class CountryTable:
    """Country records keyed by iso code. Iteration follows the row order of the source file"""

    def __init__(self, records: Iterable[CountryRecord]):
        self._records = {}
        for record in records:
            if record.iso_code in self._records:
                raise ConfigError(f'Duplicate iso code {record.iso_code}')
            self._records[record.iso_code] = record

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[CountryRecord]:
        return iter(self._records.values())

    def __getitem__(self, iso: str) -> CountryRecord:
        return self._records[iso]

    def __contains__(self, iso: str) -> bool:
        return iso in self._records

    def __eq__(self, other) -> bool:
        return isinstance(other, CountryTable) and list(self) == list(other)

    @property
    def isos(self) -> tuple:
        return tuple(self._records)

    @property
    def regions(self) -> tuple:
        return tuple(dict.fromkeys(record.region_id for record in self))

    def members(self, region: str) -> tuple:
        return tuple(record.iso_code for record in self if record.region_id == region)

    def column(self, name: str) -> np.ndarray:
        """Record attribute for every country as a float array in table order

        Args:
            name (str): CountryRecord attribute name

        Returns:
            np.ndarray: attribute values
        """
        return np.array([getattr(record, name) for record in self], dtype=float)

    def to_frame(self) -> pd.DataFrame:
        rows = [{column: getattr(record, attr) for column, attr in COUNTRY_COLUMNS.items()} for record in self]
        return pd.DataFrame(rows, columns=list(COUNTRY_COLUMNS))


def _parse_number(raw: str, source: str, row: int, column: str) -> float:
    raw = str(raw).strip()
    if not raw and column in OPTIONAL_COLUMNS:
        return 0.0
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f'{source} row {row}, column {column}: cannot parse {raw!r} as a number') from None
    if not np.isfinite(value):
        raise ConfigError(f'{source} row {row}, column {column}: value must be finite')
    return value


def load_country_table(path) -> CountryTable:
    """Load the country master table

    Args:
        path (str|Path): countries.csv path

    Raises:
        ConfigError: missing file or column, duplicate iso code, invalid value (names row and column)

    Returns:
        CountryTable: records keyed by iso code in file order
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f'Country table not found: {path}')
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [column for column in COUNTRY_COLUMNS if column not in frame.columns and column not in OPTIONAL_COLUMNS]
    if missing:
        raise ConfigError(f'{path.name}: missing required column(s) {", ".join(missing)}')
    records = []
    seen = set()
    # row numbers count the header as line 1
    for row_number, row in enumerate(frame.to_dict('records'), start=2):
        iso = row['iso'].strip()
        if iso in seen:
            raise ConfigError(f'{path.name} row {row_number}, column iso: duplicate iso code {iso}')
        seen.add(iso)
        values = {column: _parse_number(row.get(column, ''), path.name, row_number, column)
                  for column in NUMERIC_COLUMNS}
        for column in ('pop', 'gdp'):
            if values[column] <= 0:
                raise ConfigError(f'{path.name} row {row_number}, column {column}: must be positive')
        if values['pop'] < 1:
            raise ConfigError(f'{path.name} row {row_number}, column pop: must be at least one person')
        if values['temp_pattern'] <= 0:
            raise ConfigError(f'{path.name} row {row_number}, column temp_pattern: must be positive')
        for column in ('coast_km', 'wetland_km2', 'dryland_km2'):
            if values[column] < 0:
                raise ConfigError(f'{path.name} row {row_number}, column {column}: must be non-negative')
        if not 0 <= values['urban_share'] <= 1:
            raise ConfigError(f'{path.name} row {row_number}, column urban_share: must be within [0, 1]')
        fields = {COUNTRY_COLUMNS[column]: value for column, value in values.items()}
        records.append(CountryRecord(iso_code=iso, name=row['name'].strip(), region_id=row['region'].strip(),
                                     **fields))
    return CountryTable(records)


def write_country_table(table: CountryTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_frame().to_csv(path, index=False, float_format='%.17g')
    return path


def collapse_table(table: CountryTable, iso: str = WORLD_ISO, region: str = WORLD_ISO,
                   name: str = 'World') -> CountryTable:
    """Collapse every record into one aggregate record. Extensive quantities are summed, base temperature and the
    temperature pattern are GDP weighted and the urban share is population weighted.

    Args:
        table (CountryTable): table to collapse
        iso (str, optional): iso code of the aggregate. Defaults to 'WLD'.
        region (str, optional): region of the aggregate. Defaults to 'WLD'.
        name (str, optional): name of the aggregate. Defaults to 'World'.

    Returns:
        CountryTable: one-record table
    """
    gdp = table.column('base_gdp')
    population = table.column('base_population')
    if len(table) == 1:
        only = next(iter(table))
        return CountryTable([CountryRecord(iso, name, region, only.base_population, only.base_gdp,
                                           only.base_temperature, only.coast_length, only.wetland_area,
                                           only.dryland_area, only.urban_share, only.temperature_pattern)])
    return CountryTable([CountryRecord(
        iso_code=iso,
        name=name,
        region_id=region,
        base_population=float(population.sum()),
        base_gdp=float(gdp.sum()),
        base_temperature=float(np.average(table.column('base_temperature'), weights=gdp)),
        coast_length=float(table.column('coast_length').sum()),
        wetland_area=float(table.column('wetland_area').sum()),
        dryland_area=float(table.column('dryland_area').sum()),
        urban_share=float(np.average(table.column('urban_share'), weights=population)),
        temperature_pattern=float(np.average(table.column('temperature_pattern'), weights=gdp)),
    )])


@dataclass(frozen=True)
class TimeSeries:
    start_year: int
    values: tuple

    def __post_init__(self):
        if len(self.values) == 0:
            raise ConfigError('Time series must not be empty')
        object.__setattr__(self, 'start_year', int(self.start_year))
        object.__setattr__(self, 'values', tuple(float(value) for value in self.values))

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> range:
        return range(self.start_year, self.end_year + 1)

    def value(self, year: int) -> float:
        if not self.start_year <= year <= self.end_year:
            raise ConfigError(f'Year {year} outside series {self.start_year}-{self.end_year}')
        return self.values[year - self.start_year]

    def window(self, first_year: int, last_year: int) -> np.ndarray:
        if first_year < self.start_year or last_year > self.end_year:
            raise ConfigError(f'Years {first_year}-{last_year} not covered by series '
                              f'{self.start_year}-{self.end_year}')
        return np.array(self.values[first_year - self.start_year:last_year - self.start_year + 1])


def _mean_growth_factor(values: tuple) -> float:
    window = np.array(values[-RATE_WINDOW:])
    if len(window) < 2 or np.any(window == 0):
        return None
    ratios = window[1:] / window[:-1]
    if np.any(ratios <= 0):
        return None
    return float(ratios.mean())


def extrapolate_series(series: TimeSeries, target_year: int, mode: str = CONSTANT_RATE,
                       logger: Logger = None) -> TimeSeries:
    """Extend a series to target_year. constant-rate continues the mean growth factor of the final 10 observations,
    constant-level repeats the final value. Series already reaching target_year are returned unchanged.

    Args:
        series (TimeSeries): series to extend
        target_year (int): last year of the returned series
        mode (str, optional): 'constant-rate' or 'constant-level'. Defaults to 'constant-rate'.
        logger (Logger, optional): logger. Defaults to None.

    Raises:
        ConfigError: target_year before the series start or unknown mode

    Returns:
        TimeSeries: extended series
    """
    if mode not in (CONSTANT_RATE, CONSTANT_LEVEL):
        raise ConfigError(f'Unknown extrapolation mode: {mode}')
    if target_year < series.start_year:
        raise ConfigError(f'Target year {target_year} is before series start {series.start_year}')
    extra = target_year - series.end_year
    if extra <= 0:
        return series
    last = series.values[-1]
    factor = _mean_growth_factor(series.values) if mode == CONSTANT_RATE else None
    if factor is None:
        if mode == CONSTANT_RATE:
            (logger or get_logger('natscc')).debug('Growth rate undefined for series ending %s, repeating last value',
                                                    series.end_year)
        tail = [last] * extra
    else:
        tail = [last * factor ** step for step in range(1, extra + 1)]
    return TimeSeries(series.start_year, series.values + tuple(tail))


def _clip_fraction(series: TimeSeries, label: str, logger: Logger) -> TimeSeries:
    values = np.array(series.values)
    clipped = np.clip(values, 0.0, 1.0)
    if np.any(clipped != values):
        logger.warning('Clipped %s to [0, 1] after extrapolation', label)
        return TimeSeries(series.start_year, tuple(clipped))
    return series


@dataclass(frozen=True)
class ScenarioSet:
    """Exogenous trajectories: per-country series (variable -> iso -> TimeSeries) and global series"""
    series: Mapping
    global_series: Mapping
    needs_extrapolation: bool = False
    isos: tuple = field(default=())

    def extrapolated(self, target_year: int, modes: Mapping = None, logger: Logger = None) -> 'ScenarioSet':
        """Extend every series to target_year, default mode per variable overridable by modes. Fractional series are
        clipped to [0, 1] afterwards.

        Args:
            target_year (int): last year required
            modes (Mapping, optional): variable -> extrapolation mode overrides. Defaults to None.
            logger (Logger, optional): logger. Defaults to None.

        Returns:
            ScenarioSet: extended scenario
        """
        modes = {**DEFAULT_EXTRAPOLATION, **(modes or {})}
        log = logger or get_logger('natscc')
        series = {}
        for variable, by_country in self.series.items():
            series[variable] = {}
            for iso, values in by_country.items():
                extended = extrapolate_series(values, target_year, modes.get(variable, CONSTANT_RATE), log)
                if variable in FRACTION_VARIABLES:
                    extended = _clip_fraction(extended, f'{variable} for {iso}', log)
                series[variable][iso] = extended
        global_series = {variable: extrapolate_series(values, target_year, modes.get(variable, CONSTANT_RATE), log)
                         for variable, values in self.global_series.items()}
        return ScenarioSet(series, global_series, False, self.isos)

    def matrix(self, variable: str, isos: Iterable, first_year: int, last_year: int) -> np.ndarray:
        """Values as a (years, countries) array

        Args:
            variable (str): country variable name
            isos (Iterable): country order
            first_year (int): first year
            last_year (int): last year

        Returns:
            np.ndarray: values
        """
        return np.column_stack([self.series[variable][iso].window(first_year, last_year) for iso in isos])

    def global_values(self, variable: str, first_year: int, last_year: int) -> np.ndarray:
        return self.global_series[variable].window(first_year, last_year)


def _build_series(years: np.ndarray, values: np.ndarray, label: str, interpolate: bool) -> TimeSeries:
    """Build an annual series from (year, value) rows. Regular multi-year steps are linearly interpolated when
    interpolate is set, irregular gaps are rejected.
    """
    keep = ~np.isnan(values)
    years, values = years[keep], values[keep]
    if len(years) == 0:
        raise ConfigError(f'{label}: empty series')
    order = np.argsort(years, kind='stable')
    years, values = years[order], values[order]
    if len(np.unique(years)) != len(years):
        raise ConfigError(f'{label}: duplicate years')
    steps = np.diff(years)
    if len(steps) == 0 or np.all(steps == 1):
        return TimeSeries(int(years[0]), tuple(values))
    if interpolate and np.all(steps == steps[0]):
        annual = np.arange(years[0], years[-1] + 1)
        return TimeSeries(int(years[0]), tuple(np.interp(annual, years, values)))
    gap = int(years[np.argmax(steps != 1)])
    raise ConfigError(f'{label}: gap in series after year {gap}')


def _read_long_csv(path: Path) -> pd.DataFrame:
    if not path.is_file():
        raise ConfigError(f'Scenario file not found: {path}')
    frame = pd.read_csv(path, dtype={'iso': str})
    scale = 1.0
    if 'value' not in frame.columns and 'value_pct' in frame.columns:
        frame = frame.rename(columns={'value_pct': 'value'})
        scale = 0.01
    missing = [column for column in ('iso', 'year', 'value') if column not in frame.columns]
    if missing:
        raise ConfigError(f'{path.name}: missing required column(s) {", ".join(missing)}')
    for column in ('year', 'value'):
        converted = pd.to_numeric(frame[column], errors='coerce')
        bad = converted.isna() & frame[column].notna()
        if bad.any():
            row = int(bad.to_numpy().nonzero()[0][0]) + 2
            raise ConfigError(f'{path.name} row {row}, column {column}: cannot parse {frame[column][bad].iloc[0]!r}')
        frame[column] = converted
    frame['value'] = frame['value'] * scale
    return frame


def load_scenario(path, table: CountryTable, start_year: int = 2019, horizon: int = 2200,
                  interpolate: bool = True, logger: Logger = None) -> ScenarioSet:
    """Load every scenario_<var>.csv of a directory

    Args:
        path (str|Path): scenario directory
        table (CountryTable): loaded country table
        start_year (int, optional): projection start year every series must cover. Defaults to 2019.
        horizon (int, optional): run horizon used to flag extrapolation needs. Defaults to 2200.
        interpolate (bool, optional): interpolate regular multi-year steps. Defaults to True.
        logger (Logger, optional): logger. Defaults to None.

    Raises:
        ConfigError: missing file or country, gaps, series not covering start_year, invalid savings rate

    Returns:
        ScenarioSet: loaded scenario
    """
    log = logger or get_logger('natscc')
    path = Path(path)
    series = {}
    needs_extrapolation = False
    for variable in COUNTRY_VARIABLES:
        frame = _read_long_csv(path / f'scenario_{variable}.csv')
        groups = {str(iso).strip(): group for iso, group in frame.groupby('iso', sort=False)}
        extra = sorted(set(groups) - set(table.isos))
        if extra:
            log.debug('Ignoring countries not in the table for %s: %s', variable, ', '.join(extra))
        series[variable] = {}
        for iso in table.isos:
            if iso not in groups:
                raise ConfigError(f'Country {iso} missing from scenario_{variable}.csv')
            group = groups[iso]
            built = _build_series(group['year'].to_numpy(dtype=float), group['value'].to_numpy(dtype=float),
                                  f'scenario_{variable}.csv {iso}', interpolate)
            if built.start_year > start_year or built.end_year < start_year:
                raise ConfigError(f'scenario_{variable}.csv {iso}: series does not cover {start_year}')
            if variable in FRACTION_VARIABLES and any(not 0 < value < 1 for value in built.values):
                raise ConfigError(f'scenario_{variable}.csv {iso}: values must lie in (0, 1)')
            needs_extrapolation = needs_extrapolation or built.end_year < horizon
            series[variable][iso] = built
    global_series = {}
    for variable in GLOBAL_VARIABLES:
        frame = _read_long_csv(path / f'scenario_{variable}.csv')
        rows = frame[frame['iso'].astype(str).str.strip() == WORLD_ISO]
        if rows.empty:
            raise ConfigError(f'scenario_{variable}.csv: no {WORLD_ISO} rows')
        built = _build_series(rows['year'].to_numpy(dtype=float), rows['value'].to_numpy(dtype=float),
                              f'scenario_{variable}.csv', interpolate)
        if built.start_year > start_year or built.end_year < start_year:
            raise ConfigError(f'scenario_{variable}.csv: series does not cover {start_year}')
        needs_extrapolation = needs_extrapolation or built.end_year < horizon
        global_series[variable] = built
    if needs_extrapolation:
        log.info('Scenario ends before %s and will be extrapolated', horizon)
    return ScenarioSet(series, global_series, needs_extrapolation, table.isos)


def load_intensities(path, table: CountryTable) -> dict:
    """Load base-year emission intensities (emissions per US$ of gross output)

    Args:
        path (str|Path): intensities.csv path
        table (CountryTable): loaded country table

    Raises:
        ConfigError: missing file, column or country, negative or unparseable value

    Returns:
        dict: gas -> array of intensities in table order
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f'Intensity table not found: {path}')
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [column for column in ('iso',) + INTENSITY_GASES if column not in frame.columns]
    if missing:
        raise ConfigError(f'{path.name}: missing required column(s) {", ".join(missing)}')
    rows = {}
    for row_number, row in enumerate(frame.to_dict('records'), start=2):
        values = {}
        for gas in INTENSITY_GASES:
            value = _parse_number(row[gas], path.name, row_number, gas)
            if value < 0:
                raise ConfigError(f'{path.name} row {row_number}, column {gas}: intensity must be non-negative')
            values[gas] = value
        rows[row['iso'].strip()] = values
    absent = [iso for iso in table.isos if iso not in rows]
    if absent:
        raise ConfigError(f'{path.name}: missing countries {", ".join(absent)}')
    return {gas: np.array([rows[iso][gas] for iso in table.isos]) for gas in INTENSITY_GASES}


@dataclass(frozen=True)
class CoverageWarning:
    variable: str
    covered: float
    reference: float

    @property
    def share(self) -> float:
        return self.covered / self.reference


@dataclass
class ValidationReport:
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.warnings


def validate_world_totals(table: CountryTable, global_reference: Mapping,
                          base_emissions: Mapping = None, logger: Logger = None) -> ValidationReport:
    """Warn when the countries cover less than 99% of a referenced global total. Never fails.

    Args:
        table (CountryTable): country table
        global_reference (Mapping): variable -> global total ('pop', 'gdp' or a gas name)
        base_emissions (Mapping, optional): gas -> per-country base emissions. Defaults to None.
        logger (Logger, optional): logger. Defaults to None.

    Returns:
        ValidationReport: coverage warnings
    """
    totals = {'pop': float(table.column('base_population').sum()), 'gdp': float(table.column('base_gdp').sum())}
    for gas, values in (base_emissions or {}).items():
        totals[gas] = float(np.sum(values))
    log = logger or get_logger('natscc')
    report = ValidationReport()
    for variable, reference in (global_reference or {}).items():
        if variable not in totals:
            log.debug('No country totals for reference variable %s', variable)
            continue
        if reference > 0 and totals[variable] < COVERAGE_THRESHOLD * reference:
            warning = CoverageWarning(variable, totals[variable], float(reference))
            log.warning('Countries cover %.1f%% of the global %s total', 100 * warning.share, variable)
            report.warnings.append(warning)
    return report
