"""JSON run configuration parsed into frozen dataclasses.

Every section is optional and falls back to the model defaults. Relative paths resolve against the directory of
the config file, the bundled toy world is used when no config is given.
"""
import json
from dataclasses import asdict, dataclass, field, fields, replace
from hashlib import sha256
from math import isfinite
from pathlib import Path
from typing import Mapping

import numpy as np

from natscc.climate import CarbonCycleParams, ClimateParams, ClimateState, GasParams
from natscc.damage_functions import BMA_FORMS, FORMS, DamageFunctionSpec, bma_damage, aggregate_damage_function, \
    default_spec
from natscc.economy import EconomyParams
from natscc.emissions import PulseSpec
from natscc.errors import ConfigError


DATA_DIR = Path(__file__).parent / 'data'
DEFAULT_CONFIG = DATA_DIR / 'config.json'
START_YEAR = 2019
HORIZON = 2200
SECTORAL = 'sectoral'
BMA = 'bma'
DAMAGE_MODES = (SECTORAL, BMA) + FORMS
DISCOUNTING_MODES = ('national', 'global')
RUN_MODES = ('uncertainty', 'deterministic')


def _from_mapping(cls, values: Mapping, section: str):
    """Build a dataclass from a mapping, rejecting keys it does not declare"""
    if values is None:
        return cls()
    if not isinstance(values, Mapping):
        raise ConfigError(f'Config section {section} must be an object')
    allowed = {item.name for item in fields(cls)}
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise ConfigError(f'Unknown key(s) in config section {section}: {", ".join(unknown)}')
    try:
        return cls(**values)
    except TypeError as error:
        raise ConfigError(f'Config section {section}: {error}') from error


@dataclass(frozen=True)
class PreferenceParams:
    prtp: float
    rra: float

    def __post_init__(self):
        object.__setattr__(self, 'prtp', float(self.prtp))
        object.__setattr__(self, 'rra', float(self.rra))
        if not (isfinite(self.prtp) and isfinite(self.rra)) or self.prtp < 0 or self.rra < 0:
            raise ConfigError(f'Preferences must be finite and non-negative, got prtp={self.prtp} rra={self.rra}')

    @property
    def label(self) -> str:
        return f'prtp{self.prtp:g}_rra{self.rra:g}'


DEFAULT_PREFERENCES = (PreferenceParams(0.01, 1.0), PreferenceParams(0.03, 1.0), PreferenceParams(0.03, 2.0))


@dataclass(frozen=True)
class PathsConfig:
    countries: Path = DATA_DIR / 'countries.csv'
    scenarios: Path = DATA_DIR / 'scenarios'
    intensities: Path = DATA_DIR / 'intensities.csv'
    benchmarks: Path = DATA_DIR / 'benchmarks.csv'
    calibration: Path = None
    output: Path = Path('natscc_output')

    def resolved(self, base: Path) -> 'PathsConfig':
        values = {}
        for item in fields(self):
            value = getattr(self, item.name)
            if value is None:
                values[item.name] = None
                continue
            value = Path(value).expanduser()
            # output stays relative to the working directory
            values[item.name] = value if value.is_absolute() or item.name == 'output' else base / value
        return PathsConfig(**values)

    def inputs(self) -> list:
        """Existing input files whose bytes enter the config hash"""
        files = [self.countries, self.intensities, self.benchmarks]
        if self.calibration is not None:
            files.append(self.calibration)
        if self.scenarios is not None and Path(self.scenarios).is_dir():
            files.extend(sorted(Path(self.scenarios).glob('scenario_*.csv')))
        return [Path(path) for path in files if path is not None and Path(path).is_file()]


@dataclass(frozen=True)
class EconomyConfig:
    capital_share: float = 0.3
    depreciation: float = 0.1
    initial_capital_to_output: float = 3.0
    start_year: int = START_YEAR
    horizon: int = HORIZON
    extrapolation: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon <= self.start_year:
            raise ConfigError('horizon must be after start_year')
        self.params()

    def params(self) -> EconomyParams:
        return EconomyParams(self.capital_share, self.depreciation, self.initial_capital_to_output)


@dataclass(frozen=True)
class ClimateConfig:
    ecs: float = 3.0
    response_time: float = 40.0
    f2x: float = 3.71
    carbon_shares: tuple = (0.13, 0.20, 0.32, 0.25, 0.10)
    # null / "inf" for the permanent box
    carbon_lifetimes: tuple = (None, 363.0, 74.0, 17.0, 2.0)
    preindustrial_co2: float = 280.0
    ppm_per_gtc: float = 0.47
    gases: Mapping = field(default_factory=dict)
    ch4_forcing: float = 0.036
    n2o_forcing: float = 0.12
    sf6_efficiency: float = 0.00052
    cfc11_efficiency: float = 0.00025
    cfc12_efficiency: float = 0.00032
    so2_forcing: float = 0.01
    slr_equilibrium_per_degree: float = 0.5
    slr_response_time: float = 500.0
    initial_box_masses: tuple = (150.0, 70.0, 45.0, 10.0, 1.6)
    initial_ch4: float = 1860.0
    initial_n2o: float = 332.0
    initial_sf6: float = 10.0
    initial_temperature: float = 1.1
    initial_sea_level: float = 0.0

    def __post_init__(self):
        if len(self.initial_box_masses) != len(self.carbon_shares):
            raise ConfigError('initial_box_masses needs one value per carbon box')
        self.climate_params()

    def carbon_params(self) -> CarbonCycleParams:
        lifetimes = tuple(float('inf') if value is None else float(value) for value in self.carbon_lifetimes)
        return CarbonCycleParams(tuple(self.carbon_shares), lifetimes, self.preindustrial_co2, self.ppm_per_gtc)

    def climate_params(self, ecs: float = None) -> ClimateParams:
        defaults = ClimateParams().gases
        unknown = sorted(set(self.gases) - set(defaults))
        if unknown:
            raise ConfigError(f'Unknown gas(es) in climate.gases: {", ".join(unknown)}')
        gases = {gas: GasParams(**{**asdict(params), **self.gases.get(gas, {})}) for gas, params in defaults.items()}
        return ClimateParams(
            ecs=self.ecs if ecs is None else ecs,
            response_time=self.response_time,
            f2x=self.f2x,
            gases=gases,
            ch4_forcing=self.ch4_forcing,
            n2o_forcing=self.n2o_forcing,
            sf6_efficiency=self.sf6_efficiency,
            cfc11_efficiency=self.cfc11_efficiency,
            cfc12_efficiency=self.cfc12_efficiency,
            so2_forcing=self.so2_forcing,
            slr_equilibrium_per_degree=self.slr_equilibrium_per_degree,
            slr_response_time=self.slr_response_time,
        )

    def initial_state(self, year: int) -> ClimateState:
        """Climate at the end of the year before the projection starts"""
        carbon = self.carbon_params()
        masses = np.array(self.initial_box_masses, dtype=float)
        return ClimateState(year, masses, carbon.preindustrial_concentration + carbon.ppm_per_gtc * float(masses.sum()),
                            self.initial_ch4, self.initial_n2o, self.initial_sf6, t_global=self.initial_temperature,
                            sea_level=self.initial_sea_level)


@dataclass(frozen=True)
class ImpactsConfig:
    sectors: Mapping = field(default_factory=dict)


@dataclass(frozen=True)
class DamageConfig:
    mode: str = SECTORAL
    coefficients: Mapping = field(default_factory=dict)
    bma_weights: tuple = tuple(1.0 / len(BMA_FORMS) for _ in BMA_FORMS)
    income_elasticity: float = 0.0
    market_feedback: bool = True
    coefficient_scale: float = 1.0

    def __post_init__(self):
        if self.mode not in DAMAGE_MODES:
            raise ConfigError(f'Unknown damage mode {self.mode}, expected one of {", ".join(DAMAGE_MODES)}')
        unknown = sorted(set(self.coefficients) - set(FORMS))
        if unknown:
            raise ConfigError(f'Unknown damage function form(s): {", ".join(unknown)}')
        object.__setattr__(self, 'bma_weights', tuple(float(weight) for weight in self.bma_weights))
        if len(self.bma_weights) != len(BMA_FORMS):
            raise ConfigError(f'bma_weights needs {len(BMA_FORMS)} values')
        for form in FORMS:
            self.spec(form)

    @property
    def aggregate(self) -> bool:
        return self.mode != SECTORAL

    def spec(self, form: str) -> DamageFunctionSpec:
        try:
            spec = default_spec(form, self.coefficients.get(form))
        except TypeError as error:
            raise ConfigError(f'Damage coefficients for {form}: {error}') from error
        return spec if self.coefficient_scale == 1.0 else spec.scaled(self.coefficient_scale)

    def fraction(self, t_national):
        """Aggregate damage fraction of GDP at national warming"""
        if self.mode == BMA:
            return bma_damage([self.spec(form) for form in BMA_FORMS], self.bma_weights, t_national)
        if self.mode == SECTORAL:
            raise ConfigError('Sectoral damages have no aggregate damage fraction')
        return aggregate_damage_function(self.spec(self.mode), t_national)


@dataclass(frozen=True)
class PulseConfig:
    size: float = 0.001
    gas: str = 'co2'

    def __post_init__(self):
        if not self.size > 0:
            raise ConfigError(f'pulse.size must be positive, got {self.size}')

    def pulse(self, year: int) -> PulseSpec:
        return PulseSpec(year, self.size, self.gas)


@dataclass(frozen=True)
class SccConfig:
    preferences: tuple = DEFAULT_PREFERENCES
    eval_years: tuple = (2025, 2100)
    discounting: str = 'national'
    mode: str = 'uncertainty'
    clamp: float = 200.0

    def __post_init__(self):
        preferences = tuple(pref if isinstance(pref, PreferenceParams) else PreferenceParams(*_pair(pref))
                            for pref in self.preferences)
        if not preferences:
            raise ConfigError('The preference grid must not be empty')
        object.__setattr__(self, 'preferences', preferences)
        object.__setattr__(self, 'eval_years', tuple(int(year) for year in self.eval_years))
        if not self.eval_years:
            raise ConfigError('At least one evaluation year is required')
        if self.discounting not in DISCOUNTING_MODES:
            raise ConfigError(f'discounting must be one of {", ".join(DISCOUNTING_MODES)}')
        if self.mode not in RUN_MODES:
            raise ConfigError(f'scc mode must be one of {", ".join(RUN_MODES)}')
        if not self.clamp > 0:
            raise ConfigError('clamp must be positive')


def _pair(value) -> tuple:
    if isinstance(value, Mapping):
        return value.get('prtp'), value.get('rra')
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return tuple(value)
    raise ConfigError(f'Preference entry must be [prtp, rra] or {{"prtp": .., "rra": ..}}, got {value!r}')


@dataclass(frozen=True)
class UncertaintyConfig:
    draws: int = 1000
    seed: int = 20190101
    workers: int = 1
    ecs_sigma: float = 0.3
    alpha_sd: float = 0.2
    damage_coefficient_sd: float = 0.2
    population_persistence: float = 0.9
    population_sd: float = 0.005
    max_failure_share: float = 0.01

    def __post_init__(self):
        if int(self.draws) < 1:
            raise ConfigError('draws must be at least 1')
        if int(self.workers) < 1:
            raise ConfigError('workers must be at least 1')
        if int(self.seed) < 0:
            raise ConfigError('seed must be non-negative')
        for name in ('ecs_sigma', 'alpha_sd', 'damage_coefficient_sd', 'population_sd'):
            value = getattr(self, name)
            if not isfinite(value) or value < 0:
                raise ConfigError(f'{name} must be finite and non-negative')
        if not 0 <= self.population_persistence < 1:
            raise ConfigError('population_persistence must lie in [0, 1)')
        if not 0 <= self.max_failure_share < 1:
            raise ConfigError('max_failure_share must lie in [0, 1)')
        object.__setattr__(self, 'draws', int(self.draws))
        object.__setattr__(self, 'workers', int(self.workers))
        object.__setattr__(self, 'seed', int(self.seed))


SECTIONS = {
    'paths': PathsConfig,
    'economy': EconomyConfig,
    'climate': ClimateConfig,
    'impacts': ImpactsConfig,
    'damage': DamageConfig,
    'pulse': PulseConfig,
    'scc': SccConfig,
    'uncertainty': UncertaintyConfig,
}


@dataclass(frozen=True)
class RunConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    economy: EconomyConfig = field(default_factory=EconomyConfig)
    climate: ClimateConfig = field(default_factory=ClimateConfig)
    impacts: ImpactsConfig = field(default_factory=ImpactsConfig)
    damage: DamageConfig = field(default_factory=DamageConfig)
    pulse: PulseConfig = field(default_factory=PulseConfig)
    scc: SccConfig = field(default_factory=SccConfig)
    uncertainty: UncertaintyConfig = field(default_factory=UncertaintyConfig)
    global_reference: Mapping = field(default_factory=dict)
    source: Path = None

    @property
    def output_dir(self) -> Path:
        return Path(self.paths.output)

    def to_dict(self) -> dict:
        """Effective configuration as plain JSON types, without the source path"""
        def plain(value):
            if isinstance(value, Path):
                return str(value)
            if isinstance(value, Mapping):
                return {str(key): plain(item) for key, item in value.items()}
            if isinstance(value, (list, tuple)):
                return [plain(item) for item in value]
            return value
        values = {name: plain(asdict(getattr(self, name))) for name in SECTIONS}
        values['global_reference'] = plain(dict(self.global_reference))
        return values


def load_config(path=None) -> RunConfig:
    """Load a JSON run config, the bundled toy world config when path is None

    Args:
        path (str|Path, optional): config file. Defaults to None.

    Raises:
        ConfigError: missing or invalid file, unknown keys, invalid values

    Returns:
        RunConfig: parsed config with resolved paths
    """
    path = Path(path) if path is not None else DEFAULT_CONFIG
    if not path.is_file():
        raise ConfigError(f'Config file not found: {path}')
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as error:
        raise ConfigError(f'{path.name}: invalid JSON at line {error.lineno}: {error.msg}') from error
    return config_from_dict(raw, path.parent.resolve(), path.resolve())


def config_from_dict(raw: Mapping, base: Path = None, source: Path = None) -> RunConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError('Config must be a JSON object')
    unknown = sorted(set(raw) - set(SECTIONS) - {'global_reference'})
    if unknown:
        raise ConfigError(f'Unknown config key(s): {", ".join(unknown)}')
    sections = {name: _from_mapping(cls, raw.get(name), name) for name, cls in SECTIONS.items()}
    if base is not None:
        sections['paths'] = sections['paths'].resolved(Path(base))
    reference = raw.get('global_reference') or {}
    if not isinstance(reference, Mapping):
        raise ConfigError('global_reference must be an object')
    return RunConfig(**sections, global_reference=dict(reference), source=source)


def apply_overrides(config: RunConfig, seed: int = None, draws: int = None, workers: int = None, prtp: float = None,
                    rra: float = None, epsilon: float = None, damage_fn: str = None, output=None,
                    deterministic: bool = False) -> RunConfig:
    """Apply command line overrides. A prtp or rra override replaces the preference grid with one pair, the missing
    half taken from the first grid entry.

    Returns:
        RunConfig: updated config
    """
    uncertainty = config.uncertainty
    for name, value in (('seed', seed), ('draws', draws), ('workers', workers)):
        if value is not None:
            uncertainty = replace(uncertainty, **{name: value})
    scc = config.scc
    if prtp is not None or rra is not None:
        first = scc.preferences[0]
        pref = PreferenceParams(first.prtp if prtp is None else prtp, first.rra if rra is None else rra)
        scc = replace(scc, preferences=(pref,))
    if deterministic:
        scc = replace(scc, mode='deterministic')
    damage = config.damage
    if epsilon is not None:
        damage = replace(damage, income_elasticity=float(epsilon))
    if damage_fn is not None:
        damage = replace(damage, mode=damage_fn)
    paths = config.paths if output is None else replace(config.paths, output=Path(output))
    return replace(config, paths=paths, uncertainty=uncertainty, scc=scc, damage=damage)


def config_hash(config: RunConfig) -> str:
    """SHA-256 over the canonical JSON of the config and the bytes of every input file"""
    digest = sha256(json.dumps(config.to_dict(), sort_keys=True, separators=(',', ':')).encode())
    for path in config.paths.inputs():
        digest.update(path.name.encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()
