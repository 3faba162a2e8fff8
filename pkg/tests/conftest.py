import json
import shutil
from copy import deepcopy
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from natscc.config import DATA_DIR, DEFAULT_CONFIG, config_from_dict
from natscc.model import build_world
from natscc.scenario_io import COUNTRY_VARIABLES, load_country_table


def _merge(base: dict, updates: dict) -> dict:
    merged = deepcopy(base)
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def make_config(updates: dict = None, base_dir: Path = DATA_DIR):
    """Toy world config with section overrides, paths resolved against base_dir"""
    raw = json.loads(DEFAULT_CONFIG.read_text())
    return config_from_dict(_merge(raw, updates or {}), base_dir)


def write_world(directory: Path, countries: list, first_year: int = 2019, last_year: int = 2100,
                population_growth: float = 0.0, tfp_growth: float = 0.01, savings_rate: float = 0.2,
                intensity_rate: float = -0.01, intensities: dict = None) -> Path:
    """Write a synthetic world with the same drivers in every country. countries are countries.csv rows"""
    directory.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(countries).to_csv(directory / 'countries.csv', index=False)
    shutil.copy(DATA_DIR / 'benchmarks.csv', directory / 'benchmarks.csv')
    scenarios = directory / 'scenarios'
    scenarios.mkdir(exist_ok=True)
    years = np.arange(first_year, last_year + 1)
    for variable in COUNTRY_VARIABLES:
        rows = []
        for country in countries:
            if variable == 'population':
                values = country['pop'] * np.exp(population_growth * (years - first_year))
            elif variable == 'tfp_growth':
                values = np.full(len(years), tfp_growth)
            elif variable == 'savings_rate':
                values = np.full(len(years), savings_rate)
            else:
                values = np.full(len(years), intensity_rate)
            rows.extend({'iso': country['iso'], 'year': year, 'value': value} for year, value in zip(years, values))
        pd.DataFrame(rows).to_csv(scenarios / f'scenario_{variable}.csv', index=False)
    for gas, level in (('cfc11', 226.0), ('cfc12', 503.0)):
        pd.DataFrame({'iso': 'WLD', 'year': years, 'value': level}).to_csv(scenarios / f'scenario_{gas}.csv',
                                                                          index=False)
    intensities = intensities or {'co2': 1.5e-13, 'ch4': 4e-12, 'n2o': 1.5e-13, 'sf6': 1e-13, 'so2': 5e-13}
    pd.DataFrame([{'iso': country['iso'], **intensities} for country in countries]).to_csv(
        directory / 'intensities.csv', index=False)
    return directory


def synthetic_config(directory: Path, updates: dict = None):
    """Config reading the synthetic world written by write_world"""
    paths = {'countries': str(directory / 'countries.csv'), 'scenarios': str(directory / 'scenarios'),
             'intensities': str(directory / 'intensities.csv'), 'benchmarks': str(directory / 'benchmarks.csv'),
             'output': str(directory / 'out')}
    return make_config(_merge({'paths': paths, 'global_reference': {'pop': 0, 'gdp': 0}}, updates or {}))


def country_row(iso: str, region: str, pop: float, gdp: float, pattern: float = 1.0, **extra) -> dict:
    row = {'iso': iso, 'name': iso, 'region': region, 'pop': pop, 'gdp': gdp, 'temp': 10.0, 'coast_km': 1000.0,
           'wetland_km2': 10000.0, 'dryland_km2': 100000.0, 'urban_share': 0.5, 'temp_pattern': pattern}
    row.update(extra)
    return row


@pytest.fixture(scope='session')
def toy_config():
    return make_config()


@pytest.fixture(scope='session')
def toy_table(toy_config):
    return load_country_table(toy_config.paths.countries)


@pytest.fixture(scope='session')
def sectoral_world(toy_config):
    return build_world(toy_config)


@pytest.fixture(scope='session')
def nordhaus_world():
    return build_world(make_config({'damage': {'mode': 'nordhaus'}}))


@pytest.fixture()
def output_config(tmp_path):
    """Toy config writing into a temporary directory, deterministic with few draws"""
    def factory(updates: dict = None):
        base = {'paths': {'output': str(tmp_path / 'out')},
                'economy': {'horizon': 2150},
                'uncertainty': {'draws': 4, 'workers': 1}}
        return make_config(_merge(base, updates or {}))
    return factory
