import numpy as np
import pandas as pd
import pytest
from hypothesis import given, strategies as st

from conftest import country_row, write_world
from natscc.errors import ConfigError
from natscc.scenario_io import CONSTANT_LEVEL, CONSTANT_RATE, CountryRecord, CountryTable, TimeSeries, \
    collapse_table, extrapolate_series, load_country_table, load_intensities, load_scenario, validate_world_totals, \
    write_country_table


def test_toy_table_loads_in_file_order(toy_table):
    assert toy_table.isos == ('USA', 'RUS', 'CHN', 'IND')
    assert toy_table.regions == ('NORTH', 'SOUTH')
    assert toy_table.members('SOUTH') == ('CHN', 'IND')
    assert toy_table['IND'].urban_share == 0.34


def test_country_table_round_trip(tmp_path, toy_table):
    path = write_country_table(toy_table, tmp_path / 'countries.csv')
    assert load_country_table(path) == toy_table


def test_missing_coast_value_defaults_to_zero(tmp_path):
    frame = pd.DataFrame([country_row('AAA', 'R1', 1e6, 1e10)])
    frame['coast_km'] = ''
    frame.to_csv(tmp_path / 'countries.csv', index=False)
    assert load_country_table(tmp_path / 'countries.csv')['AAA'].coast_length == 0.0


def test_duplicate_iso_names_the_row(tmp_path):
    pd.DataFrame([country_row('AAA', 'R1', 1e6, 1e10), country_row('AAA', 'R1', 2e6, 2e10)]).to_csv(
        tmp_path / 'countries.csv', index=False)
    with pytest.raises(ConfigError, match='row 3, column iso'):
        load_country_table(tmp_path / 'countries.csv')


def test_unparseable_number_names_row_and_column(tmp_path):
    frame = pd.DataFrame([country_row('AAA', 'R1', 1e6, 1e10)])
    frame['gdp'] = 'lots'
    frame.to_csv(tmp_path / 'countries.csv', index=False)
    with pytest.raises(ConfigError, match='row 2, column gdp'):
        load_country_table(tmp_path / 'countries.csv')


def test_urban_share_outside_unit_interval_is_rejected(tmp_path):
    pd.DataFrame([country_row('AAA', 'R1', 1e6, 1e10, urban_share=1.5)]).to_csv(tmp_path / 'countries.csv',
                                                                                index=False)
    with pytest.raises(ConfigError, match='urban_share'):
        load_country_table(tmp_path / 'countries.csv')


def test_record_rejects_short_iso():
    with pytest.raises(ConfigError):
        CountryRecord('US', 'x', 'R', 1.0, 1.0, 0.0)


def test_constant_rate_extrapolation_uses_last_ten_ratios():
    series = TimeSeries(2000, tuple(100 * 1.02 ** np.arange(20)))
    extended = extrapolate_series(series, 2025)
    assert extended.end_year == 2025
    assert extended.value(2025) == pytest.approx(100 * 1.02 ** 25, rel=1e-12)
    assert extended.values[:20] == series.values


def test_constant_level_repeats_last_value():
    series = TimeSeries(2000, (1.0, 2.0, 3.0))
    assert extrapolate_series(series, 2005, CONSTANT_LEVEL).values == (1.0, 2.0, 3.0, 3.0, 3.0, 3.0)


def test_extrapolation_to_covered_year_is_identity():
    series = TimeSeries(2000, (1.0, 2.0, 3.0))
    assert extrapolate_series(series, 2001) is series


def test_extrapolation_before_start_is_an_error():
    with pytest.raises(ConfigError):
        extrapolate_series(TimeSeries(2000, (1.0,)), 1990)


@given(st.lists(st.floats(min_value=1.0, max_value=100.0), min_size=1, max_size=30),
       st.integers(min_value=0, max_value=50), st.sampled_from([CONSTANT_RATE, CONSTANT_LEVEL]))
def test_extrapolation_preserves_observations(values, extra, mode):
    series = TimeSeries(1990, tuple(values))
    extended = extrapolate_series(series, series.end_year + extra, mode)
    assert extended.values[:len(values)] == series.values
    assert len(extended.values) == len(values) + extra


def test_toy_scenario_is_extrapolated_to_horizon(toy_table, toy_config):
    scenario = load_scenario(toy_config.paths.scenarios, toy_table, 2019, 2200)
    assert scenario.needs_extrapolation
    extended = scenario.extrapolated(2200)
    assert extended.series['population']['USA'].end_year == 2200
    savings = extended.matrix('savings_rate', toy_table.isos, 2019, 2200)
    assert np.all((savings > 0) & (savings < 1))
    assert extended.global_values('cfc11', 2150, 2150)[0] == scenario.global_series['cfc11'].values[-1]


def test_five_year_steps_are_interpolated(tmp_path):
    directory = write_world(tmp_path / 'world', [country_row('AAA', 'R1', 1e6, 1e10)])
    frame = pd.DataFrame({'iso': 'AAA', 'year': [2015, 2020, 2025, 2030], 'value': [1.0, 2.0, 3.0, 4.0]})
    frame.to_csv(directory / 'scenarios' / 'scenario_population.csv', index=False)
    table = load_country_table(directory / 'countries.csv')
    scenario = load_scenario(directory / 'scenarios', table, 2019, 2030)
    assert scenario.series['population']['AAA'].value(2022) == pytest.approx(2.4)


def test_irregular_gap_is_an_error(tmp_path):
    directory = write_world(tmp_path / 'world', [country_row('AAA', 'R1', 1e6, 1e10)])
    frame = pd.DataFrame({'iso': 'AAA', 'year': [2019, 2020, 2025], 'value': [1.0, 2.0, 3.0]})
    frame.to_csv(directory / 'scenarios' / 'scenario_population.csv', index=False)
    table = load_country_table(directory / 'countries.csv')
    with pytest.raises(ConfigError, match='gap'):
        load_scenario(directory / 'scenarios', table)


def test_value_pct_is_divided_by_100(tmp_path):
    directory = write_world(tmp_path / 'world', [country_row('AAA', 'R1', 1e6, 1e10)])
    years = np.arange(2019, 2101)
    pd.DataFrame({'iso': 'AAA', 'year': years, 'value_pct': 25.0}).to_csv(
        directory / 'scenarios' / 'scenario_savings_rate.csv', index=False)
    table = load_country_table(directory / 'countries.csv')
    scenario = load_scenario(directory / 'scenarios', table)
    assert scenario.series['savings_rate']['AAA'].value(2050) == pytest.approx(0.25)


def test_country_missing_from_scenario(tmp_path):
    directory = write_world(tmp_path / 'world', [country_row('AAA', 'R1', 1e6, 1e10)])
    pd.DataFrame([country_row('AAA', 'R1', 1e6, 1e10), country_row('BBB', 'R1', 1e6, 1e10)]).to_csv(
        directory / 'countries.csv', index=False)
    table = load_country_table(directory / 'countries.csv')
    with pytest.raises(ConfigError, match='BBB'):
        load_scenario(directory / 'scenarios', table)


def test_savings_rate_must_be_a_fraction(tmp_path):
    directory = write_world(tmp_path / 'world', [country_row('AAA', 'R1', 1e6, 1e10)], savings_rate=1.2)
    table = load_country_table(directory / 'countries.csv')
    with pytest.raises(ConfigError, match='savings_rate'):
        load_scenario(directory / 'scenarios', table)


def test_intensities_follow_table_order(toy_table, toy_config):
    intensities = load_intensities(toy_config.paths.intensities, toy_table)
    assert intensities['co2'][0] == 7.07e-14
    assert list(intensities) == ['co2', 'ch4', 'n2o', 'sf6', 'so2']


def test_collapse_sums_extensive_quantities(toy_table):
    single = collapse_table(toy_table)
    record = next(iter(single))
    assert len(single) == 1
    assert record.base_population == toy_table.column('base_population').sum()
    assert record.coast_length == toy_table.column('coast_length').sum()
    gdp = toy_table.column('base_gdp')
    assert record.temperature_pattern == pytest.approx(
        (toy_table.column('temperature_pattern') * gdp).sum() / gdp.sum())


def test_coverage_below_99_percent_warns(toy_table):
    report = validate_world_totals(toy_table, {'pop': 2 * toy_table.column('base_population').sum(), 'gdp': 1.0})
    assert not report.ok
    assert [warning.variable for warning in report.warnings] == ['pop']
    assert report.warnings[0].share == pytest.approx(0.5)


def test_toy_world_covers_its_reference(toy_table, toy_config):
    assert validate_world_totals(toy_table, toy_config.global_reference).ok


def test_country_table_rejects_duplicates():
    record = CountryRecord('AAA', 'a', 'R', 1.0, 1.0, 0.0)
    with pytest.raises(ConfigError):
        CountryTable([record, record])
