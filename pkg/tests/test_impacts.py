from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from natscc.climate import CarbonCycleParams, ClimateParams, benchmark_climate, national_temperature
from natscc.errors import CalibrationError, ConfigError, ImpactError
from natscc.impacts import BENCHMARK_WARMING, MARKET_SECTORS, SECTORS, Sector, base_year_state, \
    calibrate_national_params, collapse_benchmarks, evaluate_impacts, load_benchmarks, load_calibration, \
    regional_impacts, sector_impact, uncalibrated_params, write_calibration
from natscc.scenario_io import CountryRecord, CountryTable


CARBON = CarbonCycleParams()
CLIMATE = ClimateParams()


def two_country_table() -> CountryTable:
    return CountryTable([CountryRecord('AAA', 'a', 'R', 1.2e6, 1.2e12, 10.0, 1000.0, 1e4, 1e5, 0.5, 1.0),
                         CountryRecord('BBB', 'b', 'R', 0.8e6, 0.8e12, 10.0, 1000.0, 1e4, 1e5, 0.5, 1.0)])


def flat_benchmarks(region: str = 'R', value: float = 1e9) -> dict:
    return {(region, sector): value for sector in SECTORS}


@pytest.fixture(scope='module')
def toy_benchmarks(toy_config):
    return load_benchmarks(toy_config.paths.benchmarks)


@pytest.fixture(scope='module')
def toy_calibration(toy_config, toy_table, toy_benchmarks):
    return calibrate_national_params(toy_benchmarks, toy_table, uncalibrated_params(toy_table), CARBON, CLIMATE)


def test_common_scale_preserves_provisional_split():
    table = two_country_table()
    benchmarks = flat_benchmarks()
    benchmarks[('R', Sector.HURRICANES)] = 10e12
    result = calibrate_national_params(benchmarks, table, uncalibrated_params(table), CARBON, CLIMATE)
    row = result.scales.set_index('sector').loc['hurricanes']
    # provisional impacts 3e12 and 2e12 at 2.5 C
    assert row['scale'] == pytest.approx(2.0, rel=1e-12)
    impacts = evaluate_impacts(base_year_state(table), benchmark_climate(2.5, CARBON, CLIMATE), result.params,
                               national_temperature(2.5, table.column('temperature_pattern')))
    assert impacts.sector('hurricanes') == pytest.approx([6e12, 4e12], rel=1e-12)


def test_toy_calibration_hits_every_benchmark(toy_calibration, toy_benchmarks):
    assert toy_calibration.max_residual < 1e-6
    assert len(toy_calibration.scales) == len(toy_benchmarks)
    assert toy_calibration.params.calibrated


def test_national_and_regional_impacts_differ_away_from_benchmark(toy_config, toy_table, toy_benchmarks):
    at_benchmark = regional_impacts(toy_table, toy_benchmarks, CARBON, CLIMATE, BENCHMARK_WARMING)
    assert np.allclose(at_benchmark['national_sum'], at_benchmark['regional'], rtol=1e-6, atol=1.0)
    cooler = regional_impacts(toy_table, toy_benchmarks, CARBON, CLIMATE, 2.0)
    gap = (cooler['national_sum'] - cooler['regional']).abs() / cooler['regional'].abs().clip(lower=1.0)
    assert gap.max() > 1e-6


def test_missing_benchmarks_are_all_listed(toy_table, toy_benchmarks):
    benchmarks = dict(toy_benchmarks)
    del benchmarks[('NORTH', Sector.WATER)]
    del benchmarks[('SOUTH', Sector.FORESTS)]
    with pytest.raises(CalibrationError) as error:
        calibrate_national_params(benchmarks, toy_table, uncalibrated_params(toy_table), CARBON, CLIMATE)
    assert set(error.value.failures) == {('NORTH', 'water'), ('SOUTH', 'forests')}


def test_cost_only_sector_rejects_negative_benchmark():
    table = two_country_table()
    benchmarks = flat_benchmarks()
    benchmarks[('R', Sector.SLR_PROTECTION)] = -1e9
    with pytest.raises(CalibrationError, match='slr_protection'):
        calibrate_national_params(benchmarks, table, uncalibrated_params(table), CARBON, CLIMATE)


def test_zero_exposure_with_target_fails():
    table = CountryTable([CountryRecord('AAA', 'a', 'R', 1e6, 1e12, 10.0, 0.0, 1e4, 1e5, 0.5, 1.0)])
    with pytest.raises(CalibrationError, match='slr_dryland'):
        calibrate_national_params(flat_benchmarks(), table, uncalibrated_params(table), CARBON, CLIMATE)


def test_health_impact_is_valued_at_200_incomes():
    table = two_country_table()
    params = uncalibrated_params(table).with_alpha({sector: np.full(2, 1e-6) for sector in SECTORS})
    state = base_year_state(table)
    climate = benchmark_climate(2.0, CARBON, CLIMATE)
    t = national_temperature(2.0, table.column('temperature_pattern'))
    expected = 200 * state.per_capita_income * 1e-6 * 2.0 * 0.5 * state.population
    assert sector_impact('cardiovascular', state, climate, params, t) == pytest.approx(expected, rel=1e-12)


def test_fertilisation_benefit_with_zero_alpha():
    table = CountryTable([CountryRecord('AAA', 'a', 'R', 1e6, 1e12, 10.0, 1000.0, 1e4, 1e5, 0.5, 1.0)])
    params = uncalibrated_params(table, {'agriculture': {'fertilization': 0.01}})
    params = params.with_alpha({sector: np.zeros(1) for sector in SECTORS})
    climate = replace(benchmark_climate(0.0, CARBON, CLIMATE), co2_ppm=560.0)
    impact = sector_impact(Sector.AGRICULTURE, base_year_state(table), climate, params, np.zeros(1))
    assert impact[0] == pytest.approx(-0.01 * np.log(2) * 1e12, rel=1e-12)
    assert impact[0] == pytest.approx(-6.93e9, rel=1e-3)


def test_no_warming_no_impact(toy_table, toy_calibration):
    climate = benchmark_climate(0.0, CARBON, CLIMATE)
    impacts = evaluate_impacts(base_year_state(toy_table), climate, toy_calibration.params, np.zeros(len(toy_table)))
    assert np.all(impacts.total == 0)


def test_market_and_nonmarket_partition(toy_table, toy_calibration):
    climate = benchmark_climate(3.0, CARBON, CLIMATE)
    impacts = evaluate_impacts(base_year_state(toy_table), climate, toy_calibration.params,
                               national_temperature(3.0, toy_table.column('temperature_pattern')))
    assert impacts.market + impacts.nonmarket_value == pytest.approx(impacts.total, rel=1e-12)
    assert len(MARKET_SECTORS) == 10
    assert np.all(impacts.sector('slr_migration') >= 0)


def test_uncalibrated_sector_is_an_error(toy_table):
    with pytest.raises(ImpactError, match='not calibrated'):
        sector_impact('water', base_year_state(toy_table), benchmark_climate(1.0, CARBON, CLIMATE),
                      uncalibrated_params(toy_table), np.ones(len(toy_table)))


def test_unknown_sector_names():
    with pytest.raises(ImpactError):
        sector_impact('tourism', None, None, None, None)
    table = two_country_table()
    with pytest.raises(ConfigError, match='tourism'):
        uncalibrated_params(table, {'tourism': {}})
    with pytest.raises(ConfigError, match='elasticity'):
        uncalibrated_params(table, {'water': {'elasticity': 1.0}})


def test_benchmark_file_errors(tmp_path):
    pd.DataFrame({'region': ['R', 'R'], 'sector': ['water', 'water'], 'impact_usd_at_2p5C': [1, 2]}).to_csv(
        tmp_path / 'dup.csv', index=False)
    with pytest.raises(ConfigError, match='row 3'):
        load_benchmarks(tmp_path / 'dup.csv')
    pd.DataFrame({'region': ['R'], 'sector': ['tourism'], 'impact_usd_at_2p5C': [1]}).to_csv(
        tmp_path / 'sector.csv', index=False)
    with pytest.raises(ConfigError, match='column sector'):
        load_benchmarks(tmp_path / 'sector.csv')


def test_collapsed_benchmarks_sum_regions(toy_benchmarks):
    world = collapse_benchmarks(toy_benchmarks, ('NORTH', 'SOUTH'), 'WLD')
    assert world[('WLD', Sector.COOLING)] == pytest.approx(9e10)
    assert len(world) == len(SECTORS)


def test_calibration_file_round_trip(tmp_path, toy_table, toy_calibration):
    alpha_path, scales_path = write_calibration(toy_calibration, toy_table.isos, tmp_path)
    assert scales_path.is_file()
    loaded = load_calibration(alpha_path, toy_table, uncalibrated_params(toy_table))
    for sector in SECTORS:
        assert np.allclose(loaded.sectors[sector].alpha, toy_calibration.params.sectors[sector].alpha,
                           rtol=1e-15, atol=0)


def test_calibration_file_missing_country(tmp_path, toy_table, toy_calibration):
    alpha_path, _ = write_calibration(toy_calibration, toy_table.isos, tmp_path)
    frame = pd.read_csv(alpha_path)
    frame[frame['iso'] != 'IND'].to_csv(alpha_path, index=False)
    with pytest.raises(ConfigError, match='IND'):
        load_calibration(alpha_path, toy_table, uncalibrated_params(toy_table))


def test_richer_country_gets_more_cooling_damage():
    table = CountryTable([CountryRecord('AAA', 'a', 'R', 1e6, 1e10, 10.0, 1000.0, 1e4, 1e5, 0.5, 1.0),
                          CountryRecord('BBB', 'b', 'R', 1e6, 4e10, 10.0, 1000.0, 1e4, 1e5, 0.5, 1.0)])
    result = calibrate_national_params(flat_benchmarks(), table, uncalibrated_params(table), CARBON, CLIMATE)
    alpha = result.params.sectors[Sector.COOLING].alpha
    assert alpha[1] / alpha[0] == pytest.approx(4 ** 0.8, rel=1e-12)
