from dataclasses import replace

import numpy as np
import pytest

from conftest import country_row, make_config, synthetic_config, write_world
from natscc.emissions import PulseSpec, emissions_path
from natscc.errors import ConfigError, EconomyError
from natscc.impacts import SECTORS
from natscc.model import build_world, run_world


@pytest.fixture(scope='module')
def sectoral_run(sectoral_world):
    return run_world(sectoral_world)


def test_run_covers_start_year_to_horizon(sectoral_world, sectoral_run):
    assert sectoral_run.years[0] == 2019
    assert sectoral_run.years[-1] == 2200
    assert sectoral_run.gross_output.shape == (182, 4)
    assert sectoral_run.sector_damage.shape == (182, len(SECTORS), 4)
    assert list(sectoral_run.climate.index[[0, -1]]) == [2019, 2200]


def test_base_year_matches_country_table(toy_table, sectoral_run):
    assert sectoral_run.gross_output[0] == pytest.approx(toy_table.column('base_gdp'), rel=1e-12)


def test_accounting_identity_every_year(sectoral_run):
    assert np.allclose(sectoral_run.consumption + sectoral_run.investment, sectoral_run.net_output, rtol=1e-12,
                       atol=0)


def test_repeated_runs_are_bit_identical(sectoral_world, sectoral_run):
    assert run_world(sectoral_world).identical(sectoral_run)


def test_zero_pulse_reproduces_baseline(sectoral_world, sectoral_run):
    assert run_world(sectoral_world, PulseSpec(2025, 0.0)).identical(sectoral_run)


def test_pulse_only_changes_later_years(sectoral_world, sectoral_run):
    pulsed = run_world(sectoral_world, PulseSpec(2030, 1.0))
    before = sectoral_run.year_index(2030)
    assert np.array_equal(pulsed.gross_output[:before], sectoral_run.gross_output[:before])
    assert pulsed.climate.loc[2030, 'co2_emissions'] == pytest.approx(
        sectoral_run.climate.loc[2030, 'co2_emissions'] + 1.0, rel=1e-12)
    assert (pulsed.climate['t_global'] >= sectoral_run.climate['t_global']).all()


def test_sector_matrix_adds_up_to_damages(sectoral_run):
    assert np.allclose(sectoral_run.sector_damage.sum(axis=1), sectoral_run.damages, rtol=1e-9, atol=1e-3)


def test_zero_damage_coefficients_give_zero_damages(nordhaus_world):
    world = replace(nordhaus_world, damage=replace(nordhaus_world.damage, coefficient_scale=0.0))
    trajectory = run_world(world)
    assert np.all(trajectory.damages == 0)
    assert trajectory.climate['t_global'].iloc[-1] > trajectory.climate['t_global'].iloc[0]


def test_income_elasticity_is_neutral_when_incomes_are_equal(tmp_path):
    countries = [country_row('AAA', 'R1', 1e8, 1e12), country_row('BBB', 'R1', 3e8, 3e12),
                 country_row('CCC', 'R2', 5e7, 5e11)]
    directory = write_world(tmp_path / 'equal', countries, tfp_growth=0.015)
    runs = {}
    for elasticity in (0.0, -0.36):
        config = synthetic_config(directory, {'damage': {'mode': 'nordhaus', 'income_elasticity': elasticity},
                                              'economy': {'horizon': 2120}})
        runs[elasticity] = run_world(build_world(config))
    # incomes grow far past the base year, the reference income grows with them
    assert runs[0.0].per_capita_income[-1, 0] > 1.5 * runs[0.0].per_capita_income[0, 0]
    assert np.allclose(runs[-0.36].market_damage, runs[0.0].market_damage, rtol=1e-9, atol=0)
    assert runs[-0.36].market_damage[-1].sum() > 0


def test_feedback_switch(nordhaus_world):
    with_feedback = run_world(nordhaus_world)
    without = run_world(replace(nordhaus_world, damage=replace(nordhaus_world.damage, market_feedback=False)))
    assert np.all(with_feedback.gross_output[-1] < without.gross_output[-1])
    assert np.array_equal(with_feedback.gross_output[:2], without.gross_output[:2])


def test_emissions_override_adds_global_emissions(nordhaus_world):
    path = emissions_path(nordhaus_world.years)
    path.loc[2050:2060, 'co2'] = 0.5
    extra = run_world(nordhaus_world, emissions_override=path)
    assert extra.climate.loc[2055, 'co2_ppm'] > run_world(nordhaus_world).climate.loc[2055, 'co2_ppm']


def test_collapse_sums_population_and_output(nordhaus_world):
    single = nordhaus_world.collapse()
    assert single.isos == ('WLD',)
    assert single.population[:, 0] == pytest.approx(nordhaus_world.population.sum(axis=1))
    trajectory = run_world(single)
    assert trajectory.gross_output[0, 0] == pytest.approx(nordhaus_world.table.column('base_gdp').sum(), rel=1e-12)


def test_collapsed_sectoral_world_is_recalibrated(sectoral_world):
    single = sectoral_world.collapse()
    assert single.impacts.calibrated
    assert single.impacts.sectors[SECTORS[0]].alpha.shape == (1,)


def test_with_damage_switches_mode(nordhaus_world):
    hope = nordhaus_world.with_damage(replace(nordhaus_world.damage, mode='hope'))
    assert hope.key != nordhaus_world.key
    sectoral = nordhaus_world.with_damage(replace(nordhaus_world.damage, mode='sectoral'))
    assert sectoral.impacts.calibrated


def test_with_damage_needs_benchmarks(nordhaus_world):
    world = replace(nordhaus_world, benchmarks=None, impacts=None)
    with pytest.raises(ConfigError, match='benchmarks'):
        world.with_damage(replace(world.damage, mode='sectoral'))


def test_sectoral_mode_needs_benchmark_file(tmp_path):
    directory = write_world(tmp_path / 'world', [country_row('AAA', 'R1', 1e6, 1e10)])
    (directory / 'benchmarks.csv').unlink()
    with pytest.raises(ConfigError, match='Benchmark'):
        build_world(synthetic_config(directory, {'economy': {'horizon': 2100}}))


def test_annihilating_damages_stop_the_run(nordhaus_world):
    world = replace(nordhaus_world, damage=replace(nordhaus_world.damage, coefficient_scale=400.0))
    with pytest.raises(EconomyError):
        run_world(world)


def test_world_key_follows_config():
    assert build_world(make_config({'damage': {'mode': 'hope'}, 'economy': {'horizon': 2100}})).key != \
        build_world(make_config({'damage': {'mode': 'hope'}, 'economy': {'horizon': 2101}})).key


def test_trajectory_frame_has_a_row_per_country_year(sectoral_run):
    frame = sectoral_run.to_frame()
    assert len(frame) == 182 * 4
    assert list(frame['iso'][:4]) == ['USA', 'RUS', 'CHN', 'IND']
    assert frame['consumption_per_capita'].gt(0).all()
