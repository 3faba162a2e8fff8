"""The command implementations: calibrate, run, scc, montecarlo, compare damage functions and diagnostics.

Every command writes plot-ready CSV with fixed headers to the output directory.
"""
from dataclasses import replace
from logging import Logger
from typing import Sequence

import numpy as np
import pandas as pd

from natscc.color import Color
from natscc.config import BMA, SECTORAL, RunConfig, config_hash
from natscc.damage_functions import BMA_FORMS, FORMS, FUNCTIONAL_FORMS
from natscc.errors import ConfigError
from natscc.impacts import SECTORS, calibrate_national_params, load_benchmarks, uncalibrated_params, write_calibration
from natscc.model import World, build_world, run_world
from natscc.montecarlo import MonteCarloEngine
from natscc.scc_engine import deterministic_scc, sum_nscc
from natscc.scenario_io import load_country_table
from natscc.utils import NsccUtils


DEFAULT_EPSILONS = (0.0, -0.36)
COMPARISON_FORMS = FORMS + (BMA, SECTORAL)
COVARIATES = ('population', 'gdp', 'gdp_per_capita', 'temperature')


def nscc_table(results: Sequence) -> pd.DataFrame:
    """One row per country, two columns (uncertainty, deterministic) per preference pair, deterministic only when
    no result carries Monte Carlo means

    Args:
        results (Sequence): SccResult of one evaluation year in grid order

    Returns:
        pd.DataFrame: NSCC table
    """
    frame = pd.DataFrame({'iso': list(results[0].isos)})
    for result in results:
        label = result.prefs.label
        if result.nscc_mean is not None:
            frame[f'{label}_uncertainty'] = result.nscc_mean
        frame[f'{label}_deterministic'] = result.nscc
    return frame


def global_sums(results: Sequence) -> pd.DataFrame:
    rows = [{
        'eval_year': result.eval_year,
        'prtp': result.prefs.prtp,
        'rra': result.prefs.rra,
        'uncertainty': result.global_sum if result.nscc_mean is not None else np.nan,
        'deterministic': result.deterministic_global_sum,
        'single_region': result.single_region_scc,
    } for result in results]
    return pd.DataFrame(rows, columns=['eval_year', 'prtp', 'rra', 'uncertainty', 'deterministic', 'single_region'])


def pearson_correlations(frame: pd.DataFrame, target: str = 'nscc', covariates: Sequence = COVARIATES) -> dict:
    """Pearson correlation of target with every covariate

    Raises:
        ConfigError: empty frame
    """
    if frame.empty:
        raise ConfigError('Diagnostics need at least one country')
    return {covariate: float(frame[target].corr(frame[covariate], method='pearson')) for covariate in covariates}


class Reporter(NsccUtils):
    def __init__(self, config: RunConfig = None, logger: Logger = None):
        super().__init__(config, logger)
        self._world = None

    @property
    def world(self) -> World:
        if self._world is None:
            with self.timed('build world'):
                self._world = build_world(self.config, self.log)
        return self._world

    def _pulses(self) -> dict:
        return {year: self.config.pulse.pulse(year) for year in self.config.scc.eval_years}

    def calibrate(self) -> bool:
        """Calibrate national sector parameters and write calibration.csv and calibration_scales.csv

        Returns:
            bool: True on success
        """
        paths = self.config.paths
        with self.timed('calibrate'):
            table = load_country_table(paths.countries)
            carbon = self.config.climate.carbon_params()
            params = uncalibrated_params(table, dict(self.config.impacts.sectors), carbon.preindustrial_concentration)
            result = calibrate_national_params(load_benchmarks(paths.benchmarks), table, params, carbon,
                                               self.config.climate.climate_params(), logger=self.log)
            written = write_calibration(result, table.isos, self.output_dir)
        worst = result.scales.loc[result.scales['relative_residual'].abs().idxmax()]
        Color().print_table([[worst['region'], worst['sector'], worst['relative_residual']]],
                            ['region', 'sector', 'max relative residual'])
        self.display_successful(f'Calibrated {len(table)} countries x {len(SECTORS)} sectors: '
                                f'{", ".join(str(path) for path in written)}')
        return True

    def run(self) -> bool:
        """Run the baseline and write trajectory.csv, climate.csv and, for sectoral damages, sector_impacts.csv"""
        with self.timed('run'):
            trajectory = run_world(self.world, logger=self.log)
        self.write_csv(trajectory.to_frame(), 'trajectory.csv')
        self.write_csv(trajectory.climate_frame(), 'climate.csv')
        if trajectory.sector_damage is not None:
            years, sectors, countries = trajectory.sector_damage.shape
            self.write_csv(pd.DataFrame({
                'year': np.repeat(trajectory.years, sectors * countries),
                'sector': np.tile(np.repeat([sector.value for sector in SECTORS], countries), years),
                'iso': np.tile(np.array(trajectory.isos, dtype=object), years * sectors),
                'impact': trajectory.sector_damage.reshape(-1),
            }), 'sector_impacts.csv')
        self.display_successful(f'Simulated {trajectory.years[0]}-{trajectory.years[-1]} for '
                                f'{len(trajectory.isos)} countries into {self.output_dir}')
        return True

    def _results(self, uncertainty: bool) -> list:
        scc = self.config.scc
        if uncertainty:
            with self.timed('montecarlo'):
                return MonteCarloEngine(self.world, self.config.uncertainty, self.log).run(
                    scc.preferences, self._pulses(), scc.discounting, scc.clamp)
        results = []
        with self.timed('deterministic scc'):
            for year, pulse in self._pulses().items():
                results.extend(deterministic_scc(self.world, scc.preferences, pulse, year, scc.discounting, scc.clamp,
                                                 logger=self.log))
        return results

    def _write_results(self, results: list, uncertainty: bool) -> dict:
        by_year = {}
        for result in results:
            by_year.setdefault(result.eval_year, []).append(result)
        for year, year_results in by_year.items():
            self.write_csv(nscc_table(year_results), f'nscc_{year}.csv')
        self.write_csv(global_sums(results), 'global_sums.csv')
        manifest = {
            'seed': self.config.uncertainty.seed if uncertainty else None,
            'draws': self.config.uncertainty.draws if uncertainty else 0,
            'failed_draws': max((result.failed_draws for result in results), default=0),
            'mode': 'uncertainty' if uncertainty else 'deterministic',
            'damage_mode': self.config.damage.mode,
            'config_hash': config_hash(self.config),
            'clamp_counts': {str(year): {result.prefs.label: result.total_clamps for result in year_results}
                             for year, year_results in by_year.items()},
            'timing_seconds': dict(self.timings),
        }
        self.write_json(manifest, 'manifest.json')
        return by_year

    def _display_sums(self, results: list):
        Color().print_table([[result.eval_year, result.prefs.prtp, result.prefs.rra, result.global_sum,
                              result.single_region_scc] for result in results],
                            ['year', 'prtp', 'rra', 'sum of NSCC', 'single region SCC'])

    def scc(self) -> bool:
        """NSCC tables per evaluation year, global sums and the run manifest"""
        uncertainty = self.config.scc.mode == 'uncertainty'
        results = self._results(uncertainty)
        self._write_results(results, uncertainty)
        self._display_sums(results)
        self.display_successful(f'NSCC results written to {self.output_dir}')
        return True

    def montecarlo(self) -> bool:
        """Uncertainty run plus the clamped per-draw values and per-country draw statistics"""
        results = self._results(True)
        by_year = self._write_results(results, True)
        for year, year_results in by_year.items():
            draws = []
            stats = []
            for result in year_results:
                frame = result.draws.reset_index()
                frame.insert(1, 'prtp', result.prefs.prtp)
                frame.insert(2, 'rra', result.prefs.rra)
                draws.append(frame)
                summary = result.stats.copy()
                summary.insert(0, 'prtp', result.prefs.prtp)
                summary.insert(1, 'rra', result.prefs.rra)
                stats.append(summary)
            self.write_csv(pd.concat(draws, ignore_index=True), f'montecarlo_draws_{year}.csv')
            self.write_csv(pd.concat(stats, ignore_index=True), f'nscc_stats_{year}.csv')
        self._display_sums(results)
        self.display_successful(f'Monte Carlo results written to {self.output_dir}')
        return True

    def compare_damage_functions(self, forms: Sequence = None) -> bool:
        """Global sums and per-country NSCCs per damage function at the first preference pair and evaluation year.
        Uncertainty mode with draws also runs the Monte Carlo for every form.

        Args:
            forms (Sequence, optional): forms to compare, every form plus bma and sectoral when None

        Raises:
            ConfigError: unknown form

        Returns:
            bool: True on success
        """
        forms = list(forms or COMPARISON_FORMS)
        unknown = [form for form in forms if form not in COMPARISON_FORMS]
        if unknown:
            raise ConfigError(f'Unknown damage function(s): {", ".join(unknown)}')
        scc = self.config.scc
        prefs = scc.preferences[0]
        year = scc.eval_years[0]
        pulse = self.config.pulse.pulse(year)
        uncertainty = scc.mode == 'uncertainty' and self.config.uncertainty.draws > 0
        rows = []
        countries = pd.DataFrame({'iso': list(self.world.isos)})
        with self.timed('compare damage functions'):
            for form in forms:
                world = self.world.with_damage(replace(self.config.damage, mode=form))
                if uncertainty:
                    result = MonteCarloEngine(world, self.config.uncertainty, self.log).run(
                        [prefs], {year: pulse}, scc.discounting, scc.clamp)[0]
                    countries[f'{form}_uncertainty'] = result.nscc_mean
                else:
                    result = deterministic_scc(world, [prefs], pulse, year, scc.discounting, scc.clamp,
                                               single_region=False, logger=self.log)[0]
                countries[f'{form}_deterministic'] = result.nscc
                rows.append({'form': form, 'functional_form': self.functional_form(form),
                             'uncertainty': result.global_sum if uncertainty else np.nan,
                             'deterministic': result.deterministic_global_sum})
        frame = pd.DataFrame(rows, columns=['form', 'functional_form', 'uncertainty', 'deterministic'])
        self.write_csv(frame, 'damage_function_comparison.csv')
        self.write_csv(countries, 'damage_function_nscc.csv')
        Color().print_table(frame.values.tolist(), list(frame.columns))
        self.display_successful(f'Compared {len(forms)} damage functions ({prefs.label}, {year})')
        return True

    @staticmethod
    def functional_form(form: str) -> str:
        if form == BMA:
            return f'weighted mean of {", ".join(BMA_FORMS)}'
        if form == SECTORAL:
            return f'sum of {len(SECTORS)} calibrated sectoral impacts'
        return FUNCTIONAL_FORMS[form]

    def diagnostics(self, relative_change: bool = False, epsilons: Sequence = None) -> bool:
        """Covariates against NSCC with Pearson correlations, and the income-elasticity sweep

        Args:
            relative_change (bool, optional): add (x_last - x_first) / |x_first| over the evaluation years.
                Defaults to False.
            epsilons (Sequence, optional): income elasticities to sweep. Defaults to (0, -0.36).

        Raises:
            ConfigError: missing result files or no countries

        Returns:
            bool: True on success
        """
        table = load_country_table(self.config.paths.countries)
        covariates = pd.DataFrame({
            'iso': list(table.isos),
            'population': table.column('base_population'),
            'gdp': table.column('base_gdp'),
            'temperature': table.column('base_temperature'),
        })
        covariates['gdp_per_capita'] = covariates['gdp'] / covariates['population']
        frames = []
        correlations = []
        for year in self.config.scc.eval_years:
            results = self.read_csv(f'nscc_{year}.csv')
            column = self.headline_column(results)
            frame = covariates.merge(results[['iso', column]].rename(columns={column: 'nscc'}), on='iso')
            frame['nscc_per_capita'] = frame['nscc'] / frame['population']
            for covariate, value in pearson_correlations(frame).items():
                correlations.append({'eval_year': year, 'covariate': covariate, 'pearson': value})
            frame.insert(1, 'eval_year', year)
            frames.append(frame)
        diagnostics = pd.concat(frames, ignore_index=True)
        if relative_change and len(self.config.scc.eval_years) > 1:
            first, last = self.config.scc.eval_years[0], self.config.scc.eval_years[-1]
            pivot = diagnostics.pivot(index='iso', columns='eval_year', values='nscc')
            change = (pivot[last] - pivot[first]) / pivot[first].abs()
            diagnostics['relative_change'] = diagnostics['iso'].map(change)
        self.write_csv(diagnostics, 'diagnostics.csv')
        self.write_csv(pd.DataFrame(correlations, columns=['eval_year', 'covariate', 'pearson']), 'correlations.csv')
        sweep = self.epsilon_sweep(epsilons or DEFAULT_EPSILONS)
        self.write_csv(sweep, 'epsilon_sweep.csv')
        Color().print_table(sweep.values.tolist(), list(sweep.columns))
        self.display_successful(f'Diagnostics written to {self.output_dir}')
        return True

    @staticmethod
    def headline_column(results: pd.DataFrame) -> str:
        """First uncertainty column, the first deterministic one when the run had no draws"""
        for suffix in ('_uncertainty', '_deterministic'):
            columns = [column for column in results.columns if column.endswith(suffix)]
            if columns:
                return columns[0]
        raise ConfigError('Result file has no NSCC columns')

    def epsilon_sweep(self, epsilons: Sequence) -> pd.DataFrame:
        """Global sum of deterministic NSCCs and its split between countries below and above the world average
        base-year income, per income elasticity

        Args:
            epsilons (Sequence): income elasticities

        Returns:
            pd.DataFrame: epsilon, global_sum, poor_contribution, rich_contribution, poor_share
        """
        world = self.world
        income = world.table.column('base_gdp') / world.table.column('base_population')
        average = world.table.column('base_gdp').sum() / world.table.column('base_population').sum()
        poor = income < average
        prefs = self.config.scc.preferences[0]
        year = self.config.scc.eval_years[0]
        rows = []
        with self.timed('epsilon sweep'):
            for epsilon in epsilons:
                swept = world.with_damage(replace(world.damage, income_elasticity=float(epsilon)))
                values = deterministic_scc(swept, [prefs], self.config.pulse.pulse(year), year,
                                           self.config.scc.discounting, self.config.scc.clamp, single_region=False,
                                           logger=self.log)[0].nscc
                total = sum_nscc(values)
                poor_sum = sum_nscc(values[poor])
                rows.append({'epsilon': float(epsilon), 'global_sum': total, 'poor_contribution': poor_sum,
                             'rich_contribution': sum_nscc(values[~poor]),
                             'poor_share': poor_sum / total if total != 0 else np.nan})
        return pd.DataFrame(rows, columns=['epsilon', 'global_sum', 'poor_contribution', 'rich_contribution',
                                           'poor_share'])
