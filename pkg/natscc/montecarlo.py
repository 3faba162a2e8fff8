"""Seeded Monte Carlo over climate sensitivity, impact parameters and population.

Draw d samples from np.random.default_rng([seed, d]) only, so results do not depend on the worker count or the
order draws finish in. Draws run in a process pool, results come back in draw order.
"""
from dataclasses import dataclass, replace
from logging import Logger
from multiprocessing import Pool
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from natscc.config import UncertaintyConfig
from natscc.emissions import PulseSpec
from natscc.errors import ConfigError, EngineError
from natscc.impacts import SECTORS
from natscc.logger import get_logger
from natscc.model import World, run_world
from natscc.scc_engine import CLAMP_BOUND, NATIONAL, SccResult, clamp_count, clamp_nscc, deterministic_scc, \
    nscc_vector, sum_nscc


MULTIPLIER_RANGE = (0.0, 2.0)
_WORKER = {}


@dataclass(frozen=True)
class DrawParameters:
    draw: int
    ecs: float
    alpha_multipliers: np.ndarray
    damage_multiplier: float
    population_shocks: np.ndarray


def _truncated_multipliers(rng: np.random.Generator, sd: float, shape) -> np.ndarray:
    """1 + sd * z truncated to [0, 2] by redrawing the entries outside"""
    values = 1.0 + sd * rng.standard_normal(shape)
    outside = (values < MULTIPLIER_RANGE[0]) | (values > MULTIPLIER_RANGE[1])
    while np.any(outside):
        values[outside] = 1.0 + sd * rng.standard_normal(int(outside.sum()))
        outside = (values < MULTIPLIER_RANGE[0]) | (values > MULTIPLIER_RANGE[1])
    return values


def sample_draw(world: World, uncertainty: UncertaintyConfig, draw: int) -> DrawParameters:
    """Sample the parameters of one draw from its own substream

    Args:
        world (World): world whose parameters are perturbed
        uncertainty (UncertaintyConfig): distributions and master seed
        draw (int): draw index

    Returns:
        DrawParameters: sampled perturbation
    """
    rng = np.random.default_rng([uncertainty.seed, draw])
    ecs = world.climate.ecs * float(np.exp(uncertainty.ecs_sigma * rng.standard_normal()))
    alphas = _truncated_multipliers(rng, uncertainty.alpha_sd, (len(SECTORS), len(world.isos)))
    damage = float(_truncated_multipliers(rng, uncertainty.damage_coefficient_sd, 1)[0])
    innovations = uncertainty.population_sd * rng.standard_normal(world.population.shape)
    shocks = np.zeros(world.population.shape)
    # the base year keeps its observed population
    for index in range(1, len(shocks)):
        shocks[index] = uncertainty.population_persistence * shocks[index - 1] + innovations[index]
    return DrawParameters(draw, ecs, alphas, damage, shocks)


def median_draw(world: World) -> DrawParameters:
    return DrawParameters(-1, world.climate.ecs, np.ones((len(SECTORS), len(world.isos))), 1.0,
                          np.zeros(world.population.shape))


def perturb_world(world: World, params: DrawParameters) -> World:
    impacts = world.impacts.scaled(params.alpha_multipliers) if world.impacts is not None else None
    return replace(
        world,
        climate=replace(world.climate, ecs=params.ecs),
        impacts=impacts,
        damage=replace(world.damage, coefficient_scale=world.damage.coefficient_scale * params.damage_multiplier),
        population=world.population * np.exp(params.population_shocks),
        key=f'{world.key}|draw{params.draw}',
    )


@dataclass(frozen=True)
class DrawJob:
    uncertainty: UncertaintyConfig
    pulses: tuple
    preferences: tuple
    discounting: str


def _init_worker(world: World, job: DrawJob):
    _WORKER['world'] = world
    _WORKER['job'] = job


def _run_draw(draw: int) -> tuple:
    """Run one draw in a worker: (draw, NSCC array (eval years, preferences, countries) or None, error)"""
    world, job = _WORKER['world'], _WORKER['job']
    try:
        perturbed = perturb_world(world, sample_draw(world, job.uncertainty, draw))
        baseline = run_world(perturbed)
        values = np.empty((len(job.pulses), len(job.preferences), len(world.isos)))
        for i, pulse in enumerate(job.pulses):
            pulsed = run_world(perturbed, pulse)
            for j, prefs in enumerate(job.preferences):
                values[i, j] = nscc_vector(baseline, pulsed, prefs, pulse, pulse.year, job.discounting)
    except (EngineError, FloatingPointError, OverflowError, ZeroDivisionError) as error:
        return draw, None, f'{type(error).__name__}: {error}'
    if not np.all(np.isfinite(values)):
        return draw, None, 'non-finite NSCC'
    return draw, values, ''


class MonteCarloEngine:
    def __init__(self, world: World, uncertainty: UncertaintyConfig, logger: Logger = None):
        self.world = world
        self.uncertainty = uncertainty
        self.log = logger or get_logger('natscc')

    def _map(self, job: DrawJob) -> list:
        draws = range(self.uncertainty.draws)
        workers = min(self.uncertainty.workers, self.uncertainty.draws)
        if workers == 1:
            _init_worker(self.world, job)
            try:
                return [_run_draw(draw) for draw in draws]
            finally:
                _WORKER.clear()
        chunksize = max(1, self.uncertainty.draws // (4 * workers))
        with Pool(processes=workers, initializer=_init_worker, initargs=(self.world, job)) as pool:
            return pool.map(_run_draw, draws, chunksize)

    def run(self, preferences: Sequence, pulses: Mapping, discounting: str = NATIONAL,
            bound: float = CLAMP_BOUND) -> list:
        """Run every draw once per evaluation year pulse and summarise per preference pair

        Args:
            preferences (Sequence): PreferenceParams grid
            pulses (Mapping): eval year -> PulseSpec
            discounting (str, optional): discounting mode. Defaults to 'national'.
            bound (float, optional): clamp bound. Defaults to 200.

        Raises:
            EngineError: more than the allowed share of draws failed

        Returns:
            list: SccResult per (eval year, preference pair), years outer
        """
        if not preferences:
            raise ConfigError('The preference grid must not be empty')
        years = sorted(pulses)
        job = DrawJob(self.uncertainty, tuple(pulses[year] for year in years), tuple(preferences), discounting)
        self.log.info('Running %s Monte Carlo draws on %s worker(s)', self.uncertainty.draws,
                      min(self.uncertainty.workers, self.uncertainty.draws))
        outcomes = self._map(job)
        failed = [(draw, error) for draw, values, error in outcomes if values is None]
        for draw, error in failed:
            self.log.warning('Draw %s failed and is excluded: %s', draw, error)
        if len(failed) > self.uncertainty.max_failure_share * self.uncertainty.draws or len(failed) == len(outcomes):
            raise EngineError(f'{len(failed)} of {self.uncertainty.draws} Monte Carlo draws failed')
        kept = [draw for draw, values, _ in outcomes if values is not None]
        stacked = np.stack([values for _, values, _ in outcomes if values is not None])
        median_world = perturb_world(self.world, median_draw(self.world))
        results = []
        for i, year in enumerate(years):
            companions = deterministic_scc(median_world, preferences, pulses[year], year, discounting, bound,
                                           logger=self.log)
            for j, prefs in enumerate(preferences):
                results.append(self._summarise(stacked[:, i, j], kept, companions[j], len(failed), bound))
        return results

    def _summarise(self, raw: np.ndarray, kept: list, companion: SccResult, failed: int, bound: float) -> SccResult:
        clamps = clamp_count(raw, bound)
        if clamps.any():
            self.log.warning('Clamped %s per-draw NSCC value(s) to +/-%s for %s (%s)', int(clamps.sum()), bound,
                             companion.eval_year, companion.prefs.label)
        draws = clamp_nscc(raw, bound)
        mean = draws.mean(axis=0)
        stats = pd.DataFrame({
            'iso': list(self.world.isos),
            'mean': mean,
            'sd': draws.std(axis=0, ddof=1) if len(draws) > 1 else np.zeros(len(self.world.isos)),
            'p5': np.percentile(draws, 5, axis=0),
            'p95': np.percentile(draws, 95, axis=0),
            'clamp_count': clamps,
        })
        return SccResult(
            isos=self.world.isos,
            nscc=companion.nscc,
            global_sum=sum_nscc(mean),
            deterministic_global_sum=companion.global_sum,
            single_region_scc=companion.single_region_scc,
            mode='uncertainty',
            prefs=companion.prefs,
            pulse=companion.pulse,
            eval_year=companion.eval_year,
            seed=self.uncertainty.seed,
            draw_count=len(kept),
            failed_draws=failed,
            nscc_mean=mean,
            stats=stats,
            draws=pd.DataFrame(draws, index=pd.Index(kept, name='draw'), columns=list(self.world.isos)),
            clamp_counts=clamps,
        )


def monte_carlo_scc(world: World, uncertainty: UncertaintyConfig, prefs, pulse: PulseSpec,
                    discounting: str = NATIONAL, logger: Logger = None) -> SccResult:
    """Monte Carlo NSCC for one preference pair at the pulse year, with its deterministic companion

    Args:
        world (World): calibrated world
        uncertainty (UncertaintyConfig): distributions, draws, seed and workers
        prefs (PreferenceParams): preferences
        pulse (PulseSpec): pulse, its year is the evaluation year
        discounting (str, optional): discounting mode. Defaults to 'national'.
        logger (Logger, optional): logger. Defaults to None.

    Returns:
        SccResult: uncertainty result
    """
    return MonteCarloEngine(world, uncertainty, logger).run([prefs], {pulse.year: pulse}, discounting)[0]
