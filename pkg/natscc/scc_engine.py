"""National social cost of carbon from baseline and pulse runs.

NSCC_n = sum over t >= eval_year of DF_n(t) * (D_n(pulsed, t) - D_n(baseline, t)) / pulse tCO2, with Ramsey discount
factors from the baseline per-capita consumption of each country.
"""
from dataclasses import dataclass, field
from logging import Logger
from math import fsum
from typing import Sequence

import numpy as np
import pandas as pd

from natscc.config import PreferenceParams
from natscc.emissions import PulseSpec
from natscc.errors import ConfigError, EngineError
from natscc.logger import get_logger
from natscc.model import Trajectory, World, run_world


CLAMP_BOUND = 200.0
NATIONAL = 'national'
GLOBAL = 'global'


def discount_factors(consumption_per_capita, prefs: PreferenceParams, base_year: int, years=None) -> np.ndarray:
    """Ramsey discount factors DF(t) = (1 + prtp) ** -(t - base_year) * (c(base_year) / c(t)) ** rra

    Args:
        consumption_per_capita (np.ndarray|pd.Series): per-year consumption per capita, (years,) or (years, countries).
            A Series supplies its own year index.
        prefs (PreferenceParams): preferences
        base_year (int): year with DF = 1
        years (Sequence, optional): calendar years of the rows. Defaults to None.

    Raises:
        EngineError: non-positive consumption or base year outside the path

    Returns:
        np.ndarray: discount factors shaped like the consumption path
    """
    if isinstance(consumption_per_capita, pd.Series) and years is None:
        years = consumption_per_capita.index.to_numpy()
    consumption = np.asarray(consumption_per_capita, dtype=float)
    years = np.arange(len(consumption)) if years is None else np.asarray(years)
    if np.any(consumption <= 0):
        raise EngineError('Discounting needs strictly positive consumption')
    rows = np.flatnonzero(years == base_year)
    if len(rows) == 0:
        raise EngineError(f'Base year {base_year} outside the consumption path')
    elapsed = (years - base_year).astype(float)
    if consumption.ndim == 2:
        elapsed = elapsed[:, None]
    return (1 + prefs.prtp) ** -elapsed * (consumption[rows[0]] / consumption) ** prefs.rra


def marginal_damages(baseline: Trajectory, pulsed: Trajectory) -> np.ndarray:
    """Damage difference (US$) per year and country

    Raises:
        ConfigError: the trajectories come from different worlds
    """
    if baseline.key != pulsed.key or baseline.isos != pulsed.isos or not np.array_equal(baseline.years, pulsed.years):
        raise ConfigError('Baseline and pulse runs come from different configurations')
    return pulsed.damages - baseline.damages


def nscc_vector(baseline: Trajectory, pulsed: Trajectory, prefs: PreferenceParams, pulse: PulseSpec, eval_year: int,
                discounting: str = NATIONAL) -> np.ndarray:
    """Unclamped NSCC of every country (US$/tCO2)

    Args:
        baseline (Trajectory): run without the pulse
        pulsed (Trajectory): run with the pulse
        prefs (PreferenceParams): preferences
        pulse (PulseSpec): pulse of the pulsed run
        eval_year (int): first year summed and discounting base year
        discounting (str, optional): 'national' own consumption or 'global' world consumption. Defaults to national.

    Returns:
        np.ndarray: NSCC per country in table order
    """
    if pulse.tonnes_co2 <= 0:
        raise ConfigError('NSCC needs a positive pulse')
    delta = marginal_damages(baseline, pulsed)
    start = baseline.year_index(eval_year)
    years = baseline.years[start:]
    if discounting == GLOBAL:
        world = baseline.consumption.sum(axis=1) / baseline.population.sum(axis=1)
        factors = discount_factors(world[start:], prefs, eval_year, years)[:, None]
    elif discounting == NATIONAL:
        factors = discount_factors(baseline.consumption_per_capita[start:], prefs, eval_year, years)
    else:
        raise ConfigError(f'Unknown discounting mode: {discounting}')
    return (factors * delta[start:]).sum(axis=0) / pulse.tonnes_co2


def nscc(baseline: Trajectory, pulsed: Trajectory, country: str, prefs: PreferenceParams, pulse: PulseSpec,
         eval_year: int, discounting: str = NATIONAL) -> float:
    """NSCC of one country (US$/tCO2), unclamped"""
    if country not in baseline.isos:
        raise ConfigError(f'Unknown country {country}')
    values = nscc_vector(baseline, pulsed, prefs, pulse, eval_year, discounting)
    return float(values[baseline.isos.index(country)])


def clamp_nscc(value, bound: float = CLAMP_BOUND):
    """Bound NSCCs to [-bound, bound]"""
    clamped = np.clip(value, -bound, bound)
    return float(clamped) if np.ndim(clamped) == 0 else clamped


def clamp_count(values, bound: float = CLAMP_BOUND) -> np.ndarray:
    """Number of values strictly outside the bound, per column when values is a matrix"""
    return (np.abs(np.asarray(values, dtype=float)) > bound).sum(axis=0)


def sum_nscc(values: Sequence) -> float:
    return fsum(float(value) for value in values)


def pulse_pair(world: World, pulse: PulseSpec) -> tuple:
    return run_world(world), run_world(world, pulse)


def global_scc_single_region(world: World, prefs: PreferenceParams, pulse: PulseSpec, eval_year: int,
                             bound: float = CLAMP_BOUND) -> float:
    """SCC of the world collapsed into one region, to compare with the sum of national values

    Args:
        world (World): multi-country world
        prefs (PreferenceParams): preferences
        pulse (PulseSpec): pulse
        eval_year (int): evaluation year
        bound (float, optional): clamp bound. Defaults to 200.

    Returns:
        float: single-region SCC (US$/tCO2)
    """
    single = world.collapse()
    baseline, pulsed = pulse_pair(single, pulse)
    return clamp_nscc(float(nscc_vector(baseline, pulsed, prefs, pulse, eval_year)[0]), bound)


@dataclass(frozen=True)
class SccResult:
    isos: tuple
    nscc: np.ndarray
    global_sum: float
    deterministic_global_sum: float
    single_region_scc: float
    mode: str
    prefs: PreferenceParams
    pulse: PulseSpec
    eval_year: int
    seed: int = None
    draw_count: int = 0
    failed_draws: int = 0
    nscc_mean: np.ndarray = None
    stats: pd.DataFrame = None
    draws: pd.DataFrame = None
    clamp_counts: np.ndarray = field(default=None)

    @property
    def headline(self) -> np.ndarray:
        """SCC_n^u in uncertainty mode, SCC_n otherwise"""
        return self.nscc_mean if self.mode == 'uncertainty' else self.nscc

    @property
    def total_clamps(self) -> int:
        return 0 if self.clamp_counts is None else int(np.sum(self.clamp_counts))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({'iso': list(self.isos), 'deterministic': self.nscc})
        if self.nscc_mean is not None:
            frame['uncertainty'] = self.nscc_mean
        if self.stats is not None:
            frame = frame.merge(self.stats, on='iso', how='left')
        return frame


def deterministic_scc(world: World, preferences: Sequence, pulse: PulseSpec, eval_year: int,
                      discounting: str = NATIONAL, bound: float = CLAMP_BOUND, single_region: bool = True,
                      logger: Logger = None) -> list:
    """Deterministic NSCCs for a preference grid from one baseline and pulse pair

    Args:
        world (World): world to run
        preferences (Sequence): PreferenceParams grid
        pulse (PulseSpec): pulse
        eval_year (int): evaluation year
        discounting (str, optional): discounting mode. Defaults to 'national'.
        bound (float, optional): clamp bound. Defaults to 200.
        single_region (bool, optional): also run the collapsed world. Defaults to True.
        logger (Logger, optional): logger. Defaults to None.

    Returns:
        list: SccResult per preference pair
    """
    log = logger or get_logger('natscc')
    baseline, pulsed = pulse_pair(world, pulse)
    single = None
    if single_region:
        single = world.collapse()
        single_pair = pulse_pair(single, pulse)
    results = []
    for prefs in preferences:
        raw = nscc_vector(baseline, pulsed, prefs, pulse, eval_year, discounting)
        clamps = clamp_count(raw, bound)
        if clamps.any():
            log.warning('NSCC clamped to +/-%s for %s in %s (%s)', bound,
                        ', '.join(np.array(world.isos)[clamps > 0]), eval_year, prefs.label)
        values = clamp_nscc(raw, bound)
        total = sum_nscc(values)
        region = None
        if single is not None:
            region = clamp_nscc(float(nscc_vector(*single_pair, prefs, pulse, eval_year, discounting)[0]), bound)
        results.append(SccResult(world.isos, values, total, total, region, 'deterministic', prefs, pulse, eval_year,
                                 clamp_counts=clamps))
    return results
