"""Multi-gas emissions from gross output with exponentially declining intensities, and the marginal pulse."""
from dataclasses import dataclass, fields
from typing import Iterable

import numpy as np
import pandas as pd

from natscc.errors import EmissionsError


GASES = ('co2', 'ch4', 'n2o', 'sf6', 'so2')
TCO2_PER_TC = 44.0 / 12.0
TONNES_PER_GT = 1e9
DEFAULT_PULSE_GTC = 0.001


@dataclass(frozen=True)
class EmissionsVector:
    """One value (or one array over countries) per gas: co2 GtC/yr, ch4 Mt/yr, n2o Mt/yr, sf6 kt/yr, so2 MtS/yr.
    The same container holds intensities (per US$) and intensity change rates (1/yr).
    """
    co2: np.ndarray
    ch4: np.ndarray
    n2o: np.ndarray
    sf6: np.ndarray
    so2: np.ndarray

    @classmethod
    def from_mapping(cls, values) -> 'EmissionsVector':
        return cls(**{gas: np.asarray(values[gas], dtype=float) for gas in GASES})

    def as_dict(self) -> dict:
        return {item.name: getattr(self, item.name) for item in fields(self)}

    def total(self) -> 'EmissionsVector':
        """Sum over countries"""
        return EmissionsVector(**{gas: float(np.sum(value)) for gas, value in self.as_dict().items()})


@dataclass(frozen=True)
class PulseSpec:
    """Extra CO2 (GtC) emitted in one year. A zero pulse only serves the baseline identity check, NSCCs need a
    positive one"""
    year: int
    size: float = DEFAULT_PULSE_GTC
    gas: str = 'co2'

    def __post_init__(self):
        if self.gas != 'co2':
            raise EmissionsError(f'Only co2 pulses are supported, got {self.gas}')
        if self.size < 0:
            raise EmissionsError('Pulse size must be non-negative')

    @property
    def tonnes_co2(self) -> float:
        return self.size * TONNES_PER_GT * TCO2_PER_TC


def compute_emissions(gross_output, intensity: EmissionsVector) -> EmissionsVector:
    """Per gas, emission = intensity * gross output

    Args:
        gross_output (np.ndarray): gross output per country (US$/yr)
        intensity (EmissionsVector): intensities per US$

    Raises:
        EmissionsError: a negative intensity

    Returns:
        EmissionsVector: emissions per country
    """
    values = intensity.as_dict()
    for gas, value in values.items():
        if np.any(np.asarray(value) < 0):
            raise EmissionsError(f'Negative {gas} intensity')
    return EmissionsVector(**{gas: value * gross_output for gas, value in values.items()})


def advance_intensity(intensity: EmissionsVector, rates: EmissionsVector) -> EmissionsVector:
    """intensity(t+1) = intensity(t) * exp(rate(t))"""
    return EmissionsVector(**{gas: value * np.exp(getattr(rates, gas)) for gas, value in intensity.as_dict().items()})


def emissions_path(years: Iterable) -> pd.DataFrame:
    """Zero emissions path indexed by year with one column per gas"""
    years = list(years)
    return pd.DataFrame(0.0, index=pd.Index(years, name='year'), columns=list(GASES))


def inject_pulse(path: pd.DataFrame, pulse: PulseSpec) -> pd.DataFrame:
    """Copy of path with the pulse added to one cell

    Args:
        path (pd.DataFrame): per-year emissions indexed by year
        pulse (PulseSpec): pulse to add

    Raises:
        EmissionsError: pulse year outside the path

    Returns:
        pd.DataFrame: pulsed copy
    """
    if pulse.year not in path.index:
        raise EmissionsError(f'Pulse year {pulse.year} outside emissions path {path.index.min()}-{path.index.max()}')
    pulsed = path.copy()
    pulsed.loc[pulse.year, pulse.gas] += pulse.size
    return pulsed
