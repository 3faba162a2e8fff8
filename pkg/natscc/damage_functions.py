"""Aggregate damage functions (fraction of GDP lost at warming T, positive = damage), their model average, and the
income-elasticity reweighting of damages.

The default coefficients are placeholders of the right order of magnitude, every coefficient is a config input.
"""
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from natscc.errors import ConfigError, ImpactError


WEITZMAN_EXPONENT = 6.754
CONTINUITY_TOLERANCE = 1e-9
WEIGHT_TOLERANCE = 1e-9

FUNCTIONAL_FORMS = {
    'tol_parabolic': 'a1*T + a2*T^2',
    'weitzman6': 'a1*T^2 + a2*T^6',
    'weitzman7': 'a1*T^2 + a2*T^7',
    'newbold_marten': '0 (T < b); a1*(T - b) (T >= b)',
    'nordhaus': 'a1*T^2',
    'hope': 'a1*T',
    'vdp_withagen': 'a1*(exp(T) - 1)',
    'tol_linear': 'a1*T (T < b); a2 + a3*T (T >= b)',
    'barrage_nordhaus': 'a1*T^2',
    'howard_sterner': 'a1*T^2',
    'weitzman2012': 'a1*T^2 + a2*T^6.754',
    'nordhaus_yang': 'a1*T^2',
}
FORMS = tuple(FUNCTIONAL_FORMS)
BMA_FORMS = FORMS[:8]

# placeholder coefficients, keyed by form
DEFAULT_COEFFICIENTS = {
    'tol_parabolic': {'alpha1': -0.001, 'alpha2': 0.003},
    'weitzman6': {'alpha1': 0.00239, 'alpha2': 1.98e-5},
    'weitzman7': {'alpha1': 0.00239, 'alpha2': 3.25e-6},
    'newbold_marten': {'alpha1': 0.01, 'beta': 1.0},
    'nordhaus': {'alpha1': 0.00236},
    'hope': {'alpha1': 0.005},
    'vdp_withagen': {'alpha1': 0.0015},
    'tol_linear': {'alpha1': -0.002, 'alpha2': -0.012, 'alpha3': 0.01, 'beta': 1.0},
    'barrage_nordhaus': {'alpha1': 0.003467},
    'howard_sterner': {'alpha1': 0.00595},
    'weitzman2012': {'alpha1': 0.00239, 'alpha2': 5.07e-6},
    'nordhaus_yang': {'alpha1': 0.0021},
}


@dataclass(frozen=True)
class DamageFunctionSpec:
    form: str
    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha3: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.form not in FUNCTIONAL_FORMS:
            raise ConfigError(f'Unknown damage function form: {self.form}')
        if self.form == 'tol_linear':
            left = self.alpha1 * self.beta
            right = self.alpha2 + self.alpha3 * self.beta
            if abs(left - right) > CONTINUITY_TOLERANCE * max(1.0, abs(left), abs(right)):
                raise ConfigError(f'tol_linear is discontinuous at beta={self.beta}: '
                                  f'alpha1*beta={left} but alpha2 + alpha3*beta={right}')

    @property
    def functional_form(self) -> str:
        return FUNCTIONAL_FORMS[self.form]

    def scaled(self, factor: float) -> 'DamageFunctionSpec':
        """Every alpha multiplied by factor. Keeps tol_linear continuous"""
        return replace(self, alpha1=self.alpha1 * factor, alpha2=self.alpha2 * factor, alpha3=self.alpha3 * factor)


def default_spec(form: str, overrides: Mapping = None) -> DamageFunctionSpec:
    if form not in DEFAULT_COEFFICIENTS:
        raise ConfigError(f'Unknown damage function form: {form}')
    return DamageFunctionSpec(form, **{**DEFAULT_COEFFICIENTS[form], **(overrides or {})})


def aggregate_damage_function(spec: DamageFunctionSpec, t):
    """Evaluate an aggregate damage function

    Args:
        spec (DamageFunctionSpec): form and coefficients
        t (float|np.ndarray): warming (C)

    Raises:
        ImpactError: negative warming for the fractional-power form

    Returns:
        float|np.ndarray: damage as a fraction of GDP
    """
    t = np.asarray(t, dtype=float)
    a1, a2, a3, beta = spec.alpha1, spec.alpha2, spec.alpha3, spec.beta
    form = spec.form
    if form == 'tol_parabolic':
        value = a1 * t + a2 * t ** 2
    elif form == 'weitzman6':
        value = a1 * t ** 2 + a2 * t ** 6
    elif form == 'weitzman7':
        value = a1 * t ** 2 + a2 * t ** 7
    elif form == 'newbold_marten':
        value = np.where(t < beta, 0.0, a1 * (t - beta))
    elif form == 'hope':
        value = a1 * t
    elif form == 'vdp_withagen':
        value = a1 * np.expm1(t)
    elif form == 'tol_linear':
        value = np.where(t < beta, a1 * t, a2 + a3 * t)
    elif form == 'weitzman2012':
        if np.any(t < 0):
            raise ImpactError('weitzman2012 is undefined for negative warming')
        value = a1 * t ** 2 + a2 * t ** WEITZMAN_EXPONENT
    else:
        # nordhaus, barrage_nordhaus, howard_sterner, nordhaus_yang
        value = a1 * t ** 2
    return float(value) if value.ndim == 0 else value


def bma_damage(specs: Sequence, weights: Sequence, t):
    """Weighted mean of several damage functions

    Args:
        specs (Sequence): DamageFunctionSpec per form
        weights (Sequence): non-negative weights summing to one
        t (float|np.ndarray): warming (C)

    Raises:
        ConfigError: mismatched lengths, negative weights or weights not summing to one

    Returns:
        float|np.ndarray: averaged damage fraction
    """
    weights = [float(weight) for weight in weights]
    if len(specs) != len(weights) or not specs:
        raise ConfigError('Model averaging needs one weight per damage function')
    if min(weights) < 0:
        raise ConfigError('Model averaging weights must be non-negative')
    if abs(sum(weights) - 1.0) > WEIGHT_TOLERANCE:
        raise ConfigError(f'Model averaging weights sum to {sum(weights)}, not 1')
    total = 0.0
    for spec, weight in zip(specs, weights):
        if weight > 0:
            total = total + weight * aggregate_damage_function(spec, t)
    return total


def apply_income_elasticity(damage, income, world_income, elasticity: float):
    """Reweight damages by (income / world income) ** elasticity

    Args:
        damage (float|np.ndarray): damages (US$)
        income (float|np.ndarray): national per-capita income
        world_income (float): world per-capita income
        elasticity (float): income elasticity

    Raises:
        ImpactError: non-positive incomes

    Returns:
        float|np.ndarray: reweighted damages
    """
    income = np.asarray(income, dtype=float)
    if np.any(income <= 0) or world_income <= 0:
        raise ImpactError('Income elasticity needs positive incomes')
    if elasticity == 0:
        return damage
    return damage * (income / world_income) ** elasticity
