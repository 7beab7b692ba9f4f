"""Shared fixtures: calibrated parameter presets and preference levels.

``pan`` is the yearly Heston-type calibration; ``barberis`` is the monthly
mean-reverting-return calibration. Both match the CLI presets of the same
name, so values frozen here double as regression pins for the presets.
"""

from __future__ import annotations

import pytest

from stochopt import (
    BlackScholesParams,
    HestonParams,
    KimOmbergParams,
    Preferences,
)


@pytest.fixture
def crra5() -> Preferences:
    return Preferences(gamma=5.0)


@pytest.fixture
def crra2() -> Preferences:
    return Preferences(gamma=2.0)


@pytest.fixture
def pan() -> HestonParams:
    return HestonParams(
        r=0.033, mu_s=4.4, lambda_y=5.3, y_bar=0.024, sigma_y=0.38, rho=-0.57
    )


@pytest.fixture
def barberis() -> KimOmbergParams:
    return KimOmbergParams(
        r=0.0014,
        sigma=0.0436,
        lambda_y=0.0226,
        y_bar=0.0034,
        sigma_y=0.0008,
        rho=-0.935,
    )


@pytest.fixture
def bs() -> BlackScholesParams:
    return BlackScholesParams(r=0.01, mu=0.08, sigma=0.2)
