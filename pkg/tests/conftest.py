"""Shared fixtures."""

import pytest

from modemix.config import ProjectConfig, load_config
from modemix.dispersion import CorrectionsIndexProvider
from modemix.material import SellmeierModel, load_material
from modemix.models import WaveguideSpec


@pytest.fixture(scope="session")
def ktp() -> SellmeierModel:
    """Bundled KTP coefficients."""
    return load_material("ktp")


@pytest.fixture(scope="session")
def config() -> ProjectConfig:
    """Bundled default configuration."""
    return load_config()


@pytest.fixture(scope="session")
def model_provider(config: ProjectConfig) -> CorrectionsIndexProvider:
    """Model backend with the bundled corrections."""
    return config.model_provider()


@pytest.fixture
def small_spec() -> WaveguideSpec:
    """Default guide in a coarse, reduced box that solves in well under a second."""
    return WaveguideSpec(
        half_width_um=6.0,
        depth_extent_um=12.0,
        superstrate_um=1.0,
        step_x_um=0.2,
        step_y_um=0.2,
    )
