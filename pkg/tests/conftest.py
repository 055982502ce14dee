
# Shared fixtures: machine specs, small synthetic datasets, and a clean
# Settings instance per test.

import numpy as np
import pytest

from perfweld.analytical.model import AnalyticalConfig
from perfweld.bench.synthetic import Perturbation, SyntheticOracleSpec, expand_grid, gen_synthetic
from perfweld.core.config import get_settings
from perfweld.recipes.catalog import PACKAGED_MACHINES
from perfweld.schema.dataset import STENCIL_GRID_SCHEMA, Dataset, DatasetSchema
from perfweld.schema.machine import CacheLevel, MachineSpec, load_machine_spec

DESK_PATH = PACKAGED_MACHINES / "desk.json"


@pytest.fixture(autouse=True)
def _isolated_settings(tmp_path, monkeypatch):
    """Fresh settings per test; runs land under tmp_path."""
    monkeypatch.setenv("PERFWELD_RUNS_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("PERFWELD_LOG_LEVEL", "WARNING")
    monkeypatch.delenv("PERFWELD_RECIPES_DIR", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def desk() -> MachineSpec:
    return load_machine_spec(DESK_PATH)


@pytest.fixture
def desk_file_dict(desk) -> dict:
    return desk.to_file_dict()


def single_level_spec(size_elements: int, W: int = 8, beta: float = 1e-10) -> MachineSpec:
    return MachineSpec(
        cache_levels=(CacheLevel(size_elements=size_elements, beta=beta),),
        beta_mem=5e-10,
        t_c=2.5e-10,
        W=W,
    )


def stencil_grid_dataset(
    machine: MachineSpec,
    sizes=(8, 16, 24, 32, 40),
    perturbation: Perturbation | None = None,
    sigma: float = 0.0,
    seed: int = 0,
) -> Dataset:
    oracle = SyntheticOracleSpec(
        base=AnalyticalConfig(kind="stencil", machine=machine),
        perturbation=perturbation or Perturbation(),
        sigma=sigma,
        seed=seed,
    )
    points = expand_grid(("I", "J", "K"), {"I": list(sizes), "J": list(sizes), "K": list(sizes)})
    return gen_synthetic(STENCIL_GRID_SCHEMA, points, oracle)


@pytest.fixture
def exact_stencil_ds(desk) -> Dataset:
    """125 grids whose responses equal the analytical model."""
    return stencil_grid_dataset(desk)


@pytest.fixture
def perturbed_stencil_ds(desk) -> Dataset:
    return stencil_grid_dataset(
        desk,
        perturbation=Perturbation(intercept=1.5, linear={"I": 0.3}, quadratic={"K": 0.1}),
        sigma=0.02,
        seed=5,
    )


@pytest.fixture
def smooth_ds() -> Dataset:
    """200 random rows of a smooth positive function of two features."""
    rng = np.random.default_rng(1234)
    X = rng.uniform(0.0, 4.0, size=(200, 2))
    y = 2.0 + np.sin(X[:, 0]) + 0.5 * X[:, 1] ** 2
    return Dataset(DatasetSchema(feature_names=("x0", "x1")), X, y)
