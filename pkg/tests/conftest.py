"""Shared fixtures: packaged parameter sets and synthetic samples."""

import json
from pathlib import Path

import numpy as np
import pytest

import gtsfit
from gtsfit.model import GtsParams
from gtsfit.sampler import SampleConfig, sample_gts

FIXTURES = Path(gtsfit.__file__).parent / "fixtures"


def load_gts(name: str) -> GtsParams:
    with open(FIXTURES / name, encoding="utf-8") as fh:
        d = json.load(fh)
    return GtsParams(*(d[k] for k in (
        "mu", "beta_plus", "beta_minus", "alpha_plus", "alpha_minus",
        "lambda_plus", "lambda_minus",
    )))


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def sp500_params():
    return load_gts("gts_sp500.json")


@pytest.fixture(scope="session")
def spy_params():
    return load_gts("gts_spy.json")


@pytest.fixture(scope="session")
def btc_params():
    return load_gts("gts_btc.json")


@pytest.fixture(scope="session")
def btc_recentered_params():
    return load_gts("gts_btc_recentered.json")


@pytest.fixture(scope="session")
def summary_stats_fixture():
    with open(FIXTURES / "summary_stats.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def spy_sample_600(spy_params):
    return sample_gts(spy_params, SampleConfig(n=600, seed=5))


@pytest.fixture(scope="session")
def spy_sample_3000(spy_params):
    return sample_gts(spy_params, SampleConfig(n=3000, seed=42))


@pytest.fixture()
def rng():
    return np.random.default_rng(20260816)
