import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.drift.library import make_drift


@pytest.fixture(scope='session')
def mu_s_drift():
    return make_drift('mu_s', x_max=8.0)


@pytest.fixture(scope='session')
def indicator_drift():
    return make_drift('indicator_01')


@pytest.fixture(scope='session')
def hat_drift():
    return make_drift('hat')


@pytest.fixture(scope='session')
def zero_drift():
    return make_drift('zero')


@pytest.fixture(autouse=True)
def _single_worker(monkeypatch):
    monkeypatch.setenv('SDLAB_WORKERS', '1')
    monkeypatch.setenv('SDLAB_CHUNK_SIZE', '64')
