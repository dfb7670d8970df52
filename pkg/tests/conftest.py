import json

import numpy as np
import pytest

from process_bo.app import create_app
from process_bo.config import set_testing
from process_bo.resources import ConstraintSpec, Dataset, Objective

from .helpers import small_fdm_document


@pytest.fixture()
def session_path(tmp_path):
    return str(tmp_path / "campaign.json")


@pytest.fixture()
def app(session_path):
    set_testing(True)
    app = create_app(session_path)

    yield app


@pytest.fixture()
def client(app):
    return app.test_client()


@pytest.fixture()
def linear_objective():
    return Objective("sum", lambda x: x.sum(axis=1), description="x1 + x2")


@pytest.fixture()
def upper_spec():
    return ConstraintSpec(0.0, name="c")


@pytest.fixture()
def small_dataset():
    inputs = [[0.1, 0.2], [0.5, 0.9], [0.8, 0.3], [0.3, 0.6]]
    observations = [[np.sin(3 * x) + y for x, y in inputs]]
    return Dataset(inputs, np.array(observations).T)


@pytest.fixture()
def fdm_config_path(tmp_path):
    path = tmp_path / "campaign.config.json"
    path.write_text(json.dumps(small_fdm_document()), encoding="utf-8")
    return str(path)
