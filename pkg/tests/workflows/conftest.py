import os

import pytest

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.metadata as metadata
import compression_analyzer.workflows.train_wf as train_wf


def make_config(data_dir, run_dir, overrides=None):
    """
    Fixture config with the run directory set the way pyprune.py sets it.
    """
    os.makedirs(run_dir, exist_ok=True)
    constants.RUN_PATH = run_dir
    return metadata.RunConfig(os.path.join(data_dir, 'config.ini'), overrides)


@pytest.fixture(scope="session")
def model_dir(tmpdir_factory, data_dir):
    """
    Directory holding model_full.json, trained on the fixture judgments.
    """
    run_dir = str(tmpdir_factory.mktemp("model_dir"))
    saved = {name: getattr(constants, name) for name in dir(constants) if name.isupper()}
    train_wf.train(make_config(data_dir, run_dir), variant='full')
    for name, value in saved.items():
        setattr(constants, name, value)
    return run_dir


@pytest.fixture(scope="session")
def model_path(model_dir):
    return os.path.join(model_dir, 'model_full.json')


@pytest.fixture
def config_factory(data_dir, tmp_path):
    """
    Builds fixture configs writing to tmp_path/<name>.
    """
    def factory(name='run', overrides=None):
        return make_config(data_dir, str(tmp_path / name), overrides)
    return factory
