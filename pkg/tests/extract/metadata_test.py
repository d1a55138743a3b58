import os

import pytest

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.metadata as metadata
from compression_analyzer.utils.errors import InvalidInputError


def write_config(tmp_path, text):
    path = tmp_path / 'config.ini'
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_defaults_only():
    config = metadata.RunConfig()
    assert config.get('model', 'c') == .1
    assert config.get('model', 'c_grid') == (0.001, 0.01, 0.1, 1., 10., 100.)
    assert config.get('sampler', 'budget_range') == (50, 100)
    assert config.path('judgments') is None
    assert constants.CONFIG_HASH == config.config_hash


def test_read_config(data_dir):
    config = metadata.RunConfig(os.path.join(data_dir, 'config.ini'))
    assert config.path('judgments') == os.path.join(data_dir, 'judgments.jsonl')
    assert config.get('run', 'seed') == 3
    assert config.get('model', 'folds') == 3
    assert constants.SEED == 3
    assert constants.NBR_RESAMPLES == 200
    assert constants.CONFIG_FILE == os.path.join(data_dir, 'config.ini')


def test_overrides_win(data_dir):
    config = metadata.RunConfig(
        os.path.join(data_dir, 'config.ini'),
        overrides={('run', 'seed'): 11, ('model', 'c'): None},
    )
    assert config.get('run', 'seed') == 11
    assert config.get('model', 'c') == .1
    assert constants.SEED == 11


def test_config_hash_changes(data_dir):
    path = os.path.join(data_dir, 'config.ini')
    first = metadata.RunConfig(path).config_hash
    assert metadata.RunConfig(path).config_hash == first
    assert metadata.RunConfig(path, overrides={('run', 'seed'): 4}).config_hash != first


def test_unknown_key(tmp_path):
    path = write_config(tmp_path, "[model]\nlearning_rate = 1\n")
    with pytest.raises(InvalidInputError):
        metadata.RunConfig(path)


def test_unparsable_value(tmp_path):
    path = write_config(tmp_path, "[model]\nfolds = five\n")
    with pytest.raises(InvalidInputError):
        metadata.RunConfig(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(IOError):
        metadata.RunConfig(str(tmp_path / 'no_config.ini'))


def test_missing_path(tmp_path):
    path = write_config(tmp_path, "[paths]\njudgments = nowhere.jsonl\n")
    with pytest.raises(IOError):
        metadata.RunConfig(path)


def test_required_path():
    with pytest.raises(InvalidInputError):
        metadata.RunConfig(required_paths=('judgments',))


@pytest.mark.parametrize('section,key,value', [
    ('model', 'normalizer', 'log_odds'),
    ('sampler', 'budget_range', (100, 50)),
    ('evaluate', 'threshold', 1.5),
    ('model', 'folds', 1),
])
def test_invalid_settings(section, key, value):
    with pytest.raises(InvalidInputError):
        metadata.RunConfig(overrides={(section, key): value})


def test_copy_config_to_output(data_dir, tmp_path):
    config = metadata.RunConfig(os.path.join(data_dir, 'config.ini'))
    config.copy_config_to_output(str(tmp_path))
    assert os.path.isfile(os.path.join(str(tmp_path), 'config.ini'))


def test_as_dict(data_dir):
    resolved = metadata.RunConfig(os.path.join(data_dir, 'config.ini')).as_dict()
    assert resolved['run'] == {'seed': 3}
    assert resolved['sampler']['budget_range'] == [50, 100]
    assert resolved['paths']['arpa'] is None
