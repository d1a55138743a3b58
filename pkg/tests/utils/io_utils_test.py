import json
import logging
import os

import pytest

import compression_analyzer.utils.io_utils as io_utils


def test_make_run_dir(tmp_path):
    run_dir = io_utils.make_run_dir('verify-split', str(tmp_path))
    assert os.path.isdir(run_dir)
    name = os.path.basename(run_dir)
    assert name.startswith('pyprune_verify_split_')
    date, time = name.split('_')[-2:]
    assert len(date) == 8 and date.isdigit()
    assert len(time) == 4 and time.isdigit()


def test_make_logger(tmp_path):
    logger = io_utils.make_logger(str(tmp_path), logger_name='io_utils_test.log', log_level=10)
    logger.debug('first message')
    assert logger.level == 10
    assert not logger.propagate
    # a second call replaces the file handler
    other_dir = tmp_path / 'other'
    other_dir.mkdir()
    logger = io_utils.make_logger(str(other_dir), logger_name='io_utils_test.log')
    assert len(logger.handlers) == 1
    logger.info('second message')
    for handler in logger.handlers:
        handler.flush()
    with open(str(tmp_path / 'io_utils_test.log'), encoding='utf-8') as log_file:
        assert 'first message' in log_file.read()
    with open(str(other_dir / 'io_utils_test.log'), encoding='utf-8') as log_file:
        text = log_file.read()
    assert 'second message' in text
    assert 'first message' not in text
    logging.getLogger('io_utils_test.log').handlers[0].close()


def test_config_hash():
    first = io_utils.config_hash({'model': {'c': .1}, 'run': {'seed': 0}})
    second = io_utils.config_hash({'run': {'seed': 0}, 'model': {'c': .1}})
    assert first == second
    assert len(first) == 40
    assert io_utils.config_hash({'run': {'seed': 1}, 'model': {'c': .1}}) != first


def test_jsonl_round_trip(tmp_path):
    path = str(tmp_path / 'rows.jsonl')
    rows = [{'b': 1, 'a': [1, 2]}, {'c': None}]
    io_utils.write_jsonl(rows, path)
    with open(path, 'a', encoding='utf-8') as jsonl_file:
        jsonl_file.write('\n')
    assert io_utils.read_jsonl(path) == rows


def test_non_finite_floats_written_as_null(tmp_path):
    payload = {'kappa': float('nan'), 'aucs': [.5, float('inf')], 'fold': (float('-inf'), 1)}
    path = str(tmp_path / 'report.json')
    io_utils.write_json(payload, path)
    with open(path, encoding='utf-8') as json_file:
        text = json_file.read()
    assert 'NaN' not in text and 'Infinity' not in text
    assert json.loads(text) == {'kappa': None, 'aucs': [.5, None], 'fold': [None, 1]}
    jsonl_path = str(tmp_path / 'rows.jsonl')
    io_utils.write_jsonl([{'auc': float('nan')}], jsonl_path)
    assert io_utils.read_jsonl(jsonl_path) == [{'auc': None}]


def test_write_json_sorted(tmp_path):
    path = str(tmp_path / 'report.json')
    io_utils.write_json({'b': 1, 'a': 2}, path)
    with open(path, encoding='utf-8') as json_file:
        text = json_file.read()
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith('}\n')


def test_read_token_corpus(tmp_path):
    path = tmp_path / 'corpus.txt'
    path.write_text('he ran home\n\n  she  hit a home run \n', encoding='utf-8')
    assert io_utils.read_token_corpus(str(path)) == [
        ['he', 'ran', 'home'],
        ['she', 'hit', 'a', 'home', 'run'],
    ]


def test_read_token_corpus_missing(tmp_path):
    with pytest.raises(IOError):
        io_utils.read_token_corpus(str(tmp_path / 'none.txt'))
