from datetime import datetime
import hashlib
import json
import logging
import math
import os


def make_run_dir(command, output_dir):
    """
    For a specific processing run, create a subdirectory in the output directory
    which specifies which command was run and when the processing took
    place.

    :param str command: Name of the command, e.g. 'train'
    :param str output_dir: Path to main output directory
    :return str run_dir: Path to directory where processed data is stored
    """
    now = datetime.now()
    run_dir = os.path.join(
        output_dir,
        '_'.join(['pyprune',
                  command.replace('-', '_'),
                  f"{now.year:04d}" +
                  f"{now.month:02d}" +
                  f"{now.day:02d}",
                  f"{now.hour:02d}" +
                  f"{now.minute:02d}"])
    )
    os.makedirs(run_dir, exist_ok=True)
    return run_dir


def make_logger(log_dir, logger_name='pyprune.log', log_level=20):
    """
    Creates a logger which writes to a file, not to console.

    :param str log_dir: Path to directory where log file will be written
    :param str logger_name: name of the logger instance
    :param int log_level: DEBUG=10, INFO=20, WARNING=30, ERROR=40, CRITICAL=50
    :return logging instance logger
    """
    log_path = os.path.join(log_dir, logger_name)
    log_format = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )

    logger = logging.getLogger(logger_name)
    logger.setLevel(log_level)
    logger.propagate = False
    # a second run in the same process must not keep writing to the old file
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    file_handler = logging.FileHandler(log_path)
    file_handler.setFormatter(log_format)
    file_handler.setLevel(log_level)
    logger.addHandler(file_handler)
    return logger


def config_hash(settings):
    """
    Stable hash of a settings dict. Keys are sorted so that the hash
    doesn't depend on insertion order.

    :param dict settings: JSON serializable settings
    :return str: SHA-1 hex digest
    """
    canonical = json.dumps(settings, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha1(canonical.encode('utf-8')).hexdigest()


def json_safe(value):
    """
    Replace NaN and infinite floats by None, anywhere in nested dicts,
    lists and tuples.

    :param value: JSON serializable value
    :return: Value that strict JSON can represent
    """
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    return value


def read_jsonl(path):
    """
    Read a JSON lines file. Blank lines are skipped.

    :param str path: Path to .jsonl file
    :return list rows: One dict per non-blank line
    """
    rows = []
    with open(path, encoding='utf-8') as jsonl_file:
        for line in jsonl_file:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def write_jsonl(rows, path):
    """
    :param iterable rows: JSON serializable dicts
    :param str path: Output path
    """
    with open(path, 'w', encoding='utf-8') as jsonl_file:
        for row in rows:
            jsonl_file.write(json.dumps(json_safe(row), sort_keys=True, allow_nan=False) + '\n')


def write_json(payload, path):
    """
    :param dict payload: JSON serializable dict
    :param str path: Output path
    """
    with open(path, 'w', encoding='utf-8') as json_file:
        json.dump(json_safe(payload), json_file, sort_keys=True, indent=2, allow_nan=False)
        json_file.write('\n')


def read_token_corpus(path):
    """
    Read a corpus with one whitespace-tokenized sentence per line.
    Empty lines are skipped.

    :param str path: Path to text file
    :return list corpus: List of token lists
    """
    if not os.path.isfile(path):
        raise IOError("Corpus file not found: {}".format(path))
    with open(path, encoding='utf-8') as corpus_file:
        return [line.split() for line in corpus_file if line.strip()]
