import configparser
import logging
import os
import shutil

import compression_analyzer.extract.constants as constants
import compression_analyzer.utils.io_utils as io_utils
from compression_analyzer.utils.errors import InvalidInputError

PATH_KEYS = (
    'judgments',
    'conllu',
    'arpa',
    'lm_corpus',
    'collocations',
    'colloc_corpus',
    'interactions',
    'model',
    'gold',
    'external',
)


def _float_list(value):
    return tuple(float(v) for v in value.split(',') if v.strip())


def _int_list(value):
    return tuple(int(v) for v in value.split(',') if v.strip())


# (section, key) -> (parser, name in constants)
SETTINGS = {
    ('run', 'seed'): (int, 'SEED'),
    ('model', 'c'): (float, 'C'),
    ('model', 'c_grid'): (_float_list, 'C_GRID'),
    ('model', 'folds'): (int, 'NBR_FOLDS'),
    ('model', 'tolerance'): (float, 'TOLERANCE'),
    ('model', 'max_iter'): (int, 'MAX_ITER'),
    ('model', 'normalizer'): (str, 'NORMALIZER'),
    ('evaluate', 'threshold'): (float, 'THRESHOLD'),
    ('evaluate', 'resamples'): (int, 'NBR_RESAMPLES'),
    ('sampler', 'budget_range'): (_int_list, 'BUDGET_RANGE'),
    ('sampler', 'samples'): (int, 'NBR_SAMPLES'),
    ('sampler', 'min_source_chars'): (int, 'MIN_SOURCE_CHARS'),
    ('lm', 'order'): (int, 'LM_ORDER'),
    ('lm', 'discount'): (float, 'DISCOUNT'),
    ('collocations', 'window'): (int, 'COLLOC_WINDOW'),
    ('collocations', 'min_count'): (int, 'COLLOC_MIN_COUNT'),
}
# Defaults as shipped, before any run has written to constants
DEFAULTS = {key: getattr(constants, name) for key, (_, name) in SETTINGS.items()}


class RunConfig:

    def __init__(self, config_path=None, overrides=None, required_paths=()):
        """
        Reads the INI config file, applies command line overrides and assigns
        the resolved values in the constants.py namespace.
        Relative paths in the [paths] section are resolved against the
        directory of the config file, path overrides against the working
        directory.

        :param str/None config_path: Path to INI file, None for defaults only
        :param dict overrides: {(section, key): value} from command line flags,
            None values are ignored. Paths use section 'paths'.
        :param tuple required_paths: Path keys the command can't run without
        """
        self.config_path = config_path
        self.paths = {key: None for key in PATH_KEYS}
        self.settings = dict(DEFAULTS)
        if config_path is not None:
            self._read_ini(config_path)
        self._apply_overrides(overrides or {})
        self._validate(required_paths)
        self.config_hash = io_utils.config_hash(self.as_dict())
        self._assign_constants()

    def _read_ini(self, config_path):
        if not os.path.isfile(config_path):
            raise IOError("Config file not found: {}".format(config_path))
        parser = configparser.ConfigParser()
        parser.read(config_path, encoding='utf-8')
        config_dir = os.path.dirname(os.path.abspath(config_path))
        for section in parser.sections():
            for key, value in parser.items(section, raw=True):
                if section == 'paths':
                    if key not in self.paths:
                        raise InvalidInputError(
                            "config [paths]: unknown key '{}'".format(key))
                    self.paths[key] = os.path.normpath(
                        os.path.join(config_dir, os.path.expanduser(value)),
                    )
                    continue
                if (section, key) not in SETTINGS:
                    raise InvalidInputError(
                        "config [{}]: unknown key '{}'".format(section, key))
                parse_value, _ = SETTINGS[(section, key)]
                try:
                    self.settings[(section, key)] = parse_value(value)
                except ValueError:
                    raise InvalidInputError(
                        "config [{}] {}: can't parse '{}'".format(section, key, value))

    def _apply_overrides(self, overrides):
        for (section, key), value in overrides.items():
            if value is None:
                continue
            if section == 'paths':
                self.paths[key] = os.path.abspath(value)
            else:
                self.settings[(section, key)] = value

    def _validate(self, required_paths):
        for key in required_paths:
            if self.paths[key] is None:
                raise InvalidInputError("no '{}' path given in config or flags".format(key))
        for key, path in self.paths.items():
            if path is not None and not os.path.exists(path):
                raise IOError("{} path doesn't exist: {}".format(key, path))
        if self.settings[('model', 'normalizer')] not in constants.NORMALIZERS:
            raise InvalidInputError("normalizer must be one of {}".format(constants.NORMALIZERS))
        budget_range = self.settings[('sampler', 'budget_range')]
        if len(budget_range) != 2 or not 1 <= budget_range[0] <= budget_range[1]:
            raise InvalidInputError(
                "budget_range must be two integers 1 <= lo <= hi, not {}".format(budget_range))
        if not 0. <= self.settings[('evaluate', 'threshold')] <= 1.:
            raise InvalidInputError("threshold must be in [0, 1]")
        if self.settings[('model', 'folds')] < 2:
            raise InvalidInputError("cross validation needs at least 2 folds")

    def _assign_constants(self):
        for key, (_, name) in SETTINGS.items():
            setattr(constants, name, self.settings[key])
        constants.CONFIG_FILE = self.config_path
        constants.CONFIG_HASH = self.config_hash

    def get(self, section, key):
        return self.settings[(section, key)]

    def path(self, key):
        return self.paths[key]

    def as_dict(self):
        """
        Resolved settings as nested dict, e.g. for the config hash and reports.

        :return dict: {'paths': {...}, section: {key: value}}
        """
        resolved = {'paths': dict(self.paths)}
        for (section, key), value in sorted(self.settings.items()):
            resolved.setdefault(section, {})[key] = list(value) \
                if isinstance(value, tuple) else value
        return resolved

    def copy_config_to_output(self, run_dir):
        """
        Copies the config file used into the run directory, next to the outputs.

        :param str run_dir: Run directory
        """
        if self.config_path is None:
            return
        shutil.copy2(self.config_path, os.path.join(run_dir, 'config.ini'))
        logging.getLogger(constants.LOG_NAME).info(
            "Config {} copied to {}".format(self.config_path, run_dir),
        )
