import logging
import os

import compression_analyzer.extract.constants as constants
import compression_analyzer.utils.io_utils as io_utils


class ReportWriter:
    """
    Writes the artifacts of a run into the run directory. Every artifact
    carries the config hash and seed of the run:
        JSON reports as top level keys, JSON lines and CSV rows as columns,
        text tables as leading comment lines.
    """
    def __init__(self, run_dir=None):
        """
        :param str/None run_dir: Output directory, constants.RUN_PATH by default
        """
        self.logger = logging.getLogger(constants.LOG_NAME)
        self.run_dir = constants.RUN_PATH if run_dir is None else run_dir
        self.provenance = {
            'config_hash': constants.CONFIG_HASH,
            'seed': constants.SEED,
        }

    def path(self, file_name):
        return os.path.join(self.run_dir, file_name)

    def write_json(self, file_name, payload):
        """
        :param str file_name: File name in the run directory
        :param dict payload: JSON serializable report
        :return str: Path written
        """
        report = dict(payload)
        report.update(self.provenance)
        path = self.path(file_name)
        io_utils.write_json(report, path)
        self.logger.info("Wrote {}".format(path))
        return path

    def write_text(self, file_name, text):
        path = self.path(file_name)
        with open(path, 'w', encoding='utf-8') as text_file:
            text_file.write('# config_hash: {}\n'.format(self.provenance['config_hash']))
            text_file.write('# seed: {}\n'.format(self.provenance['seed']))
            text_file.write(text.rstrip('\n') + '\n')
        self.logger.info("Wrote {}".format(path))
        return path

    def write_jsonl(self, file_name, rows):
        path = self.path(file_name)
        io_utils.write_jsonl(
            (dict(row, **self.provenance) for row in rows),
            path,
        )
        self.logger.info("Wrote {}".format(path))
        return path

    def write_csv(self, file_name, frame):
        """
        :param str file_name: File name in the run directory
        :param pd.DataFrame frame: Table, written without index
        :return str: Path written
        """
        frame = frame.copy()
        for key, value in self.provenance.items():
            frame[key] = value
        path = self.path(file_name)
        frame.to_csv(path, index=False)
        self.logger.info("Wrote {}".format(path))
        return path
