"""
Data preparation commands: LM training, collocation stats, judgment
ingestion, split verification and gold prune reachability.
"""
from dataclasses import replace
import json
import logging
import os

from tabulate import tabulate

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.corpus as corpus
import compression_analyzer.load.report as report
import compression_analyzer.transform.collocations as collocations
import compression_analyzer.transform.lm as lm
import compression_analyzer.utils.io_utils as io_utils
import compression_analyzer.workflows.resources as resources
from compression_analyzer.utils.errors import InvalidInputError


def _required(config, key):
    path = config.path(key)
    if path is None:
        raise InvalidInputError("no '{}' path given in config or flags".format(key))
    return path


def lm_train(config):
    """
    Trains the backoff n-gram model on the LM corpus and writes lm.arpa.

    :param RunConfig config: Run config with an lm_corpus path
    :return str: Path of the ARPA file
    """
    corpus_path = _required(config, 'lm_corpus')
    model = lm.train_ngram(
        io_utils.read_token_corpus(corpus_path),
        order=config.get('lm', 'order'),
        discount=config.get('lm', 'discount'),
    )
    writer = report.ReportWriter()
    arpa_path = writer.path('lm.arpa')
    lm.save_arpa(model, arpa_path)
    logging.getLogger(constants.LOG_NAME).info("Wrote {}-gram model with {} words to {}".format(
        model.order, len(model.vocabulary), arpa_path))
    writer.write_json('lm_train.json', {
        'corpus': corpus_path,
        'order': model.order,
        'discount': config.get('lm', 'discount'),
        'vocabulary': len(model.vocabulary),
    })
    return arpa_path


def colloc_build(config):
    """
    Builds offset stats from the collocation corpus, written to collocations.tsv.

    :param RunConfig config: Run config with a colloc_corpus path
    :return str: Path of the stats file
    """
    corpus_path = _required(config, 'colloc_corpus')
    stats = collocations.build_offset_stats(
        io_utils.read_token_corpus(corpus_path),
        window=config.get('collocations', 'window'),
    )
    writer = report.ReportWriter()
    stats_path = writer.path('collocations.tsv')
    collocations.save_offset_stats(stats, stats_path)
    logging.getLogger(constants.LOG_NAME).info(
        "Wrote offset stats of {} word pairs to {}".format(len(stats), stats_path))
    return stats_path


def _read_column_map(path):
    if path is None:
        return None
    if not os.path.isfile(path):
        raise IOError("Column map not found: {}".format(path))
    with open(path, encoding='utf-8') as json_file:
        column_map = json.load(json_file)
    if not isinstance(column_map, dict):
        raise InvalidInputError("{}: column map must be a JSON object".format(path))
    return column_map


def ingest(config, table_path, column_map_path=None, split=None, resplit=False):
    """
    Converts a CSV/TSV judgment release to canonical judgments.jsonl and
    reloads it, so the records are checked against their trees.
    CoNLL-U references are made absolute.

    :param RunConfig config: Run config
    :param str table_path: Release table
    :param str/None column_map_path: JSON {release column: canonical field}
    :param str/None split: Split for tables without a split column
    :param bool resplit: Reassign splits by hashed pair_id
    :return list: JudgmentRecords
    """
    table_dir = os.path.dirname(os.path.abspath(table_path))
    records = corpus.ingest_table(table_path, _read_column_map(column_map_path), split)
    records = [
        replace(record, conllu_ref=os.path.normpath(
            os.path.join(table_dir, record.conllu_ref)))
        for record in records
    ]
    if resplit:
        records = corpus.split_records(records, seed=constants.SEED)
    writer = report.ReportWriter()
    judgments_path = writer.path('judgments.jsonl')
    corpus.dump_judgments(records, judgments_path)
    records = corpus.load_judgments(judgments_path)
    logging.getLogger(constants.LOG_NAME).info(
        "Wrote {} canonical judgments to {}".format(len(records), judgments_path))
    return records


def verify_split(config):
    """
    Checks that no pair is in both splits and reports corpus statistics.
    Writes split_report.json and split_report.txt.

    :param RunConfig config: Run config with a judgments path
    :return dict: Split report
    """
    records, treebank = resources.load_records(config)
    split_report = corpus.verify_split(records)
    statistics = corpus.corpus_statistics(records, treebank)
    if not split_report['test_workers_in_train']:
        logging.getLogger(constants.LOG_NAME).warning(
            "Test workers without train judgments: {}".format(
                ', '.join(split_report['test_workers_missing_from_train'])))
    writer = report.ReportWriter()
    payload = {'split': split_report, 'statistics': statistics}
    writer.write_json('split_report.json', payload)
    rows = [
        [split,
         str(statistics[split]['judgments']),
         str(statistics[split]['pairs']),
         str(statistics[split]['sentences']),
         '{:.1f}/{:.1f}'.format(100 * statistics[split]['class_balance']['no'],
                                100 * statistics[split]['class_balance']['yes']),
         '{:.3f} ({:.3f})'.format(statistics[split]['compression_rate_mean'],
                                  statistics[split]['compression_rate_std'])]
        for split in constants.SPLITS
    ]
    writer.write_text('split_report.txt', tabulate(
        rows,
        headers=['Split', 'Judgments', 'Pairs', 'Sentences', 'No/yes %', 'CR mean (std)'],
        tablefmt='simple',
        disable_numparse=True,
    ))
    return payload


def reachability(config):
    """
    Fraction of gold compressions reachable by prunes, written to
    reachability.json.

    :param RunConfig config: Run config with a gold path
    :return dict: Reachability report
    """
    gold_path = _required(config, 'gold')
    treebank = corpus.Treebank(os.path.dirname(gold_path))
    reachability_report = corpus.reachability_report(
        corpus.load_gold_pairs(gold_path),
        treebank,
    )
    logging.getLogger(constants.LOG_NAME).info(
        "{reachable} of {pairs} gold compressions reachable by prunes".format(
            **reachability_report))
    report.ReportWriter().write_json('reachability.json', reachability_report)
    return reachability_report
