"""
Judgment datasets and gold compression corpora.

Judgments are stored as JSON lines, one judgment per line, with the fields
    pair_id, sentence_id, conllu_ref, kept, pruned_vertex, worker_id, label, split
and an optional chain (pruned vertices in order) for multi-prune pairs.
conllu_ref points to a CoNLL-U file, relative to the judgment file, either
as '<file>#<sent_id>' or as '<file>' with the record's sentence_id.
"""
from dataclasses import dataclass, replace
import hashlib
import json
import logging
import os
import re

from natsort import natsorted
import numpy as np
import pandas as pd

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.deptree as deptree
import compression_analyzer.utils.io_utils as io_utils
from compression_analyzer.utils.errors import (
    IntegrityError,
    InvalidOperationError,
    SchemaError,
    SplitViolationError,
)

YES_LABELS = {'1', 'yes', 'true', 'y'}
NO_LABELS = {'0', 'no', 'false', 'n'}


@dataclass(frozen=True)
class JudgmentRecord:
    pair_id: str
    sentence_id: str
    conllu_ref: str
    kept: tuple
    pruned_vertex: int
    worker_id: str
    label: int
    split: str
    chain: tuple = None

    def as_dict(self):
        row = {
            'pair_id': self.pair_id,
            'sentence_id': self.sentence_id,
            'conllu_ref': self.conllu_ref,
            'kept': None if self.kept is None else list(self.kept),
            'pruned_vertex': self.pruned_vertex,
            'worker_id': self.worker_id,
            'label': self.label,
            'split': self.split,
        }
        if self.chain is not None:
            row['chain'] = list(self.chain)
        return row


@dataclass(frozen=True)
class GoldPair:
    conllu_ref: str
    compression_text: str
    sentence_id: str = None


class Treebank:

    def __init__(self, base_dir='.'):
        """
        Lazily loaded CoNLL-U files, cached by path.

        :param str base_dir: Directory relative references are resolved against
        """
        self.base_dir = base_dir
        self._files = {}

    def _resolve(self, file_ref):
        if os.path.isabs(file_ref):
            return file_ref
        return os.path.normpath(os.path.join(self.base_dir, file_ref))

    def trees(self, file_ref):
        """
        :param str file_ref: CoNLL-U path
        :return dict: {sentence_id: DepTree} in file order
        """
        path = self._resolve(file_ref)
        if path not in self._files:
            if not os.path.isfile(path):
                raise IOError("CoNLL-U file not found: {}".format(path))
            trees = {}
            for tree in deptree.read_conllu(path):
                if tree.sentence_id in trees:
                    raise IntegrityError("{}: duplicate sent_id {}".format(path, tree.sentence_id))
                trees[tree.sentence_id] = tree
            logging.getLogger(constants.LOG_NAME).info(
                "Loaded {} trees from {}".format(len(trees), path))
            self._files[path] = trees
        return self._files[path]

    def tree(self, conllu_ref, sentence_id=None):
        """
        :param str conllu_ref: '<file>#<sent_id>' or '<file>'
        :param str sentence_id: Used when the reference has no '#<sent_id>'
        :return DepTree: Referenced tree
        """
        file_ref, _, ref_id = conllu_ref.partition('#')
        sentence_id = ref_id or sentence_id
        trees = self.trees(file_ref)
        if sentence_id not in trees:
            raise IntegrityError("sentence {} not found in {}".format(sentence_id, file_ref))
        return trees[sentence_id]


def _int_list(value, record_number, field):
    if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SchemaError(record_number, "{} must be a list of integers".format(field))
    return tuple(value)


def record_from_row(row, record_number):
    """
    :param dict row: Parsed JSON object
    :param int record_number: 1-based record number for error messages
    :return JudgmentRecord: Record with normalized types
    :raise SchemaError: On missing, unknown or badly typed fields
    """
    if not isinstance(row, dict):
        raise SchemaError(record_number, "record must be a JSON object")
    missing = [field for field in constants.JUDGMENT_FIELDS if field not in row]
    if missing:
        raise SchemaError(record_number, "missing fields {}".format(', '.join(missing)))
    unknown = set(row) - set(constants.JUDGMENT_FIELDS) - {'chain'}
    if unknown:
        raise SchemaError(record_number, "unknown fields {}".format(', '.join(sorted(unknown))))
    for field in ('pair_id', 'sentence_id', 'conllu_ref', 'worker_id'):
        if not isinstance(row[field], (str, int)) or isinstance(row[field], bool) \
                or str(row[field]) == '':
            raise SchemaError(record_number, "{} must be a non-empty string".format(field))
    if row['label'] not in (0, 1) or isinstance(row['label'], (bool, float)):
        raise SchemaError(record_number, "label must be 0 or 1")
    if row['split'] not in constants.SPLITS:
        raise SchemaError(record_number, "split must be one of {}".format(constants.SPLITS))
    kept = None if row['kept'] is None else _int_list(row['kept'], record_number, 'kept')
    pruned_vertex = row['pruned_vertex']
    if pruned_vertex is not None and (
            not isinstance(pruned_vertex, int) or isinstance(pruned_vertex, bool)):
        raise SchemaError(record_number, "pruned_vertex must be an integer or null")
    if kept is None and pruned_vertex is None:
        raise SchemaError(record_number, "one of kept and pruned_vertex is needed")
    chain = row.get('chain')
    if chain is not None:
        chain = _int_list(chain, record_number, 'chain')
    return JudgmentRecord(
        pair_id=str(row['pair_id']),
        sentence_id=str(row['sentence_id']),
        conllu_ref=str(row['conllu_ref']),
        kept=kept,
        pruned_vertex=pruned_vertex,
        worker_id=str(row['worker_id']),
        label=int(row['label']),
        split=row['split'],
        chain=chain,
    )


def record_edits(record, tree):
    """
    Prune chain behind a record: the single prune, the stored chain or the
    canonical chain of the kept set.

    :param JudgmentRecord record: Judgment
    :param DepTree tree: Its source tree
    :return tuple: PruneEdits
    """
    if record.pruned_vertex is not None:
        return (deptree.prune(tree, tree.indices, record.pruned_vertex),)
    if record.chain is not None:
        return deptree.apply_chain(tree, record.chain).chain
    return deptree.canonical_chain(tree, record.kept)


def record_kept(record, tree):
    if record.kept is not None:
        return tuple(sorted(record.kept))
    return deptree.prune(tree, tree.indices, record.pruned_vertex).after_tokens


def check_record(record, tree, record_number):
    """
    :raise IntegrityError: If the record can't be derived by prunes of its tree
    """
    where = "record {} (pair {})".format(record_number, record.pair_id)
    if record.pruned_vertex is not None:
        try:
            derived = deptree.prune(tree, tree.indices, record.pruned_vertex).after_tokens
        except InvalidOperationError as ex:
            raise IntegrityError("{}: {}".format(where, ex))
        if record.kept is not None and tuple(sorted(record.kept)) != derived:
            raise IntegrityError("{}: kept set doesn't match the pruned vertex".format(where))
        return
    if not deptree.reachable_by_prunes(tree, record.kept):
        raise IntegrityError(
            "{}: kept set must contain the root and be head-closed".format(where))
    if record.chain is not None:
        try:
            derived = deptree.apply_chain(tree, record.chain).kept
        except InvalidOperationError as ex:
            raise IntegrityError("{}: {}".format(where, ex))
        if derived != tuple(sorted(record.kept)):
            raise IntegrityError("{}: chain doesn't produce the kept set".format(where))


def load_judgments(path, treebank=None):
    """
    Reads and validates a JSON lines judgment file against the referenced trees.

    :param str path: Judgment file
    :param Treebank/None treebank: Trees, relative to the judgment file by default
    :return list: JudgmentRecords in file order
    """
    if not os.path.isfile(path):
        raise IOError("Judgment file not found: {}".format(path))
    if treebank is None:
        treebank = Treebank(os.path.dirname(os.path.abspath(path)))
    records = []
    with open(path, encoding='utf-8') as jsonl_file:
        for line in jsonl_file:
            if not line.strip():
                continue
            record_number = len(records) + 1
            try:
                row = json.loads(line)
            except ValueError as ex:
                raise SchemaError(record_number, "invalid JSON: {}".format(ex))
            record = record_from_row(row, record_number)
            tree = treebank.tree(record.conllu_ref, record.sentence_id)
            check_record(record, tree, record_number)
            records.append(record)
    logging.getLogger(constants.LOG_NAME).info(
        "Loaded {} judgments from {}".format(len(records), path))
    return records


def dump_judgments(records, path):
    """
    :param list records: JudgmentRecords
    :param str path: Output JSON lines path
    """
    io_utils.write_jsonl((record.as_dict() for record in records), path)


def _split_fraction(pair_id, seed):
    digest = hashlib.md5('{}:{}'.format(seed, pair_id).encode('utf-8')).hexdigest()
    return int(digest, 16) % 1000000 / 1000000.


def split_records(records, test_fraction=None, seed=None):
    """
    Assigns whole pairs to train or test by a seeded hash of pair_id, so a
    pair's judgments never end up in both splits.

    :param list records: JudgmentRecords
    :param float test_fraction: Expected fraction of pairs in test
    :param int seed: Hash seed
    :return list: Records with their split replaced
    """
    test_fraction = constants.TEST_FRACTION if test_fraction is None else test_fraction
    seed = constants.SEED if seed is None else seed
    return [
        replace(record, split='test' if _split_fraction(record.pair_id, seed) < test_fraction
                else 'train')
        for record in records
    ]


def _class_balance(labels):
    if len(labels) == 0:
        return {'no': float('nan'), 'yes': float('nan')}
    yes = float(np.mean(labels))
    return {'no': 1. - yes, 'yes': yes}


def verify_split(records):
    """
    :param list records: JudgmentRecords
    :return dict: Judgment and pair counts, class balance per split and
        whether every test worker has judgments in train
    :raise SplitViolationError: If a pair_id is in both splits
    """
    pairs = {split: set() for split in constants.SPLITS}
    workers = {split: set() for split in constants.SPLITS}
    labels = {split: [] for split in constants.SPLITS}
    for record in records:
        pairs[record.split].add(record.pair_id)
        workers[record.split].add(record.worker_id)
        labels[record.split].append(record.label)
    overlap = natsorted(pairs['train'] & pairs['test'])
    if overlap:
        raise SplitViolationError(overlap)
    missing_workers = natsorted(workers['test'] - workers['train'])
    return {
        'judgments': {split: len(labels[split]) for split in constants.SPLITS},
        'pairs': {split: len(pairs[split]) for split in constants.SPLITS},
        'class_balance': {split: _class_balance(labels[split]) for split in constants.SPLITS},
        'test_workers_in_train': len(missing_workers) == 0,
        'test_workers_missing_from_train': missing_workers,
    }


def corpus_statistics(records, treebank):
    """
    :param list records: JudgmentRecords
    :param Treebank treebank: Trees of the records
    :return dict: Per split judgment, pair and sentence counts, class balance
        and compression rate mean and population std over pairs
    """
    report = {}
    for split in constants.SPLITS:
        in_split = [record for record in records if record.split == split]
        rates = {}
        for record in in_split:
            if record.pair_id in rates:
                continue
            tree = treebank.tree(record.conllu_ref, record.sentence_id)
            compression = deptree.linearize(tree, record_kept(record, tree))
            rates[record.pair_id] = deptree.compression_rate(tree.text, compression)
        rate_values = np.array(list(rates.values()))
        report[split] = {
            'judgments': len(in_split),
            'pairs': len(rates),
            'sentences': len({(r.conllu_ref, r.sentence_id) for r in in_split}),
            'class_balance': _class_balance([r.label for r in in_split]),
            'compression_rate_mean': float(rate_values.mean()) if len(rates) else float('nan'),
            'compression_rate_std': float(rate_values.std()) if len(rates) else float('nan'),
        }
    return report


def judgment_frame(records, treebank=None):
    """
    :param list records: JudgmentRecords
    :param Treebank/None treebank: Needed for the deprel column
    :return pd.DataFrame: pair_id, worker_id, label, split (and deprel of the
        pruned vertex for single prune records)
    """
    frame = pd.DataFrame(
        [(r.pair_id, r.worker_id, r.label, r.split) for r in records],
        columns=['pair_id', 'worker_id', 'label', 'split'],
    )
    if treebank is not None:
        deprels = []
        for record in records:
            vertex = record.pruned_vertex
            if vertex is None and record.chain is not None and len(record.chain) == 1:
                vertex = record.chain[0]
            if vertex is None:
                deprels.append(None)
            else:
                tree = treebank.tree(record.conllu_ref, record.sentence_id)
                deprels.append(tree.token(vertex).deprel)
        frame['deprel'] = deprels
    return frame


def load_gold_pairs(path):
    """
    :param str path: JSON lines with conllu_ref and compression_text
        (and optionally sentence_id)
    :return list: GoldPairs
    """
    if not os.path.isfile(path):
        raise IOError("Gold pair file not found: {}".format(path))
    pairs = []
    for record_number, row in enumerate(io_utils.read_jsonl(path), 1):
        if not isinstance(row, dict) or \
                not isinstance(row.get('conllu_ref'), str) or \
                not isinstance(row.get('compression_text'), str):
            raise SchemaError(record_number, "conllu_ref and compression_text strings needed")
        sentence_id = row.get('sentence_id')
        pairs.append(GoldPair(
            conllu_ref=row['conllu_ref'],
            compression_text=row['compression_text'],
            sentence_id=None if sentence_id is None else str(sentence_id),
        ))
    return pairs


def reachability_report(gold_pairs, treebank):
    """
    Fraction of gold compressions that some sequence of prunes produces.
    Pairs whose text can't be aligned to the source count as unreachable.

    :param list gold_pairs: GoldPairs
    :param Treebank treebank: Source trees
    :return dict: pairs, reachable, alignment_failures, fraction
    """
    nbr_reachable = 0
    nbr_failures = 0
    for pair in gold_pairs:
        tree = treebank.tree(pair.conllu_ref, pair.sentence_id)
        kept = deptree.align_gold(tree, pair.compression_text)
        if kept is None:
            nbr_failures += 1
        elif deptree.reachable_by_prunes(tree, kept):
            nbr_reachable += 1
    nbr_pairs = len(gold_pairs)
    if nbr_failures > 0:
        logging.getLogger(constants.LOG_NAME).info(
            "{} of {} gold compressions couldn't be aligned".format(nbr_failures, nbr_pairs))
    return {
        'pairs': nbr_pairs,
        'reachable': nbr_reachable,
        'alignment_failures': nbr_failures,
        'fraction': nbr_reachable / nbr_pairs if nbr_pairs else float('nan'),
    }


def _parse_index_list(value):
    if value is None or str(value).strip() == '':
        return None
    return [int(v) for v in re.findall(r'-?\d+', str(value))]


def _parse_label(value, record_number):
    label = str(value).strip().lower()
    if label in YES_LABELS:
        return 1
    if label in NO_LABELS:
        return 0
    raise SchemaError(record_number, "can't read label '{}'".format(value))


def ingest_table(path, column_map=None, split=None):
    """
    Adapter from a CSV/TSV release to canonical records. Integrity against
    the trees is checked when the canonical file is loaded.

    :param str path: .csv or .tsv file
    :param dict/None column_map: {release column: canonical field}
    :param str/None split: Split for all rows when the table has no split column
    :return list: JudgmentRecords
    """
    if not os.path.isfile(path):
        raise IOError("Table not found: {}".format(path))
    sep = '\t' if path.endswith(('.tsv', '.tab')) else ','
    frame = pd.read_csv(path, sep=sep, dtype=str, keep_default_na=False)
    if column_map:
        frame = frame.rename(columns=column_map)
    if 'split' not in frame.columns and split is not None:
        frame['split'] = split
    for field in ('kept', 'pruned_vertex'):
        if field not in frame.columns:
            frame[field] = ''
    records = []
    for record_number, row in enumerate(frame.to_dict('records'), 1):
        missing = [f for f in constants.JUDGMENT_FIELDS if f not in row]
        if missing:
            raise SchemaError(record_number, "missing columns {}".format(', '.join(missing)))
        pruned = _parse_index_list(row['pruned_vertex'])
        canonical = {
            'pair_id': row['pair_id'],
            'sentence_id': row['sentence_id'],
            'conllu_ref': row['conllu_ref'],
            'kept': _parse_index_list(row['kept']),
            'pruned_vertex': None if pruned is None else pruned[0],
            'worker_id': row['worker_id'],
            'label': _parse_label(row['label'], record_number),
            'split': row['split'],
        }
        if 'chain' in row:
            canonical['chain'] = _parse_index_list(row['chain'])
        records.append(record_from_row(canonical, record_number))
    logging.getLogger(constants.LOG_NAME).info(
        "Ingested {} judgments from {}".format(len(records), path))
    return records
