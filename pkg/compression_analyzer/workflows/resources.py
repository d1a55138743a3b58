"""
Loading of the inputs shared by several workflows.
"""
import logging
import os

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.corpus as corpus
import compression_analyzer.transform.collocations as collocations
import compression_analyzer.transform.features as features
import compression_analyzer.transform.lm as lm
import compression_analyzer.utils.io_utils as io_utils
from compression_analyzer.utils.errors import InvalidInputError


def load_records(config):
    """
    :param RunConfig config: Run config with a judgments path
    :return tuple: (list of JudgmentRecords, Treebank)
    """
    path = config.path('judgments')
    if path is None:
        raise InvalidInputError("no judgments path given")
    treebank = corpus.Treebank(os.path.dirname(path))
    return corpus.load_judgments(path, treebank), treebank


def load_lm(config):
    """
    :param RunConfig config: Run config with an arpa or lm_corpus path
    :return LMBundle: N-gram and unigram models
    """
    return lm.load_lm_bundle(
        arpa_path=config.path('arpa'),
        corpus_path=config.path('lm_corpus'),
        order=config.get('lm', 'order'),
        discount=config.get('lm', 'discount'),
    )


def load_stats(config):
    """
    Collocation stats from a stats file, else built from a corpus.

    :param RunConfig config: Run config
    :return OffsetStats/None: Stats, None if neither path is given
    """
    window = config.get('collocations', 'window')
    if config.path('collocations') is not None:
        return collocations.load_offset_stats(config.path('collocations'), window)
    if config.path('colloc_corpus') is not None:
        return collocations.build_offset_stats(
            io_utils.read_token_corpus(config.path('colloc_corpus')),
            window,
        )
    logging.getLogger(constants.LOG_NAME).warning(
        "No collocation stats given, edit:breaks_collocation is never set")
    return None


def load_interactions(config):
    return features.load_interactions(config.path('interactions'))


def single_prune_vectors(records, treebank, lm_bundle, stats, interactions,
                         normalizer=None, with_worker=True):
    """
    Feature vectors of single prune judgments. Records with longer chains
    are skipped. The worker free vector is extracted once per pair.

    :param list records: JudgmentRecords
    :param Treebank treebank: Trees of the records
    :param LMBundle lm_bundle: LM scores
    :param OffsetStats/None stats: Collocation stats
    :param tuple interactions: Interaction list
    :param str/None normalizer: LM normalizer
    :param bool with_worker: Add worker features
    :return tuple: (records used, feature vectors)
    """
    used = []
    vectors = []
    pair_vectors = {}
    nbr_skipped = 0
    for record in records:
        tree = treebank.tree(record.conllu_ref, record.sentence_id)
        edits = corpus.record_edits(record, tree)
        if len(edits) != 1:
            nbr_skipped += 1
            continue
        used.append(record)
        key = (record.conllu_ref, record.sentence_id, record.pair_id)
        if key not in pair_vectors:
            pair_vectors[key] = features.extract(
                tree,
                edits[0],
                worker=None,
                lm_bundle=lm_bundle,
                stats=stats,
                interactions=interactions,
                normalizer=normalizer,
            )
        vector = pair_vectors[key]
        if with_worker:
            vector = features.with_worker(vector, record.worker_id)
        vectors.append(vector)
    if nbr_skipped > 0:
        logging.getLogger(constants.LOG_NAME).info(
            "Skipped {} multi-prune judgments".format(nbr_skipped))
    return used, vectors
