"""
Evaluation metrics: accuracy, rank based ROC AUC with a paired bootstrap,
Fleiss' kappa for a variable number of raters per item, worker agreement
and endorsement statistics.
"""
from collections import namedtuple
import logging

from natsort import natsorted
import numpy as np
import pandas as pd
from scipy.stats import rankdata
from sklearn.utils import resample
from tabulate import tabulate

import compression_analyzer.extract.constants as constants
from compression_analyzer.utils.errors import InvalidInputError, UndefinedMetricError

ScoredJudgment = namedtuple(
    'ScoredJudgment',
    ['pair_id', 'worker_id', 'label', 'probability'],
)
BootstrapSummary = namedtuple(
    'BootstrapSummary',
    ['observed_delta', 'p_value', 'mean', 'std', 'ci_low', 'ci_high', 'nbr_valid'],
)
WorkerRates = namedtuple('WorkerRates', ['rates', 'mean', 'std'])

MODEL_HEADERS = ['Model', 'Accuracy', 'Fleiss κ', 'ROC AUC (p)']
FUNCTION_HEADERS = ['Function', 'Description', 'ROC AUC (p)']


def accuracy(items, threshold=None):
    """
    Probabilities >= threshold count as predicting 1.

    :param list items: ScoredJudgments
    :param float threshold: Decision threshold t
    :return float: Fraction of correct hard predictions
    """
    threshold = constants.THRESHOLD if threshold is None else threshold
    if len(items) == 0:
        raise InvalidInputError("accuracy of an empty set is undefined")
    correct = [int(item.probability >= threshold) == item.label for item in items]
    return float(np.mean(correct))


def auc_from_scores(labels, scores):
    """
    Mann-Whitney form of the ROC AUC: the probability that a random positive
    outranks a random negative, ties counted as 1/2.

    :param np.array labels: Binary labels
    :param np.array scores: Scores, higher means more likely positive
    :return float: AUC
    """
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    nbr_pos = int(np.sum(labels == 1))
    nbr_neg = len(labels) - nbr_pos
    if nbr_pos == 0 or nbr_neg == 0:
        raise UndefinedMetricError("ROC AUC needs both labels")
    ranks = rankdata(scores)
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - nbr_pos * (nbr_pos + 1) / 2.) / (nbr_pos * nbr_neg))


def roc_auc(items):
    """
    :param list items: ScoredJudgments
    :return float: ROC AUC of the probabilities
    """
    return auc_from_scores(
        [item.label for item in items],
        [item.probability for item in items],
    )


def _align(items_a, items_b):
    key = lambda item: (str(item.pair_id), str(item.worker_id))
    sorted_a = sorted(items_a, key=key)
    sorted_b = sorted(items_b, key=key)
    if [key(item) for item in sorted_a] != [key(item) for item in sorted_b]:
        raise InvalidInputError("bootstrap needs judgments with identical (pair_id, worker_id) keys")
    labels = np.array([item.label for item in sorted_a])
    if not np.array_equal(labels, [item.label for item in sorted_b]):
        raise InvalidInputError("aligned judgments have different labels")
    return (
        labels,
        np.array([item.probability for item in sorted_a], dtype=float),
        np.array([item.probability for item in sorted_b], dtype=float),
    )


def bootstrap_auc_delta(items_a, items_b, nbr_resamples=None, seed=None):
    """
    Paired bootstrap over judgment rows of AUC(a) - AUC(b).
    The p-value is the fraction of resamples where AUC(a) <= AUC(b).
    Resamples with a single class are skipped.

    :param list items_a: ScoredJudgments of scorer a
    :param list items_b: ScoredJudgments of scorer b, same keys as a
    :param int nbr_resamples: Number of resamples
    :param int seed: Random seed
    :return BootstrapSummary: Observed delta, p, delta mean, std, 95% interval,
        number of valid resamples
    """
    nbr_resamples = constants.NBR_RESAMPLES if nbr_resamples is None else nbr_resamples
    seed = constants.SEED if seed is None else seed
    labels, probs_a, probs_b = _align(items_a, items_b)
    observed = auc_from_scores(labels, probs_a) - auc_from_scores(labels, probs_b)

    random_state = np.random.RandomState(seed)
    indices = np.arange(len(labels))
    deltas = []
    for _ in range(nbr_resamples):
        sample = resample(indices, replace=True, n_samples=len(indices),
                          random_state=random_state)
        sample_labels = labels[sample]
        if sample_labels.min() == sample_labels.max():
            continue
        deltas.append(
            auc_from_scores(sample_labels, probs_a[sample]) -
            auc_from_scores(sample_labels, probs_b[sample])
        )
    nbr_skipped = nbr_resamples - len(deltas)
    if nbr_skipped > 0:
        logging.getLogger(constants.LOG_NAME).warning(
            "Skipped {} single class bootstrap resamples".format(nbr_skipped))
    if len(deltas) == 0:
        raise UndefinedMetricError("no bootstrap resample had both labels")
    deltas = np.array(deltas)
    return BootstrapSummary(
        observed_delta=float(observed),
        p_value=float(np.mean(deltas <= 0)),
        mean=float(deltas.mean()),
        std=float(deltas.std()),
        ci_low=float(np.percentile(deltas, 2.5)),
        ci_high=float(np.percentile(deltas, 97.5)),
        nbr_valid=len(deltas),
    )


def rating_table(judgments):
    """
    :param iterable judgments: Objects with pair_id and label attributes
    :return dict: {pair_id: [ratings]} in natural pair_id order
    """
    table = {}
    for judgment in judgments:
        table.setdefault(judgment.pair_id, []).append(int(judgment.label))
    return {pair_id: table[pair_id] for pair_id in natsorted(table)}


def _pairwise_agreement(ratings):
    nbr = len(ratings)
    nbr_yes = sum(ratings)
    nbr_no = nbr - nbr_yes
    agreeing = nbr_yes * (nbr_yes - 1) + nbr_no * (nbr_no - 1)
    return agreeing / (nbr * (nbr - 1))


def _multi_rater_items(table):
    return [ratings for ratings in table.values() if len(ratings) >= 2]


def fleiss_kappa(table):
    """
    Fleiss' kappa with per item pairwise agreement, so items may have
    different numbers of raters. Items with a single rating are ignored,
    chance agreement uses the ratings of the included items only.

    :param dict table: {item: [binary ratings]}
    :return float: kappa
    """
    items = _multi_rater_items(table)
    if not items:
        raise UndefinedMetricError("Fleiss kappa needs at least one item with 2+ ratings")
    observed = np.mean([_pairwise_agreement(ratings) for ratings in items])
    p_yes = np.mean(np.concatenate([np.asarray(ratings) for ratings in items]))
    expected = p_yes ** 2 + (1 - p_yes) ** 2
    if expected >= 1. - 1e-12:
        raise UndefinedMetricError("Fleiss kappa undefined, all ratings are in one category")
    return float((observed - expected) / (1. - expected))


def model_as_rater_kappa(items, threshold=None):
    """
    Every judgment becomes an item rated twice: by the worker and by the
    thresholded model.

    :param list items: ScoredJudgments
    :param float threshold: Decision threshold
    :return float: Fleiss kappa of the worker/model table
    """
    threshold = constants.THRESHOLD if threshold is None else threshold
    if len(items) == 0:
        raise InvalidInputError("model as rater kappa of an empty set is undefined")
    table = {
        (item.pair_id, item.worker_id, i): [int(item.label), int(item.probability >= threshold)]
        for i, item in enumerate(items)
    }
    return fleiss_kappa(table)


def worker_worker_agreement(table):
    """
    Probability that two random workers agree on an item, averaged over
    items with 2+ ratings. NaN (with a warning) if there are none.

    :param dict table: {item: [binary ratings]}
    :return float: Mean pairwise agreement
    """
    items = _multi_rater_items(table)
    if not items:
        logging.getLogger(constants.LOG_NAME).warning(
            "No item has 2+ ratings, worker-worker agreement is undefined")
        return float('nan')
    return float(np.mean([_pairwise_agreement(ratings) for ratings in items]))


def per_dependency_rates(frame):
    """
    :param pd.DataFrame frame: One row per judgment, columns deprel and label
    :return pd.DataFrame: Indexed by deprel, columns yes, total, rate
    """
    if len(frame) == 0:
        return pd.DataFrame(columns=['yes', 'total', 'rate'])
    grouped = frame.groupby('deprel')['label']
    rates = pd.DataFrame({'yes': grouped.sum().astype(int), 'total': grouped.count()})
    rates['rate'] = rates['yes'] / rates['total']
    return rates.sort_values('total', ascending=False, kind='mergesort')


def worker_rate_distribution(frame):
    """
    Deletion endorsement rate per worker: yes answers / judgments.

    :param pd.DataFrame frame: One row per judgment, columns worker_id and label
    :return WorkerRates: Rates per worker, their mean and population std
    """
    if len(frame) == 0:
        return WorkerRates(pd.Series(dtype=float), float('nan'), float('nan'))
    rates = frame.groupby('worker_id')['label'].mean()
    rates = rates.reindex(natsorted(rates.index))
    return WorkerRates(rates, float(rates.mean()), float(rates.std(ddof=0)))


def format_auc(auc, p_value=None):
    if auc is None or np.isnan(auc):
        return '-'
    if p_value is None:
        return '{:.3f}'.format(auc)
    return '{:.3f} ({:.3f})'.format(auc, p_value)


def _format_value(value):
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return '-'
    return '{:.3f}'.format(value)


def format_model_table(rows):
    """
    Aligned text table: Model | Accuracy | Fleiss κ | ROC AUC (p)

    :param list rows: Dicts with keys model, accuracy, kappa, auc, p_value
    :return str: Table
    """
    return tabulate(
        [[row['model'],
          _format_value(row.get('accuracy')),
          _format_value(row.get('kappa')),
          format_auc(row.get('auc'), row.get('p_value'))]
         for row in rows],
        headers=MODEL_HEADERS,
        tablefmt='simple',
        disable_numparse=True,
    )


def format_function_table(rows):
    """
    Aligned text table: Function | Description | ROC AUC (p)

    :param list rows: Dicts with keys function, description, auc, p_value
    :return str: Table
    """
    return tabulate(
        [[row['function'], row['description'], format_auc(row.get('auc'), row.get('p_value'))]
         for row in rows],
        headers=FUNCTION_HEADERS,
        tablefmt='simple',
        disable_numparse=True,
    )
