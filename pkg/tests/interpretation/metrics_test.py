import math

import numpy as np
import pandas as pd
import pytest
from sklearn.metrics import roc_auc_score
from statsmodels.stats.inter_rater import aggregate_raters, fleiss_kappa

import interpretation.metrics as metrics
from compression_analyzer.utils.errors import InvalidInputError, UndefinedMetricError


def scored(labels, probabilities):
    return [
        metrics.ScoredJudgment('p{}'.format(i), 'w{}'.format(i % 3), label, probability)
        for i, (label, probability) in enumerate(zip(labels, probabilities))
    ]


def test_accuracy():
    items = scored([1, 0, 1, 0], [.5, .49, .2, .9])
    assert metrics.accuracy(items) == .5
    assert metrics.accuracy(items, threshold=.1) == .5
    with pytest.raises(InvalidInputError):
        metrics.accuracy([])


def test_auc_example():
    assert metrics.auc_from_scores([0, 0, 1, 1], [.1, .4, .35, .8]) == .75


def test_auc_matches_sklearn():
    rng = np.random.default_rng(3)
    for _ in range(200):
        labels = rng.integers(0, 2, size=40)
        labels[:2] = [0, 1]
        # rounding produces ties
        scores = np.round(rng.random(40), 1)
        assert metrics.auc_from_scores(labels, scores) == \
            pytest.approx(roc_auc_score(labels, scores))


def test_auc_monotone_invariant():
    rng = np.random.default_rng(5)
    for _ in range(200):
        labels = rng.integers(0, 2, size=40)
        labels[:2] = [0, 1]
        scores = np.round(rng.random(40), 1)
        # strictly increasing on the reals, ties stay ties
        transformed = np.exp(3. * scores) + scores ** 3 - 7.
        assert metrics.auc_from_scores(labels, transformed) == \
            pytest.approx(metrics.auc_from_scores(labels, scores), abs=1e-12)


def test_auc_single_class():
    with pytest.raises(UndefinedMetricError):
        metrics.roc_auc(scored([1, 1], [.2, .3]))


def test_bootstrap_self():
    rng = np.random.default_rng(0)
    items = scored(rng.integers(0, 2, size=60), rng.random(60))
    summary = metrics.bootstrap_auc_delta(items, items, nbr_resamples=100, seed=1)
    assert summary.observed_delta == 0.
    assert summary.p_value == 1.
    assert summary.nbr_valid == 100


def test_bootstrap_better_scorer():
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 2, size=200)
    good = scored(labels, labels * .5 + rng.random(200) * .6)
    noise = scored(labels, rng.random(200))
    summary = metrics.bootstrap_auc_delta(good, noise, nbr_resamples=500, seed=2)
    assert summary.observed_delta > .2
    assert summary.p_value < .01
    assert summary.ci_low <= summary.mean <= summary.ci_high
    again = metrics.bootstrap_auc_delta(good, noise, nbr_resamples=500, seed=2)
    assert again == summary


def test_bootstrap_misaligned():
    items = scored([0, 1], [.1, .9])
    with pytest.raises(InvalidInputError):
        metrics.bootstrap_auc_delta(items, items[:1], nbr_resamples=10)


def test_fleiss_two_items():
    assert metrics.fleiss_kappa({'a': [1, 1], 'b': [1, 0]}) == pytest.approx(-1. / 3)


def test_fleiss_matches_statsmodels():
    rng = np.random.default_rng(5)
    ratings = rng.integers(0, 2, size=(30, 4))
    # make raters agree more often than chance
    ratings[:10] = 1
    table = {'item{}'.format(i): list(row) for i, row in enumerate(ratings)}
    counts, _ = aggregate_raters(ratings, n_cat=2)
    assert metrics.fleiss_kappa(table) == pytest.approx(fleiss_kappa(counts, method='fleiss'))


def test_fleiss_ignores_single_ratings():
    table = {'a': [1, 1], 'b': [1, 0], 'c': [0]}
    assert metrics.fleiss_kappa(table) == pytest.approx(-1. / 3)


def test_fleiss_undefined():
    with pytest.raises(UndefinedMetricError):
        metrics.fleiss_kappa({'a': [1], 'b': [0]})
    with pytest.raises(UndefinedMetricError):
        metrics.fleiss_kappa({'a': [1, 1], 'b': [1, 1]})


def test_model_as_rater_kappa():
    items = scored([1, 0, 1, 0], [.9, .1, .8, .3])
    assert metrics.model_as_rater_kappa(items) == pytest.approx(1.)
    flipped = scored([1, 0, 1, 0], [.1, .9, .2, .7])
    assert metrics.model_as_rater_kappa(flipped) == pytest.approx(-1.)


def test_worker_worker_agreement():
    table = {'a': [1, 1, 0], 'b': [1]}
    assert metrics.worker_worker_agreement(table) == pytest.approx(1. / 3)
    assert math.isnan(metrics.worker_worker_agreement({'b': [1]}))


def test_rating_table():
    judgments = scored([1, 0, 1], [0, 0, 0])
    table = metrics.rating_table(judgments + [metrics.ScoredJudgment('p10', 'w1', 1, 0)])
    assert list(table) == ['p0', 'p1', 'p2', 'p10']
    assert table['p0'] == [1]


def test_per_dependency_rates():
    frame = pd.DataFrame({
        'deprel': ['amod', 'amod', 'nsubj', 'amod'],
        'label': [1, 0, 0, 1],
    })
    rates = metrics.per_dependency_rates(frame)
    assert list(rates.index) == ['amod', 'nsubj']
    assert rates.loc['amod', 'yes'] == 2
    assert rates.loc['amod', 'total'] == 3
    assert rates.loc['nsubj', 'rate'] == 0.


def test_worker_rate_distribution():
    frame = pd.DataFrame({
        'worker_id': ['w10', 'w2', 'w2', 'w10'],
        'label': [1, 1, 0, 1],
    })
    worker_rates = metrics.worker_rate_distribution(frame)
    assert list(worker_rates.rates.index) == ['w2', 'w10']
    assert worker_rates.mean == pytest.approx(.75)
    assert worker_rates.std == pytest.approx(.25)


def test_format_tables():
    table = metrics.format_model_table([
        {'model': 'full', 'accuracy': .8, 'kappa': .5, 'auc': .9, 'p_value': .01},
        {'model': 'worker -- worker agreement', 'accuracy': .7, 'kappa': float('nan')},
    ])
    lines = table.splitlines()
    assert lines[0].split() == ['Model', 'Accuracy', 'Fleiss', 'κ', 'ROC', 'AUC', '(p)']
    assert '0.900 (0.010)' in lines[2]
    assert lines[3].rstrip().endswith('-')
    table = metrics.format_function_table([
        {'function': 'A', 'description': 'sum of log p', 'auc': .6},
    ])
    assert '0.600' in table
    assert metrics.format_auc(float('nan')) == '-'
