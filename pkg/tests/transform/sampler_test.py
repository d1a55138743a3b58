from collections import Counter

import numpy as np
import pytest
from scipy.special import logit
from scipy.stats import chisquare

import compression_analyzer.extract.deptree as deptree
import compression_analyzer.transform.features as features
import compression_analyzer.transform.model as model_utils
import compression_analyzer.transform.sampler as sampler
from compression_analyzer.utils.errors import (
    BudgetUnreachableError,
    InvalidInputError,
    NoFeasibleCandidateError,
)


@pytest.fixture(scope="module")
def uniform_model():
    return model_utils.AcceptabilityModel(features.FeatureSpace([]), [], C=1.)


@pytest.fixture(scope="module")
def ambassador_sampler(ambassador_tree, uniform_model):
    return sampler.Sampler(ambassador_tree, uniform_model, interactions=())


@pytest.fixture(scope="module")
def ambassador_pool(ambassador_sampler):
    return ambassador_sampler.generate_pool(nbr_samples=30, budget_range=(40, 90), seed=5)


def test_sampling_follows_edit_probabilities():
    tree = deptree.DepTree('three', [
        deptree.Token(1, 'he', 2, 'nsubj'),
        deptree.Token(2, 'ran', 0, 'root'),
        deptree.Token(3, 'quickly', 2, 'advmod'),
    ])
    assert len(tree.text) == 14
    space = features.FeatureSpace(['dep:nsubj', 'dep:advmod'])
    model = model_utils.AcceptabilityModel(
        space, [logit(.6), logit(.2)], C=1.)
    assert model.weights_by_name['dep:nsubj'] == pytest.approx(logit(.2))
    tree_sampler = sampler.Sampler(tree, model, interactions=())
    counts = Counter(
        tree_sampler.sample_chain(13, [0, i]).text for i in range(10000)
    )
    assert set(counts) == {'he ran', 'ran quickly'}
    # quickly is pruned with probability .6 / (.6 + .2)
    observed = [counts['he ran'], counts['ran quickly']]
    assert chisquare(observed, [7500, 2500]).pvalue > .01


def test_samples_are_head_closed(ambassador_tree, ambassador_pool):
    assert len(ambassador_pool) == 30
    for candidate in ambassador_pool:
        assert deptree.reachable_by_prunes(ambassador_tree, candidate.kept)
        assert candidate.char_length < candidate.budget
        assert 40 <= candidate.budget <= 90
        assert not candidate.unreachable
        assert candidate.text == deptree.linearize(ambassador_tree, candidate.kept)
        assert candidate.score.a_m == -len(candidate.chain)


def test_pool_is_deterministic(ambassador_sampler, ambassador_pool):
    again = ambassador_sampler.generate_pool(nbr_samples=30, budget_range=(40, 90), seed=5)
    assert [c.text for c in again] == [c.text for c in ambassador_pool]
    other = ambassador_sampler.generate_pool(nbr_samples=30, budget_range=(40, 90), seed=6)
    assert [c.text for c in other] != [c.text for c in ambassador_pool]


def test_budget_unreachable(ambassador_sampler):
    with pytest.raises(BudgetUnreachableError) as ex:
        ambassador_sampler.sample_chain(5, 0)
    assert ex.value.partial.kept == (2,)
    assert ex.value.partial.text == 'launched'
    assert ex.value.partial.unreachable
    pool = ambassador_sampler.generate_pool(nbr_samples=3, budget_range=(5, 5), seed=0)
    assert all(candidate.unreachable for candidate in pool)


def test_invalid_budget(ambassador_sampler):
    with pytest.raises(InvalidInputError):
        ambassador_sampler.sample_chain(0, 0)
    with pytest.raises(InvalidInputError):
        ambassador_sampler.generate_pool(nbr_samples=0)


def test_dedup_matches_brute_force(ambassador_pool):
    deduped = sampler.dedup(ambassador_pool)
    expected = {}
    seen = set()
    for candidate in ambassador_pool:
        key = tuple(edit.pruned_vertex for edit in candidate.chain)
        if key in seen:
            continue
        seen.add(key)
        expected[candidate.kept] = max(
            expected.get(candidate.kept, -np.inf), candidate.score.a_sum)
    assert {c.kept: c.score.a_sum for c in deduped} == expected
    assert len({c.kept for c in deduped}) == len(deduped)


def man_ran_tree():
    return deptree.DepTree('small', [
        deptree.Token(1, 'the', 3, 'det'),
        deptree.Token(2, 'old', 3, 'amod'),
        deptree.Token(3, 'man', 4, 'nsubj'),
        deptree.Token(4, 'ran', 0, 'root'),
        deptree.Token(5, 'home', 4, 'obj'),
        deptree.Token(6, 'quickly', 4, 'advmod'),
        deptree.Token(7, '.', 4, 'punct'),
    ])


@pytest.mark.parametrize('seed', range(100))
def test_dedup_random_pools(seed):
    tree = man_ran_tree()
    rng = np.random.default_rng(seed)
    deprels = ['det', 'amod', 'nsubj', 'obj', 'advmod', 'punct']
    space = features.FeatureSpace(['dep:' + deprel for deprel in deprels])
    model = model_utils.AcceptabilityModel(space, rng.normal(0., 2., len(space)), C=1.)
    tree_sampler = sampler.Sampler(tree, model, interactions=())
    pool = tree_sampler.generate_pool(nbr_samples=15, budget_range=(4, 28), seed=seed)
    deduped = sampler.dedup(pool)

    expected = {}
    seen = set()
    for candidate in pool:
        key = tuple(edit.pruned_vertex for edit in candidate.chain)
        if key in seen:
            continue
        seen.add(key)
        if candidate.kept not in expected or candidate.score.a_sum > expected[candidate.kept]:
            expected[candidate.kept] = candidate.score.a_sum
    assert [c.kept for c in deduped] == list(expected)
    assert [c.score.a_sum for c in deduped] == list(expected.values())


def test_rank(ambassador_pool):
    ranked = sampler.rank(sampler.dedup(ambassador_pool))
    keys = [(-c.score.a_sum, c.char_length, c.text) for c in ranked]
    assert keys == sorted(keys)


def test_select_budget_and_query(ambassador_sampler, ambassador_pool):
    pool = sampler.dedup(ambassador_pool + [ambassador_sampler.candidate([])])
    best = sampler.select(pool, 126)
    # all edits have p = .5, the full sentence has no edits
    assert best.kept == ambassador_sampler.tree.indices
    best = sampler.select(pool, 59)
    assert best.char_length <= 59
    assert best.score.a_sum == max(c.score.a_sum for c in pool if c.char_length <= 59)
    with_query = [c for c in pool if c.char_length <= 90 and sampler.importance(c, ['Pakistan'])]
    if with_query:
        best = sampler.select(pool, 90, query=['pakistan'])
        assert 'Pakistan' in best.forms


def test_select_infeasible(ambassador_pool):
    with pytest.raises(NoFeasibleCandidateError):
        sampler.select(ambassador_pool, 1)
    with pytest.raises(NoFeasibleCandidateError):
        sampler.select(ambassador_pool, 200, query=['zebra'])


def test_importance(ambassador_sampler):
    candidate = ambassador_sampler.candidate(deptree.apply_chain(ambassador_sampler.tree, [15]).chain)
    assert sampler.importance(candidate, ['TUESDAY']) == 1
    assert sampler.importance(candidate, ['disappeared']) == 0
    with pytest.raises(InvalidInputError):
        sampler.importance(candidate, [])


def test_filter_sources(ambassador_tree, small_trees):
    trees = [ambassador_tree] + list(small_trees)
    assert sampler.filter_sources(trees) == [ambassador_tree]
    assert len(sampler.filter_sources(trees, min_chars=1)) == 3


def test_scatter_frame(ambassador_pool):
    frame = sampler.scatter_frame(ambassador_pool, query=['search'])
    assert list(frame.columns) == ['char_length', 'a_sum', 'importance']
    assert len(frame) == 30
    assert set(frame['importance']) <= {0, 1}
    assert sampler.scatter_frame(ambassador_pool)['importance'].isna().all()
