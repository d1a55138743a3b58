"""
Compression candidates sampled as chains of prunes.

Each step deletes a vertex with probability proportional to the model's
endorsement of that single prune, until the text fits the character budget.
"""
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.deptree as deptree
import compression_analyzer.transform.acceptability as acceptability
import compression_analyzer.transform.features as features
import compression_analyzer.transform.model as model_utils
from compression_analyzer.utils.errors import (
    BudgetUnreachableError,
    InvalidInputError,
    NoFeasibleCandidateError,
)


@dataclass(frozen=True)
class CompressionCandidate:
    kept: tuple
    forms: tuple
    text: str
    chain: tuple
    score: acceptability.ChainScore
    budget: int = None
    unreachable: bool = False
    seed: tuple = None

    @property
    def char_length(self):
        return len(self.text)

    def as_dict(self):
        row = {
            'kept': list(self.kept),
            'text': self.text,
            'chain': [edit.pruned_vertex for edit in self.chain],
            'char_length': self.char_length,
            'budget': self.budget,
            'unreachable': self.unreachable,
            'seed': None if self.seed is None else list(self.seed),
        }
        row.update(self.score.as_dict())
        return row


class Sampler:

    def __init__(self, tree, model, lm_bundle=None, stats=None,
                 interactions=None, normalizer=None):
        """
        Everything needed to score prunes of one source sentence.

        :param DepTree tree: Source tree
        :param AcceptabilityModel model: Trained model
        :param LMBundle/None lm_bundle: LM scores
        :param OffsetStats/None stats: Collocation stats
        :param tuple/None interactions: Interaction list
        :param str/None normalizer: LM normalizer the model was trained with
        """
        self.tree = tree
        self.model = model
        self.lm_bundle = lm_bundle
        self.stats = stats
        self.interactions = interactions
        self.normalizer = normalizer

    def candidate_edits(self, kept):
        """
        :param iterable kept: Head closed kept set containing the root
        :return list: (vertex, p(Y=1)) for every non-root kept vertex
        """
        vertices = [index for index in sorted(kept) if index != self.tree.root]
        if not vertices:
            return []
        vectors = [
            features.extract(
                self.tree,
                deptree.prune(self.tree, kept, vertex),
                worker=None,
                lm_bundle=self.lm_bundle,
                stats=self.stats,
                interactions=self.interactions,
                normalizer=self.normalizer,
            )
            for vertex in vertices
        ]
        probs = model_utils.predict_all(self.model, vectors)
        return [(vertex, float(p)) for vertex, p in zip(vertices, probs)]

    def candidate(self, chain, budget=None, unreachable=False, seed=None):
        """
        :param list chain: PruneEdits from the full sentence
        :return CompressionCandidate: Scored candidate
        """
        score = acceptability.score_chain(
            self.tree, chain, self.model,
            lm_bundle=self.lm_bundle,
            stats=self.stats,
            interactions=self.interactions,
            normalizer=self.normalizer,
        )
        kept = chain[-1].after_tokens if chain else self.tree.indices
        return CompressionCandidate(
            kept=tuple(kept),
            forms=tuple(self.tree.token(index).form for index in kept),
            text=deptree.linearize(self.tree, kept),
            chain=tuple(chain),
            score=score,
            budget=budget,
            unreachable=unreachable,
            seed=None if seed is None else tuple(np.atleast_1d(seed).tolist()),
        )

    def sample_chain(self, budget, seed):
        """
        Prune until the text is shorter than the budget, drawing each vertex
        with probability p_v / Z.

        :param int budget: Max characters B
        :param int/list seed: Seed for numpy's default_rng
        :return CompressionCandidate: Sampled candidate
        :raise BudgetUnreachableError: Only the root is left and the text
            is still too long; carries the partial candidate
        """
        if budget < 1:
            raise InvalidInputError("budget must be >= 1, not {}".format(budget))
        rng = np.random.default_rng(seed)
        kept = self.tree.indices
        chain = []
        text = self.tree.text
        while len(text) >= budget:
            candidates = self.candidate_edits(kept)
            if not candidates:
                partial = self.candidate(chain, budget, unreachable=True, seed=seed)
                raise BudgetUnreachableError(
                    "sentence {}: root alone has {} characters, budget is {}".format(
                        self.tree.sentence_id, len(text), budget),
                    partial,
                )
            vertices = [vertex for vertex, _ in candidates]
            probs = np.array([p for _, p in candidates])
            total = probs.sum()
            probs = probs / total if total > 0 else np.full(len(probs), 1. / len(probs))
            vertex = vertices[rng.choice(len(vertices), p=probs)]
            edit = deptree.prune(self.tree, kept, vertex)
            chain.append(edit)
            kept = edit.after_tokens
            text = deptree.linearize(self.tree, kept)
        return self.candidate(chain, budget, seed=seed)

    def generate_pool(self, nbr_samples=None, budget_range=None, seed=None):
        """
        Independent chains, each with its budget drawn uniformly from
        budget_range (inclusive). Chains that can't reach their budget are
        kept with unreachable=True.

        :param int nbr_samples: Number of chains
        :param tuple budget_range: (min, max) budget
        :param int seed: Base seed, chain i uses seeds derived from (seed, i)
        :return list: CompressionCandidates in sampling order
        """
        nbr_samples = constants.NBR_SAMPLES if nbr_samples is None else nbr_samples
        budget_range = constants.BUDGET_RANGE if budget_range is None else budget_range
        seed = constants.SEED if seed is None else seed
        if nbr_samples < 1:
            raise InvalidInputError("need at least one sample, not {}".format(nbr_samples))
        logger = logging.getLogger(constants.LOG_NAME)
        lo, hi = budget_range
        pool = []
        nbr_unreachable = 0
        for i in range(nbr_samples):
            budget = int(np.random.default_rng([seed, i, 0]).integers(lo, hi + 1))
            try:
                pool.append(self.sample_chain(budget, [seed, i, 1]))
            except BudgetUnreachableError as ex:
                nbr_unreachable += 1
                pool.append(ex.partial)
        if nbr_unreachable > 0:
            logger.warning("Sentence {}: {} of {} chains couldn't reach their budget".format(
                self.tree.sentence_id, nbr_unreachable, nbr_samples))
        logger.info("Sentence {}: sampled {} chains".format(self.tree.sentence_id, nbr_samples))
        return pool


def dedup(pool):
    """
    Drop exact duplicate chains, then keep one candidate per kept set:
    the one with the highest a_sum (the first one on ties).

    :param list pool: CompressionCandidates
    :return list: Candidates with distinct kept sets, in order of first appearance
    """
    seen_chains = set()
    best = {}
    for candidate in pool:
        chain_key = tuple(edit.pruned_vertex for edit in candidate.chain)
        if chain_key in seen_chains:
            continue
        seen_chains.add(chain_key)
        current = best.get(candidate.kept)
        if current is None or candidate.score.a_sum > current.score.a_sum:
            best[candidate.kept] = candidate
    return list(best.values())


def _rank_key(candidate):
    return -candidate.score.a_sum, candidate.char_length, candidate.text


def rank(pool):
    """
    :param list pool: CompressionCandidates
    :return list: Sorted by a_sum descending, then shorter, then lexicographic text
    """
    return sorted(pool, key=_rank_key)


def importance(candidate, query):
    """
    :param CompressionCandidate candidate: Candidate
    :param list query: Query terms
    :return int: 1 if a kept token equals a query term (ignoring case), else 0
    """
    terms = {term.lower() for term in query}
    if not terms:
        raise InvalidInputError("importance query is empty")
    return int(any(form.lower() in terms for form in candidate.forms))


def select(pool, budget, query=None):
    """
    Best candidate with at most budget characters that (if a query is given)
    contains a query term.

    :param list pool: Deduplicated CompressionCandidates
    :param int budget: Max characters B
    :param list/None query: Query terms
    :return CompressionCandidate: argmax a_sum, ties to shorter then lexicographic text
    :raise NoFeasibleCandidateError: If nothing satisfies the constraints
    """
    if budget < 1:
        raise InvalidInputError("budget must be >= 1, not {}".format(budget))
    feasible = [
        candidate for candidate in pool
        if candidate.char_length <= budget and (not query or importance(candidate, query))
    ]
    if not feasible:
        raise NoFeasibleCandidateError(
            "none of {} candidates has <= {} characters{}".format(
                len(pool), budget,
                '' if not query else " and one of the terms {}".format(', '.join(query))),
        )
    return min(feasible, key=_rank_key)


def filter_sources(trees, min_chars=None):
    """
    :param list trees: DepTrees
    :param int min_chars: Min source length in characters
    :return list: Trees whose text has at least min_chars characters
    """
    min_chars = constants.MIN_SOURCE_CHARS if min_chars is None else min_chars
    return [tree for tree in trees if len(tree.text) >= min_chars]


def scatter_frame(pool, query=None):
    """
    :param list pool: CompressionCandidates
    :param list/None query: Query terms, importance is left empty without
    :return pd.DataFrame: char_length, a_sum, importance per candidate
    """
    return pd.DataFrame({
        'char_length': [candidate.char_length for candidate in pool],
        'a_sum': [candidate.score.a_sum for candidate in pool],
        'importance': [importance(candidate, query) if query else None for candidate in pool],
    }, columns=['char_length', 'a_sum', 'importance'])
