"""
Acceptability of whole compressions, scored from the chain of prunes that
produced them.

    a_sum  sum of per edit ln p(Y=1 | W, x_i), the log probability that all
           edits are acceptable
    a_min  ln p of the least acceptable edit
    a_m    minus the number of edits
    a_lm   NormLP of the compression text
"""
from dataclasses import dataclass
import json
import logging
import math
import os

import pandas as pd
from scipy.special import expit, log_expit

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.deptree as deptree
import compression_analyzer.transform.features as features
from compression_analyzer.utils.errors import (
    InvalidChainError,
    InvalidInputError,
    InvalidOperationError,
    ScoreLookupError,
)

FUNCTIONS = ('A', 'A_min', 'A_M', 'A_LM')


@dataclass(frozen=True)
class ChainScore:
    per_edit_logp: tuple
    a_sum: float
    a_min: float
    a_m: float
    a_lm: float = None

    def as_dict(self):
        return {
            'M': len(self.per_edit_logp),
            'per_edit_logp': list(self.per_edit_logp),
            'a_sum': self.a_sum,
            'a_min': self.a_min,
            'a_m': self.a_m,
            'a_lm': self.a_lm,
        }


def check_chain(tree, chain):
    """
    A chain is valid if it starts from the full sentence, each edit starts
    where the previous one ended and each edit is the prune it claims to be.

    :param DepTree tree: Source tree
    :param list chain: PruneEdits
    :return tuple: Kept token indices after the last edit
    :raise InvalidChainError: On broken linkage
    """
    kept = tree.indices
    for step, edit in enumerate(chain):
        if tuple(edit.before_tokens) != tuple(kept):
            raise InvalidChainError(
                "sentence {}: edit {} doesn't start from the tokens kept by the previous edit"
                .format(tree.sentence_id, step))
        try:
            expected = deptree.prune(tree, kept, edit.pruned_vertex)
        except InvalidOperationError as ex:
            raise InvalidChainError("edit {}: {}".format(step, ex))
        if expected != edit:
            raise InvalidChainError(
                "sentence {}: edit {} doesn't remove the subtree of vertex {}".format(
                    tree.sentence_id, step, edit.pruned_vertex))
        kept = edit.after_tokens
    return tuple(kept)


def a_lm(compression_text, lm_bundle):
    """
    :param str compression_text: Compression
    :param LMBundle lm_bundle: LM scores
    :return float: NormLP of the compression
    """
    if not compression_text:
        raise InvalidInputError("A_LM of an empty compression is undefined")
    return lm_bundle.norm_lp(compression_text)


def score_chain(tree, chain, model, lm_bundle=None, stats=None,
                interactions=None, normalizer=None):
    """
    Scores every edit with the model, without worker features, on the
    compression the edit is applied to.

    :param DepTree tree: Source tree
    :param list chain: PruneEdits, a valid sequential prune history
    :param AcceptabilityModel model: Trained model
    :param LMBundle/None lm_bundle: LM scores for features and A_LM
    :param OffsetStats/None stats: Collocation stats
    :param tuple/None interactions: Interaction list
    :param str/None normalizer: LM normalizer the model was trained with
    :return ChainScore: Scores
    """
    kept = check_chain(tree, chain)
    vectors = [
        features.extract(
            tree, edit,
            worker=None,
            lm_bundle=lm_bundle,
            stats=stats,
            interactions=interactions,
            normalizer=normalizer,
        )
        for edit in chain
    ]
    if vectors:
        per_edit_logp = tuple(float(lp) for lp in log_expit(model.decision(vectors)))
    else:
        per_edit_logp = ()
    lm_score = None
    if lm_bundle is not None:
        lm_score = a_lm(deptree.linearize(tree, kept), lm_bundle)
    return ChainScore(
        per_edit_logp=per_edit_logp,
        a_sum=float(sum(per_edit_logp)),
        a_min=min(per_edit_logp) if per_edit_logp else 0.,
        a_m=-float(len(per_edit_logp)),
        a_lm=lm_score,
    )


def function_scores(chain_score):
    """
    A, A_min and A_M mapped to [0, 1] with exp and A_LM with the logistic
    function. Both maps are monotone, so rankings (and AUC) are unchanged.

    :param ChainScore chain_score: Chain score
    :return dict: {function name: score in [0, 1]}
    """
    scores = {
        'A': math.exp(chain_score.a_sum),
        'A_min': math.exp(chain_score.a_min),
        'A_M': math.exp(chain_score.a_m),
    }
    if chain_score.a_lm is not None:
        scores['A_LM'] = float(expit(chain_score.a_lm))
    return scores


class ExternalScorer:

    def __init__(self, name, scores):
        """
        Lookup based acceptability function for scores computed offline,
        e.g. by a neural acceptability classifier.

        :param str name: Name used in reports
        :param dict scores: {compression id: probability}
        """
        self.name = name
        self.scores = dict(scores)

    def __call__(self, compression_id):
        try:
            return self.scores[compression_id]
        except KeyError:
            raise ScoreLookupError(
                "{}: no score for compression '{}'".format(self.name, compression_id))

    def __len__(self):
        return len(self.scores)


def load_external_scores(path, name=None):
    """
    Reads a JSON object {id: probability} or a two column TSV id, probability
    (an optional header line is skipped).

    :param str path: Score file
    :param str/None name: Scorer name, file stem by default
    :return ExternalScorer: Scorer
    """
    if not os.path.isfile(path):
        raise IOError("External score file not found: {}".format(path))
    name = os.path.splitext(os.path.basename(path))[0] if name is None else name
    if path.endswith('.json'):
        with open(path, encoding='utf-8') as json_file:
            scores = {str(k): float(v) for k, v in json.load(json_file).items()}
    else:
        frame = pd.read_csv(
            path,
            sep='\t',
            header=None,
            names=['id', 'score'],
            dtype=str,
            keep_default_na=False,
        )
        numeric = pd.to_numeric(frame['score'], errors='coerce')
        if len(frame) > 0 and pd.isna(numeric.iloc[0]):
            frame = frame.iloc[1:]
            numeric = numeric.iloc[1:]
        if numeric.isna().any():
            raise InvalidInputError("{}: scores must be numbers".format(path))
        scores = dict(zip(frame['id'], numeric.astype(float)))
    bad = [key for key, score in scores.items() if not 0. <= score <= 1.]
    if bad:
        raise InvalidInputError("{}: scores outside [0, 1] for {}".format(path, bad[:5]))
    logging.getLogger(constants.LOG_NAME).info(
        "Loaded {} external scores from {}".format(len(scores), path))
    return ExternalScorer(name, scores)
