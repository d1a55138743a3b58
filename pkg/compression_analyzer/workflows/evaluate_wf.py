"""
Test set evaluation: single prune models (accuracy, kappa, ROC AUC with
bootstrap p-values against the reference model) and multi prune
acceptability functions.
"""
import logging

import numpy as np

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.corpus as corpus
import compression_analyzer.load.report as report
import compression_analyzer.transform.acceptability as acceptability
import compression_analyzer.transform.features as features
import compression_analyzer.transform.model as model_utils
import compression_analyzer.workflows.resources as resources
import interpretation.metrics as metrics
from compression_analyzer.utils.errors import InvalidInputError, UndefinedMetricError

FUNCTION_DESCRIPTIONS = {
    'A': 'probability that all operations are acceptable',
    'A_min': 'acceptability of the least acceptable operation',
    'A_M': 'fewer operations are better',
    'A_LM': 'NormLP of the compression',
}
EXTERNAL_DESCRIPTION = 'external acceptability scores'


def _model_name(model, path):
    return model.metadata.get('variant', path)


def _safe(metric, *args):
    try:
        return metric(*args)
    except UndefinedMetricError as ex:
        logging.getLogger(constants.LOG_NAME).warning(str(ex))
        return float('nan')


def _bootstrap_p(reference_items, items, nbr_resamples):
    try:
        summary = metrics.bootstrap_auc_delta(
            reference_items, items, nbr_resamples=nbr_resamples, seed=constants.SEED,
        )
    except UndefinedMetricError as ex:
        logging.getLogger(constants.LOG_NAME).warning(str(ex))
        return None
    return summary


def _summary_dict(summary):
    return None if summary is None else dict(summary._asdict())


def _test_records(config):
    records, treebank = resources.load_records(config)
    test_records = [record for record in records if record.split == 'test']
    if not test_records:
        raise InvalidInputError("no judgments in the test split")
    return test_records, treebank


def evaluate_models(config, model_paths, external_path=None):
    """
    Table of models on single prune test judgments. The first model is the
    reference: every other row gets the bootstrap p-value of
    AUC(reference) <= AUC(row). A worker-worker agreement row closes the table.

    :param RunConfig config: Run config with judgments and LM paths
    :param list model_paths: Model JSON files, reference first
    :param str/None external_path: Scores keyed by pair_id
    :return dict: Evaluation report
    """
    if not model_paths:
        raise InvalidInputError("at least one model is needed")
    logger = logging.getLogger(constants.LOG_NAME)
    threshold = config.get('evaluate', 'threshold')
    nbr_resamples = config.get('evaluate', 'resamples')
    test_records, treebank = _test_records(config)
    lm_bundle = resources.load_lm(config)
    stats = resources.load_stats(config)
    interactions = resources.load_interactions(config)

    # features depend on the normalizer the model was trained with
    vectors_by_normalizer = {}
    scored = []
    for path in model_paths:
        model = model_utils.load_model(path)
        normalizer = model.metadata.get('normalizer', constants.NORMALIZER)
        if normalizer not in vectors_by_normalizer:
            vectors_by_normalizer[normalizer] = resources.single_prune_vectors(
                test_records, treebank, lm_bundle, stats, interactions, normalizer,
            )
        used, base_vectors = vectors_by_normalizer[normalizer]
        groups = model.metadata.get('groups', constants.FEATURE_GROUPS)
        vectors = [features.select_groups(vector, groups) for vector in base_vectors]
        probs = model_utils.predict_all(model, vectors)
        items = [
            metrics.ScoredJudgment(record.pair_id, record.worker_id, record.label, float(p))
            for record, p in zip(used, probs)
        ]
        scored.append((_model_name(model, path), items))
        logger.info("Scored {} test judgments with {}".format(len(items), path))

    if external_path is not None:
        scorer = acceptability.load_external_scores(external_path)
        used = scored[0][1]
        scored.append((scorer.name, [
            metrics.ScoredJudgment(item.pair_id, item.worker_id, item.label,
                                   scorer(item.pair_id))
            for item in used
        ]))

    reference_items = scored[0][1]
    rows = []
    for name, items in scored:
        summary = _bootstrap_p(reference_items, items, nbr_resamples)
        rows.append({
            'model': name,
            'accuracy': metrics.accuracy(items, threshold),
            'kappa': _safe(metrics.model_as_rater_kappa, items, threshold),
            'auc': _safe(metrics.roc_auc, items),
            'p_value': None if summary is None else summary.p_value,
            'bootstrap': _summary_dict(summary),
        })

    table = metrics.rating_table(test_records)
    worker_row = {
        'model': 'worker -- worker agreement',
        'accuracy': metrics.worker_worker_agreement(table),
        'kappa': _safe(metrics.fleiss_kappa, table),
        'auc': None,
        'p_value': None,
    }
    writer = report.ReportWriter()
    payload = {
        'reference': scored[0][0],
        'threshold': threshold,
        'resamples': nbr_resamples,
        'nbr_judgments': len(reference_items),
        'models': rows,
        'worker_worker': worker_row,
    }
    writer.write_json('evaluation.json', payload)
    writer.write_text('evaluation.txt', metrics.format_model_table(rows + [worker_row]))
    return payload


def evaluate_functions(config, model_path, external_path=None):
    """
    Scores the chain of every multi prune test judgment with A, A_min, A_M
    and A_LM (and external scores keyed by pair_id) and compares their ROC
    AUC. p-values are those of AUC(A) <= AUC(function).

    :param RunConfig config: Run config with judgments and LM paths
    :param str model_path: Single prune model
    :param str/None external_path: Scores keyed by pair_id
    :return dict: Evaluation report
    """
    logger = logging.getLogger(constants.LOG_NAME)
    nbr_resamples = config.get('evaluate', 'resamples')
    test_records, treebank = _test_records(config)
    lm_bundle = resources.load_lm(config)
    stats = resources.load_stats(config)
    interactions = resources.load_interactions(config)
    model = model_utils.load_model(model_path)
    normalizer = model.metadata.get('normalizer', constants.NORMALIZER)

    chain_scores = {}
    for record in test_records:
        if record.pair_id in chain_scores:
            continue
        tree = treebank.tree(record.conllu_ref, record.sentence_id)
        chain = corpus.record_edits(record, tree)
        chain_scores[record.pair_id] = acceptability.score_chain(
            tree, chain, model,
            lm_bundle=lm_bundle,
            stats=stats,
            interactions=interactions,
            normalizer=normalizer,
        )
    logger.info("Scored the chains of {} pairs".format(len(chain_scores)))
    function_values = {
        pair_id: acceptability.function_scores(score)
        for pair_id, score in chain_scores.items()
    }

    scorers = [(name, FUNCTION_DESCRIPTIONS[name],
                lambda pair_id, name=name: function_values[pair_id][name])
               for name in acceptability.FUNCTIONS]
    if external_path is not None:
        external = acceptability.load_external_scores(external_path)
        scorers.append((external.name, EXTERNAL_DESCRIPTION, external))

    items_by_function = {
        name: [
            metrics.ScoredJudgment(record.pair_id, record.worker_id, record.label,
                                   score(record.pair_id))
            for record in test_records
        ]
        for name, _, score in scorers
    }
    reference_items = items_by_function['A']
    rows = []
    for name, description, _ in scorers:
        items = items_by_function[name]
        summary = None if name == 'A' else \
            _bootstrap_p(reference_items, items, nbr_resamples)
        rows.append({
            'function': name,
            'description': description,
            'auc': _safe(metrics.roc_auc, items),
            'p_value': None if summary is None else summary.p_value,
            'bootstrap': _summary_dict(summary),
        })

    writer = report.ReportWriter()
    writer.write_jsonl('chain_scores.jsonl', [
        dict(score.as_dict(), pair_id=pair_id)
        for pair_id, score in chain_scores.items()
    ])
    payload = {
        'model': model_path,
        'resamples': nbr_resamples,
        'nbr_judgments': len(test_records),
        'nbr_pairs': len(chain_scores),
        'mean_operations': float(np.mean([len(s.per_edit_logp) for s in chain_scores.values()])),
        'functions': rows,
    }
    writer.write_json('function_evaluation.json', payload)
    writer.write_text('function_evaluation.txt', metrics.format_function_table(rows))
    return payload
