import logging

from tabulate import tabulate

import compression_analyzer.extract.constants as constants
import compression_analyzer.load.report as report
import compression_analyzer.transform.features as features
import compression_analyzer.transform.model as model_utils
import compression_analyzer.workflows.resources as resources
from compression_analyzer.utils.errors import InvalidInputError


def variant_groups(variant, ablate=()):
    """
    :param str variant: Key of constants.MODEL_VARIANTS
    :param iterable ablate: Keys of constants.ABLATIONS
    :return tuple: Feature groups kept, in constants.FEATURE_GROUPS order
    """
    if variant not in constants.MODEL_VARIANTS:
        raise InvalidInputError("unknown model variant '{}'".format(variant))
    removed = set()
    for name in ablate:
        if name not in constants.ABLATIONS:
            raise InvalidInputError("unknown ablation '{}'".format(name))
        removed.update(constants.ABLATIONS[name])
    groups = set(constants.MODEL_VARIANTS[variant]) - removed
    return tuple(group for group in constants.FEATURE_GROUPS if group in groups)


def train(config, variant='full', ablate=(), C=None):
    """
    Cross validates C over the grid and trains one model per variant on the
    train split. Writes model_<variant>.json per variant plus the cross
    validation report in the run directory.

    :param RunConfig config: Run config with judgments and LM paths
    :param str variant: Model variant, 'all' for every variant
    :param iterable ablate: Feature ablations applied to every variant
    :param float/None C: Use this C instead of the cross validated one
    :return dict: {variant: AcceptabilityModel}
    """
    logger = logging.getLogger(constants.LOG_NAME)
    variants = list(constants.MODEL_VARIANTS) if variant == 'all' else [variant]
    ablate = tuple(ablate)
    groups_by_variant = {name: variant_groups(name, ablate) for name in variants}

    records, treebank = resources.load_records(config)
    train_records = [record for record in records if record.split == 'train']
    if not train_records:
        raise InvalidInputError("no judgments in the train split")
    lm_bundle = resources.load_lm(config)
    stats = resources.load_stats(config)
    interactions = resources.load_interactions(config)
    normalizer = config.get('model', 'normalizer')

    used, base_vectors = resources.single_prune_vectors(
        train_records, treebank, lm_bundle, stats, interactions, normalizer,
    )
    labels = [record.label for record in used]
    pair_ids = [record.pair_id for record in used]
    logger.info("Training on {} single prune judgments".format(len(used)))

    writer = report.ReportWriter()
    models = {}
    cv_report = {}
    cv_rows = []
    for name in variants:
        groups = groups_by_variant[name]
        vectors = [features.select_groups(vector, groups) for vector in base_vectors]
        cv = model_utils.cross_validate(
            vectors,
            labels,
            pair_ids,
            folds=config.get('model', 'folds'),
            grid=config.get('model', 'c_grid'),
            seed=constants.SEED,
        )
        C_used = cv.best_C if C is None else C
        model = model_utils.train(
            vectors,
            labels,
            C=C_used,
            tolerance=config.get('model', 'tolerance'),
            max_iter=config.get('model', 'max_iter'),
        )
        model_utils.save_model(
            model,
            writer.path('model_{}.json'.format(name)),
            variant=name,
            groups=list(groups),
            ablate=list(ablate),
            normalizer=normalizer,
            seed=constants.SEED,
            config_hash=constants.CONFIG_HASH,
        )
        logger.info("Saved {} model, C={}, {} features".format(name, C_used, len(model.space)))
        models[name] = model
        cv_report[name] = {
            'groups': list(groups),
            'best_C': cv.best_C,
            'C_used': C_used,
            'mean_auc': [[c, auc] for c, auc in sorted(cv.mean_auc.items())],
            'fold_aucs': [[c, aucs] for c, aucs in sorted(cv.fold_aucs.items())],
        }
        for c, auc in sorted(cv.mean_auc.items()):
            cv_rows.append([name, '{:g}'.format(c), '{:.4f}'.format(auc),
                            '*' if c == C_used else ''])

    writer.write_json('cross_validation.json', {
        'normalizer': normalizer,
        'folds': config.get('model', 'folds'),
        'nbr_examples': len(used),
        'variants': cv_report,
    })
    writer.write_text('cross_validation.txt', tabulate(
        cv_rows,
        headers=['Variant', 'C', 'Mean ROC AUC', 'Used'],
        tablefmt='simple',
        disable_numparse=True,
    ))
    return models
