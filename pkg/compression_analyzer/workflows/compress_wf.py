import logging

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.deptree as deptree
import compression_analyzer.load.report as report
import compression_analyzer.transform.model as model_utils
import compression_analyzer.transform.sampler as sampler
import compression_analyzer.workflows.resources as resources
from compression_analyzer.utils.errors import InvalidInputError, NoFeasibleCandidateError


def pick_tree(trees, sentence_id=None):
    """
    :param list trees: DepTrees of a CoNLL-U file
    :param str/None sentence_id: Wanted sent_id, may be omitted for single tree files
    :return DepTree: Tree
    """
    if sentence_id is None:
        if len(trees) != 1:
            raise InvalidInputError(
                "{} sentences in the CoNLL-U file, pick one with a sentence id".format(len(trees)))
        return trees[0]
    for tree in trees:
        if tree.sentence_id == str(sentence_id):
            return tree
    raise InvalidInputError("sentence {} not in the CoNLL-U file".format(sentence_id))


def compress(config, conllu_path=None, sentence_id=None, budget=None,
             query=None, nbr_samples=None, skip_short=False):
    """
    Samples a pool of compressions of one sentence, ranks the distinct ones
    by a_sum and, given a budget, selects the best feasible one.
    Writes pool.jsonl, candidates.jsonl, scatter.csv and selection.json.
    The source sentence itself is part of the pool.

    :param RunConfig config: Run config with model and LM paths
    :param str/None conllu_path: Source file, the config's conllu path by default
    :param str/None sentence_id: Sentence in the file
    :param int/None budget: Max characters of the selected compression
    :param list/None query: Importance terms
    :param int/None nbr_samples: Number of sampled chains
    :param bool skip_short: Drop source sentences shorter than
        [sampler] min_source_chars before picking the sentence
    :return dict: Selection report
    :raise NoFeasibleCandidateError: After the candidate files are written,
        if no candidate satisfies the budget and query
    """
    logger = logging.getLogger(constants.LOG_NAME)
    conllu_path = config.path('conllu') if conllu_path is None else conllu_path
    if conllu_path is None:
        raise InvalidInputError("no CoNLL-U file given")
    if config.path('model') is None:
        raise InvalidInputError("no model path given")
    query = list(query) if query else None
    nbr_samples = config.get('sampler', 'samples') if nbr_samples is None else nbr_samples

    trees = deptree.read_conllu(conllu_path)
    if skip_short:
        min_chars = config.get('sampler', 'min_source_chars')
        long_trees = sampler.filter_sources(trees, min_chars)
        logger.info("{} of {} sentences have at least {} characters".format(
            len(long_trees), len(trees), min_chars))
        short_ids = {tree.sentence_id for tree in trees} - {tree.sentence_id for tree in long_trees}
        if sentence_id is not None and str(sentence_id) in short_ids:
            raise InvalidInputError("sentence {} has fewer than {} characters".format(
                sentence_id, min_chars))
        trees = long_trees
    tree = pick_tree(trees, sentence_id)
    model = model_utils.load_model(config.path('model'))
    lm_bundle = None
    if config.path('arpa') is not None or config.path('lm_corpus') is not None:
        lm_bundle = resources.load_lm(config)
    elif 'lm' in model.metadata.get('groups', constants.FEATURE_GROUPS):
        raise InvalidInputError("the model uses LM features but no LM is given")
    sentence_sampler = sampler.Sampler(
        tree,
        model,
        lm_bundle=lm_bundle,
        stats=resources.load_stats(config),
        interactions=resources.load_interactions(config),
        normalizer=model.metadata.get('normalizer', constants.NORMALIZER),
    )
    logger.info("Compressing sentence {} ({} characters)".format(
        tree.sentence_id, len(tree.text)))

    pool = [sentence_sampler.candidate([])]
    pool.extend(sentence_sampler.generate_pool(
        nbr_samples,
        config.get('sampler', 'budget_range'),
        constants.SEED,
    ))
    ranked = sampler.rank(sampler.dedup(pool))
    logger.info("{} distinct compressions in a pool of {}".format(len(ranked), len(pool)))

    writer = report.ReportWriter()
    writer.write_jsonl('pool.jsonl', [candidate.as_dict() for candidate in pool])
    writer.write_jsonl('candidates.jsonl', [
        dict(candidate.as_dict(),
             rank=position,
             importance=sampler.importance(candidate, query) if query else None)
        for position, candidate in enumerate(ranked, 1)
    ])
    writer.write_csv('scatter.csv', sampler.scatter_frame(ranked, query))

    selection = {
        'sentence_id': tree.sentence_id,
        'source': tree.text,
        'budget': budget,
        'query': query,
        'nbr_candidates': len(ranked),
        'best': None,
    }
    if budget is None:
        selection['best'] = ranked[0].as_dict()
        writer.write_json('selection.json', selection)
        return selection
    try:
        best = sampler.select(ranked, budget, query)
    except NoFeasibleCandidateError:
        writer.write_json('selection.json', selection)
        raise
    selection['best'] = best.as_dict()
    logger.info("Best compression within {} characters: {}".format(budget, best.text))
    writer.write_json('selection.json', selection)
    return selection
