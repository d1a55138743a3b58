import argparse
import logging
import os
import sys
import traceback

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.metadata as metadata
import compression_analyzer.utils.io_utils as io_utils
import compression_analyzer.workflows.agreement_wf as agreement_wf
import compression_analyzer.workflows.compress_wf as compress_wf
import compression_analyzer.workflows.data_wf as data_wf
import compression_analyzer.workflows.evaluate_wf as evaluate_wf
import compression_analyzer.workflows.train_wf as train_wf
from compression_analyzer.utils.errors import PyPruneError

# path keys a command can't run without
REQUIRED_PATHS = {
    'train': ('judgments',),
    'evaluate': ('judgments',),
    'compress': ('model',),
    'agreement': ('judgments',),
    'lm-train': ('lm_corpus',),
    'colloc-build': ('colloc_corpus',),
    'ingest': (),
    'verify-split': ('judgments',),
    'reachability': ('gold',),
}
# flag dest -> config path key
PATH_FLAGS = {
    'judgments': 'judgments',
    'conllu': 'conllu',
    'arpa': 'arpa',
    'lm_corpus': 'lm_corpus',
    'collocations': 'collocations',
    'colloc_corpus': 'colloc_corpus',
    'interactions': 'interactions',
    'model': 'model',
    'gold': 'gold',
}


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '-c', '--config',
        type=str,
        default=None,
        help="INI config file with [run], [paths], [model], [evaluate], [sampler], "
             "[lm] and [collocations] sections. Flags override its values",
    )
    common.add_argument(
        '-o', '--output',
        type=str,
        required=True,
        help="Output directory path, where a timestamped subdir will be generated",
    )
    common.add_argument(
        '-d', '--debug',
        dest='debug',
        action='store_true',
        help="Log at debug level. Default: False",
    )
    common.set_defaults(debug=False)
    common.add_argument(
        '--seed',
        type=int,
        default=None,
        help="Seed for folds, sampling and bootstrap. Default: 0",
    )
    common.add_argument('--judgments', type=str, default=None,
                        help="Judgment JSON lines file")
    common.add_argument('--arpa', type=str, default=None,
                        help="ARPA n-gram model")
    common.add_argument('--lm-corpus', dest='lm_corpus', type=str, default=None,
                        help="LM corpus, one tokenized sentence per line")
    common.add_argument('--collocations', type=str, default=None,
                        help="Offset stats TSV")
    common.add_argument('--colloc-corpus', dest='colloc_corpus', type=str, default=None,
                        help="Corpus to build offset stats from")
    common.add_argument('--interactions', type=str, default=None,
                        help="Interaction list, the shipped list by default")
    return common


def parse_args():
    """
    Parse command line arguments for CLI.

    :return: namespace containing the arguments passed.
    """
    parser = argparse.ArgumentParser(
        description="Sentence compression by pruning dependency trees",
    )
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True
    common = _common_parser()

    train = subparsers.add_parser(
        'train',
        parents=[common],
        help="Cross validate and train single prune acceptability models",
    )
    train.add_argument(
        '--variant',
        type=str,
        choices=list(constants.MODEL_VARIANTS) + ['all'],
        default='full',
        help="Feature groups of the model. Default: full",
    )
    train.add_argument(
        '--ablate',
        type=str,
        choices=list(constants.ABLATIONS),
        action='append',
        default=[],
        help="Remove a feature family, may be repeated",
    )
    train.add_argument(
        '--C',
        dest='C',
        type=float,
        default=None,
        help="Train with this C instead of the cross validated one",
    )
    train.add_argument(
        '--normalizer',
        type=str,
        choices=constants.NORMALIZERS,
        default=None,
        help="LM score normalizer. Default: norm_lp",
    )

    evaluate = subparsers.add_parser(
        'evaluate',
        parents=[common],
        help="Evaluate models on the test split",
    )
    evaluate.add_argument(
        '--models',
        type=str,
        nargs='+',
        required=True,
        help="Model files, the first one is the reference for p-values",
    )
    evaluate.add_argument(
        '--multi',
        action='store_true',
        help="Evaluate the acceptability functions on multi prune judgments",
    )
    evaluate.add_argument(
        '--external',
        type=str,
        default=None,
        help="External scores keyed by pair_id (JSON or TSV)",
    )

    compress = subparsers.add_parser(
        'compress',
        parents=[common],
        help="Sample, rank and select compressions of a sentence",
    )
    compress.add_argument('--model', type=str, default=None, help="Model file")
    compress.add_argument('--conllu', type=str, default=None, help="CoNLL-U source file")
    compress.add_argument('--sentence-id', dest='sentence_id', type=str, default=None,
                          help="sent_id of the source sentence")
    compress.add_argument(
        '-B', '--budget',
        type=int,
        default=None,
        help="Max characters of the selected compression",
    )
    compress.add_argument(
        '-q', '--query',
        type=str,
        action='append',
        default=None,
        help="Query term the compression must keep, may be repeated",
    )
    compress.add_argument('--samples', type=int, default=None,
                          help="Number of sampled chains. Default: 1000")
    compress.add_argument('--skip-short', dest='skip_short', action='store_true',
                          help="Skip source sentences shorter than [sampler] min_source_chars. "
                               "Default: False")

    subparsers.add_parser(
        'agreement',
        parents=[common],
        help="Inter-annotator agreement and endorsement rates",
    )
    subparsers.add_parser(
        'lm-train',
        parents=[common],
        help="Train an n-gram model and write it as ARPA",
    )
    subparsers.add_parser(
        'colloc-build',
        parents=[common],
        help="Build collocation offset stats",
    )

    ingest = subparsers.add_parser(
        'ingest',
        parents=[common],
        help="Convert a CSV/TSV judgment table to canonical JSON lines",
    )
    ingest.add_argument('--table', type=str, required=True, help="CSV or TSV judgments")
    ingest.add_argument('--column-map', dest='column_map', type=str, default=None,
                        help="JSON object mapping table columns to judgment fields")
    ingest.add_argument('--split', type=str, choices=constants.SPLITS, default=None,
                        help="Split of all rows if the table has no split column")
    ingest.add_argument('--resplit', action='store_true',
                        help="Reassign splits by hashed pair_id")

    subparsers.add_parser(
        'verify-split',
        parents=[common],
        help="Check the train/test split and report corpus statistics",
    )
    reachability = subparsers.add_parser(
        'reachability',
        parents=[common],
        help="Fraction of gold compressions reachable by prunes",
    )
    reachability.add_argument('--gold', type=str, default=None,
                              help="Gold pairs JSON lines file")
    return parser.parse_args()


def _overrides(args):
    overrides = {
        ('run', 'seed'): args.seed,
        ('model', 'c'): getattr(args, 'C', None),
        ('model', 'normalizer'): getattr(args, 'normalizer', None),
        ('sampler', 'samples'): getattr(args, 'samples', None),
    }
    for dest, key in PATH_FLAGS.items():
        overrides[('paths', key)] = getattr(args, dest, None)
    return overrides


def run_pyprune(args):
    """
    Main function, handling logic for all subcommands

    :param args: Argparse arguments
    """
    output_dir = args.output
    os.makedirs(output_dir, exist_ok=True)

    constants.COMMAND = args.command
    constants.OUTPUT_FOLDER = output_dir
    constants.DEBUG = args.debug
    constants.RUN_PATH = io_utils.make_run_dir(
        command=args.command,
        output_dir=output_dir,
    )
    # Default log level is info, otherwise debug
    log_level = 20
    if constants.DEBUG:
        log_level = 10
    logger = io_utils.make_logger(
        log_dir=constants.RUN_PATH,
        logger_name=constants.LOG_NAME,
        log_level=log_level,
    )
    logger.info("command: {}".format(args.command))
    logger.info("output dir: {}".format(output_dir))
    logger.info("run dir: {}".format(constants.RUN_PATH))

    config = metadata.RunConfig(
        config_path=args.config,
        overrides=_overrides(args),
        required_paths=REQUIRED_PATHS[args.command],
    )
    config.copy_config_to_output(constants.RUN_PATH)
    logger.info("config: {}".format(args.config))
    logger.info("config hash: {}, seed: {}".format(constants.CONFIG_HASH, constants.SEED))

    if args.command == 'train':
        return train_wf.train(
            config,
            variant=args.variant,
            ablate=args.ablate,
            C=args.C,
        )
    if args.command == 'evaluate':
        if args.multi:
            return evaluate_wf.evaluate_functions(config, args.models[0], args.external)
        return evaluate_wf.evaluate_models(config, args.models, args.external)
    if args.command == 'compress':
        return compress_wf.compress(
            config,
            conllu_path=config.path('conllu'),
            sentence_id=args.sentence_id,
            budget=args.budget,
            query=args.query,
            nbr_samples=config.get('sampler', 'samples'),
            skip_short=args.skip_short,
        )
    if args.command == 'agreement':
        return agreement_wf.agreement(config)
    if args.command == 'lm-train':
        return data_wf.lm_train(config)
    if args.command == 'colloc-build':
        return data_wf.colloc_build(config)
    if args.command == 'ingest':
        return data_wf.ingest(
            config,
            args.table,
            column_map_path=args.column_map,
            split=args.split,
            resplit=args.resplit,
        )
    if args.command == 'verify-split':
        return data_wf.verify_split(config)
    if args.command == 'reachability':
        return data_wf.reachability(config)


def error_module(ex):
    """
    :param Exception ex: Raised exception
    :return str: Dotted name of the innermost repo module in the traceback
    """
    root = os.path.dirname(os.path.abspath(__file__))
    module = 'pyprune'
    for frame in traceback.extract_tb(ex.__traceback__):
        path = os.path.abspath(frame.filename)
        if path.startswith(root + os.sep):
            module = os.path.splitext(os.path.relpath(path, root))[0].replace(os.sep, '.')
    return module


def _report_error(ex, exit_code):
    message = "{}: {}".format(error_module(ex), ex)
    logging.getLogger(constants.LOG_NAME).error(message)
    print("pyprune: error: {}".format(message), file=sys.stderr)
    return exit_code


def main(args):
    """
    Runs a command and maps errors to exit codes:
    0 success, 2 invalid input or missing file, 3 infeasible request,
    4 data integrity error.

    :param args: Argparse arguments
    :return int: Exit code
    """
    try:
        run_pyprune(args)
    except PyPruneError as ex:
        return _report_error(ex, ex.exit_code)
    except (IOError, OSError) as ex:
        return _report_error(ex, 2)
    return 0


if __name__ == '__main__':
    args = parse_args()
    sys.exit(main(args))
