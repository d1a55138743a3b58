import logging

from tabulate import tabulate

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.corpus as corpus
import compression_analyzer.load.report as report
import compression_analyzer.workflows.resources as resources
import interpretation.metrics as metrics
from compression_analyzer.utils.errors import UndefinedMetricError


def _kappa(table):
    try:
        return metrics.fleiss_kappa(table)
    except UndefinedMetricError as ex:
        logging.getLogger(constants.LOG_NAME).warning(str(ex))
        return float('nan')


def agreement(config):
    """
    Inter-annotator agreement of a judgment dataset: Fleiss kappa and
    worker-worker agreement overall and per split, deletion endorsement
    per dependency relation and per worker.
    Writes agreement.json, agreement.txt and dependency_rates.csv.

    :param RunConfig config: Run config with a judgments path
    :return dict: Agreement report
    """
    records, treebank = resources.load_records(config)
    frame = corpus.judgment_frame(records, treebank)

    scopes = [('all', records)]
    scopes.extend(
        (split, [record for record in records if record.split == split])
        for split in constants.SPLITS
    )
    agreement_rows = []
    by_scope = {}
    for scope, scope_records in scopes:
        table = metrics.rating_table(scope_records)
        by_scope[scope] = {
            'judgments': len(scope_records),
            'items': len(table),
            'fleiss_kappa': _kappa(table),
            'worker_worker_agreement': metrics.worker_worker_agreement(table),
        }
        agreement_rows.append([
            scope,
            str(len(scope_records)),
            metrics.format_auc(by_scope[scope]['fleiss_kappa']),
            metrics.format_auc(by_scope[scope]['worker_worker_agreement']),
        ])

    dependency_rates = metrics.per_dependency_rates(frame.dropna(subset=['deprel']))
    worker_rates = metrics.worker_rate_distribution(frame)

    writer = report.ReportWriter()
    payload = {
        'agreement': by_scope,
        'dependency_rates': {
            deprel: {'yes': int(row.yes), 'total': int(row.total), 'rate': float(row.rate)}
            for deprel, row in dependency_rates.iterrows()
        },
        'worker_rates': {
            'mean': worker_rates.mean,
            'std': worker_rates.std,
            'nbr_workers': len(worker_rates.rates),
            'rates': {str(worker): float(rate) for worker, rate in worker_rates.rates.items()},
        },
    }
    writer.write_json('agreement.json', payload)
    writer.write_csv('dependency_rates.csv', dependency_rates.reset_index())
    text = '\n\n'.join([
        tabulate(agreement_rows,
                 headers=['Judgments', 'Count', 'Fleiss κ', 'Worker-worker agreement'],
                 tablefmt='simple', disable_numparse=True),
        tabulate([[deprel, str(int(row.yes)), str(int(row.total)), '{:.3f}'.format(row.rate)]
                  for deprel, row in dependency_rates.iterrows()],
                 headers=['Relation', 'Yes', 'Total', 'Endorsement rate'],
                 tablefmt='simple', disable_numparse=True),
        'Worker endorsement rate: mean {:.3f}, std {:.3f} over {} workers'.format(
            worker_rates.mean, worker_rates.std, len(worker_rates.rates)),
    ])
    writer.write_text('agreement.txt', text)
    return payload
