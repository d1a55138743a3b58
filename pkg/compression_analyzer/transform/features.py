"""
Feature extraction for single prune edits.

A feature vector is a dict {feature name: value} holding active features
only. Names are prefixed by their group:
    lm:      normalized LM score of the compression, source vs compression sign
    dep:     dependency relation of the pruned vertex
    worker:  worker id
    edit:    positional and collocation properties of the edit
    ix:      dependency relation x edit property interactions
"""
from functools import lru_cache
import hashlib
import logging
import os

import scipy.sparse as sparse

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.deptree as deptree
import compression_analyzer.transform.collocations as collocations
from compression_analyzer.utils.errors import InvalidInputError

DEFAULT_INTERACTIONS = os.path.join(os.path.dirname(__file__), 'interactions.tsv')


def load_interactions(path=None):
    """
    Reads the interaction list, one 'deprel<TAB>edit property' per line.
    Blank lines and lines starting with # are skipped.

    :param str/None path: Interaction list, None for the shipped default
    :return tuple: (deprel, edit property) pairs in file order
    """
    path = DEFAULT_INTERACTIONS if path is None else path
    if not os.path.isfile(path):
        raise IOError("Interaction list not found: {}".format(path))
    pairs = []
    with open(path, encoding='utf-8') as tsv_file:
        for line_no, line in enumerate(tsv_file, 1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            fields = line.split('\t')
            if len(fields) != 2 or fields[1] not in constants.EDIT_PROPERTIES:
                raise InvalidInputError(
                    "{} line {}: expected 'deprel<TAB>edit property' with property in {}".format(
                        path, line_no, ', '.join(constants.EDIT_PROPERTIES)),
                )
            pairs.append((fields[0], fields[1]))
    return tuple(pairs)


@lru_cache(maxsize=None)
def default_interactions():
    return load_interactions()


def edit_properties(tree, edit, stats=None):
    """
    Positional facts are taken relative to the kept tokens before the edit,
    so they hold for intermediate compressions too.

    :param DepTree tree: Source tree
    :param PruneEdit edit: Edit
    :param OffsetStats/None stats: Collocation stats
    :return set: Names of the active edit properties
    """
    before = edit.before_tokens
    active = set()
    if before[0] in edit.removed:
        active.add('removes_start')
    if before[-1] in edit.removed:
        active.add('removes_end')
    first_removed = min(edit.removed)
    position = before.index(first_removed)
    if position > 0 and deptree.is_punct(tree.token(before[position - 1])):
        active.add('follows_punct')
    if collocations.edit_breaks_collocation(stats, edit, tree):
        active.add('breaks_collocation')
    return active


def _relation_matches(deprel, relation):
    # 'nmod' in the interaction list also covers subtypes such as nmod:poss
    return deprel == relation or deprel.split(':')[0] == relation


def extract(tree, edit, worker=None, lm_bundle=None, stats=None,
            interactions=None, normalizer=None):
    """
    Feature vector for one prune edit as judged by one (optional) worker.

    :param DepTree tree: Source tree
    :param PruneEdit edit: Edit, valid for tree
    :param str/None worker: Worker id
    :param LMBundle/None lm_bundle: LM scores, None leaves out the lm group
    :param OffsetStats/None stats: Collocation stats
    :param tuple/None interactions: (deprel, edit property) pairs,
        None for the default list
    :param str/None normalizer: 'norm_lp' or 'slor'
    :return dict vector: {feature name: value}
    """
    normalizer = constants.NORMALIZER if normalizer is None else normalizer
    interactions = default_interactions() if interactions is None else interactions
    vector = {}
    if lm_bundle is not None:
        compression_score = lm_bundle.score(
            deptree.linearize(tree, edit.after_tokens),
            normalizer,
        )
        source_score = lm_bundle.score(tree.text, normalizer)
        vector['lm:{}_c'.format(normalizer)] = compression_score
        if source_score - compression_score > 0:
            vector['lm:s_minus_c_pos'] = 1.
    deprel = tree.token(edit.pruned_vertex).deprel
    vector['dep:' + deprel] = 1.
    if worker is not None:
        vector['worker:' + str(worker)] = 1.
    properties = edit_properties(tree, edit, stats)
    for prop in sorted(properties):
        vector['edit:' + prop] = 1.
    for relation, prop in interactions:
        if prop in properties and _relation_matches(deprel, relation):
            vector['ix:{}:{}'.format(relation, prop)] = 1.
    return vector


def with_worker(vector, worker):
    """
    :param dict vector: Worker free feature vector
    :param str worker: Worker id
    :return dict: Copy of vector with the worker feature added
    """
    vector = dict(vector)
    vector['worker:' + str(worker)] = 1.
    return vector


def select_groups(vector, groups):
    """
    :param dict vector: Feature vector
    :param iterable groups: Feature groups to keep, e.g. ('lm', 'dep')
    :return dict: Vector restricted to the groups
    """
    groups = set(groups)
    return {name: value for name, value in vector.items() if name.split(':')[0] in groups}


class FeatureSpace:

    def __init__(self, names):
        """
        Frozen name -> column index map. Names are sorted so that the same
        set of names always gives the same columns.

        :param iterable names: Feature names
        """
        self.names = tuple(sorted(set(names)))
        self.index = {name: column for column, name in enumerate(self.names)}

    @classmethod
    def from_vectors(cls, vectors):
        names = set()
        for vector in vectors:
            names.update(vector)
        return cls(names)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self.index

    @property
    def hash(self):
        return hashlib.sha1('\n'.join(self.names).encode('utf-8')).hexdigest()


def vectorize(space, vector, tally=None):
    """
    :param FeatureSpace space: Feature space
    :param dict vector: Feature vector
    :param Counter/None tally: Counts of dropped (unseen) names, updated in place
    :return csr_matrix: 1 x len(space) row
    """
    return vectorize_all(space, [vector], tally)


def vectorize_all(space, vectors, tally=None):
    """
    Names absent from the space are dropped and counted in tally.

    :param FeatureSpace space: Feature space
    :param list vectors: Feature vectors
    :param Counter/None tally: Counts of dropped names, updated in place
    :return csr_matrix: len(vectors) x len(space) matrix
    """
    rows = []
    columns = []
    data = []
    nbr_dropped = 0
    for row, vector in enumerate(vectors):
        for name, value in vector.items():
            column = space.index.get(name)
            if column is None:
                nbr_dropped += 1
                if tally is not None:
                    tally[name] += 1
                continue
            rows.append(row)
            columns.append(column)
            data.append(value)
    if nbr_dropped > 0:
        logging.getLogger(constants.LOG_NAME).debug(
            "Dropped {} unseen feature values".format(nbr_dropped))
    return sparse.csr_matrix(
        (data, (rows, columns)),
        shape=(len(vectors), len(space)),
        dtype=float,
    )
