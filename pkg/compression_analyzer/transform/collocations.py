"""
Word pair offset statistics and collocation tests.

Two words form a collocation when they co-occur often enough at a nearly
fixed, short signed distance, e.g. 'as well' or 'kind of'.
"""
import logging

import pandas as pd

import compression_analyzer.extract.constants as constants
from compression_analyzer.utils.errors import InvalidInputError

STATS_COLUMNS = ['w1', 'w2', 'count', 'mean', 'variance']


class OffsetStats:

    def __init__(self, frame, window):
        """
        :param pd.DataFrame frame: Columns w1, w2, count, mean, variance
        :param int window: Max token distance the stats were built with
        """
        self.frame = frame[STATS_COLUMNS].sort_values(['w1', 'w2']).reset_index(drop=True)
        self.window = window
        self._lookup = {
            (w1, w2): (int(count), float(mean), float(variance))
            for w1, w2, count, mean, variance in self.frame.itertuples(index=False, name=None)
        }

    def __len__(self):
        return len(self._lookup)

    def get(self, w1, w2):
        """
        :param str w1: First word (lowercase)
        :param str w2: Second word (lowercase)
        :return tuple/None: (count, mean, variance) or None if never seen
        """
        return self._lookup.get((w1, w2))


def build_offset_stats(corpus, window=None):
    """
    Count every ordered word pair within +-window tokens of each other and
    the mean and population variance of the signed offset
    position(w2) - position(w1). Words are lowercased.

    :param iterable corpus: Token lists, one per sentence
    :param int window: Max token distance
    :return OffsetStats stats: Offset statistics
    """
    window = constants.COLLOC_WINDOW if window is None else window
    if window < 1:
        raise InvalidInputError("collocation window must be >= 1, not {}".format(window))
    rows = []
    nbr_sentences = 0
    for sentence in corpus:
        nbr_sentences += 1
        tokens = [token.lower() for token in sentence]
        for i, w1 in enumerate(tokens):
            for j in range(i + 1, min(len(tokens), i + window + 1)):
                rows.append((w1, tokens[j], j - i))
                rows.append((tokens[j], w1, i - j))
    if nbr_sentences == 0:
        raise InvalidInputError("collocation corpus is empty")

    offsets = pd.DataFrame(rows, columns=['w1', 'w2', 'offset'])
    grouped = offsets.groupby(['w1', 'w2'])['offset']
    frame = pd.DataFrame({
        'count': grouped.count(),
        'mean': grouped.mean(),
        'variance': grouped.var(ddof=0),
    }).reset_index()
    if len(frame) == 0:
        frame = pd.DataFrame(columns=STATS_COLUMNS)
    logging.getLogger(constants.LOG_NAME).info(
        "Offset stats for {} word pairs from {} sentences".format(len(frame), nbr_sentences),
    )
    return OffsetStats(frame, window)


def is_collocation(stats, w1, w2, min_count=None):
    """
    :param OffsetStats stats: Offset statistics
    :param str w1: First word
    :param str w2: Second word
    :param int min_count: Min number of co-occurrences
    :return bool: True if count >= min_count, variance < 2 and |mean| < 1.5
    """
    min_count = constants.COLLOC_MIN_COUNT if min_count is None else min_count
    entry = stats.get(w1.lower(), w2.lower())
    if entry is None:
        return False
    count, mean, variance = entry
    return count >= min_count and \
        variance < constants.COLLOC_MAX_VARIANCE and \
        abs(mean) < constants.COLLOC_MAX_MEAN


def edit_breaks_collocation(stats, edit, tree, min_count=None):
    """
    An edit breaks a collocation if it removes exactly one word of a
    collocation pair that was within the window in the pre-edit token
    sequence.

    :param OffsetStats/None stats: Offset statistics, None disables the test
    :param PruneEdit edit: Prune edit
    :param DepTree tree: Source tree
    :param int min_count: Min number of co-occurrences
    :return bool: True if a collocation is split
    """
    if stats is None:
        return False
    before = edit.before_tokens
    for a, i in enumerate(before):
        for j in before[a + 1:a + stats.window + 1]:
            if (i in edit.removed) == (j in edit.removed):
                continue
            if is_collocation(stats, tree.token(i).form, tree.token(j).form, min_count):
                return True
    return False


def save_offset_stats(stats, path):
    """
    Sorted tab separated file with header w1 w2 count mean variance.

    :param OffsetStats stats: Offset statistics
    :param str path: Output path
    """
    with open(path, 'w', encoding='utf-8') as tsv_file:
        tsv_file.write('\t'.join(STATS_COLUMNS) + '\n')
        for w1, w2, count, mean, variance in stats.frame.itertuples(index=False, name=None):
            tsv_file.write('{}\t{}\t{}\t{}\t{}\n'.format(
                w1, w2, int(count), repr(float(mean)), repr(float(variance))))


def load_offset_stats(path, window=None):
    """
    :param str path: TSV written by save_offset_stats
    :param int window: Window the stats were built with
    :return OffsetStats stats: Offset statistics
    """
    window = constants.COLLOC_WINDOW if window is None else window
    rows = []
    with open(path, encoding='utf-8') as tsv_file:
        header = tsv_file.readline().rstrip('\n').split('\t')
        if header != STATS_COLUMNS:
            raise InvalidInputError(
                "{}: header must be {}".format(path, ' '.join(STATS_COLUMNS)))
        for line_no, line in enumerate(tsv_file, 2):
            line = line.rstrip('\n')
            if not line:
                continue
            fields = line.split('\t')
            if len(fields) != 5:
                raise InvalidInputError("{} line {}: expected 5 columns".format(path, line_no))
            rows.append((fields[0], fields[1], int(fields[2]),
                         float(fields[3]), float(fields[4])))
    return OffsetStats(pd.DataFrame(rows, columns=STATS_COLUMNS), window)
