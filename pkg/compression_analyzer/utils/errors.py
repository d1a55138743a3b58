"""
Exceptions raised across pyprune.

Each family carries the exit code the command-line front end returns
when an exception of that family reaches it:
    2 invalid input, 3 infeasible request, 4 data integrity error
"""


class PyPruneError(Exception):
    exit_code = 1


class InvalidInputError(PyPruneError, ValueError):
    exit_code = 2


class ConlluFormatError(InvalidInputError):

    def __init__(self, line_no, message):
        """
        :param int line_no: 1-based line number of the offending line
        :param str message: What is wrong with the line
        """
        self.line_no = line_no
        super().__init__("CoNLL-U line {}: {}".format(line_no, message))


class ArpaFormatError(InvalidInputError):

    def __init__(self, section, message, line_no=None):
        """
        :param str section: ARPA section name, e.g. '\\data\\' or '\\2-grams:'
        :param str message: What is wrong with the section
        :param int/None line_no: Line number, if known
        """
        self.section = section
        self.line_no = line_no
        where = section if line_no is None else "{} (line {})".format(section, line_no)
        super().__init__("ARPA {}: {}".format(where, message))


class SchemaError(InvalidInputError):

    def __init__(self, record_number, message):
        self.record_number = record_number
        super().__init__("record {}: {}".format(record_number, message))


class InvalidOperationError(InvalidInputError):
    pass


class InvalidChainError(InvalidInputError):
    pass


class DegenerateDataError(InvalidInputError):
    pass


class UndefinedScoreError(InvalidInputError):
    pass


class UndefinedMetricError(InvalidInputError):
    pass


class ScoreLookupError(InvalidInputError, KeyError):

    def __str__(self):
        # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ''


class InfeasibleError(PyPruneError):
    exit_code = 3


class BudgetUnreachableError(InfeasibleError):

    def __init__(self, message, partial):
        """
        :param str message: Description of the failure
        :param CompressionCandidate partial: Candidate reached before the
            root-only remainder stopped the chain
        """
        self.partial = partial
        super().__init__(message)


class NoFeasibleCandidateError(InfeasibleError):
    pass


class IntegrityError(PyPruneError):
    exit_code = 4


class TreeStructureError(IntegrityError):

    def __init__(self, sentence_id, message):
        self.sentence_id = sentence_id
        super().__init__("sentence {}: {}".format(sentence_id, message))


class SplitViolationError(IntegrityError):

    def __init__(self, pair_ids):
        self.pair_ids = list(pair_ids)
        super().__init__(
            "pairs present in both train and test: {}".format(', '.join(self.pair_ids)),
        )
