"""
Backoff n-gram language model (ARPA), unigram model and the NormLP and
SLOR sentence normalizations.

All scores returned are natural logs. ARPA files store log10 values, which
are kept as read and converted when scoring.
"""
from collections import Counter
from functools import lru_cache
import io
import logging
import math
import re

from nltk.tokenize import TreebankWordTokenizer
from nltk.util import ngrams

import compression_analyzer.extract.constants as constants
import compression_analyzer.utils.io_utils as io_utils
from compression_analyzer.utils.errors import (
    ArpaFormatError,
    InvalidInputError,
    UndefinedScoreError,
)

LN10 = math.log(10)
COUNT_LINE = re.compile(r'^ngram\s+(\d+)\s*=\s*(\d+)$')
SECTION_LINE = re.compile(r'^\\(\d+)-grams:$')

_tokenizer = TreebankWordTokenizer()


def tokenize(text):
    """
    Re-tokenize a linearized text the way the LM was trained.

    :param str text: Detokenized text
    :return list: Tokens
    """
    return _tokenizer.tokenize(text)


class NGramModel:

    def __init__(self, order, entries):
        """
        :param int order: Maximum n-gram length
        :param dict entries: {ngram tuple: (log10 probability, log10 backoff)}
        """
        if order < 1:
            raise InvalidInputError("n-gram order must be >= 1, not {}".format(order))
        self.order = order
        self.entries = entries

    @property
    def vocabulary(self):
        return {ngram[0] for ngram in self.entries if len(ngram) == 1}

    def _map(self, token):
        token = token.lower()
        return token if (token,) in self.entries else constants.UNK

    def score(self, context, word):
        """
        Backoff log10 probability of word given context. Both are mapped
        tokens; the word is always a stored unigram.

        :param tuple context: Preceding tokens, at most order - 1 of them
        :param str word: Predicted token
        :return float: log10 p(word | context)
        """
        backoff = 0.
        while True:
            entry = self.entries.get(context + (word,))
            if entry is not None:
                return backoff + entry[0]
            if len(context) == 0:
                return backoff + self.entries[(constants.UNK,)][0]
            context_entry = self.entries.get(context)
            if context_entry is not None:
                backoff += context_entry[1]
            context = context[1:]

    def logprob(self, tokens):
        """
        Natural log probability of a sentence, with <s> and </s> added.
        Tokens are lowercased, unknown tokens are scored as <unk>.

        :param list tokens: Sentence tokens
        :return float: ln p_m(sentence)
        """
        sequence = [constants.BOS] + [self._map(t) for t in tokens] + [constants.EOS]
        log10_prob = 0.
        for i in range(1, len(sequence)):
            context = tuple(sequence[max(0, i - self.order + 1):i])
            log10_prob += self.score(context, sequence[i])
        return log10_prob * LN10


class UnigramModel:

    def __init__(self, logprobs):
        """
        :param dict logprobs: {word: natural log probability}, <unk> included
        """
        if constants.UNK not in logprobs:
            raise InvalidInputError("unigram model has no {} entry".format(constants.UNK))
        self.logprobs = logprobs

    def logprob(self, tokens):
        """
        :param list tokens: Sentence tokens, no boundary symbols are added
        :return float: ln p_u(sentence)
        """
        unk = self.logprobs[constants.UNK]
        return sum(self.logprobs.get(token.lower(), unk) for token in tokens)


def _clean_corpus(corpus):
    sentences = [[token.lower() for token in sentence] for sentence in corpus]
    sentences = [sentence for sentence in sentences if sentence]
    if len(sentences) == 0:
        raise InvalidInputError("LM training corpus is empty")
    return sentences


def _check_discount(discount):
    if not 0. < discount < 1.:
        raise InvalidInputError("discount must be in (0, 1), not {}".format(discount))


def _discounted_unigrams(counts, discount):
    """
    Absolute discounting with the freed mass spread uniformly over the
    observed types plus <unk>.

    :param Counter counts: Unigram counts
    :param float discount: Absolute discount
    :return dict: {word: probability}, <unk> included
    """
    total = sum(counts.values())
    nbr_types = len(counts)
    uniform = discount * nbr_types / total / (nbr_types + 1)
    probs = {
        word: max(count - discount, 0.) / total + uniform
        for word, count in counts.items()
    }
    probs[constants.UNK] = probs.get(constants.UNK, 0.) + uniform
    return probs


def train_ngram(corpus, order=None, discount=None):
    """
    Interpolated absolute discounting:
    p(w|h) = (c(hw) - d) / c(h.) + gamma(h) p(w|h'),
    gamma(h) = d N1+(h.) / c(h.), stored as the backoff weight of h.

    :param iterable corpus: Token lists, one per sentence
    :param int order: Maximum n-gram length, 1..5
    :param float discount: Absolute discount
    :return NGramModel model: Trained model
    """
    order = constants.LM_ORDER if order is None else order
    discount = constants.DISCOUNT if discount is None else discount
    if not 1 <= order <= 5:
        raise InvalidInputError("n-gram order must be in 1..5, not {}".format(order))
    _check_discount(discount)
    sentences = _clean_corpus(corpus)

    counts = {n: Counter() for n in range(1, order + 1)}
    for sentence in sentences:
        padded = [constants.BOS] + sentence + [constants.EOS]
        for n in range(1, order + 1):
            counts[n].update(ngrams(padded, n))
    del counts[1][(constants.BOS,)]

    unigram_probs = _discounted_unigrams(
        Counter({ngram[0]: c for ngram, c in counts[1].items()}),
        discount,
    )
    probs = {(word,): p for word, p in unigram_probs.items()}
    entries = {ngram: (math.log10(p), 0.) for ngram, p in probs.items()}
    entries[(constants.BOS,)] = (constants.ARPA_NEVER, 0.)

    for n in range(2, order + 1):
        context_totals = Counter()
        context_types = Counter()
        for ngram, count in counts[n].items():
            context_totals[ngram[:-1]] += count
            context_types[ngram[:-1]] += 1
        gammas = {
            context: discount * context_types[context] / total
            for context, total in context_totals.items()
        }
        for context, gamma in gammas.items():
            lp, _ = entries[context]
            entries[context] = (lp, math.log10(gamma))
        for ngram, count in counts[n].items():
            context = ngram[:-1]
            # suffixes of an observed n-gram are observed too
            p = (count - discount) / context_totals[context] + \
                gammas[context] * probs[ngram[1:]]
            probs[ngram] = p
            entries[ngram] = (math.log10(p), 0.)

    model = NGramModel(order, entries)
    logging.getLogger(constants.LOG_NAME).info(
        "Trained {}-gram model on {} sentences: {} n-grams".format(
            order, len(sentences), len(entries)),
    )
    return model


def export_arpa(model, stream):
    """
    Write a model in ARPA format. Floats are written with repr so that
    loading the file gives back identical scores.

    :param NGramModel model: Model to write
    :param file stream: Open text stream
    """
    by_order = {n: [] for n in range(1, model.order + 1)}
    for ngram in sorted(model.entries):
        by_order[len(ngram)].append(ngram)
    stream.write('\\data\\\n')
    for n in range(1, model.order + 1):
        stream.write('ngram {}={}\n'.format(n, len(by_order[n])))
    for n in range(1, model.order + 1):
        stream.write('\n\\{}-grams:\n'.format(n))
        for ngram in by_order[n]:
            lp, bo = model.entries[ngram]
            if n < model.order:
                stream.write('{}\t{}\t{}\n'.format(repr(lp), ' '.join(ngram), repr(bo)))
            else:
                stream.write('{}\t{}\n'.format(repr(lp), ' '.join(ngram)))
    stream.write('\n\\end\\\n')


def save_arpa(model, path):
    with open(path, 'w', encoding='utf-8') as arpa_file:
        export_arpa(model, arpa_file)


def load_arpa(stream):
    """
    Read an ARPA backoff model. Log10 values are stored as read.
    A model without <unk> gets one with the ARPA 'never' probability.

    :param file/str stream: Open text stream or ARPA text
    :return NGramModel model: Loaded model
    :raise ArpaFormatError: Missing sections or count mismatches
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    lines = ((line_no, line.strip()) for line_no, line in enumerate(stream, 1))

    for line_no, line in lines:
        if line == '\\data\\':
            break
    else:
        raise ArpaFormatError('\\data\\', "missing section header")

    declared = {}
    section = None
    for line_no, line in lines:
        if not line:
            if declared:
                break
            continue
        match = COUNT_LINE.match(line)
        if match is None:
            section = line
            break
        declared[int(match.group(1))] = int(match.group(2))
    if not declared:
        raise ArpaFormatError('\\data\\', "no ngram counts declared")
    order = max(declared)

    entries = {}
    found = {}
    current = None
    ended = False
    pending = [] if section is None else [(line_no, section)]
    for line_no, line in _chain(pending, lines):
        if not line:
            continue
        if line == '\\end\\':
            ended = True
            break
        match = SECTION_LINE.match(line)
        if match is not None:
            current = int(match.group(1))
            if current not in declared:
                raise ArpaFormatError(line, "section not declared in \\data\\", line_no)
            found[current] = 0
            continue
        if current is None:
            raise ArpaFormatError('\\data\\', "unexpected line '{}'".format(line), line_no)
        fields = line.split()
        section_name = '\\{}-grams:'.format(current)
        if len(fields) == current + 1:
            backoff = 0.
        elif len(fields) == current + 2:
            backoff = float(fields[-1])
        else:
            raise ArpaFormatError(
                section_name, "expected {} words per entry".format(current), line_no,
            )
        try:
            logprob = float(fields[0])
        except ValueError:
            raise ArpaFormatError(section_name, "invalid log probability", line_no)
        entries[tuple(fields[1:current + 1])] = (logprob, backoff)
        found[current] += 1
    if not ended:
        raise ArpaFormatError('\\end\\', "missing section header")

    for n in sorted(declared):
        section_name = '\\{}-grams:'.format(n)
        if n not in found:
            raise ArpaFormatError(section_name, "missing section header")
        if found[n] != declared[n]:
            raise ArpaFormatError(
                section_name,
                "count declared {} but {} listed".format(declared[n], found[n]),
            )
    logger = logging.getLogger(constants.LOG_NAME)
    if (constants.UNK,) not in entries:
        logger.warning("ARPA model has no {}, adding it with log10 p = {}".format(
            constants.UNK, constants.ARPA_NEVER))
        entries[(constants.UNK,)] = (constants.ARPA_NEVER, 0.)
    logger.info("Loaded {}-gram model with {} n-grams".format(order, len(entries)))
    return NGramModel(order, entries)


def _chain(pending, lines):
    yield from pending
    yield from lines


def read_arpa(path):
    with open(path, encoding='utf-8') as arpa_file:
        return load_arpa(arpa_file)


def train_unigram(corpus, discount=None):
    """
    Absolutely discounted unigram model over words, no boundary symbols.

    :param iterable corpus: Token lists, one per sentence
    :param float discount: Absolute discount
    :return UnigramModel: Model with reserved <unk> mass
    """
    discount = constants.DISCOUNT if discount is None else discount
    _check_discount(discount)
    sentences = _clean_corpus(corpus)
    counts = Counter(token for sentence in sentences for token in sentence)
    probs = _discounted_unigrams(counts, discount)
    return UnigramModel({word: math.log(p) for word, p in probs.items()})


def unigram_from_ngram(model):
    """
    Unigram distribution of an n-gram model, without <s> and </s>,
    renormalized to sum to 1.

    :param NGramModel model: Backoff model
    :return UnigramModel: Unigram model
    """
    probs = {
        ngram[0]: 10 ** lp
        for ngram, (lp, _) in model.entries.items()
        if len(ngram) == 1 and ngram[0] not in (constants.BOS, constants.EOS)
    }
    total = sum(probs.values())
    if total <= 0:
        raise InvalidInputError("n-gram model has no unigram mass outside boundary symbols")
    return UnigramModel({word: math.log(p / total) for word, p in probs.items()})


def norm_lp(model, unigram, tokens):
    """
    NormLP = -ln p_m(tokens) / ln p_u(tokens). Higher is better formed.

    :param NGramModel model: Backoff model, boundary symbols included
    :param UnigramModel unigram: Unigram model, no boundary symbols
    :param list tokens: Sentence tokens
    :return float: NormLP
    :raise UndefinedScoreError: If ln p_u is (nearly) 0
    """
    lp_u = unigram.logprob(tokens)
    if abs(lp_u) < constants.MIN_UNIGRAM_LOGPROB:
        raise UndefinedScoreError(
            "NormLP undefined, unigram log probability is {}".format(lp_u))
    return -model.logprob(tokens) / lp_u


def slor(model, unigram, tokens):
    """
    SLOR = (ln p_m(tokens) - ln p_u(tokens)) / len(tokens)

    :param NGramModel model: Backoff model
    :param UnigramModel unigram: Unigram model
    :param list tokens: Sentence tokens
    :return float: SLOR
    """
    if len(tokens) == 0:
        raise InvalidInputError("SLOR of an empty sentence is undefined")
    return (model.logprob(tokens) - unigram.logprob(tokens)) / len(tokens)


class LMBundle:

    def __init__(self, ngram, unigram, cache_size=100000):
        """
        N-gram and unigram models with memoized text level scores.

        :param NGramModel ngram: Backoff model
        :param UnigramModel unigram: Unigram model
        :param int cache_size: Max number of cached texts per score
        """
        self.ngram = ngram
        self.unigram = unigram
        self.norm_lp = lru_cache(maxsize=cache_size)(self._norm_lp)
        self.slor = lru_cache(maxsize=cache_size)(self._slor)

    def _norm_lp(self, text):
        return norm_lp(self.ngram, self.unigram, tokenize(text))

    def _slor(self, text):
        return slor(self.ngram, self.unigram, tokenize(text))

    def score(self, text, normalizer=None):
        """
        :param str text: Detokenized text
        :param str normalizer: 'norm_lp' or 'slor', defaults to constants.NORMALIZER
        :return float: Normalized LM score
        """
        normalizer = constants.NORMALIZER if normalizer is None else normalizer
        if normalizer == 'norm_lp':
            return self.norm_lp(text)
        if normalizer == 'slor':
            return self.slor(text)
        raise InvalidInputError("unknown normalizer '{}'".format(normalizer))


def load_lm_bundle(arpa_path=None, corpus_path=None, order=None, discount=None):
    """
    Build the LM bundle used for scoring. The n-gram model is read from an
    ARPA file if given, otherwise trained on the corpus. The unigram model is
    trained on the corpus if given, otherwise read off the n-gram model.

    :param str/None arpa_path: ARPA file
    :param str/None corpus_path: One whitespace-tokenized sentence per line
    :param int order: Order when training
    :param float discount: Discount when training
    :return LMBundle: Bundle
    """
    if arpa_path is None and corpus_path is None:
        raise InvalidInputError("an ARPA model or an LM training corpus is needed")
    corpus = None if corpus_path is None else io_utils.read_token_corpus(corpus_path)
    if arpa_path is not None:
        ngram = read_arpa(arpa_path)
    else:
        ngram = train_ngram(corpus, order=order, discount=discount)
    if corpus is not None:
        unigram = train_unigram(corpus, discount=discount)
    else:
        unigram = unigram_from_ngram(ngram)
    return LMBundle(ngram, unigram)
