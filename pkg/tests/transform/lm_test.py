import io
import math

import pytest

import compression_analyzer.extract.constants as constants
import compression_analyzer.transform.lm as lm
from compression_analyzer.utils.errors import (
    ArpaFormatError,
    InvalidInputError,
    UndefinedScoreError,
)

SCORED_SENTENCES = [
    'pakistan launched a search',
    'the missing ambassador',
    'he ran home',
    'she hit a home run as well',
    'a day after he disappeared',
    'they launched a search on tuesday',
    'the ambassador to afghanistan',
    'home run',
    'as well',
    'search for its ambassador',
    'he hit a home run on tuesday',
    'the taliban area',
    'quickly he ran',
    'missing',
    'a search began',
    'zebras launched rockets',
    'she ran quickly as well',
    'the search in the area',
    'pakistan searches',
    'on tuesday',
]


def test_tokenize():
    assert lm.tokenize('He ran, quickly.') == ['He', 'ran', ',', 'quickly', '.']


def test_unigram_order_probabilities():
    model = lm.train_ngram([['a', 'a', 'a']], order=1, discount=.75)
    assert 10 ** model.entries[('a',)][0] == pytest.approx(.6875)
    assert 10 ** model.entries[(constants.EOS,)][0] == pytest.approx(.1875)
    assert 10 ** model.entries[(constants.UNK,)][0] == pytest.approx(.125)
    assert model.entries[(constants.BOS,)][0] == constants.ARPA_NEVER


def test_bigram_probabilities():
    model = lm.train_ngram([['a', 'b'], ['a']], order=2, discount=.75)
    assert 10 ** model.entries[('a',)][0] == pytest.approx(.3625)
    assert 10 ** model.entries[('b',)][0] == pytest.approx(.1625)
    assert 10 ** model.entries[(constants.UNK,)][0] == pytest.approx(.1125)
    assert 10 ** model.entries[(constants.BOS,)][1] == pytest.approx(.375)
    assert 10 ** model.entries[('a',)][1] == pytest.approx(.75)
    assert 10 ** model.entries[('a', 'b')][0] == pytest.approx(.246875)
    expected = math.log(.0609375) + math.log(.271875) + math.log(.396875)
    assert model.logprob(['b', 'a']) == pytest.approx(expected, abs=1e-9)


def test_conditional_probabilities_sum_to_one(toy_corpus):
    model = lm.train_ngram(toy_corpus, order=3)
    words = [w for w in model.vocabulary if w != constants.BOS]
    for context in [(constants.BOS,), ('a', 'home'), ('the',), ('zebra', 'the')]:
        mapped = tuple(model._map(w) if w != constants.BOS else w for w in context)
        total = sum(10 ** model.score(mapped, word) for word in words)
        assert total == pytest.approx(1., abs=1e-9)


def test_unknown_words_lowercased(toy_corpus):
    model = lm.train_ngram(toy_corpus, order=2)
    assert model.logprob(['Pakistan']) == model.logprob(['pakistan'])
    assert model.logprob(['zebra']) == model.logprob(['okapi'])


@pytest.mark.parametrize('kwargs', [
    {'order': 0},
    {'order': 6},
    {'discount': 1.},
    {'discount': 0.},
])
def test_train_invalid(toy_corpus, kwargs):
    with pytest.raises(InvalidInputError):
        lm.train_ngram(toy_corpus, **kwargs)


def test_train_empty_corpus():
    with pytest.raises(InvalidInputError):
        lm.train_ngram([[], []])


def test_arpa_round_trip(toy_corpus):
    model = lm.train_ngram(toy_corpus, order=3)
    stream = io.StringIO()
    lm.export_arpa(model, stream)
    loaded = lm.load_arpa(stream.getvalue())
    assert loaded.order == 3
    for sentence in SCORED_SENTENCES:
        tokens = sentence.split()
        assert loaded.logprob(tokens) == pytest.approx(model.logprob(tokens), abs=1e-9)


def test_save_read_arpa(toy_corpus, tmp_path):
    model = lm.train_ngram(toy_corpus, order=2)
    path = str(tmp_path / 'lm.arpa')
    lm.save_arpa(model, path)
    assert lm.read_arpa(path).entries == model.entries


ARPA = """\\data\\
ngram 1=3
ngram 2=1

\\1-grams:
-0.5\t<s>\t-0.3
-0.3\ta\t-0.2
-0.4\t</s>

\\2-grams:
-0.1\t<s> a

\\end\\
"""


def test_load_arpa_adds_unk():
    model = lm.load_arpa(ARPA)
    assert model.entries[(constants.UNK,)] == (constants.ARPA_NEVER, 0.)
    assert model.entries[('<s>', 'a')] == (-0.1, 0.)
    assert model.score(('<s>',), 'a') == -0.1
    assert model.score(('a',), '</s>') == pytest.approx(-0.2 - 0.4)


def test_load_arpa_missing_data():
    with pytest.raises(ArpaFormatError) as ex:
        lm.load_arpa(ARPA.replace('\\data\\\n', ''))
    assert ex.value.section == '\\data\\'


def test_load_arpa_count_mismatch():
    with pytest.raises(ArpaFormatError) as ex:
        lm.load_arpa(ARPA.replace('ngram 1=3', 'ngram 1=4'))
    assert ex.value.section == '\\1-grams:'


def test_load_arpa_missing_section():
    with pytest.raises(ArpaFormatError) as ex:
        lm.load_arpa(ARPA.replace('ngram 2=1', 'ngram 2=1\nngram 3=2'))
    assert ex.value.section == '\\3-grams:'


def test_load_arpa_missing_end():
    with pytest.raises(ArpaFormatError) as ex:
        lm.load_arpa(ARPA.replace('\\end\\', ''))
    assert ex.value.section == '\\end\\'


def test_unigram_from_ngram(toy_corpus):
    unigram = lm.unigram_from_ngram(lm.train_ngram(toy_corpus, order=2))
    assert constants.BOS not in unigram.logprobs
    assert constants.EOS not in unigram.logprobs
    assert sum(math.exp(lp) for lp in unigram.logprobs.values()) == pytest.approx(1.)


def test_train_unigram():
    unigram = lm.train_unigram([['a', 'a', 'b']], discount=.5)
    # (2 - .5) / 3 + .5 * 2 / 3 / 3
    assert math.exp(unigram.logprobs['a']) == pytest.approx(1.5 / 3 + 1. / 9)
    assert unigram.logprob(['A', 'zebra']) == pytest.approx(
        unigram.logprobs['a'] + unigram.logprobs[constants.UNK])


def test_norm_lp_equal_models():
    model = lm.NGramModel(1, {
        ('a',): (math.log10(.5), 0.),
        (constants.UNK,): (math.log10(.5), 0.),
        (constants.EOS,): (0., 0.),
        (constants.BOS,): (constants.ARPA_NEVER, 0.),
    })
    unigram = lm.UnigramModel({'a': math.log(.5), constants.UNK: math.log(.5)})
    assert lm.norm_lp(model, unigram, ['a', 'a', 'b']) == pytest.approx(-1., abs=1e-12)
    assert lm.slor(model, unigram, ['a', 'b']) == pytest.approx(0., abs=1e-12)


def test_norm_lp_undefined(lm_bundle):
    with pytest.raises(UndefinedScoreError):
        lm.norm_lp(lm_bundle.ngram, lm_bundle.unigram, [])


def test_slor_empty(lm_bundle):
    with pytest.raises(InvalidInputError):
        lm.slor(lm_bundle.ngram, lm_bundle.unigram, [])


def test_bundle_scores(lm_bundle):
    text = 'He ran home quickly.'
    tokens = lm.tokenize(text)
    assert lm_bundle.norm_lp(text) == lm.norm_lp(lm_bundle.ngram, lm_bundle.unigram, tokens)
    assert lm_bundle.score(text, 'slor') == lm.slor(lm_bundle.ngram, lm_bundle.unigram, tokens)
    # fluent text scores higher than scrambled text
    assert lm_bundle.norm_lp('he ran home quickly') > lm_bundle.norm_lp('quickly home he ran')
    with pytest.raises(InvalidInputError):
        lm_bundle.score(text, 'perplexity')


def test_unigram_model_needs_unk():
    with pytest.raises(InvalidInputError):
        lm.UnigramModel({'a': 0.})


def test_load_lm_bundle(data_dir):
    bundle = lm.load_lm_bundle(corpus_path=data_dir + '/lm_corpus.txt', order=2, discount=.75)
    assert bundle.ngram.order == 2
    with pytest.raises(InvalidInputError):
        lm.load_lm_bundle()


@pytest.mark.parametrize('factor', [.5, 2., 7.])
def test_norm_lp_scale_invariant(lm_bundle, factor):
    model = lm_bundle.ngram
    scaled_model = lm.NGramModel(model.order, {
        ngram: (logprob * factor, backoff * factor)
        for ngram, (logprob, backoff) in model.entries.items()
    })
    scaled_unigram = lm.UnigramModel({
        word: logprob * factor for word, logprob in lm_bundle.unigram.logprobs.items()
    })
    for sentence in SCORED_SENTENCES:
        tokens = sentence.split()
        assert scaled_model.logprob(tokens) == pytest.approx(model.logprob(tokens) * factor)
        assert lm.norm_lp(scaled_model, scaled_unigram, tokens) == \
            pytest.approx(lm.norm_lp(model, lm_bundle.unigram, tokens))
