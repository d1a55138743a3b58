import json
import os

import pytest

import compression_analyzer.extract.constants as constants
import compression_analyzer.extract.deptree as deptree
import compression_analyzer.transform.collocations as collocations
import compression_analyzer.transform.lm as lm

# Parse of the example sentence, UD style basic dependencies
AMBASSADOR_CONLLU = """# sent_id = ambassador
# text = Pakistan launched a search for its missing ambassador to Afghanistan on Tuesday, a day after he disappeared in a Taliban area.
1\tPakistan\t_\tPROPN\t_\t_\t2\tnsubj\t_\t_
2\tlaunched\t_\tVERB\t_\t_\t0\troot\t_\t_
3\ta\t_\tDET\t_\t_\t4\tdet\t_\t_
4\tsearch\t_\tNOUN\t_\t_\t2\tdobj\t_\t_
5\tfor\t_\tADP\t_\t_\t8\tcase\t_\t_
6\tits\t_\tPRON\t_\t_\t8\tnmod:poss\t_\t_
7\tmissing\t_\tADJ\t_\t_\t8\tamod\t_\t_
8\tambassador\t_\tNOUN\t_\t_\t4\tnmod\t_\t_
9\tto\t_\tADP\t_\t_\t10\tcase\t_\t_
10\tAfghanistan\t_\tPROPN\t_\t_\t8\tnmod\t_\t_
11\ton\t_\tADP\t_\t_\t12\tcase\t_\t_
12\tTuesday\t_\tPROPN\t_\t_\t2\tnmod:tmod\t_\t_
13\t,\t_\tPUNCT\t_\t_\t2\tpunct\t_\t_
14\ta\t_\tDET\t_\t_\t15\tdet\t_\t_
15\tday\t_\tNOUN\t_\t_\t2\tnmod:tmod\t_\t_
16\tafter\t_\tSCONJ\t_\t_\t18\tmark\t_\t_
17\the\t_\tPRON\t_\t_\t18\tnsubj\t_\t_
18\tdisappeared\t_\tVERB\t_\t_\t15\tacl\t_\t_
19\tin\t_\tADP\t_\t_\t22\tcase\t_\t_
20\ta\t_\tDET\t_\t_\t22\tdet\t_\t_
21\tTaliban\t_\tPROPN\t_\t_\t22\tcompound\t_\t_
22\tarea\t_\tNOUN\t_\t_\t18\tnmod\t_\t_
23\t.\t_\tPUNCT\t_\t_\t2\tpunct\t_\t_

"""

SMALL_CONLLU = """# sent_id = s2
1\tHe\t_\t_\t_\t_\t2\tnsubj\t_\t_
2\tran\t_\t_\t_\t_\t0\troot\t_\t_
3\thome\t_\t_\t_\t_\t2\tadvmod\t_\t_
4\tquickly\t_\t_\t_\t_\t2\tadvmod\t_\t_
5\t.\t_\t_\t_\t_\t2\tpunct\t_\t_

# sent_id = s3
1\tShe\t_\t_\t_\t_\t2\tnsubj\t_\t_
2\thit\t_\t_\t_\t_\t0\troot\t_\t_
3\ta\t_\t_\t_\t_\t5\tdet\t_\t_
4\thome\t_\t_\t_\t_\t5\tcompound\t_\t_
5\trun\t_\t_\t_\t_\t2\tdobj\t_\t_
6\tas\t_\t_\t_\t_\t2\tadvmod\t_\t_
7\twell\t_\t_\t_\t_\t6\tfixed\t_\t_
8\t.\t_\t_\t_\t_\t2\tpunct\t_\t_

"""

TOY_CORPUS = [
    'pakistan launched a search for its missing ambassador',
    'the ambassador disappeared on tuesday',
    'he ran home quickly',
    'she hit a home run as well',
    'a search for the missing ambassador began on tuesday',
    'he disappeared in a taliban area',
    'they launched a search in the area',
    'she ran home as well',
    'the search for the ambassador to afghanistan',
    'a day after he disappeared',
    'he hit a home run',
    'pakistan searches for missing ambassador',
    'the missing ambassador to afghanistan',
    'she launched a search on tuesday',
    'he ran quickly as well',
    'they hit a home run on tuesday',
]

# Relations endorsed by the simulated workers
YES_RELATIONS = {'amod', 'nmod', 'nmod:tmod', 'nmod:poss', 'compound', 'advmod', 'acl'}
WORKERS = ('w1', 'w2', 'w3')


@pytest.fixture(autouse=True)
def restore_constants():
    """
    Workflows write resolved settings into the constants namespace.
    """
    saved = {
        name: getattr(constants, name) for name in dir(constants)
        if name.isupper()
    }
    yield
    for name, value in saved.items():
        setattr(constants, name, value)


@pytest.fixture(scope="session")
def ambassador_tree():
    return deptree.parse_conllu(AMBASSADOR_CONLLU)[0]


@pytest.fixture(scope="session")
def small_trees():
    return deptree.parse_conllu(SMALL_CONLLU)


@pytest.fixture(scope="session")
def toy_corpus():
    return [line.split() for line in TOY_CORPUS]


@pytest.fixture(scope="session")
def lm_bundle(toy_corpus):
    return lm.LMBundle(
        lm.train_ngram(toy_corpus, order=3, discount=.75),
        lm.train_unigram(toy_corpus, discount=.75),
    )


@pytest.fixture(scope="session")
def colloc_corpus():
    corpus = []
    for _ in range(12):
        corpus.append('she hit a home run'.split())
        corpus.append('he sang as well'.split())
    corpus.append('the home team won'.split())
    return corpus


@pytest.fixture(scope="session")
def offset_stats(colloc_corpus):
    return collocations.build_offset_stats(colloc_corpus, window=4)


def judgment_rows(trees):
    """
    Three workers judge every single prune of every tree. w1 and w2 follow
    YES_RELATIONS, w3 flips the label of every fifth vertex.
    Every fourth pair is in the test split. Two multi prune pairs of the
    example sentence are added to the test split.
    """
    rows = []
    pair_number = 0
    for tree in trees:
        for vertex in tree.indices:
            if vertex == tree.root:
                continue
            label = int(tree.token(vertex).deprel in YES_RELATIONS)
            split = 'test' if pair_number % 4 == 0 else 'train'
            pair_id = 'p{}'.format(pair_number)
            for worker in WORKERS:
                worker_label = label
                if worker == 'w3' and vertex % 5 == 0:
                    worker_label = 1 - label
                rows.append({
                    'pair_id': pair_id,
                    'sentence_id': tree.sentence_id,
                    'conllu_ref': 'fixture.conllu',
                    'kept': None,
                    'pruned_vertex': vertex,
                    'worker_id': worker,
                    'label': worker_label,
                    'split': split,
                })
            pair_number += 1
    multi = [
        ('m1', [15, 13], 1),
        ('m2', [4, 12, 13, 15, 23], 0),
        ('m3', [10, 15, 13], 1),
        ('m4', [1, 4], 0),
    ]
    for pair_id, chain, label in multi:
        kept = deptree.apply_chain(trees[0], chain).kept
        for worker in WORKERS[:2]:
            rows.append({
                'pair_id': pair_id,
                'sentence_id': 'ambassador',
                'conllu_ref': 'fixture.conllu',
                'kept': list(kept),
                'pruned_vertex': None,
                'worker_id': worker,
                'label': label,
                'split': 'test',
                'chain': chain,
            })
    return rows


@pytest.fixture(scope="session")
def data_dir(tmpdir_factory, ambassador_tree, small_trees):
    """
    Directory with fixture.conllu, judgments.jsonl, lm_corpus.txt,
    colloc_corpus.txt and config.ini.
    """
    data_dir = str(tmpdir_factory.mktemp("data_dir"))
    with open(os.path.join(data_dir, 'fixture.conllu'), 'w', encoding='utf-8') as conllu_file:
        conllu_file.write(AMBASSADOR_CONLLU + SMALL_CONLLU)
    with open(os.path.join(data_dir, 'judgments.jsonl'), 'w', encoding='utf-8') as jsonl_file:
        for row in judgment_rows([ambassador_tree] + list(small_trees)):
            jsonl_file.write(json.dumps(row) + '\n')
    with open(os.path.join(data_dir, 'lm_corpus.txt'), 'w', encoding='utf-8') as corpus_file:
        corpus_file.write('\n'.join(TOY_CORPUS) + '\n')
    with open(os.path.join(data_dir, 'colloc_corpus.txt'), 'w', encoding='utf-8') as corpus_file:
        corpus_file.write('\n'.join(['she hit a home run', 'he sang as well'] * 12) + '\n')
    with open(os.path.join(data_dir, 'config.ini'), 'w', encoding='utf-8') as config_file:
        config_file.write(
            "[run]\n"
            "seed = 3\n"
            "\n"
            "[paths]\n"
            "judgments = judgments.jsonl\n"
            "conllu = fixture.conllu\n"
            "lm_corpus = lm_corpus.txt\n"
            "colloc_corpus = colloc_corpus.txt\n"
            "\n"
            "[model]\n"
            "folds = 3\n"
            "\n"
            "[evaluate]\n"
            "resamples = 200\n"
            "\n"
            "[sampler]\n"
            "samples = 20\n"
            "\n"
            "[collocations]\n"
            "min_count = 5\n"
        )
    return data_dir
