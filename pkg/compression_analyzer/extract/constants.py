"""
The constants.py namespace contains constants used throughout the repo
    Default values below are overwritten at the start of a run by
    "metadata.RunConfig" from the INI config file and command line flags
"""
# === runtime arguments ===
COMMAND = None
CONFIG_FILE = None
OUTPUT_FOLDER = None
DEBUG = False
SEED = 0

# constants for saving
RUN_PATH = ''
CONFIG_HASH = ''

# Logger
LOG_NAME = 'pyprune.log'

# === dependency trees ===
# no space is written before these tokens when linearizing
NO_SPACE_BEFORE = frozenset({'.', ',', ';', ':', '!', '?', '%', ')', "''"})
# no space is written after these tokens
NO_SPACE_AFTER = frozenset({'(', '``'})

# === language model ===
BOS = '<s>'
EOS = '</s>'
UNK = '<unk>'
LM_ORDER = 3
DISCOUNT = 0.75
# ARPA convention for symbols that are never predicted (<s>)
ARPA_NEVER = -99.0
# |log p_u| below this makes NormLP undefined
MIN_UNIGRAM_LOGPROB = 1e-9
NORMALIZER = 'norm_lp'
NORMALIZERS = ('norm_lp', 'slor')

# === collocations ===
COLLOC_WINDOW = 4
COLLOC_MIN_COUNT = 10
COLLOC_MAX_VARIANCE = 2.
COLLOC_MAX_MEAN = 1.5

# === features ===
EDIT_PROPERTIES = (
    'removes_start',
    'removes_end',
    'follows_punct',
    'breaks_collocation',
)
FEATURE_GROUPS = ('lm', 'dep', 'worker', 'edit', 'ix')
# model variants, as feature groups kept
MODEL_VARIANTS = {
    'full': ('lm', 'dep', 'worker', 'edit', 'ix'),
    'no_dependencies': ('lm', 'worker', 'edit'),
    'no_worker': ('lm', 'dep', 'edit', 'ix'),
    'lm': ('lm',),
    'lm_dependencies': ('lm', 'dep'),
    'lm_dependencies_worker': ('lm', 'dep', 'worker'),
}
# --ablate names and the feature groups they remove
ABLATIONS = {
    'dependencies': ('dep', 'ix'),
    'worker': ('worker',),
    'lm': ('lm',),
    'edit': ('edit', 'ix'),
    'interactions': ('ix',),
}

# === model ===
C = 0.1
C_GRID = (0.001, 0.01, 0.1, 1., 10., 100.)
NBR_FOLDS = 5
TOLERANCE = 1e-6
MAX_ITER = 1000

# === evaluation ===
THRESHOLD = .5
NBR_RESAMPLES = 10000

# === sampler ===
BUDGET_RANGE = (50, 100)
NBR_SAMPLES = 1000
MIN_SOURCE_CHARS = 100

# === corpus ===
SPLITS = ('train', 'test')
TEST_FRACTION = .1
JUDGMENT_FIELDS = (
    'pair_id',
    'sentence_id',
    'conllu_ref',
    'kept',
    'pruned_vertex',
    'worker_id',
    'label',
    'split',
)
