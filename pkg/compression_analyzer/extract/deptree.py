"""
Dependency trees read from CoNLL-U, subtree pruning and linearization.

A compression is the set of token indices kept from the source sentence.
Pruning removes a vertex and every descendant still kept; the remaining
tokens are linearized in their original order.
"""
from dataclasses import dataclass, field
import io
import logging
import unicodedata

import conllu
from conllu.exceptions import ParseException
from conllu.models import Token as ConlluToken, TokenList

import compression_analyzer.extract.constants as constants
from compression_analyzer.utils.errors import (
    ConlluFormatError,
    InvalidInputError,
    InvalidOperationError,
    TreeStructureError,
)

# Columns other than ID, FORM, HEAD and DEPREL are kept as raw strings
RAW_FIELD_PARSERS = {
    'feats': lambda line, i: line[i],
    'deps': lambda line, i: line[i],
    'misc': lambda line, i: line[i],
}
CONTRACTION_SUFFIXES = ("n't", "'s", "'re", "'ll", "'ve", "'d", "'m")


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    head: int
    deprel: str


@dataclass(frozen=True)
class DepTree:
    sentence_id: str
    tokens: tuple
    text: str = None
    _children: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'tokens', tuple(self.tokens))
        validate_tree(self.sentence_id, self.tokens)
        children = {token.index: [] for token in self.tokens}
        children[0] = []
        for token in self.tokens:
            children[token.head].append(token.index)
        object.__setattr__(
            self,
            '_children',
            {index: tuple(kids) for index, kids in children.items()},
        )
        if self.text is None:
            object.__setattr__(self, 'text', detokenize([t.form for t in self.tokens]))

    def __len__(self):
        return len(self.tokens)

    @property
    def root(self):
        return self._children[0][0]

    @property
    def indices(self):
        return tuple(token.index for token in self.tokens)

    def token(self, index):
        return self.tokens[index - 1]

    def head(self, index):
        return self.tokens[index - 1].head

    def children(self, index):
        return self._children[index]

    def descendants(self, vertex):
        """
        Vertex and all of its descendants in the full tree.

        :param int vertex: Token index
        :return set: Token indices
        """
        closure = set()
        stack = [vertex]
        while stack:
            current = stack.pop()
            closure.add(current)
            stack.extend(self._children[current])
        return closure


@dataclass(frozen=True)
class PruneEdit:
    pruned_vertex: int
    removed: frozenset
    before_tokens: tuple
    after_tokens: tuple


@dataclass(frozen=True)
class Compression:
    kept: tuple
    text: str
    chain: tuple = ()


def validate_tree(sentence_id, tokens):
    """
    Check token and tree invariants: indices 1..n, a single root,
    no self loops and no cycles.

    :param str sentence_id: Sentence identifier used in error messages
    :param tuple tokens: Token instances in linear order
    :raise TreeStructureError: If the tokens don't form a tree
    """
    if len(tokens) == 0:
        raise TreeStructureError(sentence_id, "sentence has no tokens")
    nbr_tokens = len(tokens)
    for position, token in enumerate(tokens, 1):
        if token.index != position:
            raise TreeStructureError(
                sentence_id,
                "token indices must be 1..{} in order, found {} at position {}".format(
                    nbr_tokens, token.index, position),
            )
        if not token.form:
            raise TreeStructureError(sentence_id, "token {} has an empty form".format(position))
        if token.head == token.index:
            raise TreeStructureError(sentence_id, "token {} is its own head".format(position))
        if not 0 <= token.head <= nbr_tokens:
            raise TreeStructureError(
                sentence_id,
                "token {} has head {} outside the sentence".format(position, token.head),
            )
    roots = [token.index for token in tokens if token.head == 0]
    if len(roots) != 1:
        raise TreeStructureError(
            sentence_id, "expected exactly one root, found {}".format(len(roots)),
        )
    heads = {token.index: token.head for token in tokens}
    for token in tokens:
        current = token.index
        for _ in range(nbr_tokens):
            current = heads[current]
            if current == 0:
                break
        else:
            raise TreeStructureError(
                sentence_id, "cycle through token {}".format(token.index),
            )


def parse_conllu(stream):
    """
    Read dependency trees from CoNLL-U. Multiword token ranges and empty
    nodes are skipped, only ID, FORM, HEAD and DEPREL are used.

    :param file/str stream: Open text file, iterable of lines or a string
    :return list trees: One DepTree per sentence block
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    trees = []
    block = []
    for line_no, raw_line in enumerate(stream, 1):
        line = raw_line.rstrip('\r\n')
        if line.strip():
            block.append((line_no, line))
        elif block:
            trees.append(_parse_block(block, len(trees) + 1))
            block = []
    if block:
        trees.append(_parse_block(block, len(trees) + 1))
    logging.getLogger(constants.LOG_NAME).debug("Parsed {} trees".format(len(trees)))
    return trees


def read_conllu(path):
    """
    :param str path: Path to a CoNLL-U file
    :return list trees: DepTrees in file order
    """
    with open(path, encoding='utf-8') as conllu_file:
        return parse_conllu(conllu_file)


def _parse_block(block, block_number):
    """
    Validate the basic columns of one sentence block, then let conllu build
    the token list.

    :param list block: (line number, line) tuples of one sentence
    :param int block_number: 1-based sentence number, used when there's no sent_id
    :return DepTree tree: Parsed tree
    """
    for line_no, line in block:
        if line.startswith('#'):
            continue
        columns = line.split('\t')
        if len(columns) != 10:
            raise ConlluFormatError(
                line_no, "expected 10 tab-separated columns, found {}".format(len(columns)),
            )
        token_id = columns[0]
        if '-' in token_id or '.' in token_id:
            continue
        if not token_id.isdigit():
            raise ConlluFormatError(line_no, "invalid ID '{}'".format(token_id))
        if not columns[6].isdigit():
            raise ConlluFormatError(line_no, "invalid HEAD '{}'".format(columns[6]))
        if not columns[1]:
            raise ConlluFormatError(line_no, "empty FORM")
    try:
        sentence = conllu.parse(
            '\n'.join(line for _, line in block) + '\n\n',
            field_parsers=RAW_FIELD_PARSERS,
        )[0]
    except ParseException as ex:
        raise ConlluFormatError(block[0][0], str(ex))
    sentence_id = sentence.metadata.get('sent_id', str(block_number))
    tokens = [
        Token(index=tok['id'], form=tok['form'], head=tok['head'], deprel=tok['deprel'])
        for tok in sentence
        if isinstance(tok['id'], int)
    ]
    return DepTree(sentence_id=sentence_id, tokens=tokens)


def to_conllu(tree):
    """
    Serialize a tree to CoNLL-U. Columns not tracked by DepTree are '_'.

    :param DepTree tree: Tree to serialize
    :return str: CoNLL-U block including the trailing blank line
    """
    tokens = [
        ConlluToken({
            'id': token.index,
            'form': token.form,
            'lemma': None,
            'upos': None,
            'xpos': None,
            'feats': None,
            'head': token.head,
            'deprel': token.deprel,
            'deps': None,
            'misc': None,
        })
        for token in tree.tokens
    ]
    metadata = {'sent_id': tree.sentence_id, 'text': tree.text}
    return TokenList(tokens, metadata=metadata).serialize()


def detokenize(forms):
    """
    Join token forms with single spaces, except before closing punctuation
    and after opening brackets and quotes.

    :param list forms: Token forms in order
    :return str text: Detokenized text
    """
    text = ''
    previous = None
    for form in forms:
        if previous is None:
            text = form
        elif form in constants.NO_SPACE_BEFORE or previous in constants.NO_SPACE_AFTER:
            text += form
        else:
            text += ' ' + form
        previous = form
    return text


def linearize(tree, kept):
    """
    :param DepTree tree: Source tree
    :param iterable kept: Token indices to keep
    :return str: Kept tokens in their original order, detokenized
    """
    return detokenize([tree.token(index).form for index in sorted(kept)])


def is_punct(token):
    """
    :param Token token: Token
    :return bool: True for punct relations and all-punctuation forms
    """
    if token.deprel == 'punct':
        return True
    return all(unicodedata.category(char).startswith('P') for char in token.form)


def prune(tree, kept, vertex):
    """
    Remove a vertex and all of its kept descendants.

    :param DepTree tree: Source tree
    :param iterable kept: Token indices kept before the edit
    :param int vertex: Index of the vertex to prune
    :return PruneEdit edit: The edit
    :raise InvalidOperationError: If the vertex is the root or isn't kept
    """
    kept = frozenset(kept)
    if vertex == tree.root:
        raise InvalidOperationError(
            "cannot prune the root ({}) of sentence {}".format(vertex, tree.sentence_id),
        )
    if vertex not in kept:
        raise InvalidOperationError(
            "vertex {} is not kept in sentence {}".format(vertex, tree.sentence_id),
        )
    removed = frozenset(tree.descendants(vertex) & kept)
    before = tuple(sorted(kept))
    after = tuple(index for index in before if index not in removed)
    return PruneEdit(
        pruned_vertex=vertex,
        removed=removed,
        before_tokens=before,
        after_tokens=after,
    )


def apply_chain(tree, vertices):
    """
    Prune vertices one after the other, starting from the full sentence.

    :param DepTree tree: Source tree
    :param list vertices: Pruned vertex for each step
    :return Compression: Final compression with its chain
    """
    kept = tree.indices
    chain = []
    for vertex in vertices:
        edit = prune(tree, kept, vertex)
        chain.append(edit)
        kept = edit.after_tokens
    return Compression(kept=tuple(kept), text=linearize(tree, kept), chain=tuple(chain))


def compression_rate(source, compression):
    """
    Character-based compression rate, spaces included.

    :param str source: Source sentence
    :param str compression: Compressed sentence
    :return float: len(compression) / len(source)
    """
    if not source:
        raise InvalidInputError("compression rate of an empty source is undefined")
    return len(compression) / len(source)


def reachable_by_prunes(tree, gold_kept):
    """
    A kept set can be built by pruning iff it contains the root and is
    head-closed.

    :param DepTree tree: Source tree
    :param iterable gold_kept: Token indices of the target compression
    :return bool: True if some prune sequence produces gold_kept
    """
    gold = set(gold_kept)
    if not gold <= set(tree.indices):
        return False
    if tree.root not in gold:
        return False
    return all(tree.head(index) in gold for index in gold if index != tree.root)


def canonical_chain(tree, kept):
    """
    Shortest prune chain producing a head-closed kept set: one prune per
    removed component, in index order.

    :param DepTree tree: Source tree
    :param iterable kept: Head-closed kept set containing the root
    :return tuple chain: PruneEdits
    """
    kept = set(kept)
    if not reachable_by_prunes(tree, kept):
        raise InvalidOperationError(
            "kept set of sentence {} is not reachable by prunes".format(tree.sentence_id),
        )
    component_roots = [
        index for index in tree.indices
        if index not in kept and tree.head(index) in kept
    ]
    return apply_chain(tree, component_roots).chain


def _is_boundary(rest, length):
    if rest[length:].lower().startswith(CONTRACTION_SUFFIXES):
        return True
    return rest[length - 1].isalnum() != rest[length].isalnum()


def align_gold(tree, compression_text):
    """
    Align a gold compression given as text to source token indices, greedily
    from left to right, skipping source tokens that are not kept. A
    whitespace chunk of the gold text may be covered by several kept tokens,
    e.g. 'ambassador.' by 'ambassador' and the final '.'.

    :param DepTree tree: Source tree
    :param str compression_text: Gold compression
    :return frozenset/None: Kept token indices, None if alignment fails
    """
    chunks = compression_text.split()
    if not chunks:
        return None
    tokens = tree.tokens
    kept = []
    position = 0
    for chunk in chunks:
        offset = 0
        while offset < len(chunk):
            if position >= len(tokens):
                return None
            form = tokens[position].form
            rest = chunk[offset:]
            if rest == form or (rest.startswith(form) and _is_boundary(rest, len(form))):
                kept.append(tokens[position].index)
                offset += len(form)
            position += 1
    return frozenset(kept)
