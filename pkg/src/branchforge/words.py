"""Normal forms and length bookkeeping for words over a level group and Q x G.

A word is an alternating product of A-letters (elements of the level's
alternating group, stored in its natural action) and B-letters (a pair of an
Alt(5) element and a G-generator word).  `normal_form` merges adjacent
letters of the same kind and drops trivial ones, so stored words are always
alternating; the length of a word is the pair (number of B-letters, number of
A-letters), compared lexicographically.

Sections are computed symbolically: writing a word as
``^{p_1}b_1 ... ^{p_n}b_n a`` (with ``p_i`` the product of the A-letters in
front of ``b_i`` and ``a`` the product of all A-letters), the section at a
first-level letter x collects, for each i, the contribution of ``b_i`` at the
position ``p_i^{-1} a x``: a next-level B-letter at the designated point o, a
rooted image at the spine letters, nothing elsewhere.  The stabilized section
repeats this along the orbit of x under ``a``, in orbit-step order.  Word
results agree with the lazy tree calculus under evaluation; the test suite
checks this equivalence rather than assuming it.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from .embeddings import FiniteGroupTable, GroupChainSpec, LevelData
from .errors import DomainError, PreconditionError
from .perms import Permutation, format_cycles, parse_cycles
from .treeauto import SpinePair, TreeAut, TreeCalculus, TreeShape

GWord = tuple[tuple[str, int], ...]


class LenPair(NamedTuple):
    """(B-letter count, A-letter count), ordered lexicographically."""

    b: int
    a: int

    def __add__(self, other):
        return LenPair(self.b + other.b, self.a + other.a)

    def __sub__(self, other):
        return LenPair(self.b - other.b, self.a - other.a)

    def __str__(self):
        return f"({self.b},{self.a})"


SHORT = LenPair(1, 0)  # the shrinking threshold: a single B-letter or less


def free_reduce(word) -> GWord:
    """Merge adjacent equal generator names and drop zero exponents."""
    out: list[list] = []
    for name, exp in word:
        if exp == 0:
            continue
        if out and out[-1][0] == name:
            out[-1][1] += exp
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([name, exp])
    return tuple((n, e) for n, e in out)


def invert_gword(word: GWord) -> GWord:
    return tuple((name, -exp) for name, exp in reversed(word))


class WordContext:
    """Shared letter algebra for one tree shape and one ambient group chain.

    When the chain declares G finite through a faithful quotient, G-generator
    words are canonicalized to the breadth-first shortest word of their group
    element, which makes triviality decidable and keeps section words in a
    deterministic normal form.  Otherwise only free reduction is available.
    """

    def __init__(self, shape: TreeShape, chain: GroupChainSpec | None = None):
        self.shape = shape
        self.chain = chain
        self._canonical: dict[tuple[int, ...], GWord] | None = None
        self._faithful = None
        if chain is not None and chain.is_finite:
            quotient = chain.faithful_quotient()
            self._faithful = quotient
            table = FiniteGroupTable.from_permutations(quotient.images, degree=quotient.degree)
            canonical = {}
            for index, perm in enumerate(table.permutations):
                label = table.labels[index]
                if label == "e":
                    canonical[perm.images] = ()
                else:
                    canonical[perm.images] = tuple((name, 1) for name in label.split())
            self._canonical = canonical

    def g_reduce(self, word) -> GWord:
        word = free_reduce(word)
        if self._canonical is not None:
            image = self._faithful.evaluate(word)
            return self._canonical[image.images]
        return word

    def g_is_trivial(self, word: GWord) -> bool:
        return len(self.g_reduce(word)) == 0

    def g_power(self, word: GWord, k: int) -> GWord:
        """Reduced k-th power of a generator word.

        With a finite ambient group the image element is powered in the
        faithful quotient, so large exponents cost nothing; otherwise the
        word is repeated and freely reduced.
        """
        if self._canonical is not None:
            image = self._faithful.evaluate(word) ** k
            return self._canonical[image.images]
        return free_reduce(word * k if k >= 0 else invert_gword(word) * (-k))

    def g_names(self) -> tuple[str, ...]:
        return self.chain.generators if self.chain is not None else ()

    def alt_degree(self, level: int) -> int:
        return self.shape.level(level).alt_degree


class ALetter(NamedTuple):
    """A level-group letter, stored in the natural alternating action."""

    perm: Permutation

    def inverse(self) -> ALetter:
        return ALetter(self.perm.inverse())

    def key(self):
        return ("A", self.perm.images)


class BLetter(NamedTuple):
    """A (Q, G) letter: an Alt(5) element and a G-generator word."""

    q: Permutation
    g: GWord

    def inverse(self) -> BLetter:
        return BLetter(self.q.inverse(), invert_gword(self.g))

    def key(self):
        return ("B", self.q.images, self.g)


Letter = ALetter | BLetter


class FPWord:
    """An alternating word at one level; always in normal form."""

    __slots__ = ("level", "letters")

    def __init__(self, level: int, letters: tuple[Letter, ...]):
        self.level = level
        self.letters = letters

    @property
    def len_b(self) -> int:
        return sum(1 for letter in self.letters if isinstance(letter, BLetter))

    @property
    def len_a(self) -> int:
        return sum(1 for letter in self.letters if isinstance(letter, ALetter))

    def length(self) -> LenPair:
        return LenPair(self.len_b, self.len_a)

    def key(self):
        return (self.level, tuple(letter.key() for letter in self.letters))

    def is_empty(self) -> bool:
        return not self.letters

    def __eq__(self, other):
        return isinstance(other, FPWord) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FPWord(level={self.level}, {render_word(self)!r})"


def normal_form(level: int, letters, ctx: WordContext) -> FPWord:
    """Reduce a raw letter sequence to the alternating normal form."""
    degree = ctx.alt_degree(level)
    stack: list[Letter] = []
    for letter in letters:
        if isinstance(letter, ALetter):
            if letter.perm.degree != degree:
                raise DomainError(
                    f"A-letter degree {letter.perm.degree} does not match level degree {degree}")
            if letter.perm.is_identity():
                continue
        elif isinstance(letter, BLetter):
            if letter.q.degree != 5:
                raise DomainError("B-letter Q part must act on 5 points")
            letter = BLetter(letter.q, ctx.g_reduce(letter.g))
            if letter.q.is_identity() and not letter.g:
                continue
        else:
            raise DomainError(f"not a letter: {letter!r}")
        while stack and type(stack[-1]) is type(letter):
            top = stack.pop()
            if isinstance(letter, ALetter):
                merged = ALetter(top.perm * letter.perm)
                if merged.perm.is_identity():
                    letter = None
                    break
                letter = merged
            else:
                merged = BLetter(top.q * letter.q, ctx.g_reduce(top.g + letter.g))
                if merged.q.is_identity() and not merged.g:
                    letter = None
                    break
                letter = merged
        if letter is not None:
            stack.append(letter)
    return FPWord(level, tuple(stack))


def multiply(w1: FPWord, w2: FPWord, ctx: WordContext) -> FPWord:
    if w1.level != w2.level:
        raise DomainError("cannot multiply words of different levels")
    return normal_form(w1.level, w1.letters + w2.letters, ctx)


def inverse_word(w: FPWord, ctx: WordContext) -> FPWord:
    return normal_form(w.level, tuple(letter.inverse() for letter in reversed(w.letters)), ctx)


def word_power(w: FPWord, k: int, ctx: WordContext) -> FPWord:
    if k < 0:
        return word_power(inverse_word(w, ctx), -k, ctx)
    out = FPWord(w.level, ())
    for _ in range(k):
        out = multiply(out, w, ctx)
    return out


# -- evaluation into the tree calculus ----------------------------------------


def evaluate(w: FPWord, calc: TreeCalculus) -> TreeAut:
    """The tree automorphism represented by a word (A-letters rooted, B-letters directed)."""
    node = calc.identity(w.level)
    for letter in w.letters:
        if isinstance(letter, ALetter):
            node = node * calc.rooted_natural(w.level, letter.perm)
        else:
            node = node * (calc.directed_q(w.level, letter.q) *
                           calc.directed_g(w.level, letter.g))
    return node


# -- symbolic sections ---------------------------------------------------------


def conjugator_decomposition(w: FPWord, level_data: LevelData):
    """Rewrite the word as ^{p_1}b_1 ... ^{p_n}b_n a.

    Returns (pairs, trailing) where pairs is a list of (p_i, b_i) with p_i the
    natural-action product of the A-letters before b_i, and trailing is the
    product of all A-letters.
    """
    prefix = Permutation.identity(level_data.alt_degree)
    pairs = []
    for letter in w.letters:
        if isinstance(letter, ALetter):
            prefix = prefix * letter.perm
        else:
            pairs.append((prefix, letter))
    return pairs, prefix


def _contribution(b: BLetter, y: int, alpha: int, beta: int,
                  level_data: LevelData, next_data: LevelData):
    """What one B-letter contributes to a section at evaluation position y."""
    if y == level_data.o:
        return BLetter(b.q, b.g)
    if y == alpha:
        if b.q.is_identity():
            return None
        return ALetter(b.q.pad(next_data.alt_degree))
    if y == beta:
        image = next_data.g_natural(b.g)
        if image.is_identity():
            return None
        return ALetter(image)
    return None


def section_word_at(w: FPWord, x: int, alpha: int, beta: int,
                    level_data: LevelData, next_data: LevelData,
                    ctx: WordContext) -> FPWord:
    """Representative of the section of w below the first-level letter x."""
    if alpha == beta:
        raise PreconditionError("spine letters alpha and beta must differ")
    if alpha == level_data.o or beta == level_data.o:
        raise PreconditionError("spine letters must avoid o")
    pairs, trailing = conjugator_decomposition(w, level_data)
    ax = level_data.coset_action(trailing)(x)
    letters = []
    for p, b in pairs:
        y = level_data.coset_action(p.inverse())(ax)
        got = _contribution(b, y, alpha, beta, level_data, next_data)
        if got is not None:
            letters.append(got)
    return normal_form(w.level + 1, tuple(letters), ctx)


def stabilized_section_word_at(w: FPWord, x: int, alpha: int, beta: int,
                               level_data: LevelData, next_data: LevelData,
                               ctx: WordContext) -> FPWord:
    """Representative of the stabilized section of w below the letter x.

    Expands the power of the word over the orbit of x under its A-part and
    reads off the per-orbit-step contributions in display order.
    """
    if alpha == beta:
        raise PreconditionError("spine letters alpha and beta must differ")
    pairs, trailing = conjugator_decomposition(w, level_data)
    action = level_data.coset_action(trailing)
    inv_action = action.inverse()
    inv_prefix_actions = [level_data.coset_action(p.inverse()) for p, _ in pairs]
    letters = []
    point = x
    while True:
        for (p, b), inv_p in zip(pairs, inv_prefix_actions):
            y = inv_p(point)
            got = _contribution(b, y, alpha, beta, level_data, next_data)
            if got is not None:
                letters.append(got)
        point = inv_action(point)
        if point == x:
            break
    return normal_form(w.level + 1, tuple(letters), ctx)


def section_word(w: FPWord, x: int, spine: SpinePair, shape: TreeShape,
                 ctx: WordContext) -> FPWord:
    level_data = shape.level(w.level)
    next_data = shape.level(w.level + 1)
    return section_word_at(w, x, spine.alpha[w.level], spine.beta[w.level],
                           level_data, next_data, ctx)


def stabilized_section_word(w: FPWord, u, spine: SpinePair, shape: TreeShape,
                            ctx: WordContext) -> FPWord:
    """Stabilized section below a vertex word, one level at a time."""
    if isinstance(u, int):
        u = (u,)
    out = w
    for x in u:
        level_data = shape.level(out.level)
        next_data = shape.level(out.level + 1)
        out = stabilized_section_word_at(
            out, x, spine.alpha[out.level], spine.beta[out.level],
            level_data, next_data, ctx)
    return out


# -- the word DSL --------------------------------------------------------------

_TOKEN_RE = re.compile(r"^(A|B)\((.*)\)(?:\^(-?\d+))?$")
_GPART_RE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(-?\d+))?$")


def _split_top_level(text: str, sep: str) -> list[str]:
    parts = []
    depth = 0
    current = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise DomainError(f"unbalanced parentheses in {text!r}")
        if ch in sep and depth == 0:
            if current:
                parts.append("".join(current))
                current = []
        else:
            current.append(ch)
    if depth != 0:
        raise DomainError(f"unbalanced parentheses in {text!r}")
    if current:
        parts.append("".join(current))
    return parts


def parse_gword(text: str, names) -> GWord:
    word = []
    for token in text.split():
        match = _GPART_RE.match(token)
        if not match:
            raise DomainError(f"bad G-generator token {token!r}")
        name, exp = match.group(1), int(match.group(2) or 1)
        if name not in names:
            raise DomainError(f"unknown G generator {name!r}")
        word.append((name, exp))
    return free_reduce(tuple(word))


def format_gword(word: GWord) -> str:
    return " ".join(name if exp == 1 else f"{name}^{exp}" for name, exp in word)


def parse_word(text: str, level: int, ctx: WordContext) -> FPWord:
    """Parse the word DSL: whitespace-separated A(<cycles>) and B(q=, g=) tokens."""
    letters = []
    degree = ctx.alt_degree(level)
    for token in _split_top_level(text.strip(), " \t\n"):
        match = _TOKEN_RE.match(token)
        if not match:
            raise DomainError(f"bad word token {token!r}")
        kind, body, exp_text = match.groups()
        exp = int(exp_text) if exp_text else 1
        if kind == "A":
            perm = parse_cycles(body.strip(), degree) ** exp
            letters.append(ALetter(perm))
            continue
        q = Permutation.identity(5)
        g: GWord = ()
        if body.strip():
            for part in _split_top_level(body, ","):
                part = part.strip()
                if "=" not in part:
                    raise DomainError(f"bad B-letter component {part!r}")
                key, value = part.split("=", 1)
                key = key.strip()
                if key == "q":
                    q = parse_cycles(value.strip(), 5)
                elif key == "g":
                    g = parse_gword(value.strip(), ctx.g_names())
                else:
                    raise DomainError(f"unknown B-letter component {key!r}")
        q = q ** exp
        g = free_reduce(g * exp if exp >= 0 else invert_gword(g) * (-exp))
        letters.append(BLetter(q, g))
    return normal_form(level, tuple(letters), ctx)


def render_word(w: FPWord) -> str:
    parts = []
    for letter in w.letters:
        if isinstance(letter, ALetter):
            parts.append(f"A({format_cycles(letter.perm)})")
        else:
            inner = []
            if not letter.q.is_identity():
                inner.append(f"q={format_cycles(letter.q)}")
            if letter.g:
                inner.append(f"g={format_gword(letter.g)}")
            parts.append(f"B({', '.join(inner)})")
    return " ".join(parts)
