"""Embedding finite groups into alternating groups and building tree-level data.

A level of the tree is the coset space X = Alt(2n+3)/<sigma> for a finite
group F of order n, with sigma the 3-cycle (1 2 3).  F is embedded so that it
acts freely on two designated point sets, diagonally, which forces even images
and makes the F-conjugates of Alt(5) generate the whole alternating group.
The designated coset o = <sigma> gets index 0, and every other coset is
classified by whether its stabilizer equals <sigma> (the set Y') or not (Y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, PreconditionError, ResourceCapError, VerificationError
from .perms import (
    DEFAULT_DEGREE_CAP,
    PermGroup,
    Permutation,
    alternating_gens,
    format_cycles,
    generates_alternating,
    max_order_alternating,
    parse_cycles,
)

#: Alt(5) generators used everywhere a copy of Alt(5) is needed, 1-based
#: cycles (1 2 3 4 5) and (1 2 3).
ALT5_GEN_NAMES = ("q1", "q2")


def alt5_gens() -> list[Permutation]:
    return alternating_gens(5)


class FiniteGroupTable:
    """A finite group as labelled elements plus a multiplication table.

    The table is validated on construction: a two-sided identity at index 0,
    inverses, associativity, and generation by the distinguished generators.
    Element enumeration order (identity first) is part of the value; it pins
    down the regular actions used by the alternating-group embedding.
    """

    def __init__(self, labels, table, generators):
        self.labels = tuple(labels)
        self.table = tuple(tuple(row) for row in table)
        self.generators = tuple(generators)
        n = len(self.labels)
        if n == 0:
            raise PreconditionError("a group has at least one element")
        if len(set(self.labels)) != n:
            raise PreconditionError("element labels must be distinct")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise PreconditionError("multiplication table must be square")
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise PreconditionError("table rows must be permutations of the element indices")
        for j in range(n):
            if self.table[0][j] != j or self.table[j][0] != j:
                raise PreconditionError("index 0 must be a two-sided identity")
        for i in range(n):
            if all(self.table[i][j] != 0 for j in range(n)):
                raise PreconditionError(f"element {self.labels[i]!r} has no inverse")
        for a in range(n):
            for b in range(n):
                ab = self.table[a][b]
                for c in range(n):
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise PreconditionError("table is not associative")
        for g in self.generators:
            if g not in self.labels:
                raise PreconditionError(f"unknown generator label {g!r}")
        if self._closure(self.generators) != set(range(n)):
            raise PreconditionError("declared generators do not generate")

    def _closure(self, gen_labels):
        gens = [self.labels.index(g) for g in gen_labels]
        seen = {0}
        queue = [0]
        while queue:
            x = queue.pop()
            for g in gens:
                y = self.table[g][x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    @property
    def order(self) -> int:
        return len(self.labels)

    def mult(self, i: int, j: int) -> int:
        return self.table[i][j]

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    @classmethod
    def trivial(cls) -> FiniteGroupTable:
        return cls(("e",), ((0,),), ())

    @classmethod
    def cyclic(cls, n: int) -> FiniteGroupTable:
        labels = ["e"] + [f"t{'^' + str(k) if k > 1 else ''}" for k in range(1, n)]
        table = [[(i + j) % n for j in range(n)] for i in range(n)]
        return cls(labels, table, (labels[1],) if n > 1 else ())

    @classmethod
    def klein_four(cls) -> FiniteGroupTable:
        labels = ("e", "u", "v", "uv")
        table = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))
        return cls(labels, table, ("u", "v"))

    @classmethod
    def from_permutations(cls, images: dict[str, Permutation], degree: int | None = None,
                          cap: int = DEFAULT_DEGREE_CAP) -> FiniteGroupTable:
        """Close a set of named permutations into a group table.

        Elements are enumerated identity first, then in breadth-first order
        with generators applied in declaration order; labels are the shortest
        discovered generator words.  The resulting table carries the
        underlying permutations in a `permutations` attribute.
        """
        if not images:
            out = cls.trivial()
            out.permutations = (Permutation.identity(degree or 1),)
            return out
        degree = next(iter(images.values())).degree
        for name, p in images.items():
            if p.degree != degree:
                raise PreconditionError(f"generator {name!r} has mismatched degree")
        identity = Permutation.identity(degree)
        elements = [identity]
        labels = ["e"]
        index = {identity: 0}
        queue = [0]
        names = list(images)
        while queue:
            nxt = []
            for i in queue:
                for name in names:
                    q = elements[i] * images[name]
                    if q not in index:
                        if len(elements) >= cap:
                            raise ResourceCapError("closure exceeds cap", required=len(elements) + 1, cap=cap)
                        index[q] = len(elements)
                        elements.append(q)
                        labels.append(name if i == 0 else f"{labels[i]} {name}")
                        nxt.append(index[q])
            queue = nxt
        n = len(elements)
        table = [[index[elements[i] * elements[j]] for j in range(n)] for i in range(n)]
        gen_labels = []
        for name in names:
            label = labels[index[images[name]]]
            if label != "e" and label not in gen_labels:
                gen_labels.append(label)
        out = cls(labels, table, tuple(gen_labels))
        out.permutations = tuple(elements)
        return out


def embed_finite_group(table: FiniteGroupTable) -> dict[str, Permutation]:
    """Embed a finite group of order n into Alt(2n+3) with two free point sets.

    With 1-based points, element index 0 corresponds to points 3 and 4 and
    element index i >= 1 to points 5+i and n+4+i; each group element acts by
    left translation on the indices, identically on both point sets, which
    makes every image an even permutation.  The returned map label -> image is
    verified to be an injective homomorphism acting freely on both sets.
    """
    n = table.order
    degree = 2 * n + 3
    first = [2] + [4 + i for i in range(1, n)]       # 0-based: {3} u {6..n+4} in 1-based labels
    second = [3] + [n + 3 + i for i in range(1, n)]  # 0-based: {4} u {n+5..2n+3}
    images = {}
    for f in range(n):
        mapping = list(range(degree))
        for i in range(n):
            j = table.mult(f, i)
            mapping[first[i]] = first[j]
            mapping[second[i]] = second[j]
        images[table.labels[f]] = Permutation(mapping)

    for f in range(n):
        for g in range(n):
            lhs = images[table.labels[f]] * images[table.labels[g]]
            if lhs != images[table.labels[table.mult(f, g)]]:
                raise VerificationError("embedding is not a homomorphism")
    if len(set(images.values())) != n:
        raise VerificationError("embedding is not injective")
    for label, p in images.items():
        if not p.is_even():
            raise VerificationError(f"image of {label!r} is odd")
        if label != table.labels[0]:
            for point in first + second:
                if p(point) == point:
                    raise VerificationError(f"image of {label!r} fixes point {point + 1}")
    return images


def verify_altalt(f_images: dict[str, Permutation], n: int) -> bool:
    """Check that the F-conjugates of Alt(5) generate Alt(2n+3)."""
    degree = 2 * n + 3
    base = [g.pad(degree) for g in alt5_gens()]
    conjugated = []
    seen = set()
    for f in f_images.values():
        for g in base:
            c = g.conjugate(f)
            if c.images not in seen:
                seen.add(c.images)
                conjugated.append(c)
    return generates_alternating(conjugated, degree)


@dataclass(frozen=True)
class QuotientSpec:
    """One finite quotient of the ambient group G: named permutation images."""

    degree: int
    images: dict[str, Permutation] = field(default_factory=dict)

    def __post_init__(self):
        for name, p in self.images.items():
            if p.degree != self.degree:
                raise PreconditionError(f"image of {name!r} has degree {p.degree}, expected {self.degree}")

    def evaluate(self, word: tuple[tuple[str, int], ...]) -> Permutation:
        """Image of a generator word (name, exponent)... under this quotient."""
        out = Permutation.identity(self.degree)
        for name, exp in word:
            if name not in self.images:
                raise DomainError(f"unknown generator {name!r}")
            out = out * self.images[name] ** exp
        return out

    def canonical_key(self) -> tuple:
        return (self.degree, tuple(sorted((k, v.images) for k, v in self.images.items())))


@dataclass
class GroupChainSpec:
    """The ambient group G presented through a chain of finite quotients.

    The chain is the user's promise that the quotients eventually separate
    every nontrivial element of G; that property is not decidable from finite
    data and is therefore not checked.  When G itself is finite, a faithful
    quotient index can be designated, which turns word problems for G-letters
    into computations in that quotient.
    """

    generators: tuple[str, ...]
    quotients: tuple[QuotientSpec, ...]
    faithful: int | None = None

    def __post_init__(self):
        if not self.quotients:
            raise PreconditionError("need at least one quotient")
        for q in self.quotients:
            for name in q.images:
                if name not in self.generators:
                    raise PreconditionError(f"quotient names unknown generator {name!r}")
            for name in self.generators:
                if name not in q.images:
                    raise PreconditionError(f"quotient missing generator {name!r}")
        if self.faithful is not None and not (0 <= self.faithful < len(self.quotients)):
            raise PreconditionError("faithful quotient index out of range")

    @property
    def is_finite(self) -> bool:
        return self.faithful is not None

    def quotient_at(self, index: int) -> QuotientSpec:
        """Quotient used at level offset `index`; the chain repeats its last entry."""
        if index < len(self.quotients):
            return self.quotients[index]
        return self.quotients[-1]

    def faithful_quotient(self) -> QuotientSpec:
        if self.faithful is None:
            raise PreconditionError("group was not declared finite")
        return self.quotients[self.faithful]

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "faithful": self.faithful,
            "quotients": [
                {"degree": q.degree,
                 "images": {name: format_cycles(p) for name, p in sorted(q.images.items())}}
                for q in self.quotients
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> GroupChainSpec:
        generators = tuple(data["generators"])
        quotients = []
        for q in data["quotients"]:
            degree = int(q["degree"])
            images = {name: parse_cycles(text, degree) for name, text in q["images"].items()}
            quotients.append(QuotientSpec(degree, images))
        return cls(generators, tuple(quotients), data.get("faithful"))


class CosetSpace:
    """Left cosets of <sigma> in Alt(m), indexed by breadth-first discovery.

    Cosets are keyed by the lexicographically smallest image tuple among their
    three elements, the identity coset gets index 0, and the action of any
    element of Alt(m) on the index set is available (and memoized) through
    `action_of`.
    """

    def __init__(self, degree: int, sigma: Permutation, gens: list[Permutation],
                 degree_cap: int = DEFAULT_DEGREE_CAP):
        self.degree = degree
        self.sigma = sigma
        size = math.factorial(degree) // 2 // sigma.order()
        if size > degree_cap:
            raise ResourceCapError(
                f"coset space of size {size} exceeds cap {degree_cap}; "
                f"raise the cap to at least {size} to materialize this level",
                required=size, cap=degree_cap)
        self._key_to_index: dict[tuple[int, ...], int] = {}
        self.reps: list[Permutation] = []
        identity = Permutation.identity(degree)
        self._push(identity)
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                rep = self.reps[i]
                for g in gens:
                    candidate = g * rep
                    if self._key(candidate) not in self._key_to_index:
                        nxt.append(self._push(candidate))
            frontier = nxt
        if len(self.reps) != size:
            raise VerificationError(
                f"coset enumeration found {len(self.reps)} cosets, expected {size}; "
                "generators do not generate the full alternating group")
        self._action_cache: dict[tuple[int, ...], Permutation] = {}

    def _key(self, perm: Permutation) -> tuple[int, ...]:
        a = perm.images
        b = (perm * self.sigma).images
        c = (perm * self.sigma * self.sigma).images
        return min(a, b, c)

    def _push(self, rep: Permutation) -> int:
        index = len(self.reps)
        self._key_to_index[self._key(rep)] = index
        self.reps.append(rep)
        return index

    @property
    def size(self) -> int:
        return len(self.reps)

    def index_of(self, perm: Permutation) -> int:
        """Index of the coset perm*<sigma>."""
        try:
            return self._key_to_index[self._key(perm)]
        except KeyError:
            raise DomainError("permutation is not in the enumerated group") from None

    def action_of(self, perm: Permutation) -> Permutation:
        """The permutation of coset indices induced by left multiplication."""
        cached = self._action_cache.get(perm.images)
        if cached is None:
            cached = Permutation(self.index_of(perm * rep) for rep in self.reps)
            self._action_cache[perm.images] = cached
        return cached


class LevelData:
    """Everything one tree level needs: alphabet, actions, and the Y / Y' split.

    The alphabet is the coset space X = Alt(2n+3)/<sigma>.  `o` is the coset
    of the identity (index 0).  Y' collects the cosets other than o whose
    stabilizer is exactly <sigma>, equivalently those with representative in
    the normalizer of <sigma>; Y is everything else.  All counts are checked
    on construction.
    """

    def __init__(self, quotient: QuotientSpec, degree_cap: int = DEFAULT_DEGREE_CAP,
                 skip_generation_check: bool = False):
        self.quotient = quotient
        self.group_table = FiniteGroupTable.from_permutations(
            quotient.images, degree=quotient.degree, cap=degree_cap)
        self.n = self.group_table.order
        self.alt_degree = 2 * self.n + 3
        expected_size = math.factorial(self.alt_degree) // 6
        if expected_size > degree_cap:
            raise ResourceCapError(
                f"level with quotient order {self.n} needs a coset space of size "
                f"{expected_size}, above the cap {degree_cap}",
                required=expected_size, cap=degree_cap)

        self.embedding = embed_finite_group(self.group_table)
        self.sigma = Permutation.from_cycles([[0, 1, 2]], self.alt_degree)
        self._quotient_elements = self.group_table.permutations
        self._quotient_index = {p: i for i, p in enumerate(self._quotient_elements)}

        self.q_gens_natural = [(name, g.pad(self.alt_degree))
                               for name, g in zip(ALT5_GEN_NAMES, alt5_gens())]
        self.g_gens_natural = [(name, self.embedding[self._quotient_label(name)])
                               for name in sorted(quotient.images)]
        self.natural_gens = [p for _, p in self.q_gens_natural] + [p for _, p in self.g_gens_natural]

        if not skip_generation_check:
            if not verify_altalt(self.embedding, self.n):
                raise VerificationError("conjugates of Alt(5) do not generate the level group")
            ambient = PermGroup(self.natural_gens, degree=self.alt_degree)
            if not ambient.is_transitive():
                raise VerificationError("level group is not transitive on its points")
            if ambient.order() != math.factorial(self.alt_degree) // 2:
                raise VerificationError("level group is not the full alternating group")

        self.cosets = CosetSpace(self.alt_degree, self.sigma, self.natural_gens, degree_cap)
        self.x_size = self.cosets.size
        self.o = 0

        sigma_action = self.cosets.action_of(self.sigma)
        if sigma_action(self.o) != self.o or sigma_action.order() != 3:
            raise VerificationError("sigma does not stabilize o with order 3")

        y, y_prime = [], []
        sigma_set = {self.sigma, self.sigma * self.sigma}
        for index, rep in enumerate(self.cosets.reps):
            if index == self.o:
                continue
            conj = rep.inverse() * self.sigma * rep
            if conj in sigma_set:
                y_prime.append(index)
            else:
                y.append(index)
        self.y = tuple(y)
        self.y_prime = tuple(y_prime)

        if len(self.y_prime) != math.factorial(2 * self.n) - 1:
            raise VerificationError("size of Y' does not match (2n)! - 1")
        if len(self.y) + len(self.y_prime) + 1 != self.x_size:
            raise VerificationError("Y, Y' and o do not partition the alphabet")

        self.max_order = max_order_alternating(self.alt_degree)

        self._q_image_cache: dict[tuple[int, ...], Permutation] = {}
        self._g_image_cache: dict[tuple, Permutation] = {}

    def _quotient_label(self, gen_name: str) -> str:
        perm = self.quotient.images[gen_name]
        return self.group_table.labels[self._quotient_index[perm]]

    @property
    def a_gens(self) -> PermGroup:
        """The level group acting on the alphabet (coset indices)."""
        if not hasattr(self, "_a_gens"):
            self._a_gens = PermGroup([self.coset_action(p) for p in self.natural_gens],
                                     degree=self.x_size)
        return self._a_gens

    def coset_action(self, natural: Permutation) -> Permutation:
        """Alphabet permutation induced by an element of Alt(2n+3)."""
        if natural.degree != self.alt_degree:
            raise DomainError(f"expected degree {self.alt_degree}, got {natural.degree}")
        return self.cosets.action_of(natural)

    def q_natural(self, q: Permutation) -> Permutation:
        """Extend an Alt(5) element to the level's natural degree."""
        if q.degree != 5:
            raise DomainError("Q elements act on 5 points")
        return q.pad(self.alt_degree)

    def q_image(self, q: Permutation) -> Permutation:
        """Alphabet action of an Alt(5) element."""
        cached = self._q_image_cache.get(q.images)
        if cached is None:
            cached = self.coset_action(self.q_natural(q))
            self._q_image_cache[q.images] = cached
        return cached

    def g_natural(self, word: tuple[tuple[str, int], ...]) -> Permutation:
        """Natural-degree image of a G-generator word through this level's quotient."""
        q_elt = self.quotient.evaluate(word)
        idx = self._quotient_index[q_elt]
        return self.embedding[self.group_table.labels[idx]]

    def g_image(self, word: tuple[tuple[str, int], ...]) -> Permutation:
        key = tuple(word)
        cached = self._g_image_cache.get(key)
        if cached is None:
            cached = self.coset_action(self.g_natural(word))
            self._g_image_cache[key] = cached
        return cached

    def y_size_closed_forms(self) -> dict:
        """Enumerated |Y| next to the two closed-form candidates.

        `half_order_form` is |X| - (2n)! and follows from the partition
        X = Y u Y' u {o} together with |Y'| = (2n)! - 1; `third_order_form`
        replaces |X| by (2n+3)!/3 and is reported only so the mismatch is
        visible in exports.
        """
        half = math.factorial(self.alt_degree) // 6 - math.factorial(2 * self.n)
        third = math.factorial(self.alt_degree) // 3 - math.factorial(2 * self.n)
        return {
            "enumerated": len(self.y),
            "half_order_form": half,
            "third_order_form": third,
            "matches": "half_order_form" if half == len(self.y) else (
                "third_order_form" if third == len(self.y) else "none"),
        }

    def to_json(self, include_tables: bool = True) -> dict:
        out = {
            "n": self.n,
            "alt_degree": self.alt_degree,
            "sigma": format_cycles(self.sigma),
            "x_size": self.x_size,
            "o": self.o,
            "max_element_order": self.max_order,
            "y": list(self.y),
            "y_prime": list(self.y_prime),
            "y_size_closed_forms": self.y_size_closed_forms(),
        }
        if include_tables:
            out["reps"] = [format_cycles(rep) for rep in self.cosets.reps]
            out["action"] = {
                name: list(self.coset_action(p).images)
                for name, p in self.q_gens_natural + self.g_gens_natural
            }
        return out

    def cache_key(self) -> tuple:
        return self.quotient.canonical_key()


_LEVEL_CACHE: dict[tuple, LevelData] = {}


def build_level_data(quotient: QuotientSpec, degree_cap: int = DEFAULT_DEGREE_CAP,
                     reuse_cache: bool = True) -> LevelData:
    """Build (or fetch) the level data for one quotient.

    Levels are pure values determined by the quotient, so equal quotients
    share one instance; the cache is filled at most once per key.
    """
    key = (quotient.canonical_key(), degree_cap)
    if reuse_cache:
        cached = _LEVEL_CACHE.get(key)
        if cached is not None:
            return cached
    level = LevelData(quotient, degree_cap=degree_cap)
    if reuse_cache:
        _LEVEL_CACHE[key] = level
    return level
