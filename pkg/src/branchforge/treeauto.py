"""Lazy automorphisms of the finite-horizon rooted tree.

A tree is described by a `TreeShape`: one `LevelData` per level up to an
explicit horizon.  Automorphisms are lazy DAG nodes owned by a
`TreeCalculus`, which binds the shape to one spine pair (the designated
points used by the two families of directed generators).  Every node knows
its root permutation (how it permutes the current alphabet) and can produce
the section below any letter; products and inverses are built symbolically
and only evaluated where a computation looks.

Nodes are hash-consed on a structural key, and sections are memoized per
(node, letter).  Anything that would need level data beyond the horizon
raises `ConfigurationError` instead of fabricating levels.

The key identities, all exercised by the test suite rather than assumed:

* ``g(uv) = g(u) . g|_u(v)`` relating the action and sections,
* ``(gh)|_u = g|_{h(u)} h|_u`` for products,
* ``g||_u = g^{l}|_u`` with ``l`` the orbit length of ``u`` under ``g``
  (the stabilized section), and ``g||_u||_v = g||_{uv}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .embeddings import LevelData
from .errors import ConfigurationError, DomainError, ResourceCapError
from .perms import DEFAULT_DEGREE_CAP, Permutation

Vertex = tuple[int, ...]
GWord = tuple[tuple[str, int], ...]


class TreeShape:
    """Level data for levels 0..horizon-1 of the tree.

    Entries may be `LevelData` values or zero-argument builders; builders run
    on first access, so deep levels with large coset spaces cost nothing
    until something actually looks at them.
    """

    def __init__(self, levels):
        if not levels:
            raise ConfigurationError("a tree shape needs at least one level")
        self._entries = list(levels)

    @property
    def horizon(self) -> int:
        return len(self._entries)

    @property
    def levels(self) -> list[LevelData]:
        return [self.level(i) for i in range(self.horizon)]

    def level(self, offset: int) -> LevelData:
        if not (0 <= offset < self.horizon):
            raise ConfigurationError(
                f"level {offset} is beyond the horizon {self.horizon}")
        entry = self._entries[offset]
        if callable(entry):
            entry = entry()
            self._entries[offset] = entry
        if entry.x_size < 2:
            raise ConfigurationError("alphabets must have at least two letters")
        return entry

    def alphabet_size(self, offset: int) -> int:
        return self.level(offset).x_size


@dataclass(frozen=True)
class SpinePair:
    """Per-level designated letters (alpha for Q-directed, beta for G-directed)."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        if len(self.alpha) != len(self.beta):
            raise ConfigurationError("alpha and beta must have equal length")

    def validate(self, shape: TreeShape, require_distinct: bool = True,
                 require_yy: bool = False):
        """Check entries avoid o, lie in range, and (optionally) in Y / Y'."""
        if len(self.alpha) < shape.horizon:
            raise ConfigurationError(
                f"spine of length {len(self.alpha)} does not reach the horizon {shape.horizon}")
        for i in range(shape.horizon):
            data = shape.level(i)
            for name, value in (("alpha", self.alpha[i]), ("beta", self.beta[i])):
                if not (0 <= value < data.x_size):
                    raise ConfigurationError(f"{name}[{i}]={value} outside the alphabet")
                if value == data.o:
                    raise ConfigurationError(f"{name}[{i}] must avoid the designated point o")
            if require_distinct and self.alpha[i] == self.beta[i]:
                raise ConfigurationError(f"alpha[{i}] == beta[{i}] is not allowed")
            if require_yy:
                if self.alpha[i] not in data.y:
                    raise ConfigurationError(f"alpha[{i}] must lie in Y")
                if self.beta[i] not in data.y_prime:
                    raise ConfigurationError(f"beta[{i}] must lie in Y'")


class TreeAut:
    """One lazy automorphism node; construct through a TreeCalculus."""

    __slots__ = ("calc", "level", "uid", "_root", "_sections")

    def __init__(self, calc: TreeCalculus, level: int):
        self.calc = calc
        self.level = level
        self.uid = calc._next_uid()
        self._root: Permutation | None = None
        self._sections: dict[int, TreeAut] = {}

    # -- structure ---------------------------------------------------------

    def _compute_root(self) -> Permutation:
        raise NotImplementedError

    def _compute_section(self, x: int) -> TreeAut:
        raise NotImplementedError

    def root(self) -> Permutation:
        """Action on the current alphabet."""
        if self._root is None:
            self._root = self._compute_root()
        return self._root

    def section(self, u) -> TreeAut:
        """The automorphism induced on the subtree below the vertex u."""
        if isinstance(u, int):
            u = (u,)
        node = self
        for x in u:
            node = node._section_letter(x)
        return node

    def _section_letter(self, x: int) -> TreeAut:
        size = self.calc.shape.alphabet_size(self.level)
        if not (0 <= x < size):
            raise DomainError(f"letter {x} outside alphabet of size {size}")
        if self.level + 1 >= self.calc.shape.horizon:
            raise ConfigurationError(
                f"section at level {self.level + 1} is beyond the horizon")
        if self.calc.memoize:
            node = self._sections.get(x)
            if node is None:
                node = self._compute_section(x)
                self._sections[x] = node
            return node
        return self._compute_section(x)

    # -- group structure -----------------------------------------------------

    def __mul__(self, other: TreeAut) -> TreeAut:
        return self.calc.mul(self, other)

    def inverse(self) -> TreeAut:
        return self.calc.inv(self)

    def power(self, k: int) -> TreeAut:
        return self.calc.power(self, k)

    def is_structural_identity(self) -> bool:
        return isinstance(self, _Identity)

    # -- action --------------------------------------------------------------

    def apply(self, u: Vertex) -> Vertex:
        """Image of a vertex; level-preserving by construction."""
        if not u:
            return ()
        x = u[0]
        size = self.calc.shape.alphabet_size(self.level)
        if not (0 <= x < size):
            raise DomainError(f"letter {x} outside alphabet of size {size}")
        head = self.root()(x)
        if len(u) == 1:
            return (head,)
        return (head,) + self._section_letter(x).apply(u[1:])

    def orbit_length(self, u: Vertex) -> int:
        """Smallest l >= 1 with g^l(u) = u."""
        if isinstance(u, int):
            u = (u,)
        current = self.apply(u)
        length = 1
        while current != u:
            current = self.apply(current)
            length += 1
        return length

    def stabilized_section(self, u) -> TreeAut:
        """Section of the smallest power fixing u, taken at u."""
        if isinstance(u, int):
            u = (u,)
        node = self
        for x in u:
            length = node.orbit_length((x,))
            node = node.power(length)._section_letter(x)
        return node

    def __repr__(self):
        return f"<TreeAut level={self.level} uid={self.uid} {type(self).__name__[1:]}>"


class _Identity(TreeAut):
    __slots__ = ()

    def _compute_root(self):
        return Permutation.identity(self.calc.shape.alphabet_size(self.level))

    def _compute_section(self, x):
        return self.calc.identity(self.level + 1)


class _Rooted(TreeAut):
    __slots__ = ("perm",)

    def __init__(self, calc, level, perm):
        super().__init__(calc, level)
        self.perm = perm

    def _compute_root(self):
        return self.perm

    def _compute_section(self, x):
        return self.calc.identity(self.level + 1)


class _DirectedQ(TreeAut):
    __slots__ = ("q",)

    def __init__(self, calc, level, q):
        super().__init__(calc, level)
        self.q = q

    def _compute_root(self):
        return Permutation.identity(self.calc.shape.alphabet_size(self.level))

    def _compute_section(self, x):
        calc = self.calc
        data = calc.shape.level(self.level)
        if x == data.o:
            return calc.directed_q(self.level + 1, self.q)
        if x == calc.spine.alpha[self.level]:
            return calc.rooted(self.level + 1, calc.shape.level(self.level + 1).q_image(self.q))
        return calc.identity(self.level + 1)


class _DirectedG(TreeAut):
    __slots__ = ("word",)

    def __init__(self, calc, level, word):
        super().__init__(calc, level)
        self.word = word

    def _compute_root(self):
        return Permutation.identity(self.calc.shape.alphabet_size(self.level))

    def _compute_section(self, x):
        calc = self.calc
        data = calc.shape.level(self.level)
        if x == data.o:
            return calc.directed_g(self.level + 1, self.word)
        if x == calc.spine.beta[self.level]:
            return calc.rooted(self.level + 1, calc.shape.level(self.level + 1).g_image(self.word))
        return calc.identity(self.level + 1)


class _Sparse(TreeAut):
    """Explicit root permutation plus finitely many nontrivial sections."""

    __slots__ = ("perm", "children")

    def __init__(self, calc, level, perm, children):
        super().__init__(calc, level)
        self.perm = perm
        self.children = children

    def _compute_root(self):
        return self.perm

    def _compute_section(self, x):
        child = self.children.get(x)
        return child if child is not None else self.calc.identity(self.level + 1)


class _Mul(TreeAut):
    __slots__ = ("left", "right")

    def __init__(self, calc, level, left, right):
        super().__init__(calc, level)
        self.left = left
        self.right = right

    def _compute_root(self):
        return self.left.root() * self.right.root()

    def _compute_section(self, x):
        # (gh)|_x = g|_{h(x)} h|_x
        return self.calc.mul(self.left._section_letter(self.right.root()(x)),
                             self.right._section_letter(x))


class _Inv(TreeAut):
    __slots__ = ("inner",)

    def __init__(self, calc, level, inner):
        super().__init__(calc, level)
        self.inner = inner

    def _compute_root(self):
        return self.inner.root().inverse()

    def _compute_section(self, x):
        # g^-1|_x = (g|_{g^-1 x})^-1
        return self.calc.inv(self.inner._section_letter(self.root()(x)))


class TreeCalculus:
    """Factory and intern table for TreeAut nodes over one shape and spine.

    With `memoize` off, no node is ever reused and no section is cached;
    results must be identical either way (the tests check this), only slower.
    """

    def __init__(self, shape: TreeShape, spine: SpinePair, memoize: bool = True,
                 validate_spine: bool = True):
        self.shape = shape
        self.spine = spine
        self.memoize = memoize
        if validate_spine:
            spine.validate(shape)
        self._uid = 0
        self._nodes: dict[tuple, TreeAut] = {}
        self._order_memo: dict[tuple[int, int], int] = {}

    def _next_uid(self) -> int:
        self._uid += 1
        return self._uid

    def _intern(self, key, make):
        if not self.memoize:
            return make()
        node = self._nodes.get(key)
        if node is None:
            node = make()
            self._nodes[key] = node
        return node

    # -- constructors --------------------------------------------------------

    def identity(self, level: int) -> TreeAut:
        return self._intern(("id", level), lambda: _Identity(self, level))

    def rooted(self, level: int, perm: Permutation) -> TreeAut:
        """Rooted automorphism: permutes first-level subtrees rigidly."""
        size = self.shape.alphabet_size(level)
        if perm.degree != size:
            raise DomainError(f"rooted permutation degree {perm.degree} != alphabet {size}")
        if perm.is_identity():
            return self.identity(level)
        return self._intern(("rooted", level, perm.images),
                            lambda: _Rooted(self, level, perm))

    def rooted_natural(self, level: int, perm: Permutation) -> TreeAut:
        """Rooted automorphism from an element in the level's natural alternating action."""
        return self.rooted(level, self.shape.level(level).coset_action(perm))

    def directed_q(self, level: int, q: Permutation) -> TreeAut:
        """Directed automorphism of a Q-element: trivial at the root, recursing at o."""
        if q.degree != 5:
            raise DomainError("Q elements act on 5 points")
        if len(self.spine.alpha) < self.shape.horizon:
            raise ConfigurationError("spine does not reach the horizon")
        if q.is_identity():
            return self.identity(level)
        return self._intern(("dq", level, q.images), lambda: _DirectedQ(self, level, q))

    def directed_g(self, level: int, word: GWord) -> TreeAut:
        """Directed automorphism of a G-element given as a generator word."""
        word = tuple((name, exp) for name, exp in word if exp != 0)
        if len(self.spine.beta) < self.shape.horizon:
            raise ConfigurationError("spine does not reach the horizon")
        if not word:
            return self.identity(level)
        return self._intern(("dg", level, word), lambda: _DirectedG(self, level, word))

    def sparse(self, level: int, perm: Permutation, children: dict[int, TreeAut]) -> TreeAut:
        """Explicit node: a root permutation and finitely many nontrivial sections."""
        size = self.shape.alphabet_size(level)
        if perm.degree != size:
            raise DomainError(f"root degree {perm.degree} != alphabet {size}")
        pruned = {}
        for x, child in children.items():
            if not (0 <= x < size):
                raise DomainError(f"letter {x} outside alphabet of size {size}")
            if child.level != level + 1:
                raise DomainError("sparse children must live one level down")
            if not child.is_structural_identity():
                pruned[x] = child
        if not pruned and perm.is_identity():
            return self.identity(level)
        key = ("sparse", level, perm.images, tuple(sorted((x, c.uid) for x, c in pruned.items())))
        return self._intern(key, lambda: _Sparse(self, level, perm, pruned))

    def embed_below_o(self, node: TreeAut) -> TreeAut:
        """Place an automorphism of the next level into the subtree below o."""
        level = node.level - 1
        data = self.shape.level(level)
        return self.sparse(level, Permutation.identity(data.x_size), {data.o: node})

    def mul(self, left: TreeAut, right: TreeAut) -> TreeAut:
        if left.level != right.level:
            raise DomainError("cannot multiply automorphisms of different levels")
        if isinstance(left, _Identity):
            return right
        if isinstance(right, _Identity):
            return left
        if isinstance(left, _Rooted) and isinstance(right, _Rooted):
            return self.rooted(left.level, left.perm * right.perm)
        return self._intern(("mul", left.uid, right.uid),
                            lambda: _Mul(self, left.level, left, right))

    def inv(self, node: TreeAut) -> TreeAut:
        if isinstance(node, _Identity):
            return node
        if isinstance(node, _Rooted):
            return self.rooted(node.level, node.perm.inverse())
        if isinstance(node, _Inv):
            return node.inner
        return self._intern(("inv", node.uid), lambda: _Inv(self, node.level, node))

    def power(self, node: TreeAut, k: int) -> TreeAut:
        if k < 0:
            return self.power(self.inv(node), -k)
        result = self.identity(node.level)
        base = node
        while k:
            if k & 1:
                result = self.mul(base, result)
            base = self.mul(base, base)
            k >>= 1
        return result

    def product(self, nodes) -> TreeAut:
        """Left-to-right product: product([a, b, c]) applies c first."""
        nodes = list(nodes)
        if not nodes:
            raise DomainError("empty product needs an explicit level; use identity()")
        out = nodes[-1]
        for node in reversed(nodes[:-1]):
            out = self.mul(node, out)
        return out


# -- comparisons and finite materializations ---------------------------------


def equal_up_to_depth(g: TreeAut, h: TreeAut, depth: int) -> bool:
    """Equality of the induced actions on all vertices of length <= depth+1.

    Compares root permutations at every vertex down to `depth`, walking the
    lazy DAGs with memoization on proven-equal pairs.  This is the only
    equality the package offers; exact equality of automorphisms is not
    decidable from finite data.
    """
    if g.level != h.level:
        raise DomainError("cannot compare automorphisms of different levels")
    shape = g.calc.shape
    if g.level + depth >= shape.horizon:
        raise ConfigurationError(
            f"depth {depth} from level {g.level} exceeds the horizon {shape.horizon}")
    proven: set[tuple[int, int, int]] = set()

    def walk(a: TreeAut, b: TreeAut, d: int) -> bool:
        if a is b:
            return True
        key = (a.uid, b.uid, d)
        if key in proven:
            return True
        if a.root() != b.root():
            return False
        if d > 0:
            size = shape.alphabet_size(a.level)
            for x in range(size):
                if not walk(a._section_letter(x), b._section_letter(x), d - 1):
                    return False
        proven.add(key)
        return True

    return walk(g, h, depth)


def is_identity_up_to_depth(g: TreeAut, depth: int) -> bool:
    return equal_up_to_depth(g, g.calc.identity(g.level), depth)


@dataclass(frozen=True)
class Portrait:
    """Materialized root permutations down to a fixed depth.

    `children` is None at the truncation depth; a Portrait of depth D carries
    permutations at vertex levels 0..D and so determines the action on all
    vertices of length <= D+1.
    """

    perm: Permutation
    children: tuple[Portrait, ...] | None

    def depth(self) -> int:
        if self.children is None:
            return 0
        return 1 + min(child.depth() for child in self.children)

    def is_trivial(self) -> bool:
        if not self.perm.is_identity():
            return False
        return self.children is None or all(c.is_trivial() for c in self.children)


def portrait_size(shape: TreeShape, level: int, depth: int) -> int:
    total = 1
    width = 1
    for d in range(depth):
        width *= shape.alphabet_size(level + d)
        total += width
    return total


def truncate(g: TreeAut, depth: int, cap: int = DEFAULT_DEGREE_CAP) -> Portrait:
    """Fully materialize the portrait of g to the given depth."""
    shape = g.calc.shape
    if g.level + depth >= shape.horizon:
        raise ConfigurationError(
            f"depth {depth} from level {g.level} exceeds the horizon {shape.horizon}")
    size = portrait_size(shape, g.level, depth)
    if size > cap:
        raise ResourceCapError(
            f"portrait would hold {size} nodes, above the cap {cap}",
            required=size, cap=cap)

    def build(node: TreeAut, d: int) -> Portrait:
        if d == 0:
            return Portrait(node.root(), None)
        width = shape.alphabet_size(node.level)
        return Portrait(node.root(),
                        tuple(build(node._section_letter(x), d - 1) for x in range(width)))

    return build(g, depth)


def portrait_json(g: TreeAut, depth: int) -> dict:
    """Portrait as JSON: perm images plus children keyed by letter index.

    Letters whose whole subtree acts trivially (within the materialized
    depth, or structurally at the boundary) are omitted; at the truncation
    boundary, letters with structurally nontrivial sections appear as the
    marker string "trunc".
    """
    shape = g.calc.shape
    if g.level + depth >= shape.horizon:
        raise ConfigurationError(
            f"depth {depth} from level {g.level} exceeds the horizon {shape.horizon}")

    def build(node: TreeAut, d: int):
        out = {"perm": list(node.root().images)}
        children = {}
        width = shape.alphabet_size(node.level)
        for x in range(width):
            child = node._section_letter(x)
            if d == 0:
                if not child.is_structural_identity():
                    children[str(x)] = "trunc"
                continue
            sub = build(child, d - 1)
            if sub["perm"] != list(range(len(sub["perm"]))) or sub.get("children"):
                children[str(x)] = sub
        if children:
            out["children"] = {k: children[k] for k in sorted(children, key=int)}
        return out

    return build(g, depth)


def _trivial_to_depth(node: TreeAut, depth: int) -> bool:
    if not node.root().is_identity():
        return False
    if depth == 0:
        return True
    size = node.calc.shape.alphabet_size(node.level)
    return all(_trivial_to_depth(node._section_letter(x), depth - 1)
               for x in range(size))


def portrait_text(g: TreeAut, depth: int) -> str:
    """Plain-text rendering of a portrait: one line per vertex with a
    nontrivial subtree, root permutations in cycle notation."""
    from .perms import format_cycles

    shape = g.calc.shape
    if g.level + depth >= shape.horizon:
        raise ConfigurationError(
            f"depth {depth} from level {g.level} exceeds the horizon {shape.horizon}")
    lines: list[str] = []

    def build(node: TreeAut, d: int, prefix: str, label: str):
        lines.append(f"{prefix}{label}{format_cycles(node.root())}")
        marks = []
        for x in range(shape.alphabet_size(node.level)):
            child = node._section_letter(x)
            if d > 0:
                if not _trivial_to_depth(child, d - 1):
                    build(child, d - 1, prefix + "  ", f"{x}: ")
            elif not child.is_structural_identity():
                marks.append(x)
        if marks:
            lines.append(f"{prefix}  ... truncated below letters {marks}")

    build(g, depth, "", "")
    return "\n".join(lines)


def action_order(g: TreeAut, levels: int) -> int:
    """Exact order of the action of g on all vertices of length <= levels.

    Computed recursively over root-orbit representatives: a power fixes the
    subtree below x exactly when it is a multiple of the orbit length of x
    times the order of the stabilized section there.  Orbit siblings have
    conjugate stabilized sections, so one representative per cycle suffices.
    """
    if levels <= 0:
        return 1
    shape = g.calc.shape
    if g.level + levels > shape.horizon:
        raise ConfigurationError(
            f"{levels} levels from level {g.level} exceeds the horizon {shape.horizon}")
    memo = g.calc._order_memo if g.calc.memoize else {}

    def rec(node: TreeAut, remaining: int) -> int:
        if remaining == 0:
            return 1
        key = (node.uid, remaining)
        cached = memo.get(key)
        if cached is not None:
            return cached
        root = node.root()
        seen_subs: set[tuple[int, int]] = set()
        result = 1
        fixed = [x for x in range(root.degree) if root(x) == x]
        cycles = [(x, 1) for x in fixed] + [(min(c), len(c)) for c in root.cycles()]
        for x, length in cycles:
            if remaining == 1:
                result = math.lcm(result, length)
                continue
            sub = node.power(length)._section_letter(x)
            mark = (length, sub.uid)
            if mark in seen_subs:
                continue
            seen_subs.add(mark)
            result = math.lcm(result, length * rec(sub, remaining - 1))
        memo[key] = result
        return result

    return rec(g, levels)
