"""Finite permutations and permutation-group algorithms.

Permutations act on 0-based points internally; the cycle text syntax used in
files and on the command line is 1-based, with the identity spelled "()".
Composition is function composition: (p * q)(x) = p(q(x)).

Groups are given by generators.  Orders, stabilizers and membership come from
a deterministic Schreier-Sims stabilizer chain (base points taken in
ascending order of smallest moved point), so repeated runs always produce
identical caches and fixtures.
"""

from __future__ import annotations

import itertools
import math
import re
from functools import reduce

from .errors import DomainError, PreconditionError, ResourceCapError

#: Hard ceiling on any materialized domain (coset spaces, element enumerations).
DEFAULT_DEGREE_CAP = 200_000


class Permutation:
    """An immutable permutation of {0, ..., degree-1} stored as an image tuple."""

    __slots__ = ("images", "_hash")

    def __init__(self, images):
        images = tuple(images)
        if sorted(images) != list(range(len(images))):
            raise DomainError(f"not a permutation of 0..{len(images) - 1}: {images!r}")
        if not images:
            raise DomainError("degree must be >= 1")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "_hash", hash(images))

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, cycles, degree: int) -> Permutation:
        """Build a permutation from 0-based cycles."""
        images = list(range(degree))
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:]):
                if not (0 <= a < degree):
                    raise DomainError(f"point {a} out of range for degree {degree}")
                images[a] = b
            if cycle:
                if not (0 <= cycle[-1] < degree):
                    raise DomainError(f"point {cycle[-1]} out of range for degree {degree}")
                images[cycle[-1]] = cycle[0]
        return cls(images)

    def __call__(self, point: int) -> int:
        if not (0 <= point < self.degree):
            raise DomainError(f"point {point} out of range for degree {self.degree}")
        return self.images[point]

    def __mul__(self, other: Permutation) -> Permutation:
        """(p * q)(x) = p(q(x)): apply q first, then p."""
        if self.degree != other.degree:
            raise DomainError(f"degree mismatch: {self.degree} vs {other.degree}")
        simg = self.images
        return Permutation(simg[i] for i in other.images)

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def __pow__(self, n: int) -> Permutation:
        if n < 0:
            return self.inverse() ** (-n)
        result = Permutation.identity(self.degree)
        base = self
        while n:
            if n & 1:
                result = base * result
            base = base * base
            n >>= 1
        return result

    def conjugate(self, by: Permutation) -> Permutation:
        """Return by * self * by^-1."""
        return by * self * by.inverse()

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each rotated to start at its smallest point, sorted."""
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            j = self.images[start]
            while j != start:
                cycle.append(j)
                seen.add(j)
                j = self.images[j]
            out.append(tuple(cycle))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths including fixed points, descending."""
        lengths = [len(c) for c in self.cycles()]
        lengths += [1] * (self.degree - sum(lengths))
        return tuple(sorted(lengths, reverse=True))

    def order(self) -> int:
        return reduce(math.lcm, (len(c) for c in self.cycles()), 1)

    def is_even(self) -> bool:
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def moved_points(self) -> list[int]:
        return [i for i, j in enumerate(self.images) if i != j]

    def pad(self, degree: int) -> Permutation:
        """Extend to a larger degree, fixing all new points."""
        if degree < self.degree:
            raise DomainError("pad target smaller than current degree")
        return Permutation(self.images + tuple(range(self.degree, degree)))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return self._hash

    def __lt__(self, other: Permutation):
        return self.images < other.images

    def __repr__(self):
        return f"Permutation({format_cycles(self)!r})"


_CYCLE_RE = re.compile(r"\(\s*((?:\d+[\s,]*)*)\)")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse 1-based disjoint cycle notation, e.g. "(1 2 3)(4 5)"; "()" is the identity."""
    stripped = text.strip()
    if not stripped:
        raise DomainError("empty permutation text")
    if _CYCLE_RE.sub("", stripped).strip():
        raise DomainError(f"could not parse permutation {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(stripped):
        points = [int(tok) for tok in re.split(r"[\s,]+", body.strip()) if tok]
        if len(set(points)) != len(points):
            raise DomainError(f"repeated point in cycle {body!r}")
        for p in points:
            if p < 1 or p > degree:
                raise DomainError(f"point {p} out of range 1..{degree}")
        if len(points) >= 2:
            cycles.append([p - 1 for p in points])
    return Permutation.from_cycles(cycles, degree)


def format_cycles(perm: Permutation) -> str:
    """Render in 1-based disjoint cycle notation; identity renders as "()"."""
    cycles = perm.cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(p + 1) for p in c) + ")" for c in cycles)


class _ChainLevel:
    __slots__ = ("point", "gens", "transversal")

    def __init__(self, point, gens, transversal):
        self.point = point
        self.gens = gens
        self.transversal = transversal  # orbit point -> coset representative u with u(base)=point


def _orbit_transversal(gens: list[Permutation], point: int, degree: int):
    """BFS orbit with coset representatives; deterministic in generator order."""
    transversal = {point: Permutation.identity(degree)}
    queue = [point]
    while queue:
        next_queue = []
        for x in queue:
            ux = transversal[x]
            for g in gens:
                y = g.images[x]
                if y not in transversal:
                    transversal[y] = g * ux
                    next_queue.append(y)
        queue = next_queue
    return transversal


class StabilizerChain:
    """Deterministic stabilizer chain built by sifting Schreier generators.

    Levels are created on demand: each level stabilizes all earlier base
    points, and its base point is the smallest point moved by any of its
    generators.  Duplicate Schreier generators are discarded before
    descending, which keeps the chain small enough for the degrees used here.
    """

    def __init__(self, generators: list[Permutation], degree: int):
        self.degree = degree
        self.levels: list[_ChainLevel] = []
        gens = [g for g in generators if not g.is_identity()]
        seen: set[tuple[int, ...]] = set()
        level_gens = []
        for g in gens:
            if g.images not in seen:
                seen.add(g.images)
                level_gens.append(g)
        while level_gens:
            point = min(min(g.moved_points()) for g in level_gens)
            transversal = _orbit_transversal(level_gens, point, degree)
            self.levels.append(_ChainLevel(point, level_gens, transversal))
            schreier_seen: set[tuple[int, ...]] = set()
            next_gens = []
            for x in sorted(transversal):
                ux = transversal[x]
                for g in level_gens:
                    rep = transversal[g.images[x]]
                    s = rep.inverse() * g * ux
                    if not s.is_identity() and s.images not in schreier_seen:
                        schreier_seen.add(s.images)
                        next_gens.append(s)
            level_gens = next_gens

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(level.point for level in self.levels)

    def order(self) -> int:
        result = 1
        for level in self.levels:
            result *= len(level.transversal)
        return result

    def contains(self, perm: Permutation) -> bool:
        """Membership test by sifting through the chain."""
        if perm.degree != self.degree:
            return False
        residue = perm
        for level in self.levels:
            image = residue.images[level.point]
            rep = level.transversal.get(image)
            if rep is None:
                return False
            residue = rep.inverse() * residue
        return residue.is_identity()


class PermGroup:
    """A permutation group given by generators, with a cached stabilizer chain.

    Values are immutable; the chain is filled at most once and callers either
    see no cache or a complete one, so instances are safe to share.
    """

    def __init__(self, generators, degree: int | None = None, degree_cap: int = DEFAULT_DEGREE_CAP):
        generators = list(generators)
        if not generators:
            if degree is None:
                raise DomainError("need generators or an explicit degree")
            generators = [Permutation.identity(degree)]
        self.degree = degree if degree is not None else generators[0].degree
        if self.degree > degree_cap:
            raise ResourceCapError(
                f"degree {self.degree} exceeds cap {degree_cap}",
                required=self.degree, cap=degree_cap)
        for g in generators:
            if g.degree != self.degree:
                raise DomainError("all generators must share one degree")
        self.generators = tuple(generators)
        self._chain: StabilizerChain | None = None

    def chain(self) -> StabilizerChain:
        if self._chain is None:
            self._chain = StabilizerChain(list(self.generators), self.degree)
        return self._chain

    def orbit(self, point: int) -> tuple[int, ...]:
        """The generator-closure orbit of a point, in ascending order."""
        if not (0 <= point < self.degree):
            raise DomainError(f"point {point} out of range for degree {self.degree}")
        seen = {point}
        queue = [point]
        while queue:
            nxt = []
            for x in queue:
                for g in self.generators:
                    y = g.images[x]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            queue = nxt
        return tuple(sorted(seen))

    def order(self) -> int:
        return self.chain().order()

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def contains(self, perm: Permutation) -> bool:
        return self.chain().contains(perm)

    def stabilizer_gens(self, point: int) -> PermGroup:
        """The point stabilizer, generated by reduced Schreier generators."""
        if not (0 <= point < self.degree):
            raise DomainError(f"point {point} out of range for degree {self.degree}")
        gens = [g for g in self.generators if not g.is_identity()]
        transversal = _orbit_transversal(gens, point, self.degree)
        seen: set[tuple[int, ...]] = set()
        out = []
        for x in sorted(transversal):
            ux = transversal[x]
            for g in gens:
                rep = transversal[g.images[x]]
                s = rep.inverse() * g * ux
                if not s.is_identity() and s.images not in seen:
                    seen.add(s.images)
                    out.append(s)
        return PermGroup(out, degree=self.degree)

    def elements(self, cap: int = DEFAULT_DEGREE_CAP) -> list[Permutation]:
        """Every element by breadth-first closure; errors out above `cap`."""
        seen = {Permutation.identity(self.degree)}
        queue = list(seen)
        while queue:
            nxt = []
            for p in queue:
                for g in self.generators:
                    q = g * p
                    if q not in seen:
                        if len(seen) >= cap:
                            raise ResourceCapError(
                                f"group has more than {cap} elements",
                                required=len(seen) + 1, cap=cap)
                        seen.add(q)
                        nxt.append(q)
            queue = nxt
        return sorted(seen)

    def is_natural_alternating(self) -> bool:
        """True iff this is Alt(degree) in its natural action."""
        return all(g.is_even() for g in self.generators) and \
            self.order() == math.factorial(self.degree) // 2

    def max_element_order(self, cap: int = DEFAULT_DEGREE_CAP) -> int:
        """Exact maximum of element orders.

        Full alternating groups are handled by enumerating even cycle types;
        anything else falls back to bounded element enumeration.
        """
        if self.order() == 1:
            return 1
        if self.is_natural_alternating():
            return max_order_alternating(self.degree)
        return max(p.order() for p in self.elements(cap=cap))

    def normal_closure_order(self, seeds: list[Permutation]) -> int:
        """Order of the normal closure of `seeds` in this group."""
        closure_gens = [s for s in seeds if not s.is_identity()]
        while True:
            subgroup = PermGroup(closure_gens, degree=self.degree)
            new = []
            for g in self.generators:
                for s in closure_gens:
                    c = s.conjugate(g)
                    if not subgroup.contains(c):
                        new.append(c)
            if not new:
                return subgroup.order()
            closure_gens.extend(new)


def alternating_gens(degree: int) -> list[Permutation]:
    """Standard generators of Alt(degree) on 0-based points: a long even cycle plus (0 1 2)."""
    if degree < 3:
        return [Permutation.identity(max(degree, 1))]
    three = Permutation.from_cycles([[0, 1, 2]], degree)
    if degree == 3:
        return [three]
    if degree % 2 == 1:
        long = Permutation.from_cycles([list(range(degree))], degree)
    else:
        long = Permutation.from_cycles([list(range(1, degree))], degree)
    return [long, three]


def generates_alternating(gens: list[Permutation], degree: int) -> bool:
    """Decide whether even permutations generate the full alternating group."""
    for g in gens:
        if g.degree != degree:
            raise DomainError(f"generator degree {g.degree} != {degree}")
        if not g.is_even():
            raise PreconditionError(f"odd generator: {format_cycles(g)}")
    group = PermGroup(gens, degree=degree)
    return group.order() == math.factorial(degree) // 2


def partitions(n: int):
    """Yield the partitions of n as descending tuples."""
    def rec(remaining, maximum):
        if remaining == 0:
            yield ()
            return
        for part in range(min(remaining, maximum), 0, -1):
            for rest in rec(remaining - part, part):
                yield (part,) + rest
    yield from rec(n, n)


def max_order_alternating(degree: int) -> int:
    """Max element order of Alt(degree): best lcm over even cycle types."""
    best = 1
    for part in partitions(degree):
        if sum(p - 1 for p in part) % 2 == 0:
            best = max(best, reduce(math.lcm, part, 1))
    return best


def exponent_alternating(degree: int) -> int:
    """Exponent of Alt(degree): lcm of all element orders."""
    orders = set()
    for part in partitions(degree):
        if sum(p - 1 for p in part) % 2 == 0:
            orders.add(reduce(math.lcm, part, 1))
    return reduce(math.lcm, orders, 1)


def all_even_permutations(degree: int) -> list[Permutation]:
    """Brute-force listing of Alt(degree); only sensible for small degrees."""
    out = []
    for images in itertools.permutations(range(degree)):
        p = Permutation(images)
        if p.is_even():
            out.append(p)
    return out
