"""Counting machinery for choosing spine prefixes that shrink words.

For a word w at a level with split X = Y u Y' u {o}, the bad-pair set Z(w)
collects the single-level spine choices (s, t) in Y x Y' under which some
letter x fails to shrink: the stabilized section at x keeps the full
B-length of w (when w has at least two B-letters), or keeps length above
(1,0) (when it has exactly one).  Membership depends only on the
single-level pair because deeper spine entries only relabel deeper letters.

Two enumerations are provided.  The exhaustive one scans every pair and
every letter and serves as the oracle.  The default one is exact as well but
first reduces the search: a witness letter must put the leading B-letter's
evaluation position on o (otherwise all B-contributions merge into at most
one letter), and a witness pair must receive at least one rooted
contribution, which confines candidates to finitely many computed positions.
The two paths produce identical sets and witnesses, which the tests check.

The greedy prefix search walks levels, unions the bad-pair sets of all still
long section words, and takes the lexicographically smallest admissible pair
outside the union; the per-level counting inequality (the ratio check) is
recorded but not required, since the choice either exists or an explicit
coverage error is raised.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .embeddings import LevelData
from .errors import (
    BranchforgeError,
    ConfigurationError,
    DomainError,
    PreconditionError,
    VerificationError,
)
from .perms import partitions
from .treeauto import TreeShape
from .words import (
    FPWord,
    LenPair,
    SHORT,
    WordContext,
    conjugator_decomposition,
    parse_word,
    render_word,
    stabilized_section_word_at,
)


class PairCoverageError(BranchforgeError):
    """Every pair in Y x Y' is covered by the union of bad-pair sets."""

    def __init__(self, level_offset: int, y_size: int, y_prime_size: int, union_size: int):
        super().__init__(
            f"cannot guarantee a shrinking choice at level offset {level_offset}: "
            f"all {y_size}*{y_prime_size} pairs are covered (union size {union_size})")
        self.level_offset = level_offset
        self.y_size = y_size
        self.y_prime_size = y_prime_size
        self.union_size = union_size


# -- bad-pair sets -------------------------------------------------------------


@dataclass(frozen=True)
class ZSet:
    """Exact bad-pair enumeration for one word at one level."""

    word_dsl: str
    level: int
    len_b: int
    members: tuple[tuple[int, int], ...]
    witnesses: dict[tuple[int, int], tuple[int, LenPair]]
    bound: int

    @property
    def size(self) -> int:
        return len(self.members)


def _z_condition(word: FPWord, section: FPWord) -> bool:
    if word.len_b > 1:
        return section.len_b == word.len_b
    return section.length() > SHORT


def z_set(w: FPWord, level_data: LevelData, next_data: LevelData, ctx: WordContext,
          exhaustive: bool = False) -> ZSet:
    """Enumerate the bad pairs of one word, with witnesses.

    The cardinality bound len_B(w) * m * (|Y| + |Y'|) is asserted
    on every constructed set.
    """
    if not w.length() > SHORT:
        raise DomainError(f"word of length {w.length()} has nothing to shrink")

    if exhaustive:
        witnesses = _z_enumerate_exhaustive(w, level_data, next_data, ctx)
    else:
        witnesses = _z_enumerate_reduced(w, level_data, next_data, ctx)

    members = tuple(sorted(witnesses))
    bound = w.len_b * level_data.max_order * (len(level_data.y) + len(level_data.y_prime))
    if len(members) > bound:
        raise VerificationError(
            f"bad-pair set of size {len(members)} exceeds its counting bound {bound}")
    return ZSet(render_word(w), w.level, w.len_b, members, witnesses, bound)


def _z_enumerate_exhaustive(w, level_data, next_data, ctx):
    witnesses = {}
    for s in level_data.y:
        for t in level_data.y_prime:
            for x in range(level_data.x_size):
                section = stabilized_section_word_at(w, x, s, t, level_data, next_data, ctx)
                if _z_condition(w, section):
                    witnesses[(s, t)] = (x, section.length())
                    break
    return witnesses


def _z_enumerate_reduced(w, level_data, next_data, ctx):
    pairs, trailing = conjugator_decomposition(w, level_data)
    action = level_data.coset_action(trailing)
    inv_action = action.inverse()
    inv_prefixes = [level_data.coset_action(p.inverse()) for p, _ in pairs]

    # candidate letters: x with the leading B-letter hitting o at some orbit step
    lead = level_data.coset_action(pairs[0][0])(level_data.o)
    candidate_letters = []
    point = lead
    while True:
        candidate_letters.append(point)
        point = action(point)
        if point == lead:
            break
    candidate_letters = sorted(set(candidate_letters))

    y_set = set(level_data.y)
    y_prime_set = set(level_data.y_prime)
    pair_candidates: dict[tuple[int, int], set[int]] = {}
    for x in candidate_letters:
        q_positions = set()
        g_positions = set()
        point = x
        while True:
            for inv_p, (_, b) in zip(inv_prefixes, pairs):
                y = inv_p(point)
                if y == level_data.o:
                    continue
                if not b.q.is_identity():
                    q_positions.add(y)
                if b.g and not next_data.g_natural(b.g).is_identity():
                    g_positions.add(y)
            point = inv_action(point)
            if point == x:
                break
        for s in q_positions & y_set:
            for t in level_data.y_prime:
                pair_candidates.setdefault((s, t), set()).add(x)
        for t in g_positions & y_prime_set:
            for s in level_data.y:
                pair_candidates.setdefault((s, t), set()).add(x)

    witnesses = {}
    for pair in sorted(pair_candidates):
        s, t = pair
        for x in sorted(pair_candidates[pair]):
            section = stabilized_section_word_at(w, x, s, t, level_data, next_data, ctx)
            if _z_condition(w, section):
                witnesses[pair] = (x, section.length())
                break
    return witnesses


# -- Landau's function ---------------------------------------------------------

DEFAULT_LANDAU_MAX = 30


def landau(n: int, max_n: int = DEFAULT_LANDAU_MAX) -> int:
    """Largest order of a permutation of n points: max lcm over partitions.

    Dynamic programming over prime powers; exact integer arithmetic
    throughout.
    """
    if not 1 <= n <= max_n:
        raise PreconditionError(f"landau argument must be in 1..{max_n}")
    sieve = [True] * (n + 1)
    primes = []
    for p in range(2, n + 1):
        if sieve[p]:
            primes.append(p)
            for m in range(p * p, n + 1, p):
                sieve[m] = False
    best = [1] * (n + 1)
    for p in primes:
        for m in range(n, 0, -1):
            power = p
            while power <= m:
                candidate = best[m - power] * power
                if candidate > best[m]:
                    best[m] = candidate
                power *= p
    return best[n]


def landau_bruteforce(n: int) -> int:
    """Independent oracle: scan all partitions of n."""
    best = 1
    for part in partitions(n):
        value = 1
        for piece in part:
            value = math.lcm(value, piece)
        best = max(best, value)
    return best


def landau_bound_check(n: int, max_n: int = DEFAULT_LANDAU_MAX) -> bool:
    """Whether g(n) <= n!/2^(n-1), decided in exact integer arithmetic.

    The inequality fails for n in {2, 3, 4} and holds for n = 1 and n >= 5;
    the construction only ever applies it to arguments 2n+3 >= 5.
    """
    return landau(n, max_n) * 2 ** (n - 1) <= math.factorial(n)


def landau_table(max_arg: int) -> list[dict]:
    rows = []
    for n in range(1, max_arg + 1):
        g = landau(n, max_n=max(max_arg, DEFAULT_LANDAU_MAX))
        rows.append({
            "n": n,
            "g": g,
            "bound_num": math.factorial(n),
            "bound_den": 2 ** (n - 1),
            "holds": g * 2 ** (n - 1) <= math.factorial(n),
        })
    return rows


# -- the per-level counting ratio ---------------------------------------------


def hypothesis_ratio(level_data: LevelData) -> dict:
    """Exact ratio |Y||Y'| / (m (|Y|+|Y'|)) next to its closed-form lower bound.

    The bound is 19*2^(2n+1) / (20 (2n+3)(2n+2)(2n+1)); the ratio is checked
    against it on every call.
    """
    y, yp = len(level_data.y), len(level_data.y_prime)
    m = level_data.max_order
    n = level_data.n
    ratio = Fraction(y * yp, m * (y + yp))
    bound = Fraction(19 * 2 ** (2 * n + 1),
                     20 * (2 * n + 3) * (2 * n + 2) * (2 * n + 1))
    if ratio < bound:
        raise VerificationError(
            f"counting ratio {ratio} fell below its closed-form bound {bound}")
    return {"n": n, "y_size": y, "y_prime_size": yp, "max_order": m,
            "ratio": ratio, "bound": bound}


# -- greedy prefix search -------------------------------------------------------


@dataclass
class ShrinkCertificate:
    """Replayable record of a greedy shrinking-prefix search.

    Recomputing the search from the same inputs reproduces this object
    bit-for-bit; `verify_certificate` does exactly that and also re-checks
    the admissibility of the stored prefix.
    """

    scenario_id: str
    start_level: int
    budget: int
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    words: list[dict]
    zsets: list[dict]
    levels: list[dict]
    complete: bool
    survivors: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "start_level": self.start_level,
            "budget": self.budget,
            "prefix": {"alpha": list(self.alpha), "beta": list(self.beta)},
            "words": self.words,
            "zsets": self.zsets,
            "levels": self.levels,
            "complete": self.complete,
            "survivors": self.survivors,
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> ShrinkCertificate:
        return cls(
            scenario_id=data["scenario_id"],
            start_level=data["start_level"],
            budget=data["budget"],
            alpha=tuple(data["prefix"]["alpha"]),
            beta=tuple(data["prefix"]["beta"]),
            words=list(data["words"]),
            zsets=list(data["zsets"]),
            levels=list(data["levels"]),
            complete=data["complete"],
            survivors=list(data.get("survivors", [])),
        )


def greedy_shrinking_prefix(words: list[FPWord], shape: TreeShape, budget: int,
                            ctx: WordContext, start_level: int = 0,
                            scenario_id: str = "") -> ShrinkCertificate:
    """Choose spine letters level by level so every tracked word shrinks.

    At each level the bad-pair sets of all still long stabilized-section
    words are enumerated exactly and their union avoided; the chosen pair is
    the lexicographically smallest remaining one.  The search stops once all
    tracked words have shrunk below (1,0) (recording each word's depth), or
    after `budget` levels, flagging the certificate incomplete if long words
    survive.  With no tracked words the full budget is filled with the
    smallest admissible pairs.
    """
    for w in words:
        if w.level != start_level:
            raise DomainError("all tracked words must start at the same level")
    if budget < 0 or start_level + budget >= shape.horizon:
        raise ConfigurationError(
            f"budget {budget} from level {start_level} exceeds the horizon {shape.horizon}")

    word_records = [{"dsl": render_word(w), "level": start_level,
                     "shrink_depth": 0 if not w.length() > SHORT else None}
                    for w in words]
    survivors: list[set[FPWord]] = [
        {w} if w.length() > SHORT else set() for w in words]

    alpha: list[int] = []
    beta: list[int] = []
    zset_records: list[dict] = []
    level_records: list[dict] = []

    for depth in range(1, budget + 1):
        offset = start_level + depth - 1
        level_data = shape.level(offset)
        next_data = shape.level(offset + 1)

        active: dict = {}
        for word_set in survivors:
            for w in word_set:
                active[w.key()] = w
        active_words = [active[k] for k in sorted(active)]

        union: set[tuple[int, int]] = set()
        max_len_b = 0
        for w in active_words:
            zs = z_set(w, level_data, next_data, ctx)
            union.update(zs.members)
            max_len_b = max(max_len_b, w.len_b)
            zset_records.append({"level": offset, "word": zs.word_dsl,
                                 "size": zs.size, "bound": zs.bound})

        ratio_info = hypothesis_ratio(level_data)
        level_records.append({
            "level": offset,
            "y_size": ratio_info["y_size"],
            "y_prime_size": ratio_info["y_prime_size"],
            "max_order": ratio_info["max_order"],
            "ratio": str(ratio_info["ratio"]),
            "ratio_bound": str(ratio_info["bound"]),
            "max_len_b": max_len_b,
            "union_size": len(union),
            "choice_guaranteed": ratio_info["ratio"] > max_len_b if active_words else True,
        })

        chosen = None
        for s in level_data.y:
            for t in level_data.y_prime:
                if (s, t) not in union:
                    chosen = (s, t)
                    break
            if chosen:
                break
        if chosen is None:
            raise PairCoverageError(offset, len(level_data.y),
                                    len(level_data.y_prime), len(union))
        alpha.append(chosen[0])
        beta.append(chosen[1])

        for index, word_set in enumerate(survivors):
            if not word_set:
                continue
            nxt: set[FPWord] = set()
            for w in word_set:
                for x in range(level_data.x_size):
                    section = stabilized_section_word_at(
                        w, x, chosen[0], chosen[1], level_data, next_data, ctx)
                    if section.length() > SHORT:
                        nxt.add(section)
            survivors[index] = nxt
            if not nxt and word_records[index]["shrink_depth"] is None:
                word_records[index]["shrink_depth"] = depth

        if words and all(not word_set for word_set in survivors):
            break

    complete = all(record["shrink_depth"] is not None for record in word_records)
    surviving = sorted({render_word(w) for word_set in survivors for w in word_set})
    return ShrinkCertificate(
        scenario_id=scenario_id,
        start_level=start_level,
        budget=budget,
        alpha=tuple(alpha),
        beta=tuple(beta),
        words=word_records,
        zsets=zset_records,
        levels=level_records,
        complete=complete,
        survivors=surviving,
    )


def verify_certificate(cert: ShrinkCertificate, shape: TreeShape, ctx: WordContext) -> bool:
    """Replay a certificate from its recorded inputs and compare bit-for-bit.

    Also re-validates the stored prefix: every alpha entry lies in Y, every
    beta entry in Y', and the two never collide.
    """
    for depth, (s, t) in enumerate(zip(cert.alpha, cert.beta)):
        data = shape.level(cert.start_level + depth)
        if s not in data.y:
            raise VerificationError(f"alpha[{depth}]={s} is not in Y")
        if t not in data.y_prime:
            raise VerificationError(f"beta[{depth}]={t} is not in Y'")
        if s == t:
            raise VerificationError(f"alpha[{depth}] equals beta[{depth}]")
    words = [parse_word(record["dsl"], cert.start_level, ctx) for record in cert.words]
    replayed = greedy_shrinking_prefix(words, shape, cert.budget, ctx,
                                       start_level=cert.start_level,
                                       scenario_id=cert.scenario_id)
    if replayed.serialize() != cert.serialize():
        raise VerificationError("replayed certificate does not match the stored one")
    return True
