"""Shared helpers for building random automorphisms and vertices in tests."""

import math

from branchforge.perms import alternating_gens


def generator_pool(calc, level=0):
    """Rooted and directed generators of the scenario group at a level."""
    data = calc.shape.level(level)
    pool = []
    for _, p in data.q_gens_natural:
        pool.append(calc.rooted_natural(level, p))
    for _, p in data.g_gens_natural:
        if not p.is_identity():
            pool.append(calc.rooted_natural(level, p))
    for q in alternating_gens(5):
        pool.append(calc.directed_q(level, q))
    for name in sorted(data.quotient.images):
        pool.append(calc.directed_g(level, ((name, 1),)))
    return pool


def random_aut(calc, rng, level=0, max_len=6):
    """A random product of generators and their inverses."""
    pool = generator_pool(calc, level)
    length = rng.randint(1, max_len)
    node = calc.identity(level)
    for _ in range(length):
        g = rng.choice(pool)
        if rng.random() < 0.3:
            g = g.inverse()
        node = node * g
    return node


def random_vertex(calc, rng, level=0, length=1):
    return tuple(rng.randrange(calc.shape.alphabet_size(level + i)) for i in range(length))


def all_vertices(shape, level, length):
    """Every vertex word of the given length starting at `level`."""
    words = [()]
    for i in range(length):
        size = shape.alphabet_size(level + i)
        words = [w + (x,) for w in words for x in range(size)]
    return words


def brute_action_order(g, levels):
    """lcm of orbit lengths of g on all vertices of length <= levels, by enumeration."""
    out = 1
    for length in range(1, levels + 1):
        for v in all_vertices(g.calc.shape, g.level, length):
            out = math.lcm(out, g.orbit_length(v))
    return out


def random_a_letter(ctx, rng, level=0):
    from branchforge.words import ALetter
    data = ctx.shape.level(level)
    gens = [p for _, p in data.q_gens_natural] + \
           [p for _, p in data.g_gens_natural if not p.is_identity()]
    perm = gens[0].inverse() * gens[0]  # identity of the right degree
    for _ in range(rng.randint(1, 3)):
        p = rng.choice(gens)
        perm = perm * (p if rng.random() < 0.7 else p.inverse())
    return ALetter(perm)


def random_b_letter(ctx, rng):
    from branchforge.words import BLetter
    from branchforge.perms import Permutation, alternating_gens
    q = Permutation.identity(5)
    for _ in range(rng.randint(0, 2)):
        q = q * rng.choice(alternating_gens(5))
    g = []
    names = ctx.g_names()
    if names:
        for _ in range(rng.randint(0, 2)):
            g.append((rng.choice(names), rng.choice([-1, 1])))
    letter = BLetter(q, tuple(g))
    if letter.q.is_identity() and ctx.g_is_trivial(letter.g):
        letter = BLetter(alternating_gens(5)[0], letter.g)
    return letter


def random_word(ctx, rng, level=0, max_b=3, allow_empty=True):
    """Random alternating word with at most max_b B-letters, in normal form."""
    from branchforge.words import normal_form
    letters = []
    n_b = rng.randint(0 if allow_empty else 1, max_b)
    if rng.random() < 0.5:
        letters.append(random_a_letter(ctx, rng, level))
    for _ in range(n_b):
        letters.append(random_b_letter(ctx, rng))
        if rng.random() < 0.8:
            letters.append(random_a_letter(ctx, rng, level))
    return normal_form(level, tuple(letters), ctx)
