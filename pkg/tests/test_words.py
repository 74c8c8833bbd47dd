import random

import pytest

from branchforge.errors import DomainError
from branchforge.perms import Permutation, alternating_gens, parse_cycles
from branchforge.treeauto import equal_up_to_depth
from branchforge.words import (
    ALetter,
    BLetter,
    FPWord,
    LenPair,
    SHORT,
    WordContext,
    evaluate,
    free_reduce,
    inverse_word,
    invert_gword,
    multiply,
    normal_form,
    parse_word,
    render_word,
    section_word,
    stabilized_section_word,
    word_power,
)
from util import random_word


@pytest.fixture(scope="module")
def ctx_n1(shape_n1):
    return WordContext(shape_n1)


@pytest.fixture(scope="module")
def ctx_c2(shape_c2):
    from branchforge.embeddings import GroupChainSpec, QuotientSpec
    chain = GroupChainSpec(
        generators=("s",),
        quotients=(QuotientSpec(2, {"s": Permutation.from_cycles([[0, 1]], 2)}),),
        faithful=0,
    )
    return WordContext(shape_c2, chain)


def a_letter(ctx, cycles, level=0):
    return ALetter(parse_cycles(cycles, ctx.alt_degree(level)))


class TestGWords:
    def test_free_reduce(self):
        assert free_reduce((("s", 1), ("s", -1))) == ()
        assert free_reduce((("s", 1), ("s", 1))) == (("s", 2),)
        assert free_reduce((("s", 1), ("t", 0), ("s", -1))) == ()

    def test_invert(self):
        assert invert_gword((("s", 1), ("t", 2))) == (("t", -2), ("s", -1))

    def test_finite_context_canonicalizes(self, ctx_c2):
        assert ctx_c2.g_reduce((("s", 2),)) == ()
        assert ctx_c2.g_reduce((("s", 3),)) == (("s", 1),)
        assert ctx_c2.g_is_trivial((("s", -2),))


class TestNormalForm:
    def test_cancellation_to_empty(self, ctx_n1):
        a = a_letter(ctx_n1, "(1 2 3)")
        w = normal_form(0, (a, a.inverse()), ctx_n1)
        assert w.is_empty()
        assert w.length() == LenPair(0, 0)

    def test_b_letters_merge_componentwise(self, ctx_n1):
        b1 = BLetter(parse_cycles("(1 2 3)", 5), ())
        b2 = BLetter(parse_cycles("(3 4 5)", 5), ())
        w = normal_form(0, (b1, b2), ctx_n1)
        assert w.length() == LenPair(1, 0)
        assert w.letters[0].q == parse_cycles("(1 2 3)", 5) * parse_cycles("(3 4 5)", 5)

    def test_alternating_untouched(self, ctx_n1):
        letters = (a_letter(ctx_n1, "(1 2 3)"),
                   BLetter(parse_cycles("(1 2 3 4 5)", 5), ()),
                   a_letter(ctx_n1, "(1 2)(3 4)"))
        w = normal_form(0, letters, ctx_n1)
        assert w.letters == letters
        assert w.length() == LenPair(1, 2)

    def test_idempotent(self, ctx_n1):
        rng = random.Random(31)
        for _ in range(50):
            w = random_word(ctx_n1, rng)
            again = normal_form(w.level, w.letters, ctx_n1)
            assert again == w

    def test_cascading_merge(self, ctx_n1):
        a = a_letter(ctx_n1, "(1 2 3)")
        b = BLetter(parse_cycles("(1 2 3 4 5)", 5), ())
        letters = (a, b, b.inverse(), a.inverse())
        assert normal_form(0, letters, ctx_n1).is_empty()

    def test_wrong_degree_rejected(self, ctx_n1):
        with pytest.raises(DomainError):
            normal_form(0, (ALetter(Permutation.identity(7)),), ctx_n1)

    def test_alternation_invariant(self, ctx_n1):
        rng = random.Random(32)
        for _ in range(100):
            w = random_word(ctx_n1, rng, max_b=4)
            kinds = [type(letter) for letter in w.letters]
            for k1, k2 in zip(kinds, kinds[1:]):
                assert k1 is not k2
            assert abs(w.len_b - w.len_a) <= 1


class TestLength:
    def test_examples(self, ctx_n1):
        assert FPWord(0, ()).length() == LenPair(0, 0)
        single = normal_form(0, (a_letter(ctx_n1, "(1 2 3)"),), ctx_n1)
        assert single.length() == LenPair(0, 1)

    def test_lenpair_order_is_lexicographic(self):
        assert LenPair(2, 0) > LenPair(1, 5)
        assert LenPair(1, 1) > LenPair(1, 0)
        assert LenPair(0, 7) < SHORT

    def test_product_length_bounds(self, ctx_n1):
        rng = random.Random(33)
        for _ in range(500):
            w1 = random_word(ctx_n1, rng)
            w2 = random_word(ctx_n1, rng)
            prod = multiply(w1, w2, ctx_n1)
            l1, l2 = w1.length(), w2.length()
            assert prod.length() <= l1 + l2
            assert max(l1, l2) - min(l1, l2) <= prod.length()


class TestEvaluate:
    def test_empty_is_identity(self, ctx_n1, calc_n1):
        assert evaluate(FPWord(0, ()), calc_n1).is_structural_identity()

    def test_single_a_is_rooted(self, ctx_n1, calc_n1):
        perm = parse_cycles("(1 2 3)", 5)
        w = normal_form(0, (ALetter(perm),), ctx_n1)
        assert evaluate(w, calc_n1) is calc_n1.rooted_natural(0, perm)

    def test_pure_q_b_letter_is_directed(self, ctx_n1, calc_n1):
        q = parse_cycles("(1 2 3 4 5)", 5)
        w = normal_form(0, (BLetter(q, ()),), ctx_n1)
        assert evaluate(w, calc_n1) is calc_n1.directed_q(0, q)

    def test_homomorphism(self, ctx_n1, calc_n1):
        rng = random.Random(34)
        for _ in range(500):
            w1 = random_word(ctx_n1, rng, max_b=2)
            w2 = random_word(ctx_n1, rng, max_b=2)
            lhs = evaluate(multiply(w1, w2, ctx_n1), calc_n1)
            rhs = evaluate(w1, calc_n1) * evaluate(w2, calc_n1)
            assert equal_up_to_depth(lhs, rhs, 4)

    def test_inverse_word(self, ctx_n1, calc_n1):
        rng = random.Random(35)
        for _ in range(20):
            w = random_word(ctx_n1, rng, max_b=2)
            lhs = evaluate(inverse_word(w, ctx_n1), calc_n1)
            rhs = evaluate(w, calc_n1).inverse()
            assert equal_up_to_depth(lhs, rhs, 3)

    def test_power(self, ctx_n1, calc_n1):
        rng = random.Random(36)
        w = random_word(ctx_n1, rng, max_b=2, allow_empty=False)
        lhs = evaluate(word_power(w, 3, ctx_n1), calc_n1)
        rhs = evaluate(w, calc_n1).power(3)
        assert equal_up_to_depth(lhs, rhs, 3)


class TestSectionWords:
    def test_single_a_sections_vanish(self, ctx_n1, shape_n1, spine_n1):
        w = normal_form(0, (a_letter(ctx_n1, "(1 2 3)"),), ctx_n1)
        for x in range(20):
            assert section_word(w, x, spine_n1, shape_n1, ctx_n1).is_empty()

    def test_b_letter_recurses_at_o(self, ctx_n1, shape_n1, spine_n1):
        q = parse_cycles("(1 2 3 4 5)", 5)
        w = normal_form(0, (BLetter(q, ()),), ctx_n1)
        at_o = section_word(w, shape_n1.level(0).o, spine_n1, shape_n1, ctx_n1)
        assert at_o.level == 1
        assert at_o.letters == (BLetter(q, ()),)

    def test_b_letter_roots_at_alpha(self, ctx_n1, shape_n1, spine_n1):
        q = parse_cycles("(1 2 3)", 5)
        w = normal_form(0, (BLetter(q, ()),), ctx_n1)
        at_alpha = section_word(w, spine_n1.alpha[0], spine_n1, shape_n1, ctx_n1)
        assert at_alpha.letters == (ALetter(q.pad(5)),)
        for x in range(20):
            if x not in (shape_n1.level(0).o, spine_n1.alpha[0], spine_n1.beta[0]):
                assert section_word(w, x, spine_n1, shape_n1, ctx_n1).is_empty()

    def test_section_blength_sum_bound(self, ctx_n1, shape_n1, spine_n1):
        rng = random.Random(37)
        for _ in range(300):
            w = random_word(ctx_n1, rng, max_b=4)
            total = sum(
                section_word(w, x, spine_n1, shape_n1, ctx_n1).len_b
                for x in range(20))
            assert total <= w.len_b

    def test_section_matches_tree_calculus(self, ctx_n1, shape_n1, spine_n1, calc_n1):
        rng = random.Random(38)
        for _ in range(40):
            w = random_word(ctx_n1, rng, max_b=3)
            x = rng.randrange(20)
            symbolic = evaluate(section_word(w, x, spine_n1, shape_n1, ctx_n1), calc_n1)
            direct = evaluate(w, calc_n1).section(x)
            assert equal_up_to_depth(symbolic, direct, 3)


class TestStabilizedSectionWords:
    def test_a_only_word(self, ctx_n1, shape_n1, spine_n1):
        w = normal_form(0, (a_letter(ctx_n1, "(1 2 3 4 5)"),), ctx_n1)
        for x in range(20):
            assert stabilized_section_word(w, x, spine_n1, shape_n1, ctx_n1).is_empty()

    def test_blength_never_grows(self, ctx_n1, shape_n1, spine_n1):
        rng = random.Random(39)
        for _ in range(300):
            w = random_word(ctx_n1, rng, max_b=4)
            for x in (0, rng.randrange(20)):
                sec = stabilized_section_word(w, x, spine_n1, shape_n1, ctx_n1)
                assert sec.len_b <= w.len_b

    def test_matches_tree_calculus(self, ctx_n1, shape_n1, spine_n1, calc_n1):
        rng = random.Random(40)
        for _ in range(40):
            w = random_word(ctx_n1, rng, max_b=3)
            x = rng.randrange(20)
            symbolic = evaluate(stabilized_section_word(w, x, spine_n1, shape_n1, ctx_n1), calc_n1)
            direct = evaluate(w, calc_n1).stabilized_section((x,))
            assert equal_up_to_depth(symbolic, direct, 3)

    def test_deep_vertex_composition(self, ctx_n1, shape_n1, spine_n1):
        rng = random.Random(41)
        for _ in range(20):
            w = random_word(ctx_n1, rng, max_b=3)
            u = (rng.randrange(20), rng.randrange(20))
            two_step = stabilized_section_word(
                stabilized_section_word(w, u[0], spine_n1, shape_n1, ctx_n1),
                u[1], spine_n1, shape_n1, ctx_n1)
            direct = stabilized_section_word(w, u, spine_n1, shape_n1, ctx_n1)
            assert two_step == direct

    def test_exhaustive_small_word(self, ctx_n1, shape_n1, spine_n1, calc_n1):
        # one fixed two-B-letter word, checked against the tree calculus at every letter
        q1, q2 = alternating_gens(5)
        w = normal_form(0, (
            ALetter(q1.pad(5)), BLetter(q2, ()), ALetter(q2.pad(5)), BLetter(q1, ()),
            ALetter((q1 * q2).pad(5))), ctx_n1)
        assert w.len_b == 2
        for x in range(20):
            symbolic = evaluate(stabilized_section_word(w, x, spine_n1, shape_n1, ctx_n1), calc_n1)
            direct = evaluate(w, calc_n1).stabilized_section((x,))
            assert equal_up_to_depth(symbolic, direct, 3)

    def test_g_letters_in_finite_scenario(self, ctx_c2, shape_c2, spine_c2, calc_c2):
        rng = random.Random(42)
        for _ in range(15):
            w = random_word(ctx_c2, rng, max_b=2)
            x = rng.randrange(shape_c2.level(0).x_size)
            symbolic = evaluate(stabilized_section_word(w, x, spine_c2, shape_c2, ctx_c2), calc_c2)
            direct = evaluate(w, calc_c2).stabilized_section((x,))
            assert equal_up_to_depth(symbolic, direct, 2)


class TestDsl:
    def test_readme_example(self, ctx_c2):
        text = "A((1 2 3)) B(q=(1 2 3 4 5), g=s s^-1)"
        w = parse_word(text, 0, ctx_c2)
        assert w.len_b == 1 and w.len_a == 1
        assert w.letters[1] == BLetter(parse_cycles("(1 2 3 4 5)", 5), ())

    def test_roundtrip(self, ctx_c2):
        rng = random.Random(43)
        for _ in range(50):
            w = random_word(ctx_c2, rng, max_b=3)
            assert parse_word(render_word(w), 0, ctx_c2) == w

    def test_postfix_exponents(self, ctx_n1):
        w = parse_word("A((1 2 3))^-1", 0, ctx_n1)
        assert w.letters[0].perm == parse_cycles("(1 3 2)", 5)
        w2 = parse_word("B(q=(1 2 3 4 5))^2", 0, ctx_n1)
        assert w2.letters[0].q == parse_cycles("(1 2 3 4 5)", 5) ** 2

    def test_g_word_exponent(self, ctx_c2):
        w = parse_word("B(g=s)^2", 0, ctx_c2)
        assert w.is_empty()  # s^2 = 1 in the faithful quotient

    def test_identity_tokens_vanish(self, ctx_n1):
        assert parse_word("A(()) B(q=())", 0, ctx_n1).is_empty()

    def test_errors(self, ctx_c2):
        for bad in ["C((1 2))", "A((1 2)", "B(x=(1 2))", "B(g=unknown)", "A((9 10))"]:
            with pytest.raises(DomainError):
                parse_word(bad, 0, ctx_c2)
