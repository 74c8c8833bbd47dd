import math

import pytest

from branchforge.errors import PreconditionError, ResourceCapError
from branchforge.embeddings import (
    CosetSpace,
    FiniteGroupTable,
    GroupChainSpec,
    LevelData,
    QuotientSpec,
    build_level_data,
    embed_finite_group,
    verify_altalt,
)
from branchforge.perms import (
    PermGroup,
    Permutation,
    all_even_permutations,
    alternating_gens,
    parse_cycles,
)


def trivial_quotient():
    return QuotientSpec(1, {})


def c2_quotient():
    return QuotientSpec(2, {"s": Permutation.from_cycles([[0, 1]], 2)})


class TestFiniteGroupTable:
    def test_trivial(self):
        t = FiniteGroupTable.trivial()
        assert t.order == 1

    def test_cyclic(self):
        t = FiniteGroupTable.cyclic(4)
        assert t.order == 4
        assert t.mult(1, 3) == 0  # t * t^3 = e

    def test_klein_four(self):
        t = FiniteGroupTable.klein_four()
        assert t.order == 4
        for i in range(4):
            assert t.mult(i, i) == 0

    def test_rejects_bad_identity(self):
        with pytest.raises(PreconditionError):
            FiniteGroupTable(("e", "t"), ((1, 0), (0, 1)), ("t",))

    def test_rejects_non_associative(self):
        # rows are permutations and index 0 is an identity, but not a group
        labels = ("e", "a", "b", "c", "d")
        table = [
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ]
        with pytest.raises(PreconditionError):
            FiniteGroupTable(labels, table, ("a",))

    def test_rejects_non_generating(self):
        t = FiniteGroupTable.klein_four()
        with pytest.raises(PreconditionError):
            FiniteGroupTable(t.labels, t.table, ("u",))

    def test_from_permutations_c2(self):
        t = FiniteGroupTable.from_permutations({"s": Permutation.from_cycles([[0, 1]], 2)})
        assert t.order == 2
        assert t.labels == ("e", "s")
        assert t.permutations[1] == Permutation.from_cycles([[0, 1]], 2)


class TestEmbedding:
    def test_trivial_group_gives_identity_in_alt5(self):
        images = embed_finite_group(FiniteGroupTable.trivial())
        assert list(images.values()) == [Permutation.identity(5)]

    def test_c2_explicit_involution(self):
        images = embed_finite_group(FiniteGroupTable.cyclic(2))
        t = images["t"]
        # direct construction: swaps {3,6} and {4,7} in 1-based labels
        assert t == parse_cycles("(3 6)(4 7)", 7)
        assert t.is_even() and t.order() == 2

    def test_c3_order_three_in_alt9(self):
        images = embed_finite_group(FiniteGroupTable.cyclic(3))
        t = images["t"]
        assert t.degree == 9
        assert t.is_even() and t.order() == 3
        assert t == parse_cycles("(3 6 7)(4 8 9)", 9)

    def test_freeness_on_both_point_sets(self):
        table = FiniteGroupTable.klein_four()
        n = table.order
        images = embed_finite_group(table)
        first = [2] + [4 + i for i in range(1, n)]
        second = [3] + [n + 3 + i for i in range(1, n)]
        for label, p in images.items():
            if label == "e":
                continue
            for point in first + second:
                assert p(point) != point

    def test_images_form_subgroup_of_expected_order(self):
        table = FiniteGroupTable.cyclic(4)
        images = embed_finite_group(table)
        group = PermGroup(list(images.values()), degree=11)
        assert group.order() == 4


class TestAltAlt:
    def test_trivial_f(self):
        assert verify_altalt(embed_finite_group(FiniteGroupTable.trivial()), 1)

    def test_c2(self):
        images = embed_finite_group(FiniteGroupTable.cyclic(2))
        # oracle: stabilizer-chain order of the conjugate closure
        conj = [g.pad(7).conjugate(f) for f in images.values() for g in alternating_gens(5)]
        assert PermGroup(conj, degree=7).order() == 2520
        assert verify_altalt(images, 2)

    def test_c3(self):
        images = embed_finite_group(FiniteGroupTable.cyclic(3))
        assert verify_altalt(images, 3)


class TestCosetSpace:
    def test_alt5_coset_count(self):
        sigma = Permutation.from_cycles([[0, 1, 2]], 5)
        space = CosetSpace(5, sigma, alternating_gens(5))
        assert space.size == 20
        assert space.index_of(Permutation.identity(5)) == 0
        assert space.index_of(sigma) == 0

    def test_action_is_well_defined(self):
        sigma = Permutation.from_cycles([[0, 1, 2]], 5)
        space = CosetSpace(5, sigma, alternating_gens(5))
        for g in all_even_permutations(5)[:10]:
            action = space.action_of(g)
            for i, rep in enumerate(space.reps):
                assert action(i) == space.index_of(g * rep)

    def test_cap(self):
        sigma = Permutation.from_cycles([[0, 1, 2]], 7)
        with pytest.raises(ResourceCapError):
            CosetSpace(7, sigma, alternating_gens(7), degree_cap=100)


@pytest.fixture(scope="module")
def level_n1():
    return build_level_data(trivial_quotient())


@pytest.fixture(scope="module")
def level_n2():
    return build_level_data(c2_quotient())


class TestLevelDataN1:
    def test_cardinalities(self, level_n1):
        assert level_n1.x_size == 20
        assert len(level_n1.y_prime) == 1
        assert len(level_n1.y) == 18
        assert level_n1.max_order == 5

    def test_stabilizer_of_o_is_sigma_by_enumeration(self, level_n1):
        # oracle: walk all 60 elements of Alt(5) and collect the stabilizer of o
        stab = [g for g in all_even_permutations(5)
                if level_n1.coset_action(g)(level_n1.o) == level_n1.o]
        expected = {Permutation.identity(5), level_n1.sigma, level_n1.sigma ** 2}
        assert set(stab) == expected

    def test_y_split_against_brute_force_stabilizers(self, level_n1):
        # oracle: compute every coset stabilizer by enumeration and compare sets
        sigma_group = {Permutation.identity(5), level_n1.sigma, level_n1.sigma ** 2}
        y, y_prime = [], []
        for index in range(level_n1.x_size):
            stab = {g for g in all_even_permutations(5)
                    if level_n1.coset_action(g)(index) == index}
            if index == level_n1.o:
                assert stab == sigma_group
            elif stab == sigma_group:
                y_prime.append(index)
            else:
                y.append(index)
        assert tuple(y) == level_n1.y
        assert tuple(y_prime) == level_n1.y_prime

    def test_stabilizer_order_via_chain(self, level_n1):
        group = level_n1.a_gens
        assert group.order() == 60
        assert group.is_transitive()
        stab = group.stabilizer_gens(level_n1.o)
        assert stab.order() == 3

    def test_closed_forms(self, level_n1):
        forms = level_n1.y_size_closed_forms()
        assert forms["enumerated"] == 18
        assert forms["half_order_form"] == 18
        assert forms["third_order_form"] == 38
        assert forms["matches"] == "half_order_form"

    def test_distinct_stabilizers_for_y_points(self, level_n1):
        sigma_action = level_n1.coset_action(level_n1.sigma)
        for x in level_n1.y:
            assert sigma_action(x) != x  # stabilizer of x cannot contain sigma


class TestLevelDataN2:
    def test_cardinalities(self, level_n2):
        assert level_n2.x_size == math.factorial(7) // 6 == 840
        assert len(level_n2.y_prime) == math.factorial(4) - 1 == 23
        assert len(level_n2.y) == 840 - 23 - 1 == 816
        assert level_n2.max_order == 7

    def test_stabilizer_of_o(self, level_n2):
        group = level_n2.a_gens
        assert group.is_transitive()
        stab = group.stabilizer_gens(level_n2.o)
        assert stab.order() == 3

    def test_spot_check_stabilizers(self, level_n2):
        # oracle: enumerate Alt(7) once, then check a few cosets directly
        elements = PermGroup(alternating_gens(7)).elements()
        sigma_group = {Permutation.identity(7), level_n2.sigma, level_n2.sigma ** 2}
        for index in [level_n2.o, level_n2.y[0], level_n2.y_prime[0], level_n2.y[100]]:
            rep = level_n2.cosets.reps[index]
            stab = {g for g in elements if level_n2.coset_action(g)(index) == index}
            assert len(stab) == 3
            expected_is_sigma = {rep.inverse() * g * rep for g in stab} == sigma_group
            if index == level_n2.o or index in level_n2.y_prime:
                assert stab == {rep * s * rep.inverse() for s in sigma_group}
                assert expected_is_sigma
            else:
                assert stab != sigma_group

    def test_g_image_faithful(self, level_n2):
        image = level_n2.g_image((("s", 1),))
        assert image.order() == 2
        assert level_n2.g_image((("s", 2),)).is_identity()


class TestLevelDataCap:
    def test_refuses_past_cap(self):
        quotient = QuotientSpec(4, {"t": Permutation.from_cycles([[0, 1, 2, 3]], 4)})
        with pytest.raises(ResourceCapError) as err:
            LevelData(quotient, degree_cap=200_000)
        assert err.value.required == math.factorial(11) // 6


class TestGroupChainSpec:
    def test_roundtrip(self):
        chain = GroupChainSpec(
            generators=("s",),
            quotients=(c2_quotient(), trivial_quotient_with_s()),
            faithful=0,
        )
        data = chain.to_json()
        back = GroupChainSpec.from_json(data)
        assert back.generators == chain.generators
        assert back.faithful == 0
        assert back.quotients[0].images["s"] == chain.quotients[0].images["s"]

    def test_chain_repeats_last_quotient(self):
        chain = GroupChainSpec(generators=("s",), quotients=(c2_quotient(),), faithful=0)
        assert chain.quotient_at(10) is chain.quotients[0]

    def test_missing_generator_rejected(self):
        with pytest.raises(PreconditionError):
            GroupChainSpec(generators=("s", "t"), quotients=(c2_quotient(),))

    def test_level_export_shape(self, level_n1):
        doc = level_n1.to_json()
        assert doc["x_size"] == 20
        assert doc["sigma"] == "(1 2 3)"
        assert len(doc["reps"]) == 20
        assert doc["reps"][0] == "()"
        assert set(doc["action"]) == {"q1", "q2"}


def trivial_quotient_with_s():
    return QuotientSpec(1, {"s": Permutation.identity(1)})


class TestLevelCache:
    def test_same_quotient_shares_instance(self):
        a = build_level_data(trivial_quotient())
        b = build_level_data(QuotientSpec(1, {}))
        assert a is b
