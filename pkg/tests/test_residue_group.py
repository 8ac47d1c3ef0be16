"""Unit group structure, subgroups, cosets, and the exponent fast path."""

import math
from itertools import combinations

import pytest

from cosetapprox.arith import factor, r_d, u_d
from cosetapprox.residue_group import (
    coset,
    coset_contains,
    dth_power_coset_contains,
    dth_power_subgroup,
    full_subgroup,
    index,
    inv_mod,
    is_dth_power,
    subgroup_from_generators,
    unit_group,
    xgcd,
)


def mult_order(x, n):
    o, y = 1, x % n
    while y != 1:
        y = y * x % n
        o += 1
    return o


class TestModularBasics:
    def test_xgcd(self):
        for a, b in [(12, 18), (35, 64), (1, 1), (0, 7), (101, 103)]:
            g, x, y = xgcd(a, b)
            assert g == math.gcd(a, b) == a * x + b * y

    def test_inv_mod(self):
        for n in range(2, 60):
            for a in range(1, n):
                if math.gcd(a, n) == 1:
                    assert a * inv_mod(a, n) % n == 1
        with pytest.raises(ValueError):
            inv_mod(6, 9)


class TestUnitGroup:
    def test_mod_7_is_cyclic_of_order_6(self):
        g = unit_group(7)
        assert len(g.cyclic_factors) == 1
        gen, order = g.cyclic_factors[0]
        assert order == 6 == g.phi
        assert mult_order(gen, 7) == 6
        assert gen == 3  # smallest primitive root, stable across runs

    def test_mod_8_is_klein_four(self):
        g = unit_group(8)
        assert sorted(o for _, o in g.cyclic_factors) == [2, 2]
        assert all(pow(x, 2, 8) == 1 for x in g.units())

    def test_mod_2_trivial(self):
        g = unit_group(2)
        assert g.cyclic_factors == ()
        assert g.phi == 1
        assert g.units() == [1]

    def test_rejects_small_modulus(self):
        with pytest.raises(ValueError):
            unit_group(1)
        with pytest.raises(ValueError):
            unit_group(0)

    def test_structure_exhaustive(self):
        # orders multiply to phi(n); dlog is a bijection that reconstructs.
        for n in range(2, 90):
            g = unit_group(n)
            prod = 1
            for gen, order in g.cyclic_factors:
                assert mult_order(gen, n) == order
                prod *= order
            assert prod == g.phi
            vectors = set()
            for x in g.units():
                e = g.dlog(x)
                vectors.add(e)
                val = 1
                for (gen, _), ei in zip(g.cyclic_factors, e):
                    val = val * pow(gen, ei, n) % n
                assert val == x
            assert len(vectors) == g.phi

    def test_dlog_rejects_non_units(self):
        g = unit_group(12)
        with pytest.raises(ValueError):
            g.dlog(4)


class TestSubgroups:
    def test_squares_mod_7(self):
        g = unit_group(7)
        G = dth_power_subgroup(g, 2)
        assert G.elements == (1, 2, 4) == tuple(sorted({pow(x, 2, 7) for x in range(1, 7)}))
        G.validate()

    def test_first_powers_are_everything(self):
        g = unit_group(7)
        assert dth_power_subgroup(g, 1).elements == (1, 2, 3, 4, 5, 6)

    def test_squares_mod_12_trivial(self):
        g = unit_group(12)
        assert dth_power_subgroup(g, 2).elements == (1,)

    def test_order_and_index_match_arith(self):
        for n in range(2, 200):
            g = unit_group(n)
            f = g.factorization
            for d in range(1, 7):
                G = dth_power_subgroup(g, d)
                assert G.order == r_d(f, d)
                assert index(G) == u_d(f, d)

    def test_generated_subgroups(self):
        g = unit_group(7)
        assert subgroup_from_generators(g, []).elements == (1,)
        assert subgroup_from_generators(g, [2]).elements == (1, 2, 4)
        assert subgroup_from_generators(g, [3]).elements == (1, 2, 3, 4, 5, 6)
        with pytest.raises(ValueError):
            subgroup_from_generators(unit_group(10), [5])

    def test_nested_power_subgroups(self):
        # d-th powers sit inside e-th powers whenever e divides d.
        for n in (7, 9, 16, 24, 35, 60):
            g = unit_group(n)
            for d in range(1, 13):
                Gd = set(dth_power_subgroup(g, d).elements)
                for e in range(1, d + 1):
                    if d % e == 0:
                        assert Gd <= set(dth_power_subgroup(g, e).elements)

    def test_validate_catches_non_subgroup(self):
        g = unit_group(7)
        good = subgroup_from_generators(g, [2])
        bad = type(good)(group=g, elements=(1, 2), generators=None)
        with pytest.raises(AssertionError):
            bad.validate()


class TestCosets:
    def test_coset_of_squares_mod_7(self):
        g = unit_group(7)
        G = dth_power_subgroup(g, 2)
        c = coset(3, G)
        assert c.elements == (3, 5, 6) == tuple(sorted(3 * x % 7 for x in (1, 2, 4)))

    def test_identity_and_member_representatives(self):
        g = unit_group(7)
        G = dth_power_subgroup(g, 2)
        assert coset(1, G).elements == G.elements
        assert coset(2, G).elements == G.elements  # 2 is itself a square

    def test_rejects_non_unit_representative(self):
        g = unit_group(10)
        with pytest.raises(ValueError):
            coset(4, full_subgroup(g))

    def test_contains(self):
        g = unit_group(7)
        c = coset(3, dth_power_subgroup(g, 2))
        assert coset_contains(c, 12)  # 12 = 5 mod 7
        assert not coset_contains(c, 14)  # multiple of 7, not a unit
        cG = coset(1, dth_power_subgroup(g, 2))
        assert coset_contains(cG, 1)

    def test_contains_translation_equivalence(self):
        for n in (7, 8, 15, 16, 24):
            g = unit_group(n)
            for d in (1, 2, 3):
                G = dth_power_subgroup(g, d)
                for a in g.units():
                    c = coset(a, G)
                    base = coset(1, G)
                    ainv = inv_mod(a, n)
                    for p in range(2 * n):
                        assert coset_contains(c, p) == coset_contains(base, ainv * p)

    def test_partition(self):
        for n in (7, 9, 15, 16, 30):
            g = unit_group(n)
            for d in (2, 3):
                G = dth_power_subgroup(g, d)
                seen = {}
                for a in g.units():
                    seen.setdefault(coset(a, G).elements, 0)
                assert len(seen) == index(G)
                all_elems = [x for elems in seen for x in elems]
                assert sorted(all_elems) == g.units()
                for e1, e2 in combinations(seen, 2):
                    assert not set(e1) & set(e2)

    def test_index_examples(self):
        g = unit_group(7)
        assert index(dth_power_subgroup(g, 2)) == 2
        assert index(full_subgroup(g)) == 1
        assert index(subgroup_from_generators(g, [])) == 6


class TestExponentFastPath:
    def test_matches_explicit_sets(self):
        # includes the two-factor 2-power groups 8, 16, 32, 64
        for n in list(range(2, 130)):
            g = unit_group(n)
            f = g.factorization
            for d in range(1, 7):
                explicit = set(dth_power_subgroup(g, d).elements)
                for x in range(n):
                    assert is_dth_power(f, x, d) == (x in explicit), (n, x, d)

    def test_coset_fast_path(self):
        for n in (7, 8, 9, 16, 15, 45):
            g = unit_group(n)
            f = g.factorization
            for d in (1, 2, 3, 4):
                G = dth_power_subgroup(g, d)
                for a in g.units():
                    c = coset(a, G)
                    for p in range(2 * n):
                        assert dth_power_coset_contains(f, a, p, d) == coset_contains(c, p)

    def test_modulus_one_is_trivial(self):
        f = factor(1)
        assert is_dth_power(f, 0, 3)
        assert dth_power_coset_contains(f, 1, 0, 2)
