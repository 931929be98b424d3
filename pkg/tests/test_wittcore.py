import json
import random

import pytest

from wittlab.exactpoly import INT_RING, ModRing, MPoly
from wittlab import wittcore
from wittlab.wittcore import (
    BINARY_RANGE,
    PFOLD_RANGE,
    WittVec,
    alternating_binom_constant,
    carry_value,
    ctx_for,
    dump_tables,
    fold_var,
    ghost_poly,
    pfold_decomposition,
    witt_sum,
    xvar,
    yvar,
)


def ghost_of_ints(p, comps):
    """Independent ghost map over plain integers."""
    out = []
    for l in range(1, len(comps) + 1):
        out.append(sum(p ** (i - 1) * comps[i - 1] ** (p ** (l - i)) for i in range(1, l + 1)))
    return out


def witt_sum_by_ghost(p, vectors):
    """Oracle: sum integer vectors through the ghost map and invert it.

    The inversion solves for z_l from the ghost identity one level at a
    time using exact integer division, touching none of the polynomial
    machinery.
    """
    n = len(vectors[0])
    targets = [0] * n
    for vec in vectors:
        for l, g in enumerate(ghost_of_ints(p, vec)):
            targets[l] += g
    z = []
    for l in range(1, n + 1):
        partial = sum(p ** (i - 1) * z[i - 1] ** (p ** (l - i)) for i in range(1, l))
        num = targets[l - 1] - partial
        q, r = divmod(num, p ** (l - 1))
        assert r == 0
        z.append(q)
    return z


class TestGhostPolys:
    def test_level_one(self):
        assert ghost_poly(2, 1) == MPoly.var(0)

    def test_p2_level2(self):
        assert ghost_poly(2, 2) == MPoly.var(0, 2) + 2 * MPoly.var(1)

    def test_p3_level3(self):
        expected = MPoly.var(0, 9) + 3 * MPoly.var(1, 3) + 9 * MPoly.var(2)
        assert ghost_poly(3, 3) == expected


class TestAdditionPolys:
    def test_phi1_every_p(self):
        for p in (2, 3, 5):
            assert ctx_for(p, 1).addition[0] == MPoly.var(xvar(1)) + MPoly.var(yvar(1))

    def test_phi2_p2(self):
        x1, y1 = MPoly.var(xvar(1)), MPoly.var(yvar(1))
        x2, y2 = MPoly.var(xvar(2)), MPoly.var(yvar(2))
        assert ctx_for(2, 2).addition[1] == x2 + y2 - x1 * y1

    def test_phi2_p3(self):
        x1, y1 = MPoly.var(xvar(1)), MPoly.var(yvar(1))
        x2, y2 = MPoly.var(xvar(2)), MPoly.var(yvar(2))
        assert ctx_for(3, 2).addition[1] == x2 + y2 - x1**2 * y1 - x1 * y1**2

    def test_ghost_identity_direct_substitution(self):
        # independent of the recursion that produced the tables
        for p, n in ((2, 3), (3, 2), (5, 2)):
            ctx_for(p, n).verify_ghost_identities()

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            ctx_for(2, 6)
        with pytest.raises(ValueError):
            ctx_for(7, 1)


class TestNegationPolys:
    def test_odd_p_is_componentwise(self):
        for p, n in ((3, 3), (5, 2)):
            ctx = ctx_for(p, n)
            for l in range(1, n + 1):
                assert ctx.negation[l - 1] == -MPoly.var(l - 1)

    def test_p2(self):
        ctx = ctx_for(2, 2)
        assert ctx.negation[0] == -MPoly.var(0)
        assert ctx.negation[1] == -MPoly.var(1) - MPoly.var(0, 2)


class TestWittArithmetic:
    def test_identity_element(self):
        rng = random.Random(0)
        ctx = ctx_for(2, 3)
        for _ in range(20):
            v = ctx.vec(INT_RING, [rng.randrange(-9, 9) for _ in range(3)])
            assert (ctx.zero_vec(INT_RING) + v).components == v.components

    def test_one_plus_one_p2(self):
        ctx = ctx_for(2, 2)
        v = ctx.vec(INT_RING, [1, 0])
        w = v + v
        assert w.components == (2, -1)
        assert list(w.ghost_components()) == [2, 2]

    def test_one_plus_one_mod8(self):
        ring = ModRing(8)
        ctx = ctx_for(2, 2)
        v = ctx.vec(ring, [1, 0])
        w = v + v
        assert [c.value for c in w.components] == [2, 7]

    def test_inverse_law_mod16(self):
        rng = random.Random(5)
        ring = ModRing(16)
        ctx = ctx_for(2, 3)
        zero = ctx.zero_vec(ring)
        for _ in range(50):
            v = ctx.vec(ring, [rng.randrange(16) for _ in range(3)])
            assert (v + (-v)).components == zero.components

    def test_threefold_sum_p3_ghost_oracle(self):
        ctx = ctx_for(3, 2)
        u = ctx.vec(INT_RING, [1, 0])
        s = witt_sum([u, u, u])
        assert list(s.components) == witt_sum_by_ghost(3, [[1, 0]] * 3)
        assert s.components == (3, -8)

    def test_random_sums_against_ghost_oracle(self):
        rng = random.Random(13)
        for p, n in ((2, 4), (3, 3), (5, 2)):
            ctx = ctx_for(p, n)
            for _ in range(25):
                vecs = [
                    ctx.vec(INT_RING, [rng.randrange(-4, 5) for _ in range(n)])
                    for _ in range(3)
                ]
                got = witt_sum(vecs)
                assert list(got.components) == witt_sum_by_ghost(
                    p, [list(v.components) for v in vecs]
                )

    def test_naturality_of_reduction(self):
        rng = random.Random(17)
        for p, n in ((2, 4), (3, 3)):
            ring = ModRing(p**16)
            ctx = ctx_for(p, n)
            for _ in range(25):
                a = [rng.randrange(-99, 99) for _ in range(n)]
                b = [rng.randrange(-99, 99) for _ in range(n)]
                over_z = ctx.vec(INT_RING, a) + ctx.vec(INT_RING, b)
                over_mod = ctx.vec(ring, a) + ctx.vec(ring, b)
                assert [ring.from_int(c) for c in over_z.components] == list(
                    over_mod.components
                )


class TestTruncation:
    def test_drops_tail(self):
        ctx = ctx_for(2, 2)
        assert ctx.vec(INT_RING, [3, 4]).truncate(1).components == (3,)

    def test_is_additive(self):
        rng = random.Random(23)
        ctx = ctx_for(3, 3)
        for _ in range(30):
            a = ctx.vec(INT_RING, [rng.randrange(-9, 9) for _ in range(3)])
            b = ctx.vec(INT_RING, [rng.randrange(-9, 9) for _ in range(3)])
            for m in (1, 2):
                assert (a + b).truncate(m).components == (
                    a.truncate(m) + b.truncate(m)
                ).components

    def test_surjective_by_zero_padding(self):
        ctx2 = ctx_for(2, 2)
        a = ctx2.vec(INT_RING, [5, 0])
        assert a.truncate(1).components == (5,)


class TestPFoldDecomposition:
    def test_first_carry_vanishes(self):
        for p in (2, 3, 5):
            assert pfold_decomposition(p, 2).carry_polys[0].is_zero()

    def test_carry2_p2(self):
        pf = pfold_decomposition(2, 2)
        expected = -(MPoly.var(fold_var(2, 1, 1)) * MPoly.var(fold_var(2, 2, 1)))
        assert pf.carry_polys[1] == expected

    def test_carry2_p2_symbolic_oracle(self):
        # (x^2 + y^2 - (x+y)^2) / 2, assembled without the fold machinery
        x = MPoly.var(fold_var(2, 1, 1))
        y = MPoly.var(fold_var(2, 2, 1))
        oracle = (x**2 + y**2 - (x + y) ** 2).exact_div_int(2)
        assert pfold_decomposition(2, 2).carry_polys[1] == oracle

    def test_degree_bounds_p2(self):
        pf = pfold_decomposition(2, 3)
        assert pf.carry_polys[2].min_monomial_degree() >= 2
        assert pf.residual_for_level(3).min_monomial_degree() >= 4

    def test_variable_support(self):
        for p, nmax in PFOLD_RANGE.items():
            pf = pfold_decomposition(p, nmax)
            for l in range(2, nmax + 1):
                allowed = {fold_var(p, i, j) for i in range(1, p + 1) for j in range(1, l)}
                assert pf.carry_polys[l - 1].variables() <= allowed

    def test_sign_convention_recorded(self):
        assert pfold_decomposition(2, 3).sign_convention == "minus"
        assert pfold_decomposition(2, 4).sign_convention == "minus"
        assert pfold_decomposition(3, 3).sign_convention == "minus"
        # with no middle bracket anywhere the convention is undetermined
        assert pfold_decomposition(5, 2).sign_convention == "degenerate"

    def test_carry_constant(self):
        assert alternating_binom_constant(2) == -1
        assert alternating_binom_constant(3) == 0
        assert alternating_binom_constant(5) == 0

    def test_fold_consistency_random(self):
        rng = random.Random(29)
        for p, nmax in ((2, 3), (3, 3)):
            pf = pfold_decomposition(p, nmax)
            ctx = ctx_for(p, nmax)
            for _ in range(20):
                rows = [[rng.randrange(-5, 6) for _ in range(nmax)] for _ in range(p)]
                total = witt_sum([ctx.vec(INT_RING, row) for row in rows])
                for l in range(1, nmax + 1):
                    assign = {
                        fold_var(p, i, j): rows[i - 1][j - 1]
                        for i in range(1, p + 1)
                        for j in range(1, nmax + 1)
                    }
                    f_val = pf.carry_polys[l - 1].eval(assign)
                    plain = sum(rows[i][l - 1] for i in range(p))
                    assert total.components[l - 1] == plain + f_val

    def test_numeric_carry_equals_symbolic(self):
        rng = random.Random(31)
        for p, nmax in ((2, 4), (3, 3)):
            pf = pfold_decomposition(p, nmax)
            for _ in range(20):
                rows = [
                    [rng.randrange(-5, 6) for _ in range(nmax - 1)] for _ in range(p)
                ]
                numeric = carry_value(p, nmax, rows, INT_RING)
                assign = {
                    fold_var(p, i, j): rows[i - 1][j - 1]
                    for i in range(1, p + 1)
                    for j in range(1, nmax)
                }
                assert numeric == pf.carry_polys[nmax - 1].eval(assign)


class TestSerialization:
    def test_dump_contains_known_poly(self):
        obj = dump_tables(2, 3)
        phi2 = MPoly.from_obj(obj["binary"]["addition"][1])
        assert phi2 == ctx_for(2, 3).addition[1]
        assert obj["pfold"]["sign_convention"] == "minus"

    def test_content_hash_stable(self):
        a = dump_tables(3, 2)
        b = dump_tables(3, 2)
        assert a["content_hash"] == b["content_hash"]

    def test_hash_distinguishes_tables(self):
        assert dump_tables(2, 2)["content_hash"] != dump_tables(2, 3)["content_hash"]

    def test_json_is_canonical(self):
        a = json.dumps(dump_tables(2, 2), sort_keys=True)
        b = json.dumps(dump_tables(2, 2), sort_keys=True)
        assert a == b
