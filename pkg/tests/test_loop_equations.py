import pytest

import quivergauge as qg
from quivergauge.action import ActionSpec, expand_action
from quivergauge.laurent import YXPoly
from quivergauge.loop_equations import (
    factorize_large_N,
    generate_loop_equation,
    root_decompose,
)
from quivergauge.quiver import EdgeWord, QuiverError


ZETA = EdgeWord.from_string("e1+ e2+ e3+")


@pytest.fixture(scope="module")
def tri_table(triangle_quiver):
    # f3 = 1/3 makes the plaquette coupling exactly 1
    return expand_action(triangle_quiver, ActionSpec.from_list([0, 0, 0, "1/3"]))


def cyc(q, w):
    if isinstance(w, str):
        w = EdgeWord.from_string(w)
    return qg.cyclic_canonical(q, w)


class TestRootDecompose:
    def test_triangle_zeta(self, triangle_quiver):
        dec = root_decompose(triangle_quiver, ZETA, "e1")
        assert dec.p == 1
        assert dec.signs == (1,)
        assert dec.between == (EdgeWord.from_string("e2+ e3+"),)

    def test_zeta_squared(self, triangle_quiver):
        dec = root_decompose(triangle_quiver, ZETA**2, "e1")
        assert dec.p == 2
        assert dec.signs == (1, 1)
        mu = EdgeWord.from_string("e2+ e3+")
        assert dec.between == (mu, mu)

    def test_absent_root(self, two_site_quiver):
        w = EdgeWord.from_string("ov+ ov+")
        dec = root_decompose(two_site_quiver, w, "e")
        assert dec.p == 0 and dec.between == ()

    def test_rotation_to_forward_occurrence(self, triangle_quiver):
        dec = root_decompose(triangle_quiver, ZETA.rotate(1), "e1")
        assert dec.rotated.steps[0] == ("e1", 1)

    def test_self_loop_root_rejected(self, two_site_quiver):
        with pytest.raises(QuiverError, match="self-loop"):
            root_decompose(two_site_quiver, EdgeWord.from_string("ov+"), "ov")

    def test_unreduced_rejected(self, triangle_quiver):
        with pytest.raises(QuiverError, match="reduced"):
            root_decompose(triangle_quiver, EdgeWord.from_string("e1+ e1- e1+ e2+ e3+"), "e1")


class TestGenerateLoopEquation:
    def test_zeta_power_structure(self, triangle_quiver, tri_table):
        n = 3
        eq = generate_loop_equation(triangle_quiver, tri_table, ZETA**n, "e1")
        zc = cyc(triangle_quiver, ZETA)
        # lhs: unordered pairs {zeta^l, zeta^(n-l)}, all coefficient +1
        got = {}
        for t in eq.lhs:
            got[t.words] = t.coeff
        expected = {}
        for l in range(n):
            pair = tuple(
                sorted(
                    [cyc(triangle_quiver, ZETA**l), cyc(triangle_quiver, ZETA ** (n - l))],
                    key=lambda c: (len(c.steps), tuple(c.steps)),
                )
            )
            expected[pair] = expected.get(pair, 0) + 1
        assert got == expected
        # rhs: + coupling * zeta^(n+1), - coupling * zeta^(n-1)
        rhs = {(t.plaquette, t.word): t.multiplicity for t in eq.rhs}
        assert rhs[(zc, cyc(triangle_quiver, ZETA ** (n + 1)))] == 1
        assert rhs[(zc.reverse(), cyc(triangle_quiver, ZETA ** (n - 1)))] == -1
        assert len(rhs) == 2

    def test_remark_first_term_contains_full_loop(self, triangle_quiver, tri_table):
        eq = generate_loop_equation(triangle_quiver, tri_table, ZETA**2, "e1")
        full = cyc(triangle_quiver, ZETA**2)
        empty_pairs = [t for t in eq.lhs if t.words[0].is_empty]
        assert any(t.words[1] == full for t in empty_pairs)

    def test_constant_loop(self, triangle_quiver, tri_table):
        eq = generate_loop_equation(triangle_quiver, tri_table, EdgeWord(), "e1")
        assert eq.lhs == ()
        rhs = {(t.plaquette, t.word): t.multiplicity for t in eq.rhs}
        zc = cyc(triangle_quiver, ZETA)
        assert rhs == {(zc, zc): 1, (zc.reverse(), zc.reverse()): -1}

    def test_no_plaquette_meets_root(self, two_site_quiver):
        # quadratic action has only self-loop plaquettes; the bridge is clean
        table = expand_action(two_site_quiver, ActionSpec.from_list([0, 0, 1]))
        beta = EdgeWord.from_string("e+ ow+ e- ov+")
        eq = generate_loop_equation(two_site_quiver, table, beta, "e")
        assert eq.rhs == ()
        assert eq.lhs != ()

    def test_conjugation_terms_cancel(self, two_site_quiver):
        # beta = e mu e^-1: the two split terms coincide after cyclic
        # canonicalisation and merge away; the relation is trivially 0 = 0
        table = expand_action(two_site_quiver, ActionSpec.from_list([0, 0, 1]))
        beta = EdgeWord.from_string("e+ ow+ e-")
        eq = generate_loop_equation(two_site_quiver, table, beta, "e")
        assert eq.lhs == () and eq.rhs == ()

    def test_loop_avoiding_root(self, two_site_quiver):
        table = expand_action(two_site_quiver, ActionSpec.from_list([0, 0, 1]))
        beta = EdgeWord.from_string("ow+ ow+")
        eq = generate_loop_equation(two_site_quiver, table, beta, "e")
        assert eq.lhs == () and eq.rhs == ()

    def test_rotation_invariance(self, triangle_quiver, tri_table):
        eq1 = generate_loop_equation(triangle_quiver, tri_table, ZETA**2, "e1")
        eq2 = generate_loop_equation(triangle_quiver, tri_table, (ZETA**2).rotate(4), "e1")
        assert eq1.lhs == eq2.lhs and eq1.rhs == eq2.rhs

    def test_single_intersection_two_terms_per_pair(self, triangle_quiver, tri_table):
        # every plaquette meets the root exactly once: two rhs terms per
        # conjugate plaquette pair
        eq = generate_loop_equation(triangle_quiver, tri_table, ZETA, "e1")
        assert len(eq.rhs) == 2
        assert {t.multiplicity for t in eq.rhs} == {1, -1}

    def test_serialization_roundtrip(self, triangle_quiver, tri_table):
        eq = generate_loop_equation(triangle_quiver, tri_table, ZETA, "e1")
        d = eq.to_json_dict(tri_table)
        assert d["mode"] == "finite"
        assert d["rhs"][0]["coefficient"] == "1"
        assert "tr(" in eq.render(tri_table)


class TestFactorizeLargeN:
    def test_zeta_power_moments(self, triangle_quiver, tri_table):
        for n in range(1, 7):
            eq = generate_loop_equation(
                triangle_quiver, tri_table, ZETA**n, "e1", mode="large"
            )
            meq = factorize_large_N(eq)
            lhs = sorted((c, tuple(sorted((i, j)))) for c, i, j in meq.lhs)
            expected = {}
            for l in range(n):
                key = tuple(sorted((l, n - l)))
                expected[key] = expected.get(key, 0) + 1
            assert lhs == sorted((c, k) for k, c in expected.items())
            rhs = {k: m for m, _, k in meq.rhs}
            assert rhs == {n + 1: 1, n - 1: -1}

    def test_negative_power_moments(self, triangle_quiver, tri_table):
        n = 3
        eq = generate_loop_equation(
            triangle_quiver, tri_table, ZETA ** (-n), "e1", mode="large"
        )
        meq = factorize_large_N(eq)
        got = {tuple(sorted((i, j))): c for c, i, j in meq.lhs}
        expected: dict = {}
        for l in range(n):
            key = tuple(sorted((-l, -(n - l))))
            expected[key] = expected.get(key, 0) - 1
        assert got == expected
        rhs = {k: m for m, _, k in meq.rhs}
        assert rhs == {-(n - 1): 1, -(n + 1): -1}

    def test_symbolic_identity(self, triangle_quiver, tri_table):
        # substituting the exact moment table turns each relation into zero
        for n in list(range(1, 7)) + [-1, -2, -3]:
            eq = generate_loop_equation(
                triangle_quiver, tri_table, ZETA**n if n > 0 else ZETA**n, "e1", mode="large"
            )
            meq = factorize_large_N(eq)
            residual = meq.residual_polynomial(
                lambda k: qg.moment(abs(k)), lambda p: YXPoly.x()
            )
            assert residual.is_zero, f"n={n}: residual {residual}"

    def test_n_equals_one_reduces_to_m2(self, triangle_quiver, tri_table):
        # m0*m1 = x(m2 - m0)  =>  m2 = 1 + m1/x
        eq = generate_loop_equation(triangle_quiver, tri_table, ZETA, "e1", mode="large")
        meq = factorize_large_N(eq)
        m2_from_relation = (
            qg.moment(0) * qg.moment(1) * YXPoly.inv_x() + qg.moment(0)
        )
        assert m2_from_relation == qg.moment(2)
        residual = meq.residual_polynomial(
            lambda k: qg.moment(abs(k)), lambda p: YXPoly.x()
        )
        assert residual.is_zero

    def test_requires_large_mode(self, triangle_quiver, tri_table):
        eq = generate_loop_equation(triangle_quiver, tri_table, ZETA, "e1", mode="finite")
        with pytest.raises(ValueError, match="large-N"):
            factorize_large_N(eq)
