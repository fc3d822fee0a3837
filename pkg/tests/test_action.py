from fractions import Fraction

import numpy as np
import pytest

import quivergauge as qg
from quivergauge.action import ActionSpec, evaluate_action, expand_action, loop_trace

from conftest import random_unitary, triangle_network


def cyc(q, text):
    return qg.cyclic_canonical(q, qg.EdgeWord.from_string(text))


class TestExpandTriangle:
    def test_cubic_plaquettes(self, triangle_quiver):
        f = ActionSpec.from_list(["1/2", "1/3", "1/5", "1/7"])
        table = expand_action(triangle_quiver, f)
        zeta = cyc(triangle_quiver, "e1+ e2+ e3+")
        assert table.coupling(zeta) == 3 * Fraction(1, 7)
        assert table.coupling(zeta.reverse()) == 3 * Fraction(1, 7)
        assert set(table.entries) == {zeta, zeta.reverse()}
        # every vertex contributes f0*N, and each vertex has two
        # back-and-forth length-2 walks collapsing to the constant
        assert table.constant_coeff == 3 * Fraction(1, 2) + 6 * Fraction(1, 5)

    def test_no_length_one_contributions(self, triangle_quiver):
        table = expand_action(triangle_quiver, ActionSpec.from_list([0, 1]))
        assert table.entries == {}
        assert table.constant_coeff == 0

    def test_degree_zero(self, triangle_quiver):
        table = expand_action(triangle_quiver, ActionSpec.from_list([7]))
        assert table.entries == {}
        assert table.constant_coeff == 21


@pytest.fixture(scope="module")
def quartic_table(two_site_quiver):
    return expand_action(two_site_quiver, ActionSpec.from_list([0, 0, 0, 0, 1]))


class TestExpandTwoSite:
    def test_mixed_plaquette_coefficient(self, two_site_quiver, quartic_table):
        for signs in ("+ +", "+ -", "- +", "- -"):
            sv, sw = signs.split()
            w = cyc(two_site_quiver, f"ov{sv} e+ ow{sw} e-")
            assert quartic_table.coupling(w) == 4

    def test_self_loop_quartic(self, two_site_quiver, quartic_table):
        assert quartic_table.coupling(cyc(two_site_quiver, "ov+ ov+ ov+ ov+")) == 1
        assert quartic_table.coupling(cyc(two_site_quiver, "ow+ ow+ ow+ ow+")) == 1

    def test_self_loop_square_regrouping(self, two_site_quiver, quartic_table):
        # the quartic walks that stray and cancel add 4 on top of the 4 from
        # the square term of q(z) = z^4 + 4 z^2 + 1
        assert quartic_table.coupling(cyc(two_site_quiver, "ov+ ov+")) == 8
        assert quartic_table.coupling(cyc(two_site_quiver, "ow+ ow+")) == 8

    def test_matches_square_polynomial_regrouping(self, two_site_quiver, quartic_table):
        # independent oracle: expand q(phi_v) + q(phi_w) + 4 phi_v U phi_w U*
        # by brute-force sign expansion, with phi = U + U*
        from collections import Counter
        from itertools import product

        expected: Counter = Counter()
        const = 0
        for o in ("ov", "ow"):
            # Tr phi^4 and 4 Tr phi^2: signed self-loop words
            for power, weight in ((4, 1), (2, 4)):
                for signs in product((1, -1), repeat=power):
                    w = qg.EdgeWord(tuple((o, s) for s in signs))
                    c = qg.cyclic_canonical(two_site_quiver, w)
                    if c.is_empty:
                        const += weight
                    else:
                        expected[c] += weight
            const += 1  # the constant term of q
        for sv, sw in product((1, -1), repeat=2):
            w = qg.EdgeWord((("ov", sv), ("e", 1), ("ow", sw), ("e", -1)))
            expected[qg.cyclic_canonical(two_site_quiver, w)] += 4
        assert dict(expected) == {w: int(g) for w, g in quartic_table.entries.items()}
        assert quartic_table.constant_coeff == const


class TestTableProperties:
    def test_linearity_in_coefficients(self, triangle_quiver):
        f3 = ActionSpec.from_list([0, 0, 0, "1/7"])
        f4 = ActionSpec.from_list([0, 0, 0, 0, "2/3"])
        both = ActionSpec.from_list([0, 0, 0, "1/7", "2/3"])
        t3 = expand_action(triangle_quiver, f3)
        t4 = expand_action(triangle_quiver, f4)
        tb = expand_action(triangle_quiver, both)
        merged = dict(t3.entries)
        for w, g in t4.entries.items():
            merged[w] = merged.get(w, Fraction(0)) + g
        assert {w: g for w, g in merged.items() if g} == tb.entries
        assert tb.constant_coeff == t3.constant_coeff + t4.constant_coeff

    def test_relabeling_invariance(self):
        f = ActionSpec.from_list([0, 0, 0, 1])
        q1 = qg.build_quiver(
            ["v1", "v2", "v3"],
            [("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v3", "v1")],
        )
        q2 = qg.build_quiver(
            ["a", "b", "c"], [("x", "a", "b"), ("y", "b", "c"), ("z", "c", "a")]
        )
        t1 = expand_action(q1, f)
        t2 = expand_action(q2, f)
        rename = {"e1": "x", "e2": "y", "e3": "z"}
        mapped = {
            qg.cyclic_canonical(
                q2, qg.EdgeWord(tuple((rename[e], o) for e, o in w.steps))
            ): g
            for w, g in t1.entries.items()
        }
        assert mapped == t2.entries


class TestEvaluateAction:
    def test_identity_assignment(self, triangle_quiver):
        f = ActionSpec.from_list([0, 0, 0, "1/3"])
        table = expand_action(triangle_quiver, f)
        n = 4
        ident = {e: np.eye(n, dtype=complex) for e in triangle_quiver.edge_ids}
        expected = float(table.constant_coeff) * n + sum(
            float(g) * n for g in table.entries.values()
        )
        assert evaluate_action(table, ident) == pytest.approx(expected, abs=1e-12)

    def test_matches_dirac_eigentrace(self, triangle_quiver, rng):
        f = ActionSpec.from_list([0, 0, 0, 1])
        table = expand_action(triangle_quiver, f)
        net = triangle_network(triangle_quiver, 4)
        s = qg.sample_dirac(net, rng)
        d = qg.assemble_dirac(net, s)
        direct = float((np.linalg.eigvalsh(d) ** 3).sum())
        val = evaluate_action(table, s.unitaries)
        assert val == pytest.approx(direct, rel=1e-10)

    def test_imaginary_part_vanishes(self, triangle_quiver, rng):
        f = ActionSpec.from_list([0, "1/2", "1/3", "1/5"])
        table = expand_action(triangle_quiver, f)
        us = {e: random_unitary(rng, 5) for e in triangle_quiver.edge_ids}
        total = sum(
            complex(g) * loop_trace(us, w.steps, 5) for w, g in table.entries.items()
        )
        assert abs(total.imag) < 1e-12

    def test_non_unitary_rejected(self, triangle_quiver):
        table = expand_action(triangle_quiver, ActionSpec.from_list([0, 0, 0, 1]))
        bad = {e: np.eye(3, dtype=complex) for e in triangle_quiver.edge_ids}
        bad["e1"] = 2.0 * bad["e1"]
        with pytest.raises(ValueError, match="not unitary"):
            evaluate_action(table, bad)

    def test_missing_edge_rejected(self, triangle_quiver):
        table = expand_action(triangle_quiver, ActionSpec.from_list([0, 0, 0, 1]))
        with pytest.raises(ValueError, match="missing edges"):
            evaluate_action(table, {"e1": np.eye(3, dtype=complex)})
